//! Random fixtures and naive reference implementations shared by the
//! integration tests. The references re-derive everything from raw cells and
//! never call the functions they check.
#![allow(dead_code)]

use mcce_core::generator::CandidateSet;
use mcce_core::predictor::{Logistic, Predictor};
use mcce_core::{Dataset, FeatureKind, FeatureSchema, Instance, Schema};
use rand::Rng;

pub const LEVEL_NAMES: [&str; 4] = ["a", "b", "c", "d"];

/// Up to `max_p` features of random kinds, at least one mutable.
pub fn random_schema<R: Rng>(rng: &mut R, max_p: usize) -> Schema {
    let p = rng.random_range(1..=max_p);
    let mut features: Vec<FeatureSchema> = (0..p)
        .map(|j| {
            let name = format!("f{j}");
            let n_levels = rng.random_range(1..=4);
            let f = match rng.random_range(0..4) {
                0 => FeatureSchema::continuous(&name),
                1 => FeatureSchema::discrete(&name),
                2 => FeatureSchema::categorical(&name, &LEVEL_NAMES[..n_levels]),
                _ => FeatureSchema::ordinal(&name, &LEVEL_NAMES[..n_levels]),
            };
            if rng.random_bool(0.3) {
                f.fixed()
            } else {
                f
            }
        })
        .collect();
    if features.iter().all(|f| f.fixed) {
        features[0].fixed = false;
    }
    Schema::new(features).unwrap()
}

/// Values on a coarse grid so that equal cells and equal distances occur.
pub fn random_cell<R: Rng>(rng: &mut R, f: &FeatureSchema) -> f64 {
    match f.kind {
        FeatureKind::Continuous => rng.random_range(0..9) as f64 * 0.25 - 0.5,
        FeatureKind::Discrete => rng.random_range(0..5) as f64,
        _ => rng.random_range(0..f.levels.len()) as f64,
    }
}

pub fn random_row<R: Rng>(rng: &mut R, schema: &Schema) -> Vec<f64> {
    schema
        .features()
        .iter()
        .map(|f| random_cell(rng, f))
        .collect()
}

pub fn random_dataset<R: Rng>(rng: &mut R, schema: &Schema, n: usize) -> Dataset {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| random_row(rng, schema)).collect();
    Dataset::from_rows(schema.clone(), &rows).unwrap()
}

pub fn random_logistic<R: Rng>(rng: &mut R, width: usize) -> Predictor {
    let weights = (0..width).map(|_| rng.random_range(-3.0..3.0)).collect();
    let bias = rng.random_range(-1.0..1.0);
    Predictor::new(Logistic { weights, bias }, 0.5).unwrap()
}

fn column_min_max(ds: &Dataset, j: usize) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..ds.n_rows() {
        let v = ds.row(i)[j];
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Min-max for numbers, a single 0/1 for binary levels, one-hot otherwise.
pub fn oracle_encode(ds: &Dataset, x: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for (j, f) in ds.schema().features().iter().enumerate() {
        match f.kind {
            FeatureKind::Continuous | FeatureKind::Discrete => {
                let (lo, hi) = column_min_max(ds, j);
                out.push(if hi > lo {
                    (x[j] - lo) / (hi - lo)
                } else {
                    0.0
                });
            }
            _ if f.levels.len() <= 2 => out.push(x[j]),
            _ => {
                for l in 0..f.levels.len() {
                    out.push(if x[j] as usize == l { 1.0 } else { 0.0 });
                }
            }
        }
    }
    out
}

pub fn oracle_sparsity(x: &[f64], e: &[f64]) -> usize {
    let mut n = 0;
    for j in 0..x.len() {
        if x[j] != e[j] {
            n += 1;
        }
    }
    n
}

pub fn oracle_gower(ds: &Dataset, x: &[f64], e: &[f64]) -> f64 {
    let p = x.len();
    let mut total = 0.0;
    for (j, f) in ds.schema().features().iter().enumerate() {
        let scaled = f.kind == FeatureKind::Continuous
            || (f.kind == FeatureKind::Discrete && ds.discrete_as_numeric());
        let (lo, hi) = column_min_max(ds, j);
        total += if scaled && hi > lo {
            (e[j] - x[j]).abs() / (hi - lo)
        } else if e[j] == x[j] {
            0.0
        } else {
            1.0
        };
    }
    total / p as f64
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Sorts every training row by distance (index breaks ties) and keeps `k`.
pub fn oracle_knn(ds: &Dataset, e: &[f64], k: usize) -> Vec<(usize, f64)> {
    let q = oracle_encode(ds, e);
    let mut all: Vec<(usize, f64)> = (0..ds.n_rows())
        .map(|i| (i, euclid(&oracle_encode(ds, &ds.row(i)), &q)))
        .collect();
    all.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

fn oracle_class(ds: &Dataset, pred: &Predictor, x: &[f64]) -> f64 {
    if pred.score_encoded(&oracle_encode(ds, x)) > pred.cutoff() {
        1.0
    } else {
        0.0
    }
}

pub fn oracle_ynn(ds: &Dataset, pred: &Predictor, e: &[f64], k: usize) -> f64 {
    let fe = oracle_class(ds, pred, e);
    let nn = oracle_knn(ds, e, k);
    let mut s = 0.0;
    for (i, _) in &nn {
        s += (fe - oracle_class(ds, pred, &ds.row(*i))).abs();
    }
    1.0 - s / k as f64
}

pub fn oracle_feasibility(ds: &Dataset, e: &[f64], k: usize) -> f64 {
    oracle_knn(ds, e, k).iter().map(|(_, d)| d / k as f64).sum()
}

pub fn oracle_redundancy(ds: &Dataset, pred: &Predictor, x: &[f64], e: &[f64]) -> usize {
    (0..x.len())
        .filter(|&j| x[j] != e[j])
        .filter(|&j| {
            let mut probe = e.to_vec();
            probe[j] = x[j];
            oracle_class(ds, pred, &probe) == 1.0
        })
        .count()
}

pub fn oracle_violation(schema: &Schema, x: &[f64], e: &[f64]) -> usize {
    schema
        .features()
        .iter()
        .enumerate()
        .filter(|(j, f)| f.fixed && x[*j] != e[*j])
        .count()
}

pub fn oracle_diversity(ds: &Dataset, es: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for i in 0..es.len() {
        for j in 0..es.len() {
            if i != j {
                total += oracle_gower(ds, &es[i], &es[j]);
            }
        }
    }
    total
}

/// Three separate passes: keep valid rows, then minimum sparsity, then
/// minimum Gower; the first survivor wins.
pub fn brute_force_select(cand: &CandidateSet, ds: &Dataset, pred: &Predictor) -> Option<usize> {
    let x = cand.individual.values();
    let valid: Vec<usize> = (0..cand.len())
        .filter(|&r| oracle_class(ds, pred, &cand.rows[r]) == 1.0)
        .collect();
    let min_l0 = valid
        .iter()
        .map(|&r| oracle_sparsity(x, &cand.rows[r]))
        .min()?;
    let sparse: Vec<usize> = valid
        .into_iter()
        .filter(|&r| oracle_sparsity(x, &cand.rows[r]) == min_l0)
        .collect();
    let min_l1 = sparse
        .iter()
        .map(|&r| oracle_gower(ds, x, &cand.rows[r]))
        .fold(f64::INFINITY, f64::min);
    sparse
        .into_iter()
        .find(|&r| oracle_gower(ds, x, &cand.rows[r]) == min_l1)
}

/// A candidate set of random rows around `x` (only mutable cells redrawn
/// unless `touch_fixed`), with predictions from `pred`.
pub fn random_candidates<R: Rng>(
    rng: &mut R,
    ds: &Dataset,
    pred: &Predictor,
    x: &Instance,
    k: usize,
    touch_fixed: bool,
) -> CandidateSet {
    let schema = ds.schema();
    let rows: Vec<Instance> = (0..k)
        .map(|_| {
            let mut v = x.values().to_vec();
            for (j, f) in schema.features().iter().enumerate() {
                if (touch_fixed || !f.fixed) && rng.random_bool(0.5) {
                    v[j] = random_cell(rng, f);
                }
            }
            Instance::new(v)
        })
        .collect();
    let predictions = rows.iter().map(|r| pred.predict(ds, r).unwrap()).collect();
    CandidateSet {
        individual: x.clone(),
        rows,
        predictions,
    }
}
