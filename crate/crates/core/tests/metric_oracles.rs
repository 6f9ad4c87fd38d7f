mod common;

use common::*;
use mcce_core::metrics::{self, KnnIndex};
use mcce_core::predictor::{Logistic, Predictor};
use mcce_core::{Dataset, FeatureSchema, Schema};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;

#[test]
fn metrics_match_naive_references() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        let schema = random_schema(&mut rng, 5);
        let n = rng.random_range(5..=20);
        let ds = random_dataset(&mut rng, &schema, n).with_discrete_as_numeric(case % 3 == 0);
        let pred = random_logistic(&mut rng, schema.encoded_width());
        let k = rng.random_range(1..=5.min(n));
        let idx = KnnIndex::build(&ds, k).unwrap();
        let x = random_row(&mut rng, &schema);
        let e = random_row(&mut rng, &schema);

        assert_eq!(
            ds.normalize(&e).unwrap(),
            oracle_encode(&ds, &e),
            "case {case}"
        );
        assert_eq!(
            metrics::sparsity(&x, &e).unwrap(),
            oracle_sparsity(&x, &e),
            "case {case}"
        );
        let g = metrics::gower(&ds, &x, &e).unwrap();
        assert!((g - oracle_gower(&ds, &x, &e)).abs() < TOL, "case {case}");
        assert!(
            (metrics::ynn(&idx, &pred, &e).unwrap() - oracle_ynn(&ds, &pred, &e, k)).abs() < TOL
        );
        assert!(
            (metrics::feasibility(&idx, &e).unwrap() - oracle_feasibility(&ds, &e, k)).abs() < TOL
        );
        let nn = idx.nearest(&ds.normalize(&e).unwrap());
        let want = oracle_knn(&ds, &e, k);
        assert_eq!(
            nn.iter().map(|p| p.0).collect::<Vec<_>>(),
            want.iter().map(|p| p.0).collect::<Vec<_>>()
        );
        assert_eq!(
            metrics::redundancy(&pred, &ds, &x, &e).unwrap(),
            oracle_redundancy(&ds, &pred, &x, &e),
            "case {case}"
        );
        assert_eq!(
            metrics::violation(&schema, &x, &e).unwrap(),
            oracle_violation(&schema, &x, &e)
        );
        let j = rng.random_range(1..=4);
        let es: Vec<Vec<f64>> = (0..j).map(|_| random_row(&mut rng, &schema)).collect();
        let refs: Vec<&[f64]> = es.iter().map(|v| v.as_slice()).collect();
        assert!((metrics::diversity(&ds, &refs).unwrap() - oracle_diversity(&ds, &es)).abs() < TOL);
    }
}

#[test]
fn gower_is_symmetric_and_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let schema = random_schema(&mut rng, 6);
        let ds = random_dataset(&mut rng, &schema, 15);
        let x = ds.row(rng.random_range(0..15));
        let e = ds.row(rng.random_range(0..15));
        let g = metrics::gower(&ds, &x, &e).unwrap();
        assert_eq!(g, metrics::gower(&ds, &e, &x).unwrap());
        assert_eq!(metrics::gower(&ds, &x, &x).unwrap(), 0.0);
        assert!((0.0..=1.0).contains(&g));
        assert_eq!(metrics::sparsity(&x, &e).unwrap() == 0, x == e);
    }
}

#[test]
fn l1_on_binary_encoding_is_p_times_gower() {
    // all features continuous or binary: sum of |encoded differences|
    // equals p times the Gower distance
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..100 {
        let p = rng.random_range(1..6);
        let features: Vec<FeatureSchema> = (0..p)
            .map(|j| {
                if rng.random_bool(0.5) {
                    FeatureSchema::continuous(&format!("c{j}"))
                } else {
                    FeatureSchema::categorical(&format!("b{j}"), &["no", "yes"])
                }
            })
            .collect();
        let schema = Schema::new(features).unwrap();
        let ds = random_dataset(&mut rng, &schema, 12);
        let x = random_row(&mut rng, &schema);
        let e = random_row(&mut rng, &schema);
        let (ex, ee) = (ds.normalize(&x).unwrap(), ds.normalize(&e).unwrap());
        let l1: f64 = ex.iter().zip(&ee).map(|(a, b)| (a - b).abs()).sum();
        let g = metrics::gower(&ds, &x, &e).unwrap();
        assert!((l1 - p as f64 * g).abs() < 1e-12, "{l1} vs {p} * {g}");
    }
}

fn plane() -> (Dataset, Predictor) {
    let schema = Schema::new(vec![
        FeatureSchema::continuous("u"),
        FeatureSchema::continuous("v"),
    ])
    .unwrap();
    // class 1 to the right of u = 0.5 on the unit square
    let rows = vec![
        vec![0.0, 0.0],
        vec![1.0, 1.0],
        vec![0.40, 0.50],
        vec![0.45, 0.45],
        vec![0.45, 0.55],
        vec![0.55, 0.45],
        vec![0.55, 0.55],
        vec![0.95, 0.90],
        vec![0.90, 0.95],
        vec![0.92, 0.92],
        vec![0.88, 0.88],
        vec![0.95, 0.95],
    ];
    let ds = Dataset::from_rows(schema, &rows).unwrap();
    let pred = Predictor::new(
        Logistic {
            weights: vec![40.0, 0.0],
            bias: -20.0,
        },
        0.5,
    )
    .unwrap();
    (ds, pred)
}

#[test]
fn ynn_near_the_boundary_is_two_fifths() {
    let (ds, pred) = plane();
    let idx = KnnIndex::build(&ds, 5).unwrap();
    let e = [0.51, 0.5];
    let nn: Vec<usize> = idx
        .nearest(&ds.normalize(&e).unwrap())
        .iter()
        .map(|p| p.0)
        .collect();
    let mut sorted = nn.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, vec![2, 3, 4, 5, 6]);
    assert_eq!(metrics::ynn(&idx, &pred, &e).unwrap(), 2.0 / 5.0);
}

#[test]
fn ynn_far_from_the_boundary_is_one() {
    let (ds, pred) = plane();
    let idx = KnnIndex::build(&ds, 5).unwrap();
    assert_eq!(metrics::ynn(&idx, &pred, &[0.93, 0.93]).unwrap(), 1.0);
}

#[test]
fn ynn_with_k_equal_to_n_and_one_class() {
    let (ds, _) = plane();
    let everyone_positive = Predictor::new(|_: &[f64]| 0.9, 0.5).unwrap();
    let idx = KnnIndex::build(&ds, ds.n_rows()).unwrap();
    assert_eq!(
        metrics::ynn(&idx, &everyone_positive, &[0.3, 0.3]).unwrap(),
        1.0
    );
}

#[test]
fn feasibility_of_a_duplicated_row_is_zero() {
    let schema = Schema::new(vec![
        FeatureSchema::continuous("u"),
        FeatureSchema::discrete("n"),
    ])
    .unwrap();
    let mut rows = vec![vec![0.3, 2.0]; 5];
    rows.push(vec![1.0, 0.0]);
    rows.push(vec![0.0, 4.0]);
    let ds = Dataset::from_rows(schema, &rows).unwrap();
    let idx = KnnIndex::build(&ds, 5).unwrap();
    assert_eq!(metrics::feasibility(&idx, &[0.3, 2.0]).unwrap(), 0.0);
}

#[test]
fn redundancy_with_an_ignored_feature() {
    let schema = Schema::new(vec![
        FeatureSchema::continuous("u"),
        FeatureSchema::continuous("w"),
    ])
    .unwrap();
    let ds = Dataset::from_rows(schema, &[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
    let pred = Predictor::new(
        Logistic {
            weights: vec![10.0, 0.0],
            bias: -5.0,
        },
        0.5,
    )
    .unwrap();
    assert_eq!(
        metrics::redundancy(&pred, &ds, &[0.2, 0.2], &[0.9, 0.9]).unwrap(),
        1
    );
    assert_eq!(
        metrics::redundancy(&pred, &ds, &[0.2, 0.2], &[0.9, 0.2]).unwrap(),
        0
    );
    assert_eq!(
        metrics::redundancy(&pred, &ds, &[0.2, 0.2], &[0.2, 0.2]).unwrap(),
        0
    );
}
