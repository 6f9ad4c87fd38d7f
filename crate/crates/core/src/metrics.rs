//! Counterfactual quality metrics.
//!
//! Distances to the training data (`yNN`, feasibility) are Euclidean on the
//! normalized encoding and use an exact k-nearest-neighbour scan.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predictor::Predictor;
use crate::schema::{Dataset, Encoder, FeatureKind, Schema};

pub const DEFAULT_NEIGHBORS: usize = 5;

/// Exact kNN over the normalized training rows.
#[derive(Debug, Clone)]
pub struct KnnIndex {
    encoder: Encoder,
    width: usize,
    data: Vec<f64>,
    k: usize,
}

impl KnnIndex {
    pub fn build(ds: &Dataset, k: usize) -> Result<Self> {
        if k == 0 || k > ds.n_rows() {
            return Err(Error::InvalidConfig(alloc::format!(
                "k = {k} must lie in 1..={}",
                ds.n_rows()
            )));
        }
        let encoder = ds.encoder();
        let width = encoder.width();
        let mut data = Vec::with_capacity(width * ds.n_rows());
        let mut buf = Vec::with_capacity(width);
        for row in ds.rows() {
            encoder.normalize_into(&row, &mut buf)?;
            data.extend_from_slice(&buf);
        }
        Ok(KnnIndex {
            encoder,
            width,
            data,
            k,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    pub fn encoded_row(&self, i: usize) -> &[f64] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    /// The `k` nearest training rows to an encoded query as
    /// `(row index, Euclidean distance)`, closest first. Equal distances
    /// are ordered by row index.
    pub fn nearest(&self, query: &[f64]) -> Vec<(usize, f64)> {
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(self.k + 1);
        for (i, row) in self.data.chunks_exact(self.width).enumerate() {
            let d2: f64 = row.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
            if best.len() == self.k && d2 >= best[self.k - 1].0 {
                continue;
            }
            // rows arrive in index order, so inserting after equal distances
            // keeps the index tie-break
            let at = best.partition_point(|&(d, _)| d <= d2);
            best.insert(at, (d2, i));
            best.truncate(self.k);
        }
        best.into_iter()
            .map(|(d2, i)| (i, libm::sqrt(d2)))
            .collect()
    }
}

fn check_pair(schema: &Schema, x: &[f64], e: &[f64]) -> Result<()> {
    for v in [x, e] {
        if v.len() != schema.len() {
            return Err(Error::ArityMismatch {
                expected: schema.len(),
                got: v.len(),
            });
        }
    }
    Ok(())
}

/// Number of features that differ between `x` and `e` (L0).
pub fn sparsity(x: &[f64], e: &[f64]) -> Result<usize> {
    if x.len() != e.len() {
        return Err(Error::ArityMismatch {
            expected: x.len(),
            got: e.len(),
        });
    }
    Ok(changed(x, e))
}

fn changed(x: &[f64], e: &[f64]) -> usize {
    x.iter().zip(e).filter(|(a, b)| a != b).count()
}

/// Gower distance (L1): mean over features of `|e - x| / range` for
/// continuous features and `1{e != x}` for the rest. Discrete features use
/// the indicator unless the dataset opts into numeric treatment. A zero
/// range contributes the indicator.
pub fn gower(ds: &Dataset, x: &[f64], e: &[f64]) -> Result<f64> {
    check_pair(ds.schema(), x, e)?;
    Ok(gower_unchecked(ds, x, e))
}

pub(crate) fn gower_unchecked(ds: &Dataset, x: &[f64], e: &[f64]) -> f64 {
    let schema = ds.schema();
    let numeric_discrete = ds.discrete_as_numeric();
    let total: f64 = (0..schema.len())
        .map(|j| {
            let kind = schema.feature(j).kind;
            let scaled = kind == FeatureKind::Continuous
                || (kind == FeatureKind::Discrete && numeric_discrete);
            match ds.range(j) {
                Some(r) if scaled && r.width() > 0.0 => libm::fabs(e[j] - x[j]) / r.width(),
                _ => {
                    if e[j] != x[j] {
                        1.0
                    } else {
                        0.0
                    }
                }
            }
        })
        .sum();
    total / schema.len() as f64
}

/// `1 - mean |f_b(e) - f_b(x_j)|` over the k nearest training rows `x_j`.
pub fn ynn(idx: &KnnIndex, pred: &Predictor, e: &[f64]) -> Result<f64> {
    let enc = idx.encoder.normalize(e)?;
    Ok(ynn_encoded(idx, pred, &enc))
}

pub(crate) fn ynn_encoded(idx: &KnnIndex, pred: &Predictor, enc: &[f64]) -> f64 {
    let class_e = pred.is_positive(pred.score_encoded(enc));
    let neighbors = idx.nearest(enc);
    let disagree = neighbors
        .iter()
        .filter(|(i, _)| pred.is_positive(pred.score_encoded(idx.encoded_row(*i))) != class_e)
        .count();
    1.0 - disagree as f64 / neighbors.len() as f64
}

/// Mean Euclidean distance from `e` to its k nearest training rows, with
/// equal weights `1/k`.
pub fn feasibility(idx: &KnnIndex, e: &[f64]) -> Result<f64> {
    let enc = idx.encoder.normalize(e)?;
    Ok(feasibility_encoded(idx, &enc))
}

pub(crate) fn feasibility_encoded(idx: &KnnIndex, enc: &[f64]) -> f64 {
    let neighbors = idx.nearest(enc);
    neighbors.iter().map(|(_, d)| d).sum::<f64>() / neighbors.len() as f64
}

/// Number of changed features that could individually be reverted to the
/// original value while `e` stays valid.
pub fn redundancy(pred: &Predictor, ds: &Dataset, x: &[f64], e: &[f64]) -> Result<usize> {
    check_pair(ds.schema(), x, e)?;
    let mut probe = e.to_vec();
    let mut count = 0;
    for j in 0..x.len() {
        if x[j] == e[j] {
            continue;
        }
        probe[j] = x[j];
        if pred.is_valid(ds, &probe)? {
            count += 1;
        }
        probe[j] = e[j];
    }
    Ok(count)
}

/// Number of fixed features whose value changed.
pub fn violation(schema: &Schema, x: &[f64], e: &[f64]) -> Result<usize> {
    check_pair(schema, x, e)?;
    Ok(schema
        .fixed_columns()
        .into_iter()
        .filter(|&j| x[j] != e[j])
        .count())
}

/// Sum of Gower distances over ordered pairs `(i, j)`, `i != j`.
pub fn diversity(ds: &Dataset, es: &[&[f64]]) -> Result<f64> {
    for e in es {
        if e.len() != ds.n_cols() {
            return Err(Error::ArityMismatch {
                expected: ds.n_cols(),
                got: e.len(),
            });
        }
    }
    let mut total = 0.0;
    for (j, a) in es.iter().enumerate() {
        for (i, b) in es.iter().enumerate() {
            if i != j {
                total += gower_unchecked(ds, b, a);
            }
        }
    }
    Ok(total)
}

/// Metrics for one test individual. Distance-type fields are `None` when no
/// counterfactual was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndividualMetrics {
    pub l0: Option<usize>,
    pub l1: Option<f64>,
    pub ynn: Option<f64>,
    pub feasibility: Option<f64>,
    pub redundancy: Option<usize>,
    pub violation: Option<usize>,
    pub success: bool,
    pub time_seconds: f64,
}

impl IndividualMetrics {
    pub fn missing(time_seconds: f64) -> Self {
        IndividualMetrics {
            l0: None,
            l1: None,
            ynn: None,
            feasibility: None,
            redundancy: None,
            violation: None,
            success: false,
            time_seconds,
        }
    }
}

/// Computes every metric for `x` and its counterfactual `e` (if any).
pub fn evaluate(
    idx: &KnnIndex,
    ds: &Dataset,
    pred: &Predictor,
    x: &[f64],
    e: Option<&[f64]>,
) -> Result<IndividualMetrics> {
    let Some(e) = e else {
        return Ok(IndividualMetrics::missing(0.0));
    };
    check_pair(ds.schema(), x, e)?;
    let enc = idx.encoder.normalize(e)?;
    Ok(IndividualMetrics {
        l0: Some(changed(x, e)),
        l1: Some(gower_unchecked(ds, x, e)),
        ynn: Some(ynn_encoded(idx, pred, &enc)),
        feasibility: Some(feasibility_encoded(idx, &enc)),
        redundancy: Some(redundancy(pred, ds, x, e)?),
        violation: Some(violation(ds.schema(), x, e)?),
        success: pred.is_positive(pred.score_encoded(&enc)),
        time_seconds: 0.0,
    })
}

/// Column means over individuals, laid out like a results table row.
/// Distance-type means are taken over individuals with a counterfactual;
/// success and time over all individuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub n_individuals: usize,
    pub n_found: usize,
    pub l0: f64,
    pub l1: f64,
    pub ynn: f64,
    pub feasibility: f64,
    pub redundancy: f64,
    pub violation: f64,
    pub success: f64,
    pub time_seconds: f64,
}

impl MetricsSummary {
    pub fn from_records(records: &[IndividualMetrics]) -> Self {
        fn mean(values: impl Iterator<Item = f64>) -> f64 {
            let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
            if n == 0 {
                f64::NAN
            } else {
                sum / n as f64
            }
        }
        MetricsSummary {
            n_individuals: records.len(),
            n_found: records.iter().filter(|r| r.l0.is_some()).count(),
            l0: mean(records.iter().filter_map(|r| r.l0.map(|v| v as f64))),
            l1: mean(records.iter().filter_map(|r| r.l1)),
            ynn: mean(records.iter().filter_map(|r| r.ynn)),
            feasibility: mean(records.iter().filter_map(|r| r.feasibility)),
            redundancy: mean(
                records
                    .iter()
                    .filter_map(|r| r.redundancy.map(|v| v as f64)),
            ),
            violation: mean(records.iter().filter_map(|r| r.violation.map(|v| v as f64))),
            success: mean(records.iter().map(|r| if r.success { 1.0 } else { 0.0 })),
            time_seconds: mean(records.iter().map(|r| r.time_seconds)),
        }
    }
}

/// Per-individual records plus their summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub records: Vec<IndividualMetrics>,
}

impl MetricsReport {
    pub fn summary(&self) -> MetricsSummary {
        MetricsSummary::from_records(&self.records)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictor::Logistic;
    use crate::schema::FeatureSchema;
    use alloc::vec;

    fn mixed() -> Dataset {
        let schema = Schema::new(vec![
            FeatureSchema::continuous("a"),
            FeatureSchema::categorical("c", &["x", "y"]),
        ])
        .unwrap();
        Dataset::from_rows(schema, &[vec![0.0, 0.0], vec![10.0, 1.0]]).unwrap()
    }

    #[test]
    fn sparsity_cases() {
        assert_eq!(sparsity(&[1.0, 2.0, 0.0], &[1.0, 2.0, 0.0]).unwrap(), 0);
        assert_eq!(sparsity(&[1.0, 2.0, 0.0], &[1.0, 3.0, 1.0]).unwrap(), 2);
        assert_eq!(sparsity(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 2);
        assert!(sparsity(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn gower_cases() {
        let ds = mixed();
        assert_eq!(gower(&ds, &[3.0, 1.0], &[3.0, 1.0]).unwrap(), 0.0);
        assert_eq!(gower(&ds, &[0.0, 0.0], &[5.0, 0.0]).unwrap(), 0.25);
        let one = Dataset::from_rows(
            Schema::new(vec![FeatureSchema::categorical("c", &["x", "y"])]).unwrap(),
            &[vec![0.0]],
        )
        .unwrap();
        assert_eq!(gower(&one, &[0.0], &[1.0]).unwrap(), 1.0);
    }

    #[test]
    fn gower_zero_range_falls_back_to_indicator() {
        let schema = Schema::new(vec![FeatureSchema::continuous("a")]).unwrap();
        let ds = Dataset::from_rows(schema, &[vec![2.0], vec![2.0]]).unwrap();
        assert_eq!(gower(&ds, &[2.0], &[3.0]).unwrap(), 1.0);
        assert_eq!(gower(&ds, &[2.0], &[2.0]).unwrap(), 0.0);
    }

    #[test]
    fn discrete_switch() {
        let schema = Schema::new(vec![FeatureSchema::discrete("n")]).unwrap();
        let ds = Dataset::from_rows(schema, &[vec![0.0], vec![4.0]]).unwrap();
        assert_eq!(gower(&ds, &[0.0], &[1.0]).unwrap(), 1.0);
        let ds = ds.with_discrete_as_numeric(true);
        assert_eq!(gower(&ds, &[0.0], &[1.0]).unwrap(), 0.25);
    }

    fn line(n: usize) -> Dataset {
        let schema = Schema::new(vec![FeatureSchema::continuous("a")]).unwrap();
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
        Dataset::from_rows(schema, &rows).unwrap()
    }

    #[test]
    fn nearest_breaks_ties_by_index() {
        let ds = line(5);
        let idx = KnnIndex::build(&ds, 2).unwrap();
        // query halfway between rows 1 and 2, equidistant
        let nn = idx.nearest(&[0.375]);
        assert_eq!(nn.iter().map(|n| n.0).collect::<Vec<_>>(), vec![1, 2]);
        assert!(KnnIndex::build(&ds, 6).is_err());
        assert!(KnnIndex::build(&ds, 0).is_err());
    }

    #[test]
    fn feasibility_of_duplicated_row_is_zero() {
        let schema = Schema::new(vec![FeatureSchema::continuous("a")]).unwrap();
        let rows: Vec<Vec<f64>> = (0..8)
            .map(|i| vec![if i < 5 { 1.0 } else { i as f64 }])
            .collect();
        let ds = Dataset::from_rows(schema, &rows).unwrap();
        let idx = KnnIndex::build(&ds, 5).unwrap();
        assert_eq!(feasibility(&idx, &[1.0]).unwrap(), 0.0);
    }

    #[test]
    fn feasibility_single_neighbor() {
        let schema = Schema::new(vec![
            FeatureSchema::continuous("a"),
            FeatureSchema::continuous("b"),
        ])
        .unwrap();
        let ds = Dataset::from_rows(schema, &[vec![0.0, 0.0], vec![4.0, 4.0]]).unwrap();
        let idx = KnnIndex::build(&ds, 1).unwrap();
        // normalized (0.75, 1.0) vs nearest (1, 1): distance 0.25
        assert!((feasibility(&idx, &[3.0, 4.0]).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn ynn_all_agree() {
        let ds = line(10);
        let idx = KnnIndex::build(&ds, 10).unwrap();
        let pred = Predictor::new(|_: &[f64]| 0.9, 0.5).unwrap();
        assert_eq!(ynn(&idx, &pred, &[4.0]).unwrap(), 1.0);
    }

    #[test]
    fn redundancy_cases() {
        let schema = Schema::new(vec![
            FeatureSchema::continuous("a"),
            FeatureSchema::continuous("b"),
        ])
        .unwrap();
        let ds = Dataset::from_rows(schema, &[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        // depends on `a` only
        let pred = Predictor::new(
            Logistic {
                weights: vec![10.0, 0.0],
                bias: -5.0,
            },
            0.5,
        )
        .unwrap();
        let x = [0.0, 0.0];
        assert_eq!(redundancy(&pred, &ds, &x, &[1.0, 0.0]).unwrap(), 0);
        assert_eq!(redundancy(&pred, &ds, &x, &[1.0, 1.0]).unwrap(), 1);
        assert_eq!(redundancy(&pred, &ds, &x, &x).unwrap(), 0);
    }

    #[test]
    fn violation_cases() {
        let schema = Schema::new(vec![
            FeatureSchema::continuous("age").fixed(),
            FeatureSchema::continuous("income"),
        ])
        .unwrap();
        assert_eq!(violation(&schema, &[40.0, 1.0], &[41.0, 2.0]).unwrap(), 1);
        assert_eq!(violation(&schema, &[40.0, 1.0], &[40.0, 2.0]).unwrap(), 0);
        let free = Schema::new(vec![FeatureSchema::continuous("income")]).unwrap();
        assert_eq!(violation(&free, &[1.0], &[2.0]).unwrap(), 0);
    }

    #[test]
    fn diversity_cases() {
        let ds = mixed();
        assert_eq!(diversity(&ds, &[&[1.0, 0.0]]).unwrap(), 0.0);
        assert_eq!(diversity(&ds, &[&[1.0, 0.0], &[1.0, 0.0]]).unwrap(), 0.0);
        // one pair at Gower 0.25 counted in both orders
        assert_eq!(diversity(&ds, &[&[0.0, 0.0], &[5.0, 0.0]]).unwrap(), 0.5);
    }

    #[test]
    fn summary_excludes_missing_from_distances() {
        let found = IndividualMetrics {
            l0: Some(2),
            l1: Some(0.2),
            ynn: Some(1.0),
            feasibility: Some(0.1),
            redundancy: Some(0),
            violation: Some(0),
            success: true,
            time_seconds: 1.0,
        };
        let s = MetricsSummary::from_records(&[found, IndividualMetrics::missing(3.0)]);
        assert_eq!(s.n_individuals, 2);
        assert_eq!(s.n_found, 1);
        assert_eq!(s.l0, 2.0);
        assert_eq!(s.success, 0.5);
        assert_eq!(s.time_seconds, 2.0);
    }
}
