//! Post-processing: reduce a candidate set to one counterfactual.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::CandidateSet;
use crate::metrics::{self, KnnIndex};
use crate::predictor::Predictor;
use crate::schema::{Dataset, Instance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterfactualResult {
    pub individual: Instance,
    pub counterfactual: Option<Instance>,
    /// Position of the chosen row in the candidate set.
    pub row_index: Option<usize>,
    pub n_valid: usize,
    /// Filled in by callers that time the pipeline.
    pub elapsed_seconds: f64,
}

fn valid_rows<'a>(cand: &'a CandidateSet, pred: &'a Predictor) -> impl Iterator<Item = usize> + 'a {
    (0..cand.len()).filter(move |&r| pred.is_positive(cand.predictions[r]))
}

fn result(cand: &CandidateSet, chosen: Option<usize>, n_valid: usize) -> CounterfactualResult {
    CounterfactualResult {
        individual: cand.individual.clone(),
        counterfactual: chosen.map(|r| cand.rows[r].clone()),
        row_index: chosen,
        n_valid,
        elapsed_seconds: 0.0,
    }
}

/// Keeps rows with `f > c`, then those with the smallest sparsity, and
/// returns the one with the smallest Gower distance. Ties go to the lowest
/// row index.
pub fn select_ideal(cand: &CandidateSet, ds: &Dataset, pred: &Predictor) -> CounterfactualResult {
    let x = &cand.individual;
    let mut n_valid = 0;
    let mut best: Option<(usize, f64, usize)> = None;
    for r in valid_rows(cand, pred) {
        n_valid += 1;
        let row = &cand.rows[r];
        let l0 = x.iter().zip(row.iter()).filter(|(a, b)| a != b).count();
        if best.is_some_and(|(b0, _, _)| l0 > b0) {
            continue;
        }
        let l1 = metrics::gower_unchecked(ds, x, row);
        let better = match best {
            None => true,
            Some((b0, b1, _)) => l0 < b0 || l1 < b1,
        };
        if better {
            best = Some((l0, l1, r));
        }
    }
    result(cand, best.map(|b| b.2), n_valid)
}

/// Weights of the linear scoring rule, in the order
/// (Gower, sparsity, feasibility, yNN, redundancy). They must be
/// non-negative and sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterWeights {
    pub gower: f64,
    pub sparsity: f64,
    pub feasibility: f64,
    pub ynn: f64,
    pub redundancy: f64,
}

/// yNN is the only higher-is-better term; it enters the cost with this sign
/// and the row with the smallest cost wins.
pub const YNN_ORIENTATION: f64 = -1.0;

impl FilterWeights {
    pub fn new(
        gower: f64,
        sparsity: f64,
        feasibility: f64,
        ynn: f64,
        redundancy: f64,
    ) -> Result<Self> {
        let w = FilterWeights {
            gower,
            sparsity,
            feasibility,
            ynn,
            redundancy,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn as_array(&self) -> [f64; 5] {
        [
            self.gower,
            self.sparsity,
            self.feasibility,
            self.ynn,
            self.redundancy,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.as_array();
        if w.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidConfig(format!(
                "weights {w:?} must be non-negative"
            )));
        }
        let sum: f64 = w.iter().sum();
        if libm::fabs(sum - 1.0) > 1e-9 {
            return Err(Error::InvalidConfig(format!("weights sum to {sum}, not 1")));
        }
        Ok(())
    }
}

/// Cost of one candidate under the weighted rule.
pub fn weighted_cost(
    w: &FilterWeights,
    idx: &KnnIndex,
    ds: &Dataset,
    pred: &Predictor,
    x: &[f64],
    e: &[f64],
) -> Result<f64> {
    let mut cost = 0.0;
    if w.gower > 0.0 {
        cost += w.gower * metrics::gower(ds, x, e)?;
    }
    if w.sparsity > 0.0 {
        cost += w.sparsity * metrics::sparsity(x, e)? as f64;
    }
    if w.feasibility > 0.0 {
        cost += w.feasibility * metrics::feasibility(idx, e)?;
    }
    if w.ynn > 0.0 {
        cost += YNN_ORIENTATION * w.ynn * metrics::ynn(idx, pred, e)?;
    }
    if w.redundancy > 0.0 {
        cost += w.redundancy * metrics::redundancy(pred, ds, x, e)? as f64;
    }
    Ok(cost)
}

/// Keeps valid rows and returns the one with the smallest weighted cost,
/// ties to the lowest row index.
pub fn select_weighted(
    cand: &CandidateSet,
    ds: &Dataset,
    pred: &Predictor,
    w: &FilterWeights,
    idx: &KnnIndex,
) -> Result<CounterfactualResult> {
    w.validate()?;
    let x = &cand.individual;
    let mut n_valid = 0;
    let mut best: Option<(f64, usize)> = None;
    for r in valid_rows(cand, pred) {
        n_valid += 1;
        let cost = weighted_cost(w, idx, ds, pred, x, &cand.rows[r])?;
        if best.is_none_or(|(b, _)| cost < b) {
            best = Some((cost, r));
        }
    }
    Ok(result(cand, best.map(|b| b.1), n_valid))
}

/// A valid candidate with the quantities used to compare candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidSample {
    pub row_index: usize,
    pub instance: Instance,
    pub sparsity: usize,
    pub gower: f64,
    pub feasibility: f64,
}

/// Every valid row of the candidate set with its sparsity, Gower distance
/// and feasibility.
pub fn valid_set(
    cand: &CandidateSet,
    ds: &Dataset,
    pred: &Predictor,
    idx: &KnnIndex,
) -> Result<Vec<ValidSample>> {
    let x = &cand.individual;
    valid_rows(cand, pred)
        .map(|r| {
            let e = &cand.rows[r];
            Ok(ValidSample {
                row_index: r,
                instance: e.clone(),
                sparsity: metrics::sparsity(x, e)?,
                gower: metrics::gower(ds, x, e)?,
                feasibility: metrics::feasibility(idx, e)?,
            })
        })
        .collect()
}
