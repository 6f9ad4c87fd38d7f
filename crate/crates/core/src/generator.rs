//! Generation step: a chain of conditional inference trees approximating
//! `p(mutable | fixed)`, and Monte Carlo sampling of candidate sets from it.

use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ctree::{CTreeConfig, CTreeModel};
use crate::error::{Error, Result};
use crate::predictor::Predictor;
use crate::schema::{Dataset, Instance};

/// One tree per mutable feature. Tree `t` models `feature_order[t]` given
/// all fixed columns and `feature_order[..t]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainModel {
    pub feature_order: Vec<usize>,
    pub trees: Vec<CTreeModel>,
}

/// Fits the chain on all rows of `ds`. `order` defaults to the mutable
/// columns in schema order.
pub fn fit_chain(ds: &Dataset, cfg: &CTreeConfig, order: Option<&[usize]>) -> Result<ChainModel> {
    let rows: Vec<usize> = (0..ds.n_rows()).collect();
    fit_chain_rows(ds, &rows, cfg, order)
}

/// Fits the chain on a subset of the rows of `ds`.
pub fn fit_chain_rows(
    ds: &Dataset,
    rows: &[usize],
    cfg: &CTreeConfig,
    order: Option<&[usize]>,
) -> Result<ChainModel> {
    let schema = ds.schema();
    let mutable = schema.mutable_columns();
    if mutable.is_empty() {
        return Err(Error::NothingToExplain);
    }
    if rows.is_empty() {
        return Err(Error::NoRows);
    }
    let feature_order = match order {
        None => mutable,
        Some(order) => {
            let mut sorted = order.to_vec();
            sorted.sort_unstable();
            if sorted != mutable {
                return Err(Error::InvalidConfig(format!(
                    "feature order {order:?} is not a permutation of the mutable columns {mutable:?}"
                )));
            }
            order.to_vec()
        }
    };
    let mut conditioners = schema.fixed_columns();
    let mut trees = Vec::with_capacity(feature_order.len());
    for &column in &feature_order {
        trees.push(CTreeModel::fit_rows(ds, rows, column, &conditioners, cfg)?);
        conditioners.push(column);
    }
    Ok(ChainModel {
        feature_order,
        trees,
    })
}

/// The candidate set `D_i`: rows sharing the individual's fixed values,
/// with their predicted probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub individual: Instance,
    pub rows: Vec<Instance>,
    pub predictions: Vec<f64>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The first `k` rows as a new set; the sampler fills rows
    /// independently so prefixes are smaller draws of the same process.
    pub fn truncated(&self, k: usize) -> CandidateSet {
        let k = k.min(self.len());
        CandidateSet {
            individual: self.individual.clone(),
            rows: self.rows[..k].to_vec(),
            predictions: self.predictions[..k].to_vec(),
        }
    }

    fn with_predictions(
        individual: Instance,
        rows: Vec<Instance>,
        ds: &Dataset,
        pred: &Predictor,
    ) -> Result<Self> {
        let mut buf = Vec::with_capacity(ds.schema().encoded_width());
        let mut predictions = Vec::with_capacity(rows.len());
        for row in &rows {
            ds.normalize_into(row, &mut buf)?;
            predictions.push(pred.score_encoded(&buf));
        }
        Ok(CandidateSet {
            individual,
            rows,
            predictions,
        })
    }
}

/// Samples `k` rows for `individual`: fixed cells are copied, then each
/// mutable column is filled in chain order by routing the partially built
/// row through its tree and drawing from the reached leaf.
pub fn generate(
    chain: &ChainModel,
    ds: &Dataset,
    pred: &Predictor,
    individual: &Instance,
    k: usize,
    seed: u64,
) -> Result<CandidateSet> {
    if k == 0 {
        return Err(Error::InvalidConfig("K must be at least 1".into()));
    }
    ds.schema().check(individual)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Instance> = (0..k).map(|_| individual.clone()).collect();
    for (tree, &column) in chain.trees.iter().zip(&chain.feature_order) {
        for row in rows.iter_mut() {
            let leaf = tree.route(row);
            row.values_mut()[column] = tree.sample_leaf(leaf, ds, &mut rng);
        }
    }
    CandidateSet::with_predictions(individual.clone(), rows, ds, pred)
}

/// Baseline candidate set: the training rows whose fixed cells equal the
/// individual's exactly. Empty when nothing matches.
pub fn generate_baseline(
    ds: &Dataset,
    pred: &Predictor,
    individual: &Instance,
) -> Result<CandidateSet> {
    let rows: Vec<usize> = (0..ds.n_rows()).collect();
    generate_baseline_rows(ds, &rows, pred, individual)
}

/// Baseline restricted to a subset of training rows.
pub fn generate_baseline_rows(
    ds: &Dataset,
    rows: &[usize],
    pred: &Predictor,
    individual: &Instance,
) -> Result<CandidateSet> {
    ds.schema().check(individual)?;
    let fixed = ds.schema().fixed_columns();
    let matches: Vec<Instance> = rows
        .iter()
        .filter(|&&r| fixed.iter().all(|&j| ds.value(r, j) == individual[j]))
        .map(|&r| ds.row(r))
        .collect();
    CandidateSet::with_predictions(individual.clone(), matches, ds, pred)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{FeatureSchema, Schema};
    use alloc::vec;

    fn loans_income() -> Dataset {
        let schema = Schema::new(vec![
            FeatureSchema::continuous("age").fixed(),
            FeatureSchema::discrete("loans"),
            FeatureSchema::continuous("income"),
        ])
        .unwrap();
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|i| vec![30.0 + (i % 3) as f64 * 5.0, (i % 4) as f64, 40.0 + i as f64])
            .collect();
        Dataset::from_rows(schema, &rows).unwrap()
    }

    fn half() -> Predictor {
        Predictor::new(|x: &[f64]| x[2], 0.5).unwrap()
    }

    #[test]
    fn chain_conditions_on_fixed_then_earlier_mutables() {
        let ds = loans_income();
        let chain = fit_chain(&ds, &CTreeConfig::default(), None).unwrap();
        assert_eq!(chain.feature_order, vec![1, 2]);
        assert_eq!(chain.trees[0].conditioners, vec![0]);
        assert_eq!(chain.trees[1].conditioners, vec![0, 1]);
    }

    #[test]
    fn reversed_order_conditions_accordingly() {
        let ds = loans_income();
        let chain = fit_chain(&ds, &CTreeConfig::default(), Some(&[2, 1])).unwrap();
        assert_eq!(chain.trees[0].response, 2);
        assert_eq!(chain.trees[0].conditioners, vec![0]);
        assert_eq!(chain.trees[1].conditioners, vec![0, 2]);
        let x = ds.row(0);
        let cand = generate(&chain, &ds, &half(), &x, 20, 1).unwrap();
        assert_eq!(cand.len(), 20);
    }

    #[test]
    fn order_must_be_a_permutation() {
        let ds = loans_income();
        assert!(fit_chain(&ds, &CTreeConfig::default(), Some(&[1])).is_err());
        assert!(fit_chain(&ds, &CTreeConfig::default(), Some(&[0, 1])).is_err());
    }

    #[test]
    fn fixed_cells_are_copied() {
        let ds = loans_income();
        let chain = fit_chain(&ds, &CTreeConfig::default(), None).unwrap();
        let x = Instance::new(vec![40.0, 1.0, 50.0]);
        let cand = generate(&chain, &ds, &half(), &x, 3, 7).unwrap();
        assert_eq!(cand.rows.len(), 3);
        for row in &cand.rows {
            assert_eq!(row[0], 40.0);
        }
    }

    #[test]
    fn single_mutable_without_fixed_samples_marginal() {
        let schema = Schema::new(vec![FeatureSchema::discrete("loans")]).unwrap();
        let ds = Dataset::from_rows(schema, &[vec![1.0], vec![1.0], vec![3.0]]).unwrap();
        let chain = fit_chain(&ds, &CTreeConfig::default(), None).unwrap();
        assert_eq!(chain.trees.len(), 1);
        assert!(chain.trees[0].conditioners.is_empty());
        assert_eq!(chain.trees[0].nodes.len(), 1);
        let pred = Predictor::new(|x: &[f64]| x[0], 0.5).unwrap();
        let cand = generate(&chain, &ds, &pred, &Instance::new(vec![1.0]), 200, 3).unwrap();
        assert!(cand.rows.iter().all(|r| r[0] == 1.0 || r[0] == 3.0));
        assert!(cand.rows.iter().any(|r| r[0] == 3.0));
    }

    #[test]
    fn generation_is_deterministic() {
        let ds = loans_income();
        let chain = fit_chain(&ds, &CTreeConfig::default(), None).unwrap();
        let x = ds.row(5);
        let a = generate(&chain, &ds, &half(), &x, 50, 42).unwrap();
        let b = generate(&chain, &ds, &half(), &x, 50, 42).unwrap();
        assert_eq!(a, b);
        let c = generate(&chain, &ds, &half(), &x, 50, 43).unwrap();
        assert_ne!(a.rows, c.rows);
    }

    #[test]
    fn predictions_match_rows() {
        let ds = loans_income();
        let chain = fit_chain(&ds, &CTreeConfig::default(), None).unwrap();
        let pred = half();
        let cand = generate(&chain, &ds, &pred, &ds.row(1), 30, 0).unwrap();
        for (row, p) in cand.rows.iter().zip(&cand.predictions) {
            assert_eq!(pred.predict(&ds, row).unwrap(), *p);
        }
    }

    #[test]
    fn zero_k_is_rejected() {
        let ds = loans_income();
        let chain = fit_chain(&ds, &CTreeConfig::default(), None).unwrap();
        assert!(generate(&chain, &ds, &half(), &ds.row(0), 0, 0).is_err());
    }

    #[test]
    fn baseline_filters_on_fixed_values() {
        let schema = Schema::new(vec![
            FeatureSchema::continuous("age").fixed(),
            FeatureSchema::continuous("income"),
        ])
        .unwrap();
        let ds = Dataset::from_rows(schema, &[vec![40.0, 1.0], vec![40.0, 2.0], vec![35.0, 3.0]])
            .unwrap();
        let pred = Predictor::new(|x: &[f64]| x[1], 0.5).unwrap();
        let cand = generate_baseline(&ds, &pred, &Instance::new(vec![40.0, 9.0])).unwrap();
        assert_eq!(cand.len(), 2);
        let none = generate_baseline(&ds, &pred, &Instance::new(vec![99.0, 1.0])).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn baseline_without_fixed_features_uses_all_rows() {
        let schema = Schema::new(vec![FeatureSchema::continuous("a")]).unwrap();
        let ds = Dataset::from_rows(schema, &[vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let pred = Predictor::new(|x: &[f64]| x[0], 0.5).unwrap();
        let cand = generate_baseline(&ds, &pred, &Instance::new(vec![5.0])).unwrap();
        assert_eq!(cand.len(), 3);
    }

    #[test]
    fn empty_row_subset_is_an_error() {
        let ds = loans_income();
        let err = fit_chain_rows(&ds, &[], &CTreeConfig::default(), None).unwrap_err();
        assert_eq!(err, Error::NoRows);
    }
}
