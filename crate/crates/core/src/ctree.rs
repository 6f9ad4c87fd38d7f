//! Conditional inference trees.
//!
//! A tree models one response column given a set of conditioning columns.
//! At each node every conditioning column is tested for association with
//! the response using the standardized linear statistic of Strasser and
//! Weber (permutation mean and variance, max-type statistic, normal
//! approximation). P-values are Bonferroni-adjusted over the statistic's
//! components and over the tested columns. If the smallest adjusted
//! p-value exceeds `alpha` the node becomes a leaf; otherwise the winning
//! column is split at the cut maximizing the two-sample version of the
//! same statistic.
//!
//! Leaves keep the indices of the training rows that reached them. Sampling
//! from a leaf draws one of those rows uniformly (with replacement) and
//! returns its response value, which gives the empirical conditional
//! distribution of the response.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::{level_of, Dataset, FeatureKind};
use crate::stats::two_sided_normal_p;

const VARIANCE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CTreeConfig {
    /// Significance level of the variable-selection test.
    pub alpha: f64,
    /// Nodes with fewer rows are not split.
    pub min_split: usize,
    /// Minimum number of rows in each child.
    pub min_bucket: usize,
    /// The root has depth 0; nodes at this depth are leaves.
    pub max_depth: usize,
}

impl Default for CTreeConfig {
    fn default() -> Self {
        CTreeConfig {
            alpha: 0.05,
            min_split: 20,
            min_bucket: 7,
            max_depth: 10,
        }
    }
}

impl CTreeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha {} outside (0, 1)",
                self.alpha
            )));
        }
        if self.min_bucket < 1 {
            return Err(Error::InvalidConfig("min_bucket must be at least 1".into()));
        }
        if 2 * self.min_bucket > self.min_split {
            return Err(Error::InvalidConfig(format!(
                "min_split {} must be at least twice min_bucket {}",
                self.min_split, self.min_bucket
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SplitRule {
    /// `value <= threshold` goes left.
    Threshold { threshold: f64 },
    /// Levels listed in `left` go left, those in `right` go right. Levels
    /// not seen at this node during fitting follow `unseen_left`, which
    /// points at the child that received more rows.
    Levels {
        left: Vec<usize>,
        right: Vec<usize>,
        unseen_left: bool,
    },
}

impl SplitRule {
    pub fn goes_left(&self, value: f64) -> bool {
        match self {
            SplitRule::Threshold { threshold } => value <= *threshold,
            SplitRule::Levels {
                left,
                right,
                unseen_left,
            } => {
                if value >= 0.0 && libm::trunc(value) == value {
                    let level = value as usize;
                    if left.contains(&level) {
                        return true;
                    }
                    if right.contains(&level) {
                        return false;
                    }
                }
                *unseen_left
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        rows: Vec<usize>,
    },
    Split {
        column: usize,
        rule: SplitRule,
        p_value: f64,
        left: usize,
        right: usize,
    },
}

/// Handle to a leaf of a fitted tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LeafId(usize);

/// Fitted tree. Nodes live in an arena; the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CTreeModel {
    pub response: usize,
    pub conditioners: Vec<usize>,
    pub nodes: Vec<Node>,
}

impl CTreeModel {
    /// Fits on every row of `ds`.
    pub fn fit(
        ds: &Dataset,
        response: usize,
        conditioners: &[usize],
        cfg: &CTreeConfig,
    ) -> Result<CTreeModel> {
        let rows: Vec<usize> = (0..ds.n_rows()).collect();
        Self::fit_rows(ds, &rows, response, conditioners, cfg)
    }

    /// Fits on the given subset of rows. Leaves store indices into `ds`.
    pub fn fit_rows(
        ds: &Dataset,
        rows: &[usize],
        response: usize,
        conditioners: &[usize],
        cfg: &CTreeConfig,
    ) -> Result<CTreeModel> {
        cfg.validate()?;
        if rows.is_empty() {
            return Err(Error::NoRows);
        }
        for &c in conditioners.iter().chain(core::iter::once(&response)) {
            if c >= ds.n_cols() {
                return Err(Error::ColumnOutOfBounds(c));
            }
        }
        if let Some(&r) = rows.iter().find(|&&r| r >= ds.n_rows()) {
            return Err(Error::InvalidConfig(format!("row index {r} out of bounds")));
        }
        if conditioners.contains(&response) {
            return Err(Error::ResponseIsConditioner(response));
        }
        let mut fitter = Fitter {
            ds,
            cfg,
            response: Transform::new(ds, response),
            conditioners: conditioners
                .iter()
                .map(|&c| (c, Transform::new(ds, c)))
                .collect(),
            nodes: Vec::new(),
        };
        fitter.grow(rows.to_vec(), 0);
        Ok(CTreeModel {
            response,
            conditioners: conditioners.to_vec(),
            nodes: fitter.nodes,
        })
    }

    /// Descends from the root using the conditioning cells of `values`, a
    /// full row in schema order.
    pub fn route(&self, values: &[f64]) -> LeafId {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { .. } => return LeafId(id),
                Node::Split {
                    column,
                    rule,
                    left,
                    right,
                    ..
                } => {
                    id = if rule.goes_left(values[*column]) {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn leaf_rows(&self, leaf: LeafId) -> &[usize] {
        match &self.nodes[leaf.0] {
            Node::Leaf { rows } => rows,
            Node::Split { .. } => unreachable!("LeafId always points at a leaf"),
        }
    }

    /// Response value of a training row drawn uniformly from the leaf.
    pub fn sample_leaf<R: Rng + ?Sized>(&self, leaf: LeafId, ds: &Dataset, rng: &mut R) -> f64 {
        let rows = self.leaf_rows(leaf);
        let pick = rows[rng.random_range(0..rows.len())];
        ds.value(pick, self.response)
    }

    pub fn leaves(&self) -> impl Iterator<Item = LeafId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n, Node::Leaf { .. }))
            .map(|(i, _)| LeafId(i))
    }

    pub fn n_leaves(&self) -> usize {
        self.leaves().count()
    }

    pub fn is_root_split(&self) -> bool {
        matches!(self.nodes[0], Node::Split { .. })
    }

    pub fn root_split_column(&self) -> Option<usize> {
        match &self.nodes[0] {
            Node::Split { column, .. } => Some(*column),
            Node::Leaf { .. } => None,
        }
    }
}

/// Influence (response) or regressor (conditioner) transformation of a
/// column: identity for numbers, level indicators otherwise.
#[derive(Debug, Clone, Copy)]
enum Transform {
    Numeric {
        column: usize,
    },
    Levels {
        column: usize,
        n_levels: usize,
        ordered: bool,
    },
}

impl Transform {
    fn new(ds: &Dataset, column: usize) -> Self {
        let f = ds.schema().feature(column);
        match f.kind {
            FeatureKind::Continuous | FeatureKind::Discrete => Transform::Numeric { column },
            FeatureKind::Categorical | FeatureKind::Ordinal => Transform::Levels {
                column,
                n_levels: f.levels.len(),
                ordered: f.kind == FeatureKind::Ordinal,
            },
        }
    }

    fn dim(&self) -> usize {
        match self {
            Transform::Numeric { .. } => 1,
            Transform::Levels { n_levels, .. } => *n_levels,
        }
    }

    fn column(&self) -> usize {
        match self {
            Transform::Numeric { column } | Transform::Levels { column, .. } => *column,
        }
    }

    /// Adds the transformed value of `row`, scaled by `weight`, into `acc`.
    fn accumulate(&self, ds: &Dataset, row: usize, weight: f64, acc: &mut [f64]) {
        match *self {
            Transform::Numeric { column } => acc[0] += weight * ds.value(row, column),
            Transform::Levels {
                column, n_levels, ..
            } => {
                let level = level_of(ds.value(row, column), n_levels).expect("validated cell");
                acc[level] += weight;
            }
        }
    }
}

/// Sufficient statistics of the response within one node.
struct ResponseMoments {
    n: f64,
    mean: Vec<f64>,
    /// Diagonal of the influence covariance, population normalization.
    var: Vec<f64>,
}

impl ResponseMoments {
    fn new(ds: &Dataset, rows: &[usize], h: &Transform) -> Self {
        let q = h.dim();
        let n = rows.len() as f64;
        let mut sum = vec![0.0; q];
        for &r in rows {
            h.accumulate(ds, r, 1.0, &mut sum);
        }
        let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
        let var = match *h {
            Transform::Numeric { column } => {
                let m = mean[0];
                vec![
                    rows.iter()
                        .map(|&r| {
                            let d = ds.value(r, column) - m;
                            d * d
                        })
                        .sum::<f64>()
                        / n,
                ]
            }
            // indicator: E[(1{y=k} - p_k)^2] = p_k (1 - p_k)
            Transform::Levels { .. } => mean.iter().map(|p| p * (1.0 - p)).collect(),
        };
        ResponseMoments { n, mean, var }
    }

    /// Largest absolute standardized component of a linear statistic with
    /// regressor sums `sum_g`, squared sums `sum_gg` and cross products
    /// `t[j * q + k] = sum g_j h_k`. Also returns the number of components
    /// with positive variance.
    fn max_standardized(&self, sum_g: &[f64], sum_gg: &[f64], t: &[f64]) -> (f64, usize) {
        let n = self.n;
        let q = self.mean.len();
        let mut best = 0.0f64;
        let mut components = 0;
        for (j, (&sg, &sgg)) in sum_g.iter().zip(sum_gg).enumerate() {
            for k in 0..q {
                let var = self.var[k] * (n * sgg - sg * sg) / (n - 1.0);
                if var <= VARIANCE_EPS {
                    continue;
                }
                components += 1;
                let mu = sg * self.mean[k];
                let z = libm::fabs(t[j * q + k] - mu) / libm::sqrt(var);
                best = best.max(z);
            }
        }
        (best, components)
    }
}

struct Fitter<'a> {
    ds: &'a Dataset,
    cfg: &'a CTreeConfig,
    response: Transform,
    conditioners: Vec<(usize, Transform)>,
    nodes: Vec<Node>,
}

struct Selection {
    conditioner: usize,
    p_value: f64,
}

impl Fitter<'_> {
    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { rows: Vec::new() });
        let split = if rows.len() < self.cfg.min_split || depth >= self.cfg.max_depth {
            None
        } else {
            self.select(&rows).and_then(|sel| {
                let (column, g) = self.conditioners[sel.conditioner];
                self.best_split(&rows, g)
                    .map(|rule| (column, rule, sel.p_value))
            })
        };
        match split {
            None => self.nodes[id] = Node::Leaf { rows },
            Some((column, rule, p_value)) => {
                let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                    .iter()
                    .partition(|&&r| rule.goes_left(self.ds.value(r, column)));
                debug_assert!(left_rows.len() >= self.cfg.min_bucket);
                debug_assert!(right_rows.len() >= self.cfg.min_bucket);
                let left = self.grow(left_rows, depth + 1);
                let right = self.grow(right_rows, depth + 1);
                self.nodes[id] = Node::Split {
                    column,
                    rule,
                    p_value,
                    left,
                    right,
                };
            }
        }
        id
    }

    /// Variable selection: returns the conditioner with the smallest
    /// adjusted p-value if it is significant at `alpha`.
    fn select(&self, rows: &[usize]) -> Option<Selection> {
        if self.conditioners.is_empty() || rows.len() < 2 {
            return None;
        }
        let moments = ResponseMoments::new(self.ds, rows, &self.response);
        if moments.var.iter().all(|&v| v <= VARIANCE_EPS) {
            return None;
        }
        let q = self.response.dim();
        let n_tested = self.conditioners.len() as f64;
        let mut best: Option<(f64, f64, usize)> = None;
        let mut h = vec![0.0; q];
        for (idx, (_, g)) in self.conditioners.iter().enumerate() {
            let p = g.dim();
            let mut sum_g = vec![0.0; p];
            let mut sum_gg = vec![0.0; p];
            let mut t = vec![0.0; p * q];
            for &r in rows {
                h.iter_mut().for_each(|v| *v = 0.0);
                self.response.accumulate(self.ds, r, 1.0, &mut h);
                match *g {
                    Transform::Numeric { column } => {
                        let x = self.ds.value(r, column);
                        sum_g[0] += x;
                        sum_gg[0] += x * x;
                        for k in 0..q {
                            t[k] += x * h[k];
                        }
                    }
                    Transform::Levels {
                        column, n_levels, ..
                    } => {
                        let j =
                            level_of(self.ds.value(r, column), n_levels).expect("validated cell");
                        sum_g[j] += 1.0;
                        sum_gg[j] += 1.0;
                        for k in 0..q {
                            t[j * q + k] += h[k];
                        }
                    }
                }
            }
            let (stat, components) = moments.max_standardized(&sum_g, &sum_gg, &t);
            if components == 0 {
                continue;
            }
            let p_value = (components as f64 * two_sided_normal_p(stat)).min(1.0);
            let adjusted = (p_value * n_tested).min(1.0);
            let better = match best {
                None => true,
                Some((bp, bs, _)) => adjusted < bp || (adjusted == bp && stat > bs),
            };
            if better {
                best = Some((adjusted, stat, idx));
            }
        }
        best.filter(|&(p, _, _)| p <= self.cfg.alpha)
            .map(|(p_value, _, conditioner)| Selection {
                conditioner,
                p_value,
            })
    }

    /// Finds the admissible binary cut maximizing the two-sample statistic.
    fn best_split(&self, rows: &[usize], g: Transform) -> Option<SplitRule> {
        let moments = ResponseMoments::new(self.ds, rows, &self.response);
        let column = g.column();
        match g {
            Transform::Numeric { .. } | Transform::Levels { ordered: true, .. } => {
                let mut sorted: Vec<(f64, usize)> = rows
                    .iter()
                    .map(|&r| (self.ds.value(r, column), r))
                    .collect();
                sorted.sort_by(|a, b| {
                    a.0.partial_cmp(&b.0)
                        .unwrap_or(Ordering::Equal)
                        .then(a.1.cmp(&b.1))
                });
                let values: Vec<f64> = sorted.iter().map(|s| s.0).collect();
                let order: Vec<usize> = sorted.iter().map(|s| s.1).collect();
                let cut = self.scan_cuts(&moments, &order, |i| values[i] < values[i + 1])?;
                let (lo, hi) = (values[cut], values[cut + 1]);
                let mid = lo + (hi - lo) / 2.0;
                // Keep the rule consistent with the partition under rounding.
                let threshold = if mid >= lo && mid < hi { mid } else { lo };
                Some(SplitRule::Threshold { threshold })
            }
            Transform::Levels { n_levels, .. } => {
                let mut count = vec![0usize; n_levels];
                let mut score = vec![0.0f64; n_levels];
                for &r in rows {
                    let l = level_of(self.ds.value(r, column), n_levels).expect("validated cell");
                    count[l] += 1;
                    score[l] += match self.response {
                        Transform::Numeric { column: y } => self.ds.value(r, y),
                        Transform::Levels { column: y, .. } => {
                            if self.ds.value(r, y) == 0.0 {
                                1.0
                            } else {
                                0.0
                            }
                        }
                    };
                }
                let mut present: Vec<usize> = (0..n_levels).filter(|&l| count[l] > 0).collect();
                if present.len() < 2 {
                    return None;
                }
                let key = |l: usize| score[l] / count[l] as f64;
                present.sort_by(|&a, &b| {
                    key(a)
                        .partial_cmp(&key(b))
                        .unwrap_or(Ordering::Equal)
                        .then(a.cmp(&b))
                });
                let mut rank = vec![usize::MAX; n_levels];
                for (i, &l) in present.iter().enumerate() {
                    rank[l] = i;
                }
                let mut sorted: Vec<(usize, usize)> = rows
                    .iter()
                    .map(|&r| (rank[self.ds.value(r, column) as usize], r))
                    .collect();
                sorted.sort_unstable();
                let ranks: Vec<usize> = sorted.iter().map(|s| s.0).collect();
                let order: Vec<usize> = sorted.iter().map(|s| s.1).collect();
                let cut = self.scan_cuts(&moments, &order, |i| ranks[i] < ranks[i + 1])?;
                let boundary = ranks[cut];
                let mut left: Vec<usize> = present[..=boundary].to_vec();
                let mut right: Vec<usize> = present[boundary + 1..].to_vec();
                let n_left = cut + 1;
                let unseen_left = n_left >= rows.len() - n_left;
                left.sort_unstable();
                right.sort_unstable();
                Some(SplitRule::Levels {
                    left,
                    right,
                    unseen_left,
                })
            }
        }
    }

    /// Scans cuts after positions `i` of `order` (rows sorted by the split
    /// variable) where `is_boundary(i)` holds, respecting `min_bucket`.
    /// Returns the position maximizing the standardized statistic; ties go
    /// to the earliest cut.
    fn scan_cuts(
        &self,
        moments: &ResponseMoments,
        order: &[usize],
        is_boundary: impl Fn(usize) -> bool,
    ) -> Option<usize> {
        let n = order.len();
        let q = self.response.dim();
        let mut t = vec![0.0; q];
        let mut best: Option<(f64, usize)> = None;
        for (i, &row) in order[..n - 1].iter().enumerate() {
            self.response.accumulate(self.ds, row, 1.0, &mut t);
            let n_left = i + 1;
            if n_left < self.cfg.min_bucket || n - n_left < self.cfg.min_bucket || !is_boundary(i) {
                continue;
            }
            let m = n_left as f64;
            let (stat, components) = moments.max_standardized(&[m], &[m], &t);
            if components == 0 {
                continue;
            }
            if best.is_none_or(|(b, _)| stat > b) {
                best = Some((stat, i));
            }
        }
        best.map(|(_, i)| i)
    }
}
