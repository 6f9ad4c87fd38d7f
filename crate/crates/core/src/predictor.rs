//! The black-box classifier being explained.
//!
//! Explanations only ever call [`Scorer::score`] on an encoded instance, so
//! any model can be plugged in. A small multilayer perceptron and a
//! logistic model ship with the crate.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::Dataset;
use crate::stats::{sigmoid, softplus};

/// Maps a normalized feature vector to a probability of the desired class.
pub trait Scorer: Send + Sync {
    fn score(&self, encoded: &[f64]) -> f64;
}

impl<F> Scorer for F
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn score(&self, encoded: &[f64]) -> f64 {
        self(encoded)
    }
}

pub const DEFAULT_CUTOFF: f64 = 0.5;

/// A scorer together with the decision cutoff `c`. An instance is a valid
/// counterfactual when its score is strictly above `c`.
pub struct Predictor {
    scorer: Box<dyn Scorer>,
    cutoff: f64,
}

impl core::fmt::Debug for Predictor {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Predictor")
            .field("cutoff", &self.cutoff)
            .finish_non_exhaustive()
    }
}

impl Predictor {
    pub fn new(scorer: impl Scorer + 'static, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cutoff {cutoff} outside (0, 1)"
            )));
        }
        Ok(Predictor {
            scorer: Box::new(scorer),
            cutoff,
        })
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn score_encoded(&self, encoded: &[f64]) -> f64 {
        self.scorer.score(encoded)
    }

    /// `f(x)` for an instance in raw (schema) representation.
    pub fn predict(&self, ds: &Dataset, values: &[f64]) -> Result<f64> {
        let encoded = ds.normalize(values)?;
        Ok(self.score_encoded(&encoded))
    }

    pub fn is_valid(&self, ds: &Dataset, values: &[f64]) -> Result<bool> {
        Ok(self.is_positive(self.predict(ds, values)?))
    }

    /// The binarized prediction `f(x) > c`.
    pub fn is_positive(&self, probability: f64) -> bool {
        probability > self.cutoff
    }

    /// Scores every row of `ds`.
    pub fn predict_all(&self, ds: &Dataset) -> Vec<f64> {
        let mut buf = Vec::with_capacity(ds.schema().encoded_width());
        (0..ds.n_rows())
            .map(|i| {
                let row = ds.row(i);
                ds.normalize_into(&row, &mut buf)
                    .expect("dataset rows conform to their schema");
                self.score_encoded(&buf)
            })
            .collect()
    }
}

/// `sigmoid(w · x + b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Logistic {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl Scorer for Logistic {
    fn score(&self, encoded: &[f64]) -> f64 {
        let z: f64 = self.weights.iter().zip(encoded).map(|(w, x)| w * x).sum();
        sigmoid(z + self.bias)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden_sizes: Vec<usize>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden_sizes: vec![18, 9, 3],
            learning_rate: 0.02,
            epochs: 40,
            seed: 0,
        }
    }
}

impl MlpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_sizes.is_empty() || self.hidden_sizes.contains(&0) {
            return Err(Error::InvalidConfig(
                "hidden layer sizes must be non-empty and positive".into(),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(
                "learning rate must be positive".into(),
            ));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be positive".into()));
        }
        Ok(())
    }
}

const HIDDEN_BIAS_INIT: f64 = 0.1;
/// Negative-side slope of the hidden rectifier.
const LEAK: f64 = 0.01;

fn rectify(z: f64) -> f64 {
    if z > 0.0 {
        z
    } else {
        LEAK * z
    }
}

/// Dense layer, `weights` row-major with shape `outputs x inputs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn forward(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.weights
                .chunks_exact(self.inputs)
                .zip(&self.biases)
                .map(|(row, b)| row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>() + b),
        );
    }
}

/// Feed-forward network with leaky rectified hidden units and one sigmoid
/// output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Layer>,
}

impl Mlp {
    /// Uniform He initialization. Hidden biases start slightly positive so
    /// narrow rectified layers are not dead from the first step.
    pub fn random(inputs: usize, hidden: &[usize], seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sizes = Vec::with_capacity(hidden.len() + 2);
        sizes.push(inputs);
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let (n_in, n_out) = (w[0], w[1]);
                let bound = libm::sqrt(6.0 / n_in.max(1) as f64);
                Layer {
                    inputs: n_in,
                    outputs: n_out,
                    weights: (0..n_in * n_out)
                        .map(|_| rng.random_range(-bound..bound))
                        .collect(),
                    biases: vec![
                        if i + 2 < sizes.len() {
                            HIDDEN_BIAS_INIT
                        } else {
                            0.0
                        };
                        n_out
                    ],
                }
            })
            .collect();
        Mlp { layers }
    }

    pub fn input_size(&self) -> usize {
        self.layers[0].inputs
    }

    /// Checks shapes after deserialization.
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::InvalidConfig("network has no layers".into()));
        }
        for (i, l) in self.layers.iter().enumerate() {
            if l.weights.len() != l.inputs * l.outputs || l.biases.len() != l.outputs {
                return Err(Error::InvalidConfig(format!(
                    "layer {i} has inconsistent shapes"
                )));
            }
            if i > 0 && self.layers[i - 1].outputs != l.inputs {
                return Err(Error::InvalidConfig(format!(
                    "layer {i} input size mismatch"
                )));
            }
        }
        if self.layers.last().map(|l| l.outputs) != Some(1) {
            return Err(Error::InvalidConfig(
                "output layer must have one unit".into(),
            ));
        }
        Ok(())
    }

    /// Pre-sigmoid output.
    pub fn logit(&self, input: &[f64]) -> f64 {
        let mut a = input.to_vec();
        let mut z = Vec::new();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.forward(&a, &mut z);
            if i < last {
                z.iter_mut().for_each(|v| *v = rectify(*v));
            }
            core::mem::swap(&mut a, &mut z);
        }
        a[0]
    }

    pub fn probability(&self, input: &[f64]) -> f64 {
        sigmoid(self.logit(input))
    }

    /// Binary cross-entropy of one example.
    pub fn loss(&self, input: &[f64], label: bool) -> f64 {
        let z = self.logit(input);
        softplus(z) - if label { z } else { 0.0 }
    }

    pub fn n_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    /// All parameters flattened layer by layer, weights before biases.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            p.extend_from_slice(&l.weights);
            p.extend_from_slice(&l.biases);
        }
        p
    }

    pub fn set_params(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.n_params(), "parameter count mismatch");
        let mut rest = params;
        for l in &mut self.layers {
            let (w, r) = rest.split_at(l.weights.len());
            l.weights.copy_from_slice(w);
            let (b, r) = r.split_at(l.biases.len());
            l.biases.copy_from_slice(b);
            rest = r;
        }
    }

    /// Backpropagated gradient of [`Mlp::loss`], in [`Mlp::params`] order.
    pub fn gradient(&self, input: &[f64], label: bool) -> Vec<f64> {
        let mut grads: Vec<Layer> = self
            .layers
            .iter()
            .map(|l| Layer {
                inputs: l.inputs,
                outputs: l.outputs,
                weights: vec![0.0; l.weights.len()],
                biases: vec![0.0; l.biases.len()],
            })
            .collect();
        self.backprop(input, label, &mut grads);
        let mut flat = Vec::with_capacity(self.n_params());
        for g in grads {
            flat.extend(g.weights);
            flat.extend(g.biases);
        }
        flat
    }

    /// Writes the gradient into `grads` (overwriting) and returns the loss.
    fn backprop(&self, input: &[f64], label: bool, grads: &mut [Layer]) -> f64 {
        let last = self.layers.len() - 1;
        // activations[i] is the input to layer i; pre[i] its pre-activation.
        let mut activations: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len() + 1);
        let mut pre: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len());
        activations.push(input.to_vec());
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = Vec::with_capacity(layer.outputs);
            layer.forward(&activations[i], &mut z);
            let a = if i < last {
                z.iter().map(|&v| rectify(v)).collect()
            } else {
                z.clone()
            };
            pre.push(z);
            activations.push(a);
        }
        let logit = pre[last][0];
        let y = if label { 1.0 } else { 0.0 };
        let loss = softplus(logit) - y * logit;

        let mut delta = vec![sigmoid(logit) - y];
        for i in (0..self.layers.len()).rev() {
            let layer = &self.layers[i];
            let g = &mut grads[i];
            let a_in = &activations[i];
            for (o, &d) in delta.iter().enumerate() {
                g.biases[o] = d;
                let row = &mut g.weights[o * layer.inputs..(o + 1) * layer.inputs];
                for (w, &a) in row.iter_mut().zip(a_in) {
                    *w = d * a;
                }
            }
            if i > 0 {
                let mut next = vec![0.0; layer.inputs];
                for (o, &d) in delta.iter().enumerate() {
                    let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (n, &w) in next.iter_mut().zip(row) {
                        *n += w * d;
                    }
                }
                for (n, &z) in next.iter_mut().zip(&pre[i - 1]) {
                    if z <= 0.0 {
                        *n *= LEAK;
                    }
                }
                delta = next;
            }
        }
        loss
    }

    /// Plain per-example SGD on binary cross-entropy, reshuffling each epoch.
    pub fn train(inputs: &[Vec<f64>], labels: &[bool], cfg: &MlpConfig) -> Result<Mlp> {
        cfg.validate()?;
        if inputs.is_empty() {
            return Err(Error::NoRows);
        }
        if inputs.len() != labels.len() {
            return Err(Error::LabelMismatch {
                rows: inputs.len(),
                labels: labels.len(),
            });
        }
        if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
            return Err(Error::DegenerateLabels(labels.len()));
        }
        let mut net = Mlp::random(inputs[0].len(), &cfg.hidden_sizes, cfg.seed);
        let mut grads = net.layers.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
        let mut order: Vec<usize> = (0..inputs.len()).collect();
        for _ in 0..cfg.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                net.backprop(&inputs[i], labels[i], &mut grads);
                for (l, g) in net.layers.iter_mut().zip(&grads) {
                    for (w, gw) in l.weights.iter_mut().zip(&g.weights) {
                        *w -= cfg.learning_rate * gw;
                    }
                    for (b, gb) in l.biases.iter_mut().zip(&g.biases) {
                        *b -= cfg.learning_rate * gb;
                    }
                }
            }
        }
        Ok(net)
    }

    /// Trains on the normalized rows of `ds`.
    pub fn fit(ds: &Dataset, labels: &[bool], cfg: &MlpConfig) -> Result<Mlp> {
        if labels.len() != ds.n_rows() {
            return Err(Error::LabelMismatch {
                rows: ds.n_rows(),
                labels: labels.len(),
            });
        }
        let inputs: Vec<Vec<f64>> = ds.rows().map(|r| ds.normalize(&r)).collect::<Result<_>>()?;
        Mlp::train(&inputs, labels, cfg)
    }
}

impl Scorer for Mlp {
    fn score(&self, encoded: &[f64]) -> f64 {
        self.probability(encoded)
    }
}

/// Trains the default network and wraps it with the cutoff.
pub fn train_mlp(ds: &Dataset, labels: &[bool], cfg: &MlpConfig, cutoff: f64) -> Result<Predictor> {
    Predictor::new(Mlp::fit(ds, labels, cfg)?, cutoff)
}
