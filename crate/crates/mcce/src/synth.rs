//! Synthetic datasets with documented generative processes, used for
//! self-contained benchmarks and tests.

use std::fmt;
use std::str::FromStr;

use mcce_core::{Dataset, FeatureSchema, Schema};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    /// Four i.i.d. standard normal features, labels from a logistic model
    /// with coefficients [`GAUSSIAN_COEFFICIENTS`].
    IndependentGaussian,
    /// `a ~ U(0, 1)` and `b = DEPENDENT_PAIR_SLOPE * a + N(0, DEPENDENT_PAIR_NOISE_SD)`;
    /// labels are Bernoulli with probability `sigmoid(10 (b - 1))`.
    DependentPair,
    /// Six features, two fixed: `group` (categorical) and `age_band`
    /// (ordinal) drive `education` (ordinal), which drives `income`
    /// (continuous), which drives `loans` (discrete) and `housing`
    /// (categorical). See [`make_synthetic`] for the exact process.
    MixedTypes,
}

pub const GAUSSIAN_COEFFICIENTS: [f64; 4] = [1.5, -1.0, 0.8, 0.0];
pub const DEPENDENT_PAIR_SLOPE: f64 = 2.0;
pub const DEPENDENT_PAIR_NOISE_SD: f64 = 0.02;
/// A dependent-pair row respects the dependency when
/// `|b - DEPENDENT_PAIR_SLOPE * a| <= DEPENDENT_PAIR_BAND`.
pub const DEPENDENT_PAIR_BAND: f64 = 4.0 * DEPENDENT_PAIR_NOISE_SD;

impl SyntheticKind {
    pub const ALL: [SyntheticKind; 3] = [
        SyntheticKind::IndependentGaussian,
        SyntheticKind::DependentPair,
        SyntheticKind::MixedTypes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SyntheticKind::IndependentGaussian => "independent-gaussian",
            SyntheticKind::DependentPair => "dependent-pair",
            SyntheticKind::MixedTypes => "mixed-types",
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SyntheticKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown synthetic dataset `{s}`"))
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// The noise-free value of `b` for a given `a` in the dependent-pair set.
pub fn dependent_pair_target(a: f64) -> f64 {
    DEPENDENT_PAIR_SLOPE * a
}

pub fn schema(kind: SyntheticKind) -> Schema {
    let features = match kind {
        SyntheticKind::IndependentGaussian => (1..=4)
            .map(|j| FeatureSchema::continuous(&format!("x{j}")))
            .collect(),
        SyntheticKind::DependentPair => vec![
            FeatureSchema::continuous("a"),
            FeatureSchema::continuous("b"),
        ],
        SyntheticKind::MixedTypes => vec![
            FeatureSchema::categorical("group", &["A", "B"]).fixed(),
            FeatureSchema::ordinal("age_band", &["18-29", "30-44", "45-59", "60+"]).fixed(),
            FeatureSchema::ordinal("education", &["basic", "secondary", "tertiary"]),
            FeatureSchema::continuous("income"),
            FeatureSchema::discrete("loans"),
            FeatureSchema::categorical("housing", &["rent", "own", "family"]),
        ],
    };
    Schema::new(features).expect("synthetic schemas are valid")
}

/// Draws `n` rows (`n >= 10`) and their binary labels. Deterministic in
/// `seed`.
pub fn make_synthetic(kind: SyntheticKind, n: usize, seed: u64) -> (Dataset, Vec<bool>) {
    assert!(n >= 10, "synthetic datasets need at least 10 rows");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std_normal = Normal::new(0.0, 1.0).expect("valid normal");
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let (row, p) = match kind {
            SyntheticKind::IndependentGaussian => {
                let x: Vec<f64> = (0..4).map(|_| std_normal.sample(&mut rng)).collect();
                let z: f64 = x
                    .iter()
                    .zip(GAUSSIAN_COEFFICIENTS)
                    .map(|(v, b)| v * b)
                    .sum();
                (x, sigmoid(z))
            }
            SyntheticKind::DependentPair => {
                let a: f64 = rng.random_range(0.0..1.0);
                let b = dependent_pair_target(a)
                    + DEPENDENT_PAIR_NOISE_SD * std_normal.sample(&mut rng);
                (vec![a, b], sigmoid(10.0 * (b - 1.0)))
            }
            SyntheticKind::MixedTypes => {
                let group = if rng.random_bool(0.4) { 1.0 } else { 0.0 };
                let age_band = rng.random_range(0..4) as f64;
                let latent = 0.3 * age_band + 0.4 * group + std_normal.sample(&mut rng);
                let education = if latent < 0.5 {
                    0.0
                } else if latent < 1.5 {
                    1.0
                } else {
                    2.0
                };
                let income =
                    (25.0 + 10.0 * education + 4.0 * age_band + 6.0 * std_normal.sample(&mut rng))
                        .max(5.0);
                let loans = (income / 25.0 + 0.8 * std_normal.sample(&mut rng))
                    .round()
                    .clamp(0.0, 6.0);
                let housing = if income + 8.0 * std_normal.sample(&mut rng) > 50.0 {
                    1.0
                } else if age_band == 0.0 && rng.random_bool(0.5) {
                    2.0
                } else {
                    0.0
                };
                let own = if housing == 1.0 { 1.0 } else { 0.0 };
                let z = 0.12 * (income - 45.0) + 0.5 * education - 0.4 * (loans - 2.0) + 0.8 * own
                    - 0.2 * group;
                (
                    vec![group, age_band, education, income, loans, housing],
                    sigmoid(z),
                )
            }
        };
        labels.push(rng.random_bool(p));
        rows.push(row);
    }
    let ds =
        Dataset::from_rows(schema(kind), &rows).expect("synthetic rows conform to their schema");
    (ds, labels)
}
