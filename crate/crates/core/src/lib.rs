//! Counterfactual explanations for tabular classifiers by Monte Carlo
//! sampling from a chain of conditional inference trees.
//!
//! The crate is `no_std` (with `alloc`) so the algorithms can be embedded
//! anywhere; file formats, timing and the command line live in the `mcce`
//! companion crate.
//!
//! Pipeline:
//!
//! 1. [`generator::fit_chain`] fits one [`ctree::CTreeModel`] per mutable
//!    feature, each conditioned on the fixed features and the mutable
//!    features earlier in the chain.
//! 2. [`generator::generate`] samples a [`generator::CandidateSet`] of `K`
//!    rows sharing the individual's fixed values.
//! 3. [`postprocess::select_ideal`] keeps valid rows, then the sparsest, then
//!    the one with the smallest Gower distance.
//!
//! [`metrics`] holds the evaluation suite used to compare methods.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod ctree;
pub mod error;
pub mod generator;
pub mod metrics;
pub mod postprocess;
pub mod predictor;
pub mod schema;
pub(crate) mod stats;

pub use error::{Error, Result};
pub use schema::{Dataset, Encoder, FeatureKind, FeatureSchema, Instance, Range, Schema};
