//! File formats, synthetic data, the experiment harness and the `mcce`
//! command-line tool built on `mcce-core`.

pub mod cli;
pub mod error;
pub mod harness;
pub mod io;
pub mod synth;

pub use error::{Error, Result};
pub use mcce_core as core;
