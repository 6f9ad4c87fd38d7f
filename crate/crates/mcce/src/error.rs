use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] mcce_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("only {available} undesirable predictions available, {requested} requested")]
    NotEnoughTestRows { available: usize, requested: usize },

    #[error("individual {index}: {source}")]
    Individual {
        index: usize,
        #[source]
        source: mcce_core::Error,
    },

    #[error("malformed report: {0}")]
    Report(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}
