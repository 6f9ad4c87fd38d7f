use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("row {row}, column `{column}`: invalid value `{value}`")]
    InvalidCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("unknown level {level} for column `{column}`")]
    UnknownLevel { column: String, level: String },

    #[error("instance has {got} values but the schema has {expected} columns")]
    ArityMismatch { expected: usize, got: usize },

    #[error("no rows")]
    NoRows,

    #[error("degenerate labels: all {0} labels belong to one class")]
    DegenerateLabels(usize),

    #[error("label count {labels} does not match row count {rows}")]
    LabelMismatch { rows: usize, labels: usize },

    #[error("nothing to explain: the schema has no mutable features")]
    NothingToExplain,

    #[error("response column {0} is also a conditioning column")]
    ResponseIsConditioner(usize),

    #[error("column index {0} out of bounds")]
    ColumnOutOfBounds(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
