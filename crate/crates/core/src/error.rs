use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Coarse grouping used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Data,
    Numerical,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("missing value at row {row}, column `{column}`")]
    MissingValue { row: usize, column: String },
    #[error("unknown category `{value}` in column `{column}`")]
    UnknownCategory { column: String, value: String },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("category `{category}` of column `{column}` has no observation in the fitting data")]
    EmptyCategory { column: String, category: String },
    #[error("numeric column `{column}` is constant")]
    ConstantNumeric { column: String },
    #[error("invalid synthetic context `{0}`")]
    InvalidContext(String),
    #[error("test fraction {fraction} leaves an empty split for n = {n}")]
    FractionOutOfRange { fraction: f64, n: usize },
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("degenerate category `{category}` of column `{column}`: count {count} of {n}")]
    DegenerateCategory {
        column: String,
        category: String,
        count: usize,
        n: usize,
    },
    #[error("categorical target entry {value} at ({row}, {col}) is not 0 or 1")]
    NonBinaryTarget { row: usize, col: usize, value: f64 },
    #[error("blend weight {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("truth vector holds a single class")]
    SingleClassTruth,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("zero variance")]
    ZeroVariance,
    #[error("degenerate contingency table: {0}")]
    DegenerateTable(String),
    #[error("empty group {0}")]
    EmptyGroup(usize),
    #[error("silhouette needs at least two clusters and three points")]
    SingleCluster,
    #[error("degenerate layer width: {0}")]
    DegenerateWidth(String),
    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFinite { epoch: usize, batch: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("run {run} (seed {seed}) failed: {source}")]
    RunFailed { run: usize, seed: u64, source: Box<Error> },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::RunFailed { source, .. } => source.class(),
            Error::NonFinite { .. } => ErrorClass::Numerical,
            Error::InvalidConfig(_)
            | Error::InvalidContext(_)
            | Error::FractionOutOfRange { .. }
            | Error::AlphaOutOfRange(_)
            | Error::DegenerateWidth(_) => ErrorClass::Config,
            _ => ErrorClass::Data,
        }
    }
}
