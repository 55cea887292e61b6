//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by any mvsamp operation.
///
/// Variants are grouped by the failure class they report: input validation,
/// file format problems, I/O, and internal invariant violations. The CLI maps
/// these classes onto process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: size mismatch, expected {expected} bytes but found {actual}")]
    SizeMismatch {
        path: PathBuf,
        expected: u64,
        actual: u64,
    },

    #[error("variable {name:?}: non-finite value at linear index {index}")]
    NonFiniteValue { name: String, index: u64 },

    #[error("malformed point-set file: {0}")]
    MalformedHeader(String),

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("unknown variable {0:?}")]
    UnknownVariable(String),

    #[error("histogram over {requested} variables exceeds the maximum of {max}")]
    DimensionalityTooHigh { requested: usize, max: usize },

    #[error("histogram with {requested_bins} bins exceeds the memory budget of {budget_bytes} bytes")]
    MemoryBudgetExceeded {
        requested_bins: u128,
        budget_bytes: u64,
    },

    #[error("axis {index} out of range for a {dims}-dimensional histogram")]
    AxisOutOfRange { index: usize, dims: usize },

    #[error("histogram has zero total count")]
    EmptyHistogram,

    #[error("operation requires {expected} but the histogram has {actual} variables")]
    WrongDimensionality { expected: String, actual: usize },

    #[error("sampling target of {target} points is not achievable (at most {max})")]
    Unachievable { target: u64, max: u64 },

    #[error("size mismatch: {0}")]
    LengthMismatch(String),

    #[error("query syntax error at byte {position}: {message}")]
    SyntaxError { position: usize, message: String },

    #[error("query results cover different grids ({a} vs {b} points)")]
    GridMismatch { a: u64, b: u64 },

    #[error("no usable geometry: {0}")]
    DegenerateGeometry(String),

    #[error("slice index {index} out of range (axis has {len} layers)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("image {width}x{height} is smaller than the {min}x{min} analysis window")]
    TooSmall {
        width: usize,
        height: usize,
        min: usize,
    },

    #[error("zero variance in {0}")]
    ZeroVariance(String),

    #[error("region of interest selects no grid points")]
    EmptyRoi,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
}

impl Error {
    /// Process exit code class for the CLI: 1 validation, 2 I/O, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Json { .. } => 2,
            Error::Internal(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
