use thiserror::Error;

pub type Result<T, E = FdaError> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// The variant name doubles as the machine-readable error identifier used by
/// the CLI and the HTTP service (see [`FdaError::name`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FdaError {
    #[error("grid points must be strictly increasing and finite (violated at index {index})")]
    NonIncreasingGrid { index: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite value at curve {row}, point {column}")]
    NonFiniteValue { row: usize, column: usize },
    #[error("point {point} lies outside the domain [{lower}, {upper}]")]
    OutsideDomain { point: f64, lower: f64, upper: f64 },
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("at least {required} grid points are required, got {available}")]
    InsufficientPoints { required: usize, available: usize },
    #[error("samples are defined on different grids")]
    GridMismatch,
    #[error("samples are expressed in different bases")]
    BasisMismatch,
    #[error("all smoothing weights vanish in row {row}")]
    DegenerateRow { row: usize },
    #[error("normal equations are singular even after jitter")]
    SingularSystem,
    #[error("hat matrix has unit leverage at point {index}")]
    LeverageOne { index: usize },
    #[error("penalty undefined: tr(S)/M = {ratio} is not below 1")]
    PenaltyUndefined { ratio: f64 },
    #[error("every candidate parameter failed: {0}")]
    AllCandidatesFailed(String),
    #[error("landmarks of curve {curve} are not strictly increasing inside the domain")]
    NonMonotoneLandmarks { curve: usize },
    #[error("requested {requested} components but at most {max} are available")]
    TooManyComponents { requested: usize, max: usize },
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("covariance matrix is singular even after jitter")]
    SingularCovariance,
    #[error("no local maxima found")]
    NoMaximaFound,
    #[error("zero variance at grid index {index}")]
    DegenerateVariance { index: usize },
    #[error("at least {required} curves are required, got {available}")]
    InsufficientSample { required: usize, available: usize },
    #[error("median absolute deviation vanishes at grid index {index}")]
    DegenerateScale { index: usize },
    #[error("kernel matrix is not positive definite even after jitter")]
    NotPositiveDefinite,
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Coarse classification used to map errors onto exit codes and HTTP statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input data or files.
    Data,
    /// The computation itself failed or a numerical precondition was violated.
    Numerical,
    /// A caller passed an invalid argument.
    Usage,
}

impl FdaError {
    pub fn name(&self) -> &'static str {
        match self {
            FdaError::NonIncreasingGrid { .. } => "NonIncreasingGrid",
            FdaError::ShapeMismatch(_) => "ShapeMismatch",
            FdaError::NonFiniteValue { .. } => "NonFiniteValue",
            FdaError::OutsideDomain { .. } => "OutsideDomain",
            FdaError::InvalidBasis(_) => "InvalidBasis",
            FdaError::InvalidParameter(_) => "InvalidParameter",
            FdaError::InsufficientPoints { .. } => "InsufficientPoints",
            FdaError::GridMismatch => "GridMismatch",
            FdaError::BasisMismatch => "BasisMismatch",
            FdaError::DegenerateRow { .. } => "DegenerateRow",
            FdaError::SingularSystem => "SingularSystem",
            FdaError::LeverageOne { .. } => "LeverageOne",
            FdaError::PenaltyUndefined { .. } => "PenaltyUndefined",
            FdaError::AllCandidatesFailed(_) => "AllCandidatesFailed",
            FdaError::NonMonotoneLandmarks { .. } => "NonMonotoneLandmarks",
            FdaError::TooManyComponents { .. } => "TooManyComponents",
            FdaError::DegenerateSample(_) => "DegenerateSample",
            FdaError::SingularCovariance => "SingularCovariance",
            FdaError::NoMaximaFound => "NoMaximaFound",
            FdaError::DegenerateVariance { .. } => "DegenerateVariance",
            FdaError::InsufficientSample { .. } => "InsufficientSample",
            FdaError::DegenerateScale { .. } => "DegenerateScale",
            FdaError::NotPositiveDefinite => "NotPositiveDefinite",
            FdaError::Parse { .. } => "ParseError",
            FdaError::Schema(_) => "SchemaError",
            FdaError::Io(_) => "IoError",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            FdaError::NonIncreasingGrid { .. }
            | FdaError::ShapeMismatch(_)
            | FdaError::NonFiniteValue { .. }
            | FdaError::Parse { .. }
            | FdaError::Schema(_)
            | FdaError::Io(_) => ErrorClass::Data,
            FdaError::InvalidParameter(_) | FdaError::InvalidBasis(_) => ErrorClass::Usage,
            _ => ErrorClass::Numerical,
        }
    }
}

impl From<std::io::Error> for FdaError {
    fn from(err: std::io::Error) -> Self {
        FdaError::Io(err.to_string())
    }
}
