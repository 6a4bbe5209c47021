use thiserror::Error;

/// Errors raised for malformed inputs.
///
/// An infinite divergence is a valid result, not an error; these variants are
/// reserved for inputs that violate a type invariant or an operation's
/// precondition.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("invalid state: eigenvalue {0:e} below tolerance")]
    InvalidState(f64),

    #[error("basis is not orthonormal (Gram deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("POVM element {index} is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { index: usize, min_eigenvalue: f64 },

    #[error("POVM elements do not sum to identity (deviation {0:e})")]
    Incomplete(f64),

    #[error("outcome labels must be distinct")]
    DegenerateLabels,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("outcome sets differ")]
    OutcomeMismatch,

    #[error("grids differ")]
    GridMismatch,

    #[error("bin width {bin_width} is not an integer multiple of spacing {spacing}")]
    IncommensurateBins { bin_width: f64, spacing: f64 },

    #[error("rank {rank} out of range for dimension {dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("infeasible constraint: {0}")]
    Infeasible(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("unsupported model family: {0}")]
    UnsupportedFamily(String),

    #[error("incompatible support: {0}")]
    IncompatibleSupport(String),

    #[error("grid captures too little mass (missing {0:e})")]
    InadequateGrid(f64),

    #[error("wavefunction is not normalized (norm {0})")]
    Unnormalized(f64),

    #[error("too few quadrature points: {got} < {needed}")]
    TooFewPoints { got: usize, needed: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("io: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
