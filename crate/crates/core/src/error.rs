use thiserror::Error;

/// Errors raised anywhere in the analysis pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid knot vector: {0}")]
    InvalidKnots(String),

    #[error("parameter {value} outside domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("derivative order {requested} exceeds supported order {max}")]
    DerivativeOrder { requested: usize, max: usize },

    #[error("coefficient vector has length {got}, expected {expected}")]
    CoefficientLength { got: usize, expected: usize },

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("invalid layup: {0}")]
    InvalidLayup(String),

    #[error("invalid discretization: {0}")]
    InvalidScheme(String),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("solver residual {residual:e} above tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("invalid sampling: {0}")]
    InvalidSampling(String),

    #[error("{0}")]
    Recovery(String),

    #[error("oracle system is singular: {0}")]
    SingularOracle(String),

    #[error("reference profile has zero maximum")]
    ZeroReference,

    #[error("profile lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("config line {line}, column {column}: {message}")]
    Config { line: usize, column: usize, message: String },

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Short stable identifier, used in machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidKnots(_) => "invalid-knots",
            Error::OutOfDomain { .. } => "out-of-domain",
            Error::DerivativeOrder { .. } => "derivative-order",
            Error::CoefficientLength { .. } => "coefficient-length",
            Error::InvalidMaterial(_) => "invalid-material",
            Error::InvalidLayup(_) => "invalid-layup",
            Error::InvalidScheme(_) => "invalid-scheme",
            Error::Factorization(_) => "factorization",
            Error::Residual { .. } => "residual",
            Error::InvalidSampling(_) => "invalid-sampling",
            Error::Recovery(_) => "recovery",
            Error::SingularOracle(_) => "singular-oracle",
            Error::ZeroReference => "zero-reference",
            Error::LengthMismatch(..) => "length-mismatch",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
        }
    }
}
