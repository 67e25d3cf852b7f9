use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least {min}, got {got}")]
    InvalidDimension { min: usize, got: usize },

    #[error("correlation {rho} is outside the feasible range [{min}, {max}] for n = {n}")]
    InfeasibleCorrelation {
        n: usize,
        rho: f64,
        min: f64,
        max: f64,
    },

    #[error("equicorrelation matrix is singular (n = {n}, rho = {rho})")]
    Singular { n: usize, rho: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("portfolio variance {0:e} is degenerate")]
    DegenerateVariance(f64),

    #[error("effective degrees of freedom {n_star} is outside (0, {n}]")]
    NStarOutOfRange { n: usize, n_star: f64 },

    #[error("correlation is undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("Fisher transform is infinite for r = {0}")]
    InfiniteTransform(f64),

    #[error("need at least {need} observations, got {got}")]
    InsufficientObservations { need: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("factor model has no factors")]
    NoFactors,

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("line {line}: {msg}")]
    MalformedRow { line: u64, msg: String },

    #[error("line {line}: non-positive price {price} for {asset} on {date}")]
    NonPositivePrice {
        line: u64,
        asset: String,
        date: String,
        price: f64,
    },

    #[error("line {line}: duplicate entry for ({date}, {asset})")]
    DuplicateEntry {
        line: u64,
        date: String,
        asset: String,
    },

    #[error("price panel has {0} missing cells; drop incomplete assets first")]
    IncompletePanel(usize),

    #[error("panel is empty: {0}")]
    EmptyPanel(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Singular { .. }
            | Error::DegenerateVariance(_)
            | Error::UndefinedCorrelation(_)
            | Error::InfiniteTransform(_)
            | Error::NotPositiveDefinite => ErrorKind::Numerical,
            Error::Io { .. } => ErrorKind::Io,
            Error::Csv(e) if e.is_io_error() => ErrorKind::Io,
            _ => ErrorKind::Validation,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
