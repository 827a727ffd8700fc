use thiserror::Error;

/// Errors raised by operator construction, diagonalization and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("space mismatch: left operand lives on {left}, right operand on {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("operation needs a {0} factor in the space")]
    MissingFactor(&'static str),

    #[error("matrix is not Hermitian: max|H - H^dag| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("invalid Pauli axis `{0}` (expected x, y or z)")]
    InvalidAxis(String),

    #[error("state is not normalized: |psi| = {norm}")]
    NotNormalized { norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("requested {k} levels but only {max} are trusted for dimension {dim} (k <= dim/2)")]
    TooManyLevels { k: usize, max: usize, dim: usize },

    #[error(
        "root not bracketed in [{lo}, {hi}]: gap mismatch {f_lo:e} and {f_hi:e} have the same sign"
    )]
    RootNotBracketed { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error(
        "population {tail:e} beyond Fock level {from} exceeds {limit:e}; increase the cutoff (currently {cutoff})"
    )]
    TailPopulation {
        tail: f64,
        from: usize,
        limit: f64,
        cutoff: usize,
    },

    #[error("not converged at cutoff {cutoff}: drift {drift:e} under doubling exceeds {tolerance:e}")]
    NotConverged {
        cutoff: usize,
        drift: f64,
        tolerance: f64,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
