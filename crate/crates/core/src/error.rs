use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("edge probability {value} at ({row}, {col}) is outside [0, 1]")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {0}")]
    NotPsd(f64),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("invalid overlap profile: {0}")]
    InvalidProfile(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("target degree {target} needs alpha = {alpha}, which pushes an edge probability to {max_probability}")]
    DegreeTooLarge {
        target: f64,
        alpha: f64,
        max_probability: f64,
    },

    #[error("alpha estimate must be positive, got {0}")]
    NonpositiveAlpha(f64),

    #[error("all {0} selected eigenvalues are nonpositive")]
    DeficientSpectrum(usize),

    #[error("k-medians needs at least {k} points, got {n}")]
    TooFewPoints { n: usize, k: usize },

    #[error("center Gram matrix is singular (condition number {0:e})")]
    SingularCenters(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
