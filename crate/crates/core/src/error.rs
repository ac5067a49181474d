use thiserror::Error;

/// Errors raised by the phase-space engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid physical configuration: {0}")]
    InvalidConfig(String),

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("basis mismatch: expected `{expected}`, found `{found}`")]
    BasisMismatch { expected: String, found: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("bad mixture weights: {0}")]
    BadWeights(String),

    #[error("transformation matrix has {count} entries with |T| < {threshold:.1e} (min {min_abs:.3e})")]
    SingularTransform { count: usize, threshold: f64, min_abs: f64 },

    #[error("axes are not uniform")]
    AxesNotUniform,

    #[error("invalid phase-space axes: {0}")]
    InvalidAxes(String),

    #[error("kernel vanishes at (theta, tau) = ({theta:.6}, {tau:.6})")]
    KernelZero { theta: f64, tau: f64 },

    #[error("field role mismatch: expected {expected}, found {found}")]
    WrongRole { expected: String, found: String },

    #[error("phase-space axes of the two fields differ")]
    AxesMismatch,

    #[error("family mismatch: c-function is {cfunction}, distribution is {distribution}")]
    FamilyMismatch { cfunction: String, distribution: String },

    #[error("operators do not commute (commutator norm {norm:.3e})")]
    NotCommuting { norm: f64 },

    #[error("force constant must be nonzero")]
    ZeroForce,

    #[error("state support clipped by the grid (boundary amplitude {boundary_amplitude:.3e})")]
    SupportClipped { boundary_amplitude: f64 },
}

impl Error {
    /// Short variant name, printed by the command line front end.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::BasisMismatch { .. } => "BasisMismatch",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::BadWeights(_) => "BadWeights",
            Error::SingularTransform { .. } => "SingularTransform",
            Error::AxesNotUniform => "AxesNotUniform",
            Error::InvalidAxes(_) => "InvalidAxes",
            Error::KernelZero { .. } => "KernelZero",
            Error::WrongRole { .. } => "WrongRole",
            Error::AxesMismatch => "AxesMismatch",
            Error::FamilyMismatch { .. } => "FamilyMismatch",
            Error::NotCommuting { .. } => "NotCommuting",
            Error::ZeroForce => "ZeroForce",
            Error::SupportClipped { .. } => "SupportClipped",
        }
    }

    pub(crate) fn basis(expected: &impl ToString, found: &impl ToString) -> Self {
        Error::BasisMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
