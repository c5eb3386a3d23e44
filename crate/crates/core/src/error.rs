use thiserror::Error;

/// Errors raised by the counting, sampling, tuning and typing routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid size model: {0}")]
    InvalidModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no term of size {size} with openness {openness}")]
    EmptySizeClass { openness: usize, size: usize },

    #[error("openness {openness} exceeds truncation level {truncation}")]
    TruncationExceeded { openness: usize, truncation: usize },

    #[error("size {size} exceeds the table bound {max_size}")]
    SizeOutOfRange { size: usize, max_size: usize },

    #[error("enumeration of size {size} refused (guard is {guard})")]
    SizeGuardExceeded { size: usize, guard: usize },

    #[error("x = {x} lies at or beyond the dominant singularity")]
    SingularityExceeded { x: f64 },

    #[error("degenerate target size {0}")]
    DegenerateTarget(usize),

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("generation aborted past the size ceiling {0}")]
    AbortCeiling(usize),

    #[error("gave up after {0} attempts")]
    AttemptsExhausted(u64),

    #[error("infeasible tuning: {0}")]
    Infeasible(String),

    #[error("term is not simply typeable")]
    NotTypeable,

    #[error("term is not closed")]
    OpenTermRejected,

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    /// Short stable name, used by the CLI on stderr.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidModel(_) => "InvalidModel",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::EmptySizeClass { .. } => "EmptySizeClass",
            Error::TruncationExceeded { .. } => "TruncationExceeded",
            Error::SizeOutOfRange { .. } => "SizeOutOfRange",
            Error::SizeGuardExceeded { .. } => "SizeGuardExceeded",
            Error::SingularityExceeded { .. } => "SingularityExceeded",
            Error::DegenerateTarget(_) => "DegenerateTarget",
            Error::NoConvergence(_) => "NoConvergence",
            Error::AbortCeiling(_) => "AbortCeiling",
            Error::AttemptsExhausted(_) => "AttemptsExhausted",
            Error::Infeasible(_) => "Infeasible",
            Error::NotTypeable => "NotTypeable",
            Error::OpenTermRejected => "OpenTermRejected",
            Error::Unsupported(_) => "Unsupported",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
