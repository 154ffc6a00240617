use thiserror::Error;

/// Errors raised by the simulation, filter and training code.
///
/// Variants are split so a front end can tell bad input (`is_validation`)
/// from failures that happen while a campaign is running.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FdssError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("degenerate filter: {0}")]
    DegenerateFilter(String),

    #[error("constraint violation: {0}")]
    Constraint(String),

    #[error("PAPR undefined for an all-zero waveform")]
    UndefinedPapr,

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("non-finite loss while perturbing coefficient {index}")]
    Gradient { index: usize },

    #[error("training diverged at step {step}")]
    Diverged { step: usize },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

impl FdssError {
    /// True for errors caused by the caller's inputs rather than by a run.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            FdssError::Config(_)
                | FdssError::Input(_)
                | FdssError::LengthMismatch { .. }
                | FdssError::Constraint(_)
                | FdssError::InsufficientSamples(_)
                | FdssError::Format(_)
        )
    }
}

impl From<std::io::Error> for FdssError {
    fn from(e: std::io::Error) -> Self {
        FdssError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for FdssError {
    fn from(e: serde_json::Error) -> Self {
        FdssError::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FdssError>;

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(FdssError::LengthMismatch { expected, actual })
    }
}
