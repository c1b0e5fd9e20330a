use thiserror::Error;

/// Errors raised by the library. Every fallible operation returns this type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GsdError {
    /// Input violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Evaluation point lies on a singularity of a closed-form expression.
    #[error("domain error: {0}")]
    Domain(String),
    /// Weyl function evaluated within the pole threshold.
    #[error("pole of the Weyl function near z = {nearest}")]
    Pole {
        /// Closest pole of the block's reference operator.
        nearest: f64,
    },
    /// A linear system that must be invertible was singular.
    #[error("singular system at z = {re}{im:+}i (eigenvalue candidate)")]
    Singular { re: f64, im: f64 },
    /// Two sufficient conditions produced incompatible verdicts.
    #[error("internal consistency violated: {0}")]
    Contradiction(String),
}

pub type Result<T> = std::result::Result<T, GsdError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(GsdError::InvalidInput(msg.into()))
}
