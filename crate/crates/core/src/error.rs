use thiserror::Error;

/// Errors raised by the closed-form models and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// A hazard, tolerance or count lies outside its admissible domain.
    #[error("parameter domain: {0}")]
    Domain(String),

    /// The fabrication hazard is too far from the value that keeps the
    /// dual-network mean proportions normalized.
    #[error(
        "consistency constraint violated: lambda={lambda} but d*p/(p+q)={consistent} \
         (relative residual {relative_residual:.4} exceeds tolerance {tolerance})"
    )]
    Consistency {
        lambda: f64,
        consistent: f64,
        relative_residual: f64,
        tolerance: f64,
    },

    /// Inputs have the wrong shape (e.g. a missing conditional distribution).
    #[error("input shape: {0}")]
    Shape(String),

    /// Simulation configuration is unusable.
    #[error("configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;

pub(crate) fn domain(msg: impl Into<String>) -> ModelError {
    ModelError::Domain(msg.into())
}
