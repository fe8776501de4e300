use thiserror::Error;

/// Errors produced by the physics layer.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// The observable triple sits on a singularity of the Lagrange-multiplier
    /// reconstruction (vanishing denominator or non-positive log argument).
    #[error("singular state: {0}")]
    Singular(String),

    /// The adaptive integrator could not meet the requested tolerance.
    #[error("integrator failure: {0}")]
    Integrator(String),

    /// Adaptive quadrature exceeded its recursion budget.
    #[error("quadrature failure: {0}")]
    Quadrature(String),

    /// The one-cycle map has no attracting fixed point.
    #[error("cycle map is not contractive (spectral radius {spectral_radius:.6})")]
    NonContractive { spectral_radius: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
