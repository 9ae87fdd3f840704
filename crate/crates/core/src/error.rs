use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Gamma function pole at {0}")]
    GammaPole(Complex64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A model parameter violates an invariant, e.g. `a*c1 >= 1`.
    #[error("parameter violation: {0}")]
    Parameter(String),

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    /// Two singular factors within the collision tolerance of each other.
    #[error("pole collision near {0}")]
    Collision(Complex64),

    #[error("truncation tail bound {bound:e} exceeds the requested {requested:e}")]
    TailBound { bound: f64, requested: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
