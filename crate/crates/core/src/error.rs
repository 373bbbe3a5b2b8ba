use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),

    /// The computation would overflow double precision.
    #[error("range error: {0}")]
    Range(String),

    /// A photon budget cannot be realized by any squeezing strength.
    #[error("infeasible photon budget: {0}")]
    Infeasible(String),

    /// Photon subtraction annihilated the state.
    #[error("state has zero norm after subtracting {subtracted} photon(s)")]
    ZeroNorm { subtracted: u32 },

    #[error("truncated state is not converged: tail mass {tail_mass:.3e} >= tolerance {tolerance:.3e} at dims {dims}")]
    TruncationUnsafe {
        tail_mass: f64,
        tolerance: f64,
        dims: usize,
    },

    #[error("operator series did not converge within {iterations} terms")]
    NonConvergence { iterations: usize },

    #[error("expected a {expected}-mode state, got {found}-mode")]
    ModeMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid sweep specification: {0}")]
    InvalidSpec(String),
}
