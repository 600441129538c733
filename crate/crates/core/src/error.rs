use thiserror::Error;

/// Errors raised by the solver and its numerical building blocks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("compatibility error: {0}")]
    Compatibility(String),

    /// `e^Y |u|` left the admissible range somewhere on the grid.
    #[error("decay violation: e^Y|u| = {value:e} at Y = {y} exceeds guard {guard:e}")]
    DecayViolation { value: f64, y: f64, guard: f64 },

    #[error("Picard iteration did not converge after {iterations} iterates (last residual {last:e})")]
    NonConvergence { iterations: usize, last: f64, residual_history: Vec<f64> },

    #[error("instability: sup norm {0:e} exceeded blow-up threshold")]
    Instability(f64),

    #[error("insufficient decay: {0}")]
    InsufficientDecay(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
