use thiserror::Error;

use prandtl_core::Error as CoreError;

/// Failures of a CLI invocation, each mapped to a process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read scenario {path}: {message}")]
    Scenario { path: String, message: String },

    #[error("{0}")]
    Core(#[from] CoreError),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("resource guard: {0}")]
    Resource(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(CoreError::from(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Scenario { .. } | CliError::Resource(_) => 2,
            CliError::Core(CoreError::Config(_)) => 2,
            CliError::Core(CoreError::Compatibility(_)) => 3,
            CliError::Core(CoreError::NonConvergence { .. }) => 4,
            CliError::Verification(_) => 5,
            CliError::Core(_) => 1,
        }
    }

    /// Machine-readable identifier printed on stderr.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage_error",
            CliError::Scenario { .. } => "scenario_error",
            CliError::Resource(_) => "resource_guard",
            CliError::Verification(_) => "verification_failure",
            CliError::Core(e) => match e {
                CoreError::Config(_) => "config_error",
                CoreError::Domain(_) => "domain_error",
                CoreError::Compatibility(_) => "compatibility_error",
                CoreError::DecayViolation { .. } => "decay_violation",
                CoreError::NonConvergence { .. } => "non_convergence",
                CoreError::Instability(_) => "instability",
                CoreError::InsufficientDecay(_) => "insufficient_decay",
                CoreError::Io(_) => "io_error",
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
