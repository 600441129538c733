//! Batch front end: scenario files, solver orchestration, kernel
//! verification, refinement studies and oracle comparison.

pub mod commands;
pub mod error;
pub mod scenario;
pub mod solve;
pub mod study;

pub use error::{CliError, CliResult};
pub use scenario::Scenario;
