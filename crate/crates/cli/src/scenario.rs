//! Scenario files: TOML with the outer-flow trace, the initial profile and
//! the solver, oracle and diagnostics settings.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use prandtl_core::fields::Field2D;
use prandtl_core::oracle::FDConfig;
use prandtl_core::prandtl::{EulerTrace, InitialProfile, SolverConfig};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiagnosticsConfig {
    /// Derivative order of the weighted norms.
    pub l: u32,
    /// Exponential weight `e^{μY}` of the weighted norms.
    pub mu: f64,
    /// Sector angle of the complex-Y domain; recorded in reports, never estimated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self { l: 2, mu: 1.0, theta: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub trace: EulerTrace,
    pub initial: InitialProfile,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub oracle: FDConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl Scenario {
    pub fn load(path: &Path) -> CliResult<Self> {
        let fail = |message: String| CliError::Scenario { path: path.display().to_string(), message };
        let text = std::fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Scenario { message, .. } => fail(message),
            other => other,
        })
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| CliError::Scenario { path: "<inline>".into(), message: e.to_string() })?;
        s.solver.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serialises")
    }

    /// Gauged initial datum on the solver grid.
    pub fn initial_field(&self) -> CliResult<Field2D> {
        Ok(self.initial.field(&self.solver.grid()?, &self.trace)?)
    }

    /// Same datum on the oracle's uniform grid.
    pub fn oracle_initial_field(&self) -> CliResult<Field2D> {
        Ok(self.initial.field(&self.oracle.grid()?, &self.trace)?)
    }
}
