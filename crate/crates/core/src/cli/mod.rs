//! Declarative runs: strict JSON configs, task dispatch and artifact output.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 i/o error. Failures print one JSON line on standard error.

mod config;
mod run;
mod state;

use std::fmt;

use serde::Serialize;

pub use config::{
    BasisConfig, Format, GridConfig, HamiltonianConfig, KickConfig, LevelsConfig, OperatorSpec, OutputConfig, Params,
    RunConfig, Task, Term,
};
pub use run::{run, run_config, RunOptions, RunSummary, DEFAULT_SEED};
pub use state::{GaussianComponent, StateSpec};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Config,
    Numerical,
    Io,
}

/// A run failure classified by exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct CliError {
    pub kind: ErrorKind,
    /// Dotted path of the offending config field, when known.
    pub field: Option<String>,
    pub message: String,
}

impl CliError {
    pub fn config(field: Option<String>, message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Config, field, message: message.into() }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            ErrorKind::Config => 2,
            ErrorKind::Numerical => 3,
            ErrorKind::Io => 4,
        }
    }

    /// One-line JSON diagnostic.
    pub fn diagnostic(&self) -> String {
        serde_json::json!({
            "error": self.kind,
            "code": self.exit_code(),
            "field": self.field,
            "message": self.message,
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.field {
            Some(field) => write!(f, "{field}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for CliError {}

/// Config path of a library parameter name.
fn config_path(name: &str) -> String {
    match name {
        "dt" | "t_end" | "stride" | "n_modes" => format!("params.{name}"),
        "hbar" => "hamiltonian.hbar".to_string(),
        _ => name.to_string(),
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = if e.is_numerical() {
            ErrorKind::Numerical
        } else if matches!(e, Error::Io { .. } | Error::Format { .. }) {
            ErrorKind::Io
        } else {
            ErrorKind::Config
        };
        let field = match &e {
            Error::InvalidParameter { name, .. } | Error::Degenerate { name, .. } => Some(config_path(name)),
            _ => None,
        };
        CliError { kind, field, message: e.to_string() }
    }
}
