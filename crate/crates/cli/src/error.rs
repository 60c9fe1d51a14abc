use std::fmt;
use std::process::ExitCode;

use serde_json::json;

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input, missing files, schema violations. Exit 2.
    Validation(String),
    /// The data cannot support the requested test. Exit 3.
    Untestable(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Validation(_) => ExitCode::from(2),
            CliError::Untestable(_) => ExitCode::from(3),
        }
    }

    pub fn to_json(&self) -> String {
        let (kind, msg) = match self {
            CliError::Validation(m) => ("validation", m),
            CliError::Untestable(m) => ("untestable", m),
        };
        json!({ "error": kind, "message": msg }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Untestable(m) => f.write_str(m),
        }
    }
}

impl From<biclique_core::Error> for CliError {
    fn from(e: biclique_core::Error) -> Self {
        if e.is_untestable() {
            CliError::Untestable(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Adds the offending path to an error message.
pub fn at_path<T, E: fmt::Display>(path: &std::path::Path, r: Result<T, E>) -> CliResult<T> {
    r.map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}
