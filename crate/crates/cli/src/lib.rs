//! Command-line plumbing around the estimation library: edge-list
//! ingestion, benchmark campaigns, and file emission.

pub mod bench;
pub mod edgelist;

use std::fmt;

/// CLI-level error, carrying the exit-code category.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or arguments (exit 1).
    Usage(String),
    /// Unreadable or malformed input data (exit 2).
    Data(String),
    /// The estimation pipeline failed (exit 3).
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Solver(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Data(_) => "data",
            CliError::Solver(_) => "solver",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Solver(m) => m,
        }
    }

    /// Machine-readable form for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.message(), "kind": self.kind() }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

impl From<graphon_core::Error> for CliError {
    fn from(e: graphon_core::Error) -> Self {
        match e {
            graphon_core::Error::InvalidArgument(_) => CliError::Usage(e.to_string()),
            graphon_core::Error::Stage { ref source, .. }
                if matches!(**source, graphon_core::Error::InvalidArgument(_)) =>
            {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
