//! CLI error classes with stable exit codes and machine-readable output.

use std::fmt;
use std::path::Path;

use agency_core::Error as CoreError;

/// One variant per externally distinguishable failure class. Exit codes
/// partition the classes disjointly; see `exit_code`.
#[derive(Debug)]
pub enum CliError {
    FileNotFound(String),
    Parse(String),
    Validation(String),
    Dimension(String),
    Singularity(String),
    IterationLimit(String),
    Resource(String),
    Domain(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::FileNotFound(_) => 3,
            CliError::Parse(_) => 4,
            CliError::Validation(_) => 5,
            CliError::Dimension(_) => 6,
            CliError::Singularity(_) => 7,
            CliError::IterationLimit(_) => 8,
            CliError::Resource(_) => 9,
            CliError::Domain(_) => 10,
            CliError::Io(_) => 11,
        }
    }

    pub fn class(&self) -> &'static str {
        match self {
            CliError::FileNotFound(_) => "file_not_found",
            CliError::Parse(_) => "parse",
            CliError::Validation(_) => "validation",
            CliError::Dimension(_) => "dimension",
            CliError::Singularity(_) => "singularity",
            CliError::IterationLimit(_) => "iteration_limit",
            CliError::Resource(_) => "resource",
            CliError::Domain(_) => "domain",
            CliError::Io(_) => "io",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::FileNotFound(m)
            | CliError::Parse(m)
            | CliError::Validation(m)
            | CliError::Dimension(m)
            | CliError::Singularity(m)
            | CliError::IterationLimit(m)
            | CliError::Resource(m)
            | CliError::Domain(m)
            | CliError::Io(m) => m,
        }
    }

    /// The JSON error object printed to stderr on failure.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": {
                "class": self.class(),
                "message": self.message(),
                "exit_code": self.exit_code(),
            }
        })
        .to_string()
    }

    pub fn from_read(path: &Path, err: std::io::Error) -> Self {
        if err.kind() == std::io::ErrorKind::NotFound {
            CliError::FileNotFound(format!("{}: no such file", path.display()))
        } else {
            CliError::Io(format!("{}: {err}", path.display()))
        }
    }

    /// JSON failures split into syntax (parse) and content (validation)
    /// classes; the domain types run their own checks during deserialization
    /// and surface here as data errors.
    pub fn from_json(path: &Path, err: serde_json::Error) -> Self {
        use serde_json::error::Category;
        match err.classify() {
            Category::Syntax | Category::Eof | Category::Io => {
                CliError::Parse(format!("{}: {err}", path.display()))
            }
            Category::Data => CliError::Validation(format!("{}: {err}", path.display())),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.class(), self.message())
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let msg = err.to_string();
        match err {
            CoreError::Dimension(_) => CliError::Dimension(msg),
            CoreError::Validation(_) => CliError::Validation(msg),
            CoreError::Singularity(_) => CliError::Singularity(msg),
            CoreError::IterationLimit { .. } => CliError::IterationLimit(msg),
            CoreError::Resource(_) => CliError::Resource(msg),
            CoreError::Domain(_) => CliError::Domain(msg),
        }
    }
}

/// Exit-code table shown in `--help`.
pub const EXIT_CODE_HELP: &str = "\
Exit codes:
    0   success
    2   command-line usage error
    3   input file not found
    4   input file failed to parse (JSON syntax)
    5   validation error (bad values, bad config key, non-stochastic rows)
    6   dimension mismatch between inputs
    7   singular divergence (q = 0 on the support of p with smoothing 0)
    8   iteration limit reached before certifying the tolerance
    9   resource limit exceeded (action-sequence enumeration cap)
   10   domain error (argument outside a formula's domain)
   11   i/o error while reading or writing

On failure a machine-readable object {\"error\": {\"class\", \"message\",
\"exit_code\"}} is printed to stderr.";
