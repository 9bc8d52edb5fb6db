use std::path::PathBuf;

use ctcog::judgement::JudgementError;
use ctcog::oracle::OracleError;
use ctcog::substrate::SubstrateError;
use ctcog::task::TaskError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("syntax error at line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{path}: unknown name `{name}`")]
    UnresolvedName { path: String, name: String },
    #[error("{path}: {message}")]
    InvariantViolation { path: String, message: String },
    #[error("unsupported format_version {0}; expected 1")]
    FormatVersion(u32),
    #[error("unknown sweep parameter `{0}`; expected noise_rate, samples_per_subject or basis_angle")]
    UnknownParameter(String),
    #[error("invalid range `{0}`: {1}")]
    InvalidRange(String, String),
    #[error("invalid seed `{0}`")]
    InvalidSeed(String),
    #[error(transparent)]
    Judgement(#[from] JudgementError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{path}: {source}")]
    Substrate { path: String, source: SubstrateError },
    #[error("{path}: {source}")]
    Task { path: String, source: TaskError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("failed to write CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0} assertion(s) failed")]
    AssertionFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::AssertionFailed(_) => 1,
            CliError::Io { .. } | CliError::Csv(_) => 3,
            _ => 2,
        }
    }

    pub(crate) fn invariant(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::InvariantViolation {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep just the description
        let message = message.split(" at line ").next().unwrap_or(&message).to_string();
        CliError::Syntax {
            line: e.line(),
            col: e.column(),
            message,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
