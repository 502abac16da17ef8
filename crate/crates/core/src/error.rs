use thiserror::Error;

use crate::propagator::Evolution;

pub type Result<T> = std::result::Result<T, QhdError>;

#[derive(Debug, Error)]
pub enum QhdError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("state is in {found} representation, expected {expected}")]
    Representation {
        expected: &'static str,
        found: &'static str,
    },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("grid too coarse: {0}")]
    Resolution(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("unsupported schedule: {0}")]
    UnsupportedSchedule(String),
    #[error("target unreachable: {0}")]
    Unreachable(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    StepBudget {
        max_steps: usize,
        t: f64,
        partial: Box<Evolution>,
    },
    #[error("norm drift {drift:.3e} at t = {t} exceeds the instability threshold")]
    Instability { drift: f64, t: f64 },
    #[error("{}", format_config_errors(.0))]
    Config(Vec<ConfigIssue>),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// One problem found while validating a config file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    /// 1-based line in the source text, if the issue is tied to a line.
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl std::fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {}: {}: {}", l, self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

fn format_config_errors(issues: &[ConfigIssue]) -> String {
    let mut s = format!("{} config error(s)", issues.len());
    for i in issues {
        s.push_str("\n  ");
        s.push_str(&i.to_string());
    }
    s
}

impl QhdError {
    /// Numeric code used by the C ABI and the CLI.
    pub fn code(&self) -> i32 {
        match self {
            QhdError::InvalidParameter(_) => 1,
            QhdError::InvalidInput(_) => 2,
            QhdError::Representation { .. } => 3,
            QhdError::GridMismatch(_) => 4,
            QhdError::Domain(_) => 5,
            QhdError::Resolution(_) => 6,
            QhdError::Geometry(_) => 7,
            QhdError::Numeric(_) => 8,
            QhdError::UnsupportedSchedule(_) => 9,
            QhdError::Unreachable(_) => 10,
            QhdError::Hypothesis(_) => 11,
            QhdError::UnknownName(_) => 12,
            QhdError::StepBudget { .. } => 13,
            QhdError::Instability { .. } => 14,
            QhdError::Config(_) => 15,
            QhdError::Io(_) => 16,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> QhdError {
    QhdError::InvalidParameter(msg.into())
}
