use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::collision::IntersectionReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("unsupported format: {0}")]
    Unsupported(String),

    #[error("schema mismatch in {path}: {message}")]
    Schema { path: PathBuf, message: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("empty surface: {0}")]
    EmptySurface(String),

    #[error("no collision-free configuration after {iterations} iterations ({stage})")]
    NonConvergence {
        stage: &'static str,
        iterations: usize,
        reports: Vec<IntersectionReport>,
    },

    #[error("topology check failed: {0}")]
    Topology(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

/// Coarse error classes surfaced to the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Argument,
    Io,
    DegenerateInput,
    NonConvergence,
    Internal,
}

impl ErrorCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Argument => "argument",
            ErrorCategory::Io => "io",
            ErrorCategory::DegenerateInput => "degenerate_input",
            ErrorCategory::NonConvergence => "non_convergence",
            ErrorCategory::Internal => "internal",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Argument => 2,
            ErrorCategory::Io => 3,
            ErrorCategory::DegenerateInput => 4,
            ErrorCategory::NonConvergence => 5,
            ErrorCategory::Internal => 1,
        }
    }
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Innermost error, looking through stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self.root() {
            Error::Argument(_) => ErrorCategory::Argument,
            Error::Validation(_)
            | Error::Format(_)
            | Error::Unsupported(_)
            | Error::Schema { .. }
            | Error::Io { .. } => ErrorCategory::Io,
            Error::Degenerate(_) | Error::EmptySurface(_) => ErrorCategory::DegenerateInput,
            Error::NonConvergence { .. } => ErrorCategory::NonConvergence,
            Error::Topology(_) | Error::Stage { .. } => ErrorCategory::Internal,
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.in_stage(stage))
    }
}
