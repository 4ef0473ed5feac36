use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{stage}: invalid input {input}: {message}")]
    Input {
        stage: &'static str,
        input: String,
        message: String,
    },

    #[error("{stage}: {input}: {message}")]
    Compute {
        stage: &'static str,
        input: String,
        message: String,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl PipelineError {
    /// 1 for configuration and input problems, 2 for failures while computing
    /// or writing results.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::Read { .. } | PipelineError::Input { .. } => 1,
            PipelineError::Compute { .. } | PipelineError::Write { .. } => 2,
        }
    }

    pub fn input(stage: &'static str, input: impl Into<String>, e: impl ToString) -> Self {
        PipelineError::Input {
            stage,
            input: input.into(),
            message: e.to_string(),
        }
    }

    pub fn compute(stage: &'static str, input: impl Into<String>, e: impl ToString) -> Self {
        PipelineError::Compute {
            stage,
            input: input.into(),
            message: e.to_string(),
        }
    }
}
