use std::fmt::Display;

use thiserror::Error;
use trailrank_core::embed::EmbedError;

/// Failure classes, mapped one-to-one onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Usage,
    Data,
    Provider,
}

impl FailureKind {
    pub fn exit_code(self) -> i32 {
        match self {
            FailureKind::Usage => 1,
            FailureKind::Data => 2,
            FailureKind::Provider => 3,
        }
    }
}

#[derive(Debug, Error)]
#[error("{stage}: {message}")]
pub struct PipelineError {
    pub stage: &'static str,
    pub kind: FailureKind,
    pub message: String,
}

impl PipelineError {
    pub fn usage(stage: &'static str, msg: impl Display) -> Self {
        Self { stage, kind: FailureKind::Usage, message: msg.to_string() }
    }

    pub fn data(stage: &'static str, msg: impl Display) -> Self {
        Self { stage, kind: FailureKind::Data, message: msg.to_string() }
    }

    pub fn embed(stage: &'static str, e: EmbedError) -> Self {
        let kind = match e {
            EmbedError::Transport(_) | EmbedError::MalformedResponse(_) | EmbedError::DimensionMismatch { .. } => {
                FailureKind::Provider
            }
            EmbedError::InvalidSpec(_) | EmbedError::InvalidDimension(_) => FailureKind::Usage,
            _ => FailureKind::Data,
        };
        Self { stage, kind, message: e.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }
}
