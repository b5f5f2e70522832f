//! Error type for encoder invocation and sweep assembly.

use std::path::PathBuf;

use adasharp_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// A command template violates the placeholder contract.
    #[error("template error: {0}")]
    Template(String),

    /// The program named by a template could not be found on
    /// ADASHARP_ENCODER_PATH or PATH.
    #[error("cannot find '{command}' (searched ADASHARP_ENCODER_PATH, then PATH)")]
    MissingBinary { command: String },

    /// A child process exited unsuccessfully.
    #[error("'{program}' failed ({status}); stderr:\n{stderr}")]
    ChildFailed {
        program: String,
        status: String,
        stderr: String,
    },

    /// The child exited cleanly but its output file is missing or empty.
    #[error("'{program}' produced no output at {}", path.display())]
    EmptyOutput { program: String, path: PathBuf },

    /// One rung of a sweep failed; the sweep was aborted.
    #[error("sweep aborted: crf {crf} rung failed")]
    Rung {
        crf: u32,
        #[source]
        source: Box<HarnessError>,
    },

    /// External score CSV does not line up with the sweep.
    #[error("score import: {0}")]
    Import(String),

    /// Caller-supplied parameters are out of contract.
    #[error("{0}")]
    Precondition(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}
