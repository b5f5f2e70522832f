//! Error-to-exit-code mapping.
//!
//! The process contract: 0 success, 1 internal/computation errors, 2
//! argument and configuration errors, 3 I/O errors (unreadable, missing,
//! or malformed files; absent binaries). clap owns the flag-parsing layer
//! and already exits 2 on its own; everything raised past parsing is
//! classified here.

use adasharp_core::CoreError;
use adasharp_harness::HarnessError;

pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

/// A failure carrying the exit code it should terminate with.
#[derive(Debug)]
pub struct Fail {
    pub message: String,
    pub exit_code: u8,
}

impl std::fmt::Display for Fail {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Fail {}

impl Fail {
    pub fn internal(message: impl Into<String>) -> Fail {
        Fail {
            message: message.into(),
            exit_code: EXIT_INTERNAL,
        }
    }

    pub fn usage(message: impl Into<String>) -> Fail {
        Fail {
            message: message.into(),
            exit_code: EXIT_USAGE,
        }
    }

    pub fn io(message: impl Into<String>) -> Fail {
        Fail {
            message: message.into(),
            exit_code: EXIT_IO,
        }
    }

    /// Prefixes the message with the pipeline stage that raised it.
    pub fn stage(mut self, stage: &str) -> Fail {
        self.message = format!("{stage}: {}", self.message);
        self
    }
}

fn core_exit_code(e: &CoreError) -> u8 {
    match e {
        // Unreadable, truncated, or structurally broken files.
        CoreError::Io { .. }
        | CoreError::Format { .. }
        | CoreError::Truncated { .. }
        | CoreError::Unsupported(_) => EXIT_IO,
        // Domain violations and failed computations.
        CoreError::InvalidMask { .. }
        | CoreError::DimensionMismatch { .. }
        | CoreError::Precondition(_)
        | CoreError::NonConvergence { .. }
        | CoreError::InputTooSmall { .. }
        | CoreError::CurveArity { .. }
        | CoreError::NoOverlap(..) => EXIT_INTERNAL,
    }
}

impl From<CoreError> for Fail {
    fn from(e: CoreError) -> Fail {
        Fail {
            message: e.to_string(),
            exit_code: core_exit_code(&e),
        }
    }
}

fn harness_exit_code(e: &HarnessError) -> u8 {
    match e {
        // A bad command template is a configuration problem.
        HarnessError::Template(_) => EXIT_USAGE,
        HarnessError::MissingBinary { .. }
        | HarnessError::EmptyOutput { .. }
        | HarnessError::Import(_)
        | HarnessError::Io { .. } => EXIT_IO,
        HarnessError::ChildFailed { .. } | HarnessError::Precondition(_) => EXIT_INTERNAL,
        HarnessError::Rung { source, .. } => harness_exit_code(source),
        HarnessError::Core(c) => core_exit_code(c),
    }
}

/// Renders the full chain; `Rung`'s display omits its source, so it is
/// stitched back in here.
fn harness_message(e: &HarnessError) -> String {
    match e {
        HarnessError::Rung { crf, source } => {
            format!("crf {crf} rung failed: {}", harness_message(source))
        }
        other => other.to_string(),
    }
}

impl From<HarnessError> for Fail {
    fn from(e: HarnessError) -> Fail {
        Fail {
            message: harness_message(&e),
            exit_code: harness_exit_code(&e),
        }
    }
}
