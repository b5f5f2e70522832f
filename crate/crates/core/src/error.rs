//! Error type shared by the core modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    /// Stream does not match the expected file format.
    #[error("format error at byte {offset}: {message}")]
    Format { offset: usize, message: String },

    /// A frame payload ended before the declared plane geometry was read.
    #[error("truncated payload in frame {frame_index}: expected {expected} bytes, got {got}")]
    Truncated {
        frame_index: usize,
        expected: usize,
        got: usize,
    },

    /// Colorspace or sample layout outside the supported set.
    #[error("unsupported format: {0}")]
    Unsupported(String),

    /// A mask pixel carries a value outside {8, 16, 32, 64}.
    #[error("invalid mask value {value} at pixel ({x}, {y})")]
    InvalidMask { x: usize, y: usize, value: u8 },

    /// Two planes or frames that must agree in size do not.
    #[error("dimension mismatch: expected {expected_width}x{expected_height}, got {got_width}x{got_height}")]
    DimensionMismatch {
        expected_width: usize,
        expected_height: usize,
        got_width: usize,
        got_height: usize,
    },

    /// An operation precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Fixed-point iteration did not reach the tolerance.
    #[error("fixed-point iteration did not converge in {iterations} iterations (residual {residual})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// Input too small for the requested metric.
    #[error("input too small for {metric}: needs min(width, height) >= {min_dim}, got {got_dim}")]
    InputTooSmall {
        metric: &'static str,
        min_dim: usize,
        got_dim: usize,
    },

    /// RD curve does not have enough points for the requested fit.
    #[error("curve '{curve}' has {got} points, need at least {need}")]
    CurveArity {
        curve: String,
        got: usize,
        need: usize,
    },

    /// RD curves have no common quality interval.
    #[error("quality ranges do not overlap: anchor [{0}, {1}] vs test [{2}, {3}]")]
    NoOverlap(f64, f64, f64, f64),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CoreError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CoreError::Io {
            path: path.into(),
            source,
        }
    }
}
