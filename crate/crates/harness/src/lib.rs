//! Rate-distortion measurement against external encoders.
//!
//! An [`EncoderSpec`] describes how to call an encoder/decoder pair via
//! command templates. [`rd_sweep`] drives a CRF ladder over it: encode,
//! measure the elementary-stream bitrate, decode back to Y4M, score the
//! result against a reference, and assemble per-metric RD curves ready
//! for BD-Rate comparison. Externally computed perceptual scores (VMAF
//! and friends) attach to a sweep via [`import_external_scores`] instead
//! of being recomputed here.

pub mod curvefile;
pub mod error;
pub mod spec;
pub mod sweep;

pub use curvefile::{import_external_scores, read_curve_csv, write_curve_csv, CurveRow};
pub use error::HarnessError;
pub use spec::EncoderSpec;
pub use sweep::{rd_sweep, run_encode, Metric, SweepOptions, SweepResult, SweepRung, DEFAULT_CRF_LADDER};
