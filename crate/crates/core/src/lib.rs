//! Core library for CTU-partition-guided video sharpening.
//!
//! The processing chain is: read a Y4M sequence, compute a per-frame CTU
//! quadtree partition mask via rate-distortion optimization, derive a
//! per-pixel sharpening-strength map from the mask, and either degrade
//! (to build low-quality/ground-truth pairs) or sharpen (region-adaptive
//! unsharp masking). Rate-quality evaluation lives in [`metrics`]:
//! PSNR, MS-SSIM, Charbonnier, RD cost, and BD-Rate over RD curves.

pub mod alpha;
pub mod blur;
pub mod degrade;
pub mod error;
pub mod frame;
pub mod metrics;
pub mod partition;
pub mod pgm;
pub mod sharpen;
pub mod y4m;

pub use alpha::{AlphaMap, AlphaTable};
pub use error::CoreError;
pub use frame::{FloatPlane, Frame, Sequence};
pub use partition::{PartitionMask, RdoParams};
