//! Region-adaptive unsharp masking.
//!
//! The sharpened value is the input plus an amplified high-frequency
//! residual:
//!
//! ```text
//! out = I + alpha * (I - blur(I))
//! ```
//!
//! with a per-pixel `alpha` taken from an [`AlphaMap`]. The float form is
//! affine in alpha at every pixel; the 8-bit form rounds half-away-from-
//! zero and clamps to [0, 255]. No soft limiter is applied — overshoot
//! control is clamping only, which keeps the arithmetic exactly invertible
//! by the fixed-point degradation mode.

use crate::alpha::AlphaMap;
use crate::blur::gaussian_blur_3x3;
use crate::error::CoreError;
use crate::frame::{dimension_error, FloatPlane, Frame};
use crate::partition::PartitionMask;

/// Unclamped sharpening of a float plane with a per-pixel strength plane.
pub fn sharpen_plane(luma: &FloatPlane, alpha: &FloatPlane) -> Result<FloatPlane, CoreError> {
    if !luma.same_size(alpha) {
        return Err(dimension_error(
            (luma.width, luma.height),
            (alpha.width, alpha.height),
        ));
    }
    let blurred = gaussian_blur_3x3(luma);
    let values = luma
        .values
        .iter()
        .zip(&blurred.values)
        .zip(&alpha.values)
        .map(|((&i, &b), &a)| i + a * (i - b))
        .collect();
    Ok(FloatPlane {
        width: luma.width,
        height: luma.height,
        values,
    })
}

/// Sharpens a frame's luma with a spatially varying strength map; chroma is
/// copied through untouched.
pub fn sharpen_adaptive(frame: &Frame, amap: &AlphaMap) -> Result<Frame, CoreError> {
    let sharpened = sharpen_plane(&frame.luma_plane(), amap.plane())?;
    frame.with_luma_plane(&sharpened)
}

/// Uniform-strength unsharp masking; equivalent to [`sharpen_adaptive`]
/// with a constant map.
pub fn usm_uniform(frame: &Frame, alpha: f64) -> Result<Frame, CoreError> {
    let amap = AlphaMap::constant(frame.width(), frame.height(), alpha)?;
    sharpen_adaptive(frame, &amap)
}

/// Mean absolute luma difference across CU-boundary adjacent pixel pairs
/// minus the same mean across non-boundary pairs. Positive values indicate
/// seams (blocking artifacts) along the partition grid; either mean is
/// taken as 0 when its pair set is empty.
pub fn seam_score(luma: &FloatPlane, mask: &PartitionMask) -> Result<f64, CoreError> {
    if luma.width != mask.width() || luma.height != mask.height() {
        return Err(dimension_error(
            (luma.width, luma.height),
            (mask.width(), mask.height()),
        ));
    }
    let mut boundary = (0.0f64, 0usize);
    let mut interior = (0.0f64, 0usize);
    let mut visit = |x0: usize, y0: usize, x1: usize, y1: usize| {
        let diff = (luma.get(x1, y1) - luma.get(x0, y0)).abs();
        let tally = if mask.cu_id(x0, y0) == mask.cu_id(x1, y1) {
            &mut interior
        } else {
            &mut boundary
        };
        tally.0 += diff;
        tally.1 += 1;
    };
    for y in 0..luma.height {
        for x in 0..luma.width {
            if x + 1 < luma.width {
                visit(x, y, x + 1, y);
            }
            if y + 1 < luma.height {
                visit(x, y, x, y + 1);
            }
        }
    }
    let mean = |(sum, n): (f64, usize)| if n == 0 { 0.0 } else { sum / n as f64 };
    Ok(mean(boundary) - mean(interior))
}
