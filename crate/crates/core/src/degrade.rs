//! Training-pair degradation: region-adaptive blurring of a ground-truth
//! frame.
//!
//! Two modes are provided. Direct mode blurs the ground truth and mixes it
//! in per pixel:
//!
//! ```text
//! LQ = (GT + alpha * blur(GT)) / (1 + alpha)
//! ```
//!
//! Fixed-point mode solves the implicit variant where the blur is taken of
//! the degraded frame itself, `LQ = (GT + alpha * blur(LQ)) / (1 + alpha)`.
//! That form is the exact algebraic inverse of unsharp masking: at the
//! fixed point, `LQ + alpha * (LQ - blur(LQ)) = GT` identically, so
//! sharpening the result with the same strength map reconstructs the
//! ground truth. The iteration map is a sup-norm contraction with factor
//! `max alpha / (1 + max alpha) < 1`, so convergence is geometric from any
//! starting point; we start at the ground truth.

use crate::alpha::{build_hard_alpha_map, AlphaTable};
use crate::blur::gaussian_blur_3x3;
use crate::error::CoreError;
use crate::frame::{dimension_error, FloatPlane, Frame};
use crate::partition::PartitionMask;

use serde::{Deserialize, Serialize};

/// Which reading of the degradation equation to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegradeMode {
    /// Blur the ground truth (the explicit form).
    #[default]
    Direct,
    /// Blur the degraded frame (implicit form, solved by fixed-point
    /// iteration); the exact inverse of sharpening.
    FixedPoint,
}

impl std::str::FromStr for DegradeMode {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(DegradeMode::Direct),
            "fixedpoint" => Ok(DegradeMode::FixedPoint),
            other => Err(CoreError::Precondition(format!(
                "unknown degrade mode '{other}' (expected direct or fixedpoint)"
            ))),
        }
    }
}

impl std::fmt::Display for DegradeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DegradeMode::Direct => "direct",
            DegradeMode::FixedPoint => "fixedpoint",
        })
    }
}

fn check_alpha(gt: &FloatPlane, alpha: &FloatPlane) -> Result<(), CoreError> {
    if !gt.same_size(alpha) {
        return Err(dimension_error(
            (gt.width, gt.height),
            (alpha.width, alpha.height),
        ));
    }
    Ok(())
}

/// One application of the mixing step with a fixed blur plane.
fn mix(gt: &FloatPlane, blurred: &FloatPlane, alpha: &FloatPlane) -> FloatPlane {
    let values = gt
        .values
        .iter()
        .zip(&blurred.values)
        .zip(&alpha.values)
        .map(|((&g, &b), &a)| (g + a * b) / (1.0 + a))
        .collect();
    FloatPlane {
        width: gt.width,
        height: gt.height,
        values,
    }
}

/// Direct-mode degradation of a float plane: `(GT + alpha*blur(GT)) / (1+alpha)`.
pub fn degrade_direct_plane(gt: &FloatPlane, alpha: &FloatPlane) -> Result<FloatPlane, CoreError> {
    check_alpha(gt, alpha)?;
    let blurred = gaussian_blur_3x3(gt);
    Ok(mix(gt, &blurred, alpha))
}

/// Result of the fixed-point solve, including the convergence trace.
#[derive(Debug, Clone)]
pub struct FixedPoint {
    /// The converged low-quality plane.
    pub plane: FloatPlane,
    /// Number of iteration steps applied.
    pub iterations: usize,
    /// Sup-norm change of each step, in order; the last entry is < tol.
    pub residuals: Vec<f64>,
}

/// Solves `X = (GT + alpha*blur(X)) / (1+alpha)` by iterating from X = GT
/// until the largest per-pixel change of a step drops below `tol`.
pub fn degrade_fixed_point_plane(
    gt: &FloatPlane,
    alpha: &FloatPlane,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPoint, CoreError> {
    check_alpha(gt, alpha)?;
    if !(tol > 0.0) {
        return Err(CoreError::Precondition(format!(
            "fixed-point tolerance must be > 0, got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(CoreError::Precondition(
            "fixed-point max_iter must be >= 1".into(),
        ));
    }
    let mut current = gt.clone();
    let mut residuals = Vec::new();
    for iteration in 1..=max_iter {
        let blurred = gaussian_blur_3x3(&current);
        let next = mix(gt, &blurred, alpha);
        let residual = next.max_abs_diff(&current);
        residuals.push(residual);
        current = next;
        if residual < tol {
            return Ok(FixedPoint {
                plane: current,
                iterations: iteration,
                residuals,
            });
        }
    }
    Err(CoreError::NonConvergence {
        iterations: max_iter,
        residual: *residuals.last().expect("max_iter >= 1"),
    })
}

/// Direct-mode degradation of a frame's luma. Returns the quantized 8-bit
/// frame (chroma copied through untouched) alongside the unclamped float
/// plane for callers that need exact arithmetic.
pub fn degrade_direct(
    gt: &Frame,
    mask: &PartitionMask,
    table: &AlphaTable,
) -> Result<(Frame, FloatPlane), CoreError> {
    let alpha = build_hard_alpha_map(mask, table)?;
    let low = degrade_direct_plane(&gt.luma_plane(), &alpha)?;
    let frame = gt.with_luma_plane(&low)?;
    Ok((frame, low))
}

/// Fixed-point degradation of a frame's luma; see [`degrade_fixed_point_plane`].
pub fn degrade_fixed_point(
    gt: &Frame,
    mask: &PartitionMask,
    table: &AlphaTable,
    tol: f64,
    max_iter: usize,
) -> Result<(Frame, FloatPlane), CoreError> {
    let alpha = build_hard_alpha_map(mask, table)?;
    let solved = degrade_fixed_point_plane(&gt.luma_plane(), &alpha, tol, max_iter)?;
    let frame = gt.with_luma_plane(&solved.plane)?;
    Ok((frame, solved.plane))
}
