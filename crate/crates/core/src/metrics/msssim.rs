//! Multi-scale structural similarity (MS-SSIM) on luma planes.
//!
//! Five scales; between scales the planes are downsampled by 2x2 mean
//! pooling. At each scale, local statistics are taken under an 11x11
//! Gaussian window (sigma 1.5) in "valid" mode, i.e. only where the window
//! fits entirely inside the plane. Scales 1-4 contribute their mean
//! contrast-structure term, the coarsest scale contributes the full SSIM
//! mean, and the terms combine as a weighted geometric product with the
//! standard exponents [0.0448, 0.2856, 0.3001, 0.2363, 0.1333].
//!
//! Contrast-structure means can turn negative on adversarial inputs
//! (e.g. an image against its negative); a negative mean would make the
//! fractional power undefined, so per-scale means are clamped at zero,
//! which collapses the product to zero — the natural "no structural
//! similarity" verdict.

use crate::error::CoreError;
use crate::frame::{dimension_error, FloatPlane, Frame};

/// Window side length of the local-statistics Gaussian.
const WINDOW: usize = 11;
/// Standard deviation of the window.
const WINDOW_SIGMA: f64 = 1.5;
/// Scale weights, fine to coarse.
const WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];
const K1: f64 = 0.01;
const K2: f64 = 0.03;
/// Dynamic range of 8-bit samples.
const L: f64 = 255.0;

/// Minimum frame dimension for the full 5-scale computation: the plane is
/// halved four times and the 11x11 window must still fit, so
/// 11 * 2^4 = 176.
pub const MS_SSIM_MIN_DIM: usize = 176;

/// Normalized 1-D Gaussian taps for the 11x11 window.
fn window_taps() -> [f64; WINDOW] {
    let mut taps = [0.0; WINDOW];
    let center = (WINDOW / 2) as f64;
    let mut sum = 0.0;
    for (i, tap) in taps.iter_mut().enumerate() {
        let d = i as f64 - center;
        *tap = (-d * d / (2.0 * WINDOW_SIGMA * WINDOW_SIGMA)).exp();
        sum += *tap;
    }
    for tap in &mut taps {
        *tap /= sum;
    }
    taps
}

/// Separable valid-mode convolution with the window taps; output shrinks
/// by WINDOW-1 in each dimension.
fn window_filter(plane: &FloatPlane, taps: &[f64; WINDOW]) -> FloatPlane {
    let out_w = plane.width - (WINDOW - 1);
    let rows = plane.height;
    // Horizontal pass.
    let mut horizontal = vec![0.0; out_w * rows];
    for y in 0..rows {
        for x in 0..out_w {
            let mut acc = 0.0;
            for (k, &t) in taps.iter().enumerate() {
                acc += t * plane.get(x + k, y);
            }
            horizontal[y * out_w + x] = acc;
        }
    }
    // Vertical pass.
    let out_h = plane.height - (WINDOW - 1);
    let mut values = vec![0.0; out_w * out_h];
    for y in 0..out_h {
        for x in 0..out_w {
            let mut acc = 0.0;
            for (k, &t) in taps.iter().enumerate() {
                acc += t * horizontal[(y + k) * out_w + x];
            }
            values[y * out_w + x] = acc;
        }
    }
    FloatPlane {
        width: out_w,
        height: out_h,
        values,
    }
}

/// 2x2 mean pooling with stride 2; odd trailing rows/columns are dropped.
fn downsample_2x2(plane: &FloatPlane) -> FloatPlane {
    let out_w = plane.width / 2;
    let out_h = plane.height / 2;
    let mut values = vec![0.0; out_w * out_h];
    for y in 0..out_h {
        for x in 0..out_w {
            values[y * out_w + x] = 0.25
                * (plane.get(2 * x, 2 * y)
                    + plane.get(2 * x + 1, 2 * y)
                    + plane.get(2 * x, 2 * y + 1)
                    + plane.get(2 * x + 1, 2 * y + 1));
        }
    }
    FloatPlane {
        width: out_w,
        height: out_h,
        values,
    }
}

/// Mean luminance term and mean contrast-structure term at one scale.
fn scale_means(a: &FloatPlane, b: &FloatPlane, taps: &[f64; WINDOW]) -> (f64, f64) {
    let c1 = (K1 * L) * (K1 * L);
    let c2 = (K2 * L) * (K2 * L);

    let product = |p: &FloatPlane, q: &FloatPlane| FloatPlane {
        width: p.width,
        height: p.height,
        values: p
            .values
            .iter()
            .zip(&q.values)
            .map(|(&x, &y)| x * y)
            .collect(),
    };

    let mu_a = window_filter(a, taps);
    let mu_b = window_filter(b, taps);
    let raw_aa = window_filter(&product(a, a), taps);
    let raw_bb = window_filter(&product(b, b), taps);
    let raw_ab = window_filter(&product(a, b), taps);

    let n = mu_a.values.len();
    let mut luminance_sum = 0.0;
    let mut cs_sum = 0.0;
    for i in 0..n {
        let (ma, mb) = (mu_a.values[i], mu_b.values[i]);
        let var_a = raw_aa.values[i] - ma * ma;
        let var_b = raw_bb.values[i] - mb * mb;
        let cov = raw_ab.values[i] - ma * mb;
        luminance_sum += (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
        cs_sum += (2.0 * cov + c2) / (var_a + var_b + c2);
    }
    (luminance_sum / n as f64, cs_sum / n as f64)
}

/// 5-scale MS-SSIM between two luma planes; 1.0 means identical structure.
pub fn ms_ssim_planes(reference: &FloatPlane, distorted: &FloatPlane) -> Result<f64, CoreError> {
    if !reference.same_size(distorted) {
        return Err(dimension_error(
            (reference.width, reference.height),
            (distorted.width, distorted.height),
        ));
    }
    let min_dim = reference.width.min(reference.height);
    if min_dim < MS_SSIM_MIN_DIM {
        return Err(CoreError::InputTooSmall {
            metric: "ms_ssim",
            min_dim: MS_SSIM_MIN_DIM,
            got_dim: min_dim,
        });
    }

    let taps = window_taps();
    let mut a = reference.clone();
    let mut b = distorted.clone();
    let mut score = 1.0;
    for (scale, &weight) in WEIGHTS.iter().enumerate() {
        let (luminance, cs) = scale_means(&a, &b, &taps);
        let term = if scale + 1 == WEIGHTS.len() {
            luminance * cs // full SSIM at the coarsest scale
        } else {
            cs
        };
        score *= term.max(0.0).powf(weight);
        if scale + 1 < WEIGHTS.len() {
            a = downsample_2x2(&a);
            b = downsample_2x2(&b);
        }
    }
    Ok(score)
}

/// MS-SSIM between the luma planes of two frames.
pub fn ms_ssim_frames(reference: &Frame, distorted: &Frame) -> Result<f64, CoreError> {
    ms_ssim_planes(&reference.luma_plane(), &distorted.luma_plane())
}
