//! Fidelity and rate-quality scoring.
//!
//! Pixel metrics (PSNR, MS-SSIM, Charbonnier) compare luma planes in
//! double precision. Rate-quality scoring combines measured bitrates with
//! distortion (`rd_cost`) and folds reconstruction and rate terms into a
//! single figure (`overall_score`). BD-Rate over full RD curves lives in
//! [`bdrate`]; the multi-scale SSIM implementation lives in [`msssim`].

pub mod bdrate;
pub mod msssim;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::frame::{dimension_error, FloatPlane, Frame, Sequence};

pub use bdrate::{bd_rate, BdRateResult, RdCurve, RdPoint};
pub use msssim::{ms_ssim_frames, ms_ssim_planes, MS_SSIM_MIN_DIM};

/// Default Lagrange multiplier for [`rd_cost`].
pub const DEFAULT_LAMBDA_RD: f64 = 85.0;
/// Default rate-term weight for [`overall_score`].
pub const DEFAULT_GAMMA: f64 = 10.0;
/// Epsilon of the Charbonnier penalty.
pub const CHARBONNIER_EPSILON: f64 = 1e-12;

/// Sums by recursive halving. Error grows with log(n) rather than n, and
/// power-of-two counts of identical values sum exactly (every partial sum
/// is a plain exponent shift), which the Charbonnier identical-input
/// contract relies on.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

fn check_same_size(reference: &FloatPlane, distorted: &FloatPlane) -> Result<(), CoreError> {
    if !reference.same_size(distorted) {
        return Err(dimension_error(
            (reference.width, reference.height),
            (distorted.width, distorted.height),
        ));
    }
    Ok(())
}

/// Mean squared error between two planes.
pub fn mse_planes(reference: &FloatPlane, distorted: &FloatPlane) -> Result<f64, CoreError> {
    check_same_size(reference, distorted)?;
    let squares: Vec<f64> = reference
        .values
        .iter()
        .zip(&distorted.values)
        .map(|(&r, &d)| (r - d) * (r - d))
        .collect();
    Ok(pairwise_sum(&squares) / squares.len() as f64)
}

/// Peak signal-to-noise ratio; zero MSE is a distinguished value rather
/// than a float infinity so that reports can state it explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Finite(f64),
    Infinite,
}

impl Psnr {
    pub fn from_mse(mse: f64) -> Psnr {
        if mse == 0.0 {
            Psnr::Infinite
        } else {
            Psnr::Finite(10.0 * (255.0 * 255.0 / mse).log10())
        }
    }

    /// Decibel value, or `None` for the infinite (identical-input) case.
    pub fn as_db(&self) -> Option<f64> {
        match *self {
            Psnr::Finite(db) => Some(db),
            Psnr::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Psnr::Infinite)
    }

    /// True when the value is at least `threshold_db` (always true for the
    /// infinite case).
    pub fn at_least(&self, threshold_db: f64) -> bool {
        match *self {
            Psnr::Finite(db) => db >= threshold_db,
            Psnr::Infinite => true,
        }
    }
}

impl std::fmt::Display for Psnr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Psnr::Finite(db) => write!(f, "{db:.4} dB"),
            Psnr::Infinite => f.write_str("inf dB"),
        }
    }
}

// JSON carries no infinity, so the infinite flag maps to null.
impl Serialize for Psnr {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Psnr::Finite(db) => serializer.serialize_some(db),
            Psnr::Infinite => serializer.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for Psnr {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(match Option::<f64>::deserialize(deserializer)? {
            Some(db) => Psnr::Finite(db),
            None => Psnr::Infinite,
        })
    }
}

/// PSNR between two luma planes.
pub fn psnr_planes(reference: &FloatPlane, distorted: &FloatPlane) -> Result<Psnr, CoreError> {
    Ok(Psnr::from_mse(mse_planes(reference, distorted)?))
}

/// PSNR between the luma of two frames.
pub fn psnr_frames(reference: &Frame, distorted: &Frame) -> Result<Psnr, CoreError> {
    psnr_planes(&reference.luma_plane(), &distorted.luma_plane())
}

/// Sequence PSNR, computed from the mean per-frame MSE.
pub fn psnr_sequences(reference: &Sequence, distorted: &Sequence) -> Result<Psnr, CoreError> {
    let mses = per_frame(reference, distorted, |r, d| {
        mse_planes(&r.luma_plane(), &d.luma_plane())
    })?;
    Ok(Psnr::from_mse(pairwise_sum(&mses) / mses.len() as f64))
}

/// Mean Charbonnier penalty `sqrt(diff^2 + eps^2)` with eps = 1e-12 — a
/// smooth L1 surrogate. Identical inputs yield exactly eps.
pub fn charbonnier_planes(
    reference: &FloatPlane,
    distorted: &FloatPlane,
) -> Result<f64, CoreError> {
    check_same_size(reference, distorted)?;
    let terms: Vec<f64> = reference
        .values
        .iter()
        .zip(&distorted.values)
        .map(|(&r, &d)| {
            let diff = r - d;
            (diff * diff + CHARBONNIER_EPSILON * CHARBONNIER_EPSILON).sqrt()
        })
        .collect();
    Ok(pairwise_sum(&terms) / terms.len() as f64)
}

/// Charbonnier over frame luma.
pub fn charbonnier_frames(reference: &Frame, distorted: &Frame) -> Result<f64, CoreError> {
    charbonnier_planes(&reference.luma_plane(), &distorted.luma_plane())
}

/// Rate-distortion cost `J = rate + lambda * mse`. Rate is in bits,
/// distortion is mean squared error; `lambda` defaults to
/// [`DEFAULT_LAMBDA_RD`] at the CLI.
pub fn rd_cost(rate_bits: f64, mse: f64, lambda: f64) -> f64 {
    rate_bits + lambda * mse
}

/// Overall score `l_rec + gamma * l_rd`; `gamma` defaults to
/// [`DEFAULT_GAMMA`] at the CLI.
pub fn overall_score(l_rec: f64, l_rd: f64, gamma: f64) -> f64 {
    l_rec + gamma * l_rd
}

/// Scores for one frame pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameScores {
    pub frame: usize,
    pub psnr_db: Psnr,
    /// Absent when the frame is too small for the 5-scale computation.
    pub ms_ssim: Option<f64>,
    pub charbonnier: f64,
}

/// Per-frame series plus sequence-level summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QualityReport {
    pub frames: Vec<FrameScores>,
    /// Sequence PSNR from the mean per-frame MSE.
    pub psnr_db: Psnr,
    /// Mean per-frame MS-SSIM; absent when frames are too small.
    pub ms_ssim: Option<f64>,
    /// Mean per-frame Charbonnier penalty.
    pub charbonnier: f64,
}

fn per_frame<T>(
    reference: &Sequence,
    distorted: &Sequence,
    f: impl Fn(&Frame, &Frame) -> Result<T, CoreError>,
) -> Result<Vec<T>, CoreError> {
    if reference.frames.len() != distorted.frames.len() {
        return Err(CoreError::Precondition(format!(
            "sequences have {} and {} frames",
            reference.frames.len(),
            distorted.frames.len()
        )));
    }
    if reference.frames.is_empty() {
        return Err(CoreError::Precondition("empty sequence".into()));
    }
    reference
        .frames
        .iter()
        .zip(&distorted.frames)
        .map(|(r, d)| f(r, d))
        .collect()
}

/// Computes the full report for a sequence pair. MS-SSIM is attempted on
/// every frame; if the geometry is too small for the 5-scale computation
/// the field is left absent rather than failing the other metrics.
pub fn quality_report(
    reference: &Sequence,
    distorted: &Sequence,
) -> Result<QualityReport, CoreError> {
    let frames = per_frame(reference, distorted, |r, d| {
        let mse = mse_planes(&r.luma_plane(), &d.luma_plane())?;
        let ms_ssim = match ms_ssim_frames(r, d) {
            Ok(v) => Some(v),
            Err(CoreError::InputTooSmall { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok((mse, ms_ssim, charbonnier_frames(r, d)?))
    })?;
    let n = frames.len() as f64;
    let mean_mse = pairwise_sum(&frames.iter().map(|f| f.0).collect::<Vec<_>>()) / n;
    let ms_ssim = frames
        .iter()
        .map(|f| f.1)
        .collect::<Option<Vec<f64>>>()
        .map(|v| pairwise_sum(&v) / n);
    let charbonnier = pairwise_sum(&frames.iter().map(|f| f.2).collect::<Vec<_>>()) / n;
    Ok(QualityReport {
        frames: frames
            .into_iter()
            .enumerate()
            .map(|(i, (mse, ms_ssim, charbonnier))| FrameScores {
                frame: i,
                psnr_db: Psnr::from_mse(mse),
                ms_ssim,
                charbonnier,
            })
            .collect(),
        psnr_db: Psnr::from_mse(mean_mse),
        ms_ssim,
        charbonnier,
    })
}
