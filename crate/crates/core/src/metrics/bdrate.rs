//! Bjøntegaard delta rate between two rate-distortion curves.
//!
//! Each curve's log2(rate) is interpolated as a function of quality with a
//! monotone piecewise-cubic Hermite (PCHIP) — immune to the oscillation a
//! global cubic fit develops on 4-5 points. The difference of the two
//! interpolants is integrated in closed form over the common quality
//! interval, and the mean log2-rate gap maps back to a percentage:
//!
//! ```text
//! BD-Rate = (2^mean_gap - 1) * 100
//! ```
//!
//! Negative values mean the test curve reaches equal quality with fewer
//! bits.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// One measured (bitrate, quality) sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdPoint {
    pub rate_kbps: f64,
    pub quality: f64,
}

/// Rate-quality samples for one metric, sorted by rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RdCurve {
    metric_name: String,
    points: Vec<RdPoint>,
}

impl RdCurve {
    /// Builds a curve, checking that rates are finite, positive, and
    /// strictly increasing and that qualities are finite.
    pub fn new(metric_name: impl Into<String>, points: Vec<RdPoint>) -> Result<Self, CoreError> {
        let metric_name = metric_name.into();
        if points.is_empty() {
            return Err(CoreError::Precondition(format!(
                "curve '{metric_name}' has no points"
            )));
        }
        for (i, p) in points.iter().enumerate() {
            if !p.rate_kbps.is_finite() || p.rate_kbps <= 0.0 {
                return Err(CoreError::Precondition(format!(
                    "curve '{metric_name}' point {i} has non-positive rate {}",
                    p.rate_kbps
                )));
            }
            if !p.quality.is_finite() {
                return Err(CoreError::Precondition(format!(
                    "curve '{metric_name}' point {i} has non-finite quality"
                )));
            }
            if i > 0 && points[i - 1].rate_kbps >= p.rate_kbps {
                return Err(CoreError::Precondition(format!(
                    "curve '{metric_name}' rates must be strictly increasing ({} then {} at point {i})",
                    points[i - 1].rate_kbps,
                    p.rate_kbps
                )));
            }
        }
        Ok(RdCurve {
            metric_name,
            points,
        })
    }

    pub fn metric_name(&self) -> &str {
        &self.metric_name
    }

    pub fn points(&self) -> &[RdPoint] {
        &self.points
    }

    /// Same curve with every rate multiplied by `factor` (> 0).
    pub fn scaled_rates(&self, factor: f64) -> Result<RdCurve, CoreError> {
        RdCurve::new(
            self.metric_name.clone(),
            self.points
                .iter()
                .map(|p| RdPoint {
                    rate_kbps: p.rate_kbps * factor,
                    quality: p.quality,
                })
                .collect(),
        )
    }
}

/// BD-Rate outcome with the quality interval it was averaged over.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BdRateResult {
    pub bd_rate_percent: f64,
    /// Common quality interval [low, high] the mean was taken over.
    pub overlap: (f64, f64),
    /// Non-fatal oddities encountered (e.g. quality not monotone in rate).
    pub warnings: Vec<String>,
}

/// Monotone piecewise-cubic Hermite interpolant (PCHIP, Fritsch-Carlson
/// slopes with one-sided endpoint rules). `x` strictly increasing.
struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubic {
    fn fit(x: Vec<f64>, y: Vec<f64>) -> MonotoneCubic {
        let n = x.len();
        debug_assert!(n >= 2);
        let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        let mut slope = vec![0.0; n];
        for k in 1..n - 1 {
            if delta[k - 1] == 0.0 || delta[k] == 0.0 || delta[k - 1].signum() != delta[k].signum()
            {
                slope[k] = 0.0;
            } else {
                // Weighted harmonic mean of the neighboring secants; keeps
                // the interpolant monotone on monotone data.
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                slope[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
            }
        }
        slope[0] = Self::endpoint_slope(h[0], h.get(1).copied(), delta[0], delta.get(1).copied());
        slope[n - 1] = Self::endpoint_slope(
            h[n - 2],
            (n >= 3).then(|| h[n - 3]),
            delta[n - 2],
            (n >= 3).then(|| delta[n - 3]),
        );
        MonotoneCubic { x, y, slope }
    }

    /// One-sided three-point estimate, clipped so the end interval stays
    /// monotone.
    fn endpoint_slope(h0: f64, h1: Option<f64>, d0: f64, d1: Option<f64>) -> f64 {
        let (h1, d1) = match (h1, d1) {
            (Some(h1), Some(d1)) => (h1, d1),
            _ => return d0, // two points: the secant itself
        };
        let mut d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if d.signum() != d0.signum() || d0 == 0.0 {
            d = 0.0;
        } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
            d = 3.0 * d0;
        }
        d
    }

    /// Cubic coefficients on segment `i` in the local variable s = q - x[i]:
    /// y = c0 + c1*s + c2*s^2 + c3*s^3.
    fn segment_coefficients(&self, i: usize) -> [f64; 4] {
        let h = self.x[i + 1] - self.x[i];
        let d = (self.y[i + 1] - self.y[i]) / h;
        let (s0, s1) = (self.slope[i], self.slope[i + 1]);
        [
            self.y[i],
            s0,
            (3.0 * d - 2.0 * s0 - s1) / h,
            (s0 + s1 - 2.0 * d) / (h * h),
        ]
    }

    /// Value at `q`; `q` must lie within [x.first, x.last]. Exercised by
    /// the tests to cross-check the closed-form integral.
    #[cfg(test)]
    fn evaluate(&self, q: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x[1..n - 1].iter().position(|&xk| q < xk) {
            Some(i) => i,
            None => n - 2,
        };
        let [c0, c1, c2, c3] = self.segment_coefficients(i);
        let s = q - self.x[i];
        c0 + s * (c1 + s * (c2 + s * c3))
    }

    /// Exact integral over [lo, hi] ⊆ [x.first, x.last].
    fn integral(&self, lo: f64, hi: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..self.x.len() - 1 {
            let a = lo.max(self.x[i]);
            let b = hi.min(self.x[i + 1]);
            if b <= a {
                continue;
            }
            let [c0, c1, c2, c3] = self.segment_coefficients(i);
            let antiderivative = |s: f64| {
                s * (c0 + s * (c1 / 2.0 + s * (c2 / 3.0 + s * c3 / 4.0)))
            };
            total += antiderivative(b - self.x[i]) - antiderivative(a - self.x[i]);
        }
        total
    }
}

/// Quality-ascending (quality, log2 rate) arrays for one curve, with a
/// warning when the points had to be rearranged.
fn prepare(
    curve: &RdCurve,
    role: &str,
    warnings: &mut Vec<String>,
) -> Result<(Vec<f64>, Vec<f64>), CoreError> {
    if curve.points.len() < 4 {
        return Err(CoreError::CurveArity {
            curve: format!("{role} ({})", curve.metric_name),
            got: curve.points.len(),
            need: 4,
        });
    }
    let mut pairs: Vec<(f64, f64)> = curve
        .points
        .iter()
        .map(|p| (p.quality, p.rate_kbps.log2()))
        .collect();
    if pairs.windows(2).any(|w| w[1].0 <= w[0].0) {
        warnings.push(format!(
            "{role} curve quality is not monotone in rate; using the monotone rearrangement"
        ));
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite qualities"));
        if let Some(w) = pairs.windows(2).find(|w| w[1].0 == w[0].0) {
            return Err(CoreError::Precondition(format!(
                "{role} curve has duplicate quality {}; log-rate is not a function of quality",
                w[0].0
            )));
        }
    }
    Ok(pairs.into_iter().unzip())
}

/// BD-Rate of `test` against `anchor`, in percent.
pub fn bd_rate(anchor: &RdCurve, test: &RdCurve) -> Result<BdRateResult, CoreError> {
    let mut warnings = Vec::new();
    let (anchor_q, anchor_lr) = prepare(anchor, "anchor", &mut warnings)?;
    let (test_q, test_lr) = prepare(test, "test", &mut warnings)?;

    let lo = anchor_q[0].max(test_q[0]);
    let hi = anchor_q[anchor_q.len() - 1].min(test_q[test_q.len() - 1]);
    if !(hi > lo) {
        return Err(CoreError::NoOverlap(
            anchor_q[0],
            anchor_q[anchor_q.len() - 1],
            test_q[0],
            test_q[test_q.len() - 1],
        ));
    }

    let anchor_fit = MonotoneCubic::fit(anchor_q, anchor_lr);
    let test_fit = MonotoneCubic::fit(test_q, test_lr);
    let mean_gap = (test_fit.integral(lo, hi) - anchor_fit.integral(lo, hi)) / (hi - lo);
    Ok(BdRateResult {
        bd_rate_percent: (mean_gap.exp2() - 1.0) * 100.0,
        overlap: (lo, hi),
        warnings,
    })
}
