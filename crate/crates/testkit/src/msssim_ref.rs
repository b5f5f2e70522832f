//! Reference MS-SSIM, written for clarity rather than speed.
//!
//! Direct (non-separable) 11x11 Gaussian-window statistics at each of the
//! five standard scales, 2x2 mean pooling between scales, and the usual
//! weighted geometric combination: contrast-structure means at the four
//! fine scales, full SSIM mean (luminance times contrast-structure) at the
//! coarsest, each clamped at zero before exponentiation. Constants are the
//! published ones: sigma 1.5, K1 = 0.01, K2 = 0.03, L = 255, weights
//! [0.0448, 0.2856, 0.3001, 0.2363, 0.1333].

const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];
const C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
const C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

/// Normalized 2-D Gaussian window, built straight from the 2-D formula.
fn window_2d() -> [f64; WINDOW * WINDOW] {
    let mut w = [0.0; WINDOW * WINDOW];
    let center = (WINDOW / 2) as f64;
    let mut sum = 0.0;
    for y in 0..WINDOW {
        for x in 0..WINDOW {
            let (dx, dy) = (x as f64 - center, y as f64 - center);
            let g = (-(dx * dx + dy * dy) / (2.0 * SIGMA * SIGMA)).exp();
            w[y * WINDOW + x] = g;
            sum += g;
        }
    }
    for g in &mut w {
        *g /= sum;
    }
    w
}

/// Mean luminance and mean contrast-structure terms over every position
/// where the window fits.
fn scale_terms(a: &[f64], b: &[f64], width: usize, height: usize) -> (f64, f64) {
    let window = window_2d();
    let out_w = width - (WINDOW - 1);
    let out_h = height - (WINDOW - 1);
    let mut l_sum = 0.0;
    let mut cs_sum = 0.0;
    for oy in 0..out_h {
        for ox in 0..out_w {
            let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for wy in 0..WINDOW {
                for wx in 0..WINDOW {
                    let g = window[wy * WINDOW + wx];
                    let px = a[(oy + wy) * width + ox + wx];
                    let py = b[(oy + wy) * width + ox + wx];
                    sx += g * px;
                    sy += g * py;
                    sxx += g * px * px;
                    syy += g * py * py;
                    sxy += g * px * py;
                }
            }
            let var_x = sxx - sx * sx;
            let var_y = syy - sy * sy;
            let cov = sxy - sx * sy;
            l_sum += (2.0 * sx * sy + C1) / (sx * sx + sy * sy + C1);
            cs_sum += (2.0 * cov + C2) / (var_x + var_y + C2);
        }
    }
    let n = (out_w * out_h) as f64;
    (l_sum / n, cs_sum / n)
}

fn half(plane: &[f64], width: usize, height: usize) -> (Vec<f64>, usize, usize) {
    let (out_w, out_h) = (width / 2, height / 2);
    let mut out = Vec::with_capacity(out_w * out_h);
    for y in 0..out_h {
        for x in 0..out_w {
            out.push(
                (plane[2 * y * width + 2 * x]
                    + plane[2 * y * width + 2 * x + 1]
                    + plane[(2 * y + 1) * width + 2 * x]
                    + plane[(2 * y + 1) * width + 2 * x + 1])
                    / 4.0,
            );
        }
    }
    (out, out_w, out_h)
}

/// Five-scale MS-SSIM between two row-major planes. Panics on mismatched
/// lengths or planes too small for five scales — this is test support.
pub fn ms_ssim_reference(a: &[f64], b: &[f64], width: usize, height: usize) -> f64 {
    assert_eq!(a.len(), width * height);
    assert_eq!(b.len(), width * height);
    assert!(
        width.min(height) >= WINDOW << 4,
        "plane too small for 5 scales"
    );
    let (mut pa, mut pb) = (a.to_vec(), b.to_vec());
    let (mut w, mut h) = (width, height);
    let mut score = 1.0;
    for (scale, &weight) in WEIGHTS.iter().enumerate() {
        let (l, cs) = scale_terms(&pa, &pb, w, h);
        let term = if scale == WEIGHTS.len() - 1 { l * cs } else { cs };
        score *= term.max(0.0).powf(weight);
        if scale < WEIGHTS.len() - 1 {
            let (na, nw, nh) = half(&pa, w, h);
            let (nb, _, _) = half(&pb, w, h);
            pa = na;
            pb = nb;
            w = nw;
            h = nh;
        }
    }
    score
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_is_normalized_and_peaked_at_center() {
        let w = window_2d();
        let sum: f64 = w.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        let center = w[(WINDOW / 2) * WINDOW + WINDOW / 2];
        assert!(w.iter().all(|&g| g <= center));
    }

    #[test]
    fn identical_planes_score_one() {
        let plane = crate::gen::natural_plane(192, 192, 1);
        let score = ms_ssim_reference(&plane, &plane, 192, 192);
        assert!((score - 1.0).abs() < 1e-12, "got {score}");
    }

    #[test]
    fn distortion_lowers_the_score() {
        let a = crate::gen::natural_plane(192, 192, 2);
        let b: Vec<f64> = a
            .iter()
            .enumerate()
            .map(|(i, &v)| (v + ((i % 7) as f64 - 3.0) * 6.0).clamp(0.0, 255.0))
            .collect();
        let score = ms_ssim_reference(&a, &b, 192, 192);
        assert!(score < 1.0 && score > 0.0, "got {score}");
    }
}
