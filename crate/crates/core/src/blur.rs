//! Separable blurs with replicate edge handling.

use crate::frame::FloatPlane;

/// Applies a symmetric 1D kernel horizontally then vertically.
/// `kernel[radius]` is the center tap.
fn separable_convolve(plane: &FloatPlane, kernel: &[f64]) -> FloatPlane {
    let radius = kernel.len() / 2;
    let (w, h) = (plane.width, plane.height);
    let clamp_x = |x: isize| -> usize { x.clamp(0, w as isize - 1) as usize };
    let clamp_y = |y: isize| -> usize { y.clamp(0, h as isize - 1) as usize };

    let mut horizontal = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, &k) in kernel.iter().enumerate() {
                let sx = clamp_x(x as isize + i as isize - radius as isize);
                acc += k * plane.get(sx, y);
            }
            horizontal[y * w + x] = acc;
        }
    }

    let mut out = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, &k) in kernel.iter().enumerate() {
                let sy = clamp_y(y as isize + i as isize - radius as isize);
                acc += k * horizontal[sy * w + x];
            }
            out[y * w + x] = acc;
        }
    }

    FloatPlane {
        width: w,
        height: h,
        values: out,
    }
}

/// 3x3 binomial blur: [1,2,1]/4 applied horizontally then vertically,
/// i.e. the kernel [[1,2,1],[2,4,2],[1,2,1]]/16 with replicate padding.
pub fn gaussian_blur_3x3(plane: &FloatPlane) -> FloatPlane {
    separable_convolve(plane, &[0.25, 0.5, 0.25])
}

/// Gaussian smoothing with standard deviation `sigma`, truncated at
/// radius ceil(3 sigma) and renormalized. `sigma <= 0` is the identity.
pub fn gaussian_smooth(plane: &FloatPlane, sigma: f64) -> FloatPlane {
    if sigma <= 0.0 {
        return plane.clone();
    }
    let radius = (3.0 * sigma).ceil() as usize;
    let mut kernel = Vec::with_capacity(2 * radius + 1);
    for i in -(radius as isize)..=(radius as isize) {
        let d = i as f64;
        kernel.push((-d * d / (2.0 * sigma * sigma)).exp());
    }
    let sum: f64 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= sum;
    }
    separable_convolve(plane, &kernel)
}
