//! Deterministic fixture generators.
//!
//! Everything is seeded ChaCha8, so a failing seed reproduces exactly on
//! any platform. Planes are returned as bare row-major `Vec<f64>` (always
//! integer-valued, in 0..=255) and masks as bare `Vec<u8>` of per-pixel
//! CU sizes, to keep this crate decoupled from the library under test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn noise_into(rng: &mut ChaCha8Rng, width: usize, height: usize) -> Vec<f64> {
    (0..width * height)
        .map(|_| rng.gen_range(0..256) as f64)
        .collect()
}

/// Uniform i.i.d. integer noise in 0..=255.
pub fn noise_plane(width: usize, height: usize, seed: u64) -> Vec<f64> {
    noise_into(&mut rng_for(seed), width, height)
}

fn mask_into(rng: &mut ChaCha8Rng, width: usize, height: usize, split_p: f64) -> Vec<u8> {
    let pw = width.div_ceil(64) * 64;
    let ph = height.div_ceil(64) * 64;
    let mut padded = vec![0u8; pw * ph];

    fn fill(
        values: &mut [u8],
        stride: usize,
        x0: usize,
        y0: usize,
        size: usize,
        split_p: f64,
        rng: &mut ChaCha8Rng,
    ) {
        if size > 8 && rng.gen_bool(split_p) {
            let half = size / 2;
            for (dx, dy) in [(0, 0), (half, 0), (0, half), (half, half)] {
                fill(values, stride, x0 + dx, y0 + dy, half, split_p, rng);
            }
        } else {
            for y in y0..y0 + size {
                for x in x0..x0 + size {
                    values[y * stride + x] = size as u8;
                }
            }
        }
    }

    for cy in (0..ph).step_by(64) {
        for cx in (0..pw).step_by(64) {
            fill(&mut padded, pw, cx, cy, 64, split_p, rng);
        }
    }
    if pw == width && ph == height {
        return padded;
    }
    let mut mask = Vec::with_capacity(width * height);
    for y in 0..height {
        mask.extend_from_slice(&padded[y * pw..y * pw + width]);
    }
    mask
}

/// Random valid quadtree mask: each block from 64x64 down splits with
/// probability `split_p`, leaves record their size at every covered pixel.
/// Dimensions that are not multiples of 64 are generated padded and
/// cropped, matching how a partitioner treats edge CTUs.
pub fn random_quadtree_mask(width: usize, height: usize, split_p: f64, seed: u64) -> Vec<u8> {
    mask_into(&mut rng_for(seed), width, height, split_p)
}

/// A noise frame and an independent random mask drawn from one stream
/// (frame first, then mask). Used by the seam-score tests, which need
/// alpha discontinuities that do not line up with image structure.
pub fn seam_fixture(width: usize, height: usize, split_p: f64, seed: u64) -> (Vec<f64>, Vec<u8>) {
    let mut rng = rng_for(seed);
    let plane = noise_into(&mut rng, width, height);
    let mask = mask_into(&mut rng, width, height, split_p);
    (plane, mask)
}

/// Smooth "natural" content: a handful of raised-cosine bumps over two
/// sinusoidal gratings plus faint noise, rounded to integers in 0..=255.
pub fn natural_plane(width: usize, height: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_for(seed);
    let bumps: Vec<(f64, f64, f64, f64)> = (0..6)
        .map(|_| {
            (
                rng.gen::<f64>() * width as f64,
                rng.gen::<f64>() * height as f64,
                20.0 + rng.gen::<f64>() * 60.0,  // radius
                -70.0 + rng.gen::<f64>() * 140.0, // amplitude
            )
        })
        .collect();
    let (fx, fy) = (
        0.02 + rng.gen::<f64>() * 0.05,
        0.02 + rng.gen::<f64>() * 0.05,
    );
    let (px, py) = (
        rng.gen::<f64>() * std::f64::consts::TAU,
        rng.gen::<f64>() * std::f64::consts::TAU,
    );
    let mut plane = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let mut v = 128.0
                + 30.0 * (std::f64::consts::TAU * fx * x as f64 + px).sin()
                + 22.0 * (std::f64::consts::TAU * fy * y as f64 + py).sin();
            for &(cx, cy, r, a) in &bumps {
                let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
                if d < r {
                    v += a * 0.5 * (1.0 + (std::f64::consts::PI * d / r).cos());
                }
            }
            v += rng.gen_range(-3..=3) as f64;
            plane.push(v.round().clamp(0.0, 255.0));
        }
    }
    plane
}

/// A 64x64 block mixing flat, noisy, textured, and gradient 16x16 tiles —
/// content whose best partition is a non-trivial tree.
pub fn mixed_ctu(seed: u64) -> Vec<f64> {
    let mut rng = rng_for(seed);
    let mut block = vec![0.0; 64 * 64];
    for ty in 0..4 {
        for tx in 0..4 {
            let style = rng.gen_range(0..5);
            let base = rng.gen_range(0..256) as f64;
            for y in 0..16 {
                for x in 0..16 {
                    let v = match style {
                        0 => base,
                        1 => rng.gen_range(0..256) as f64,
                        2 => {
                            // checkerboard with a random period
                            let p = 1 + (seed as usize + tx + ty) % 4;
                            if (x / p + y / p) % 2 == 0 {
                                base
                            } else {
                                255.0 - base
                            }
                        }
                        3 => (base + 8.0 * x as f64).min(255.0),
                        _ => ((base + 4.0 * (x + y) as f64) % 256.0).round()
                            + rng.gen_range(-2..=2) as f64,
                    };
                    block[(ty * 16 + y) * 64 + tx * 16 + x] = v.round().clamp(0.0, 255.0);
                }
            }
        }
    }
    block
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(noise_plane(33, 17, 7), noise_plane(33, 17, 7));
        assert_eq!(
            random_quadtree_mask(130, 70, 0.4, 3),
            random_quadtree_mask(130, 70, 0.4, 3)
        );
        assert_eq!(natural_plane(64, 48, 11), natural_plane(64, 48, 11));
        assert_eq!(mixed_ctu(5), mixed_ctu(5));
        assert_eq!(seam_fixture(96, 64, 0.35, 2), seam_fixture(96, 64, 0.35, 2));
    }

    #[test]
    fn planes_are_integer_valued_in_byte_range() {
        for plane in [
            noise_plane(80, 40, 1),
            natural_plane(80, 40, 2),
            mixed_ctu(3),
        ] {
            for &v in &plane {
                assert!(v >= 0.0 && v <= 255.0 && v == v.round());
            }
        }
    }

    fn check_quadtree(mask: &[u8], width: usize, height: usize) {
        // Every pixel carries a legal size, and each recorded block is
        // uniform over its aligned footprint (cropping can cut blocks
        // short, so check only in-bounds pixels).
        for y in 0..height {
            for x in 0..width {
                let size = mask[y * width + x] as usize;
                assert!(matches!(size, 8 | 16 | 32 | 64), "bad size {size}");
                let (ox, oy) = (x - x % size, y - y % size);
                for yy in oy..(oy + size).min(height) {
                    for xx in ox..(ox + size).min(width) {
                        assert_eq!(mask[yy * width + xx] as usize, size);
                    }
                }
            }
        }
    }

    #[test]
    fn masks_are_valid_quadtrees() {
        for seed in 0..8 {
            let mask = random_quadtree_mask(192, 128, 0.5, seed);
            check_quadtree(&mask, 192, 128);
        }
        // Non-multiple-of-64 dimensions crop cleanly.
        let mask = random_quadtree_mask(100, 70, 0.5, 9);
        assert_eq!(mask.len(), 100 * 70);
        check_quadtree(&mask, 100, 70);
    }

    #[test]
    fn split_probability_moves_leaf_sizes() {
        let never = random_quadtree_mask(256, 256, 0.0, 4);
        assert!(never.iter().all(|&s| s == 64));
        let always = random_quadtree_mask(256, 256, 1.0, 4);
        assert!(always.iter().all(|&s| s == 8));
    }
}
