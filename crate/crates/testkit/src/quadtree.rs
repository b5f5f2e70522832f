//! Exhaustive quadtree partition search over a 64x64 block.
//!
//! Enumerates the cost of every legal quadtree (leaf sizes 8..64) and
//! takes the minimum — no dynamic programming, no pruning. A 64x64 block
//! admits f(64) = 1 + f(32)^4 trees with f(8) = 1, i.e. 83,522, which is
//! cheap enough to enumerate outright. Costs are distortion (SSE against
//! the block mean) plus `lambda * leaf_bits` per leaf and
//! `lambda * split_bits` per split flag.
//!
//! With integer-valued pixels and dyadic cost constants, every quantity
//! below is exactly representable in f64 (partial sums stay integer
//! multiples of 2^-24 far below 2^53), so the minimum is comparable to a
//! dynamic-programming result with `==`, not a tolerance.

/// Side length of the root block.
pub const ROOT_SIZE: usize = 64;

/// Number of distinct quadtrees of a block with the given side length.
pub fn tree_count(size: usize) -> u64 {
    if size <= 8 {
        1
    } else {
        let child = tree_count(size / 2);
        1 + child * child * child * child
    }
}

fn block_sse(block: &[f64], stride: usize, x0: usize, y0: usize, size: usize) -> f64 {
    let mut sum = 0.0;
    for y in y0..y0 + size {
        for x in x0..x0 + size {
            sum += block[y * stride + x];
        }
    }
    let mean = sum / (size * size) as f64;
    let mut sse = 0.0;
    for y in y0..y0 + size {
        for x in x0..x0 + size {
            let d = block[y * stride + x] - mean;
            sse += d * d;
        }
    }
    sse
}

/// Costs of every quadtree of the sub-block at (x0, y0).
fn all_costs(
    block: &[f64],
    x0: usize,
    y0: usize,
    size: usize,
    lambda: f64,
    leaf_bits: f64,
    split_bits: f64,
) -> Vec<f64> {
    let leaf = block_sse(block, ROOT_SIZE, x0, y0, size) + lambda * leaf_bits;
    if size == 8 {
        return vec![leaf];
    }
    let half = size / 2;
    let q: Vec<Vec<f64>> = [(0, 0), (half, 0), (0, half), (half, half)]
        .iter()
        .map(|&(dx, dy)| all_costs(block, x0 + dx, y0 + dy, half, lambda, leaf_bits, split_bits))
        .collect();
    let mut costs = Vec::with_capacity(1 + q[0].len() * q[1].len() * q[2].len() * q[3].len());
    costs.push(leaf);
    for &a in &q[0] {
        for &b in &q[1] {
            for &c in &q[2] {
                for &d in &q[3] {
                    costs.push(lambda * split_bits + a + b + c + d);
                }
            }
        }
    }
    costs
}

/// Minimum cost over every quadtree of a 64x64 block (row-major, 4096
/// samples). Panics on a wrong-sized slice — this is test support.
pub fn min_partition_cost(block: &[f64], lambda: f64, leaf_bits: f64, split_bits: f64) -> f64 {
    assert_eq!(block.len(), ROOT_SIZE * ROOT_SIZE, "expected a 64x64 block");
    all_costs(block, 0, 0, ROOT_SIZE, lambda, leaf_bits, split_bits)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// Number of costs the exhaustive search considers for a 64x64 block.
pub fn enumeration_size(block: &[f64], lambda: f64, leaf_bits: f64, split_bits: f64) -> usize {
    all_costs(block, 0, 0, ROOT_SIZE, lambda, leaf_bits, split_bits).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_count_matches_the_recurrence() {
        assert_eq!(tree_count(8), 1);
        assert_eq!(tree_count(16), 2);
        assert_eq!(tree_count(32), 17);
        assert_eq!(tree_count(64), 83_522);
    }

    #[test]
    fn constant_block_cost_is_one_leaf() {
        let block = vec![37.0; 64 * 64];
        // SSE is zero everywhere, so the single 64x64 leaf (cost
        // lambda * leaf_bits) wins; every split adds leaf and flag bits.
        assert_eq!(min_partition_cost(&block, 10.0, 32.0, 1.0), 320.0);
    }

    #[test]
    fn enumeration_covers_every_tree() {
        let block = vec![0.0; 64 * 64];
        assert_eq!(
            enumeration_size(&block, 10.0, 32.0, 1.0),
            tree_count(64) as usize
        );
    }

    #[test]
    fn free_rate_prefers_full_split_on_noisy_data() {
        // With lambda = 0 the cost is pure SSE; splitting to 8x8 leaves
        // minimizes SSE on data with no large-scale structure.
        let mut block = vec![0.0; 64 * 64];
        for (i, v) in block.iter_mut().enumerate() {
            *v = ((i * 2654435761) % 256) as f64;
        }
        let full_split_sse: f64 = (0..8)
            .flat_map(|by| (0..8).map(move |bx| (bx, by)))
            .map(|(bx, by)| {
                let mut sum = 0.0;
                for y in 0..8 {
                    for x in 0..8 {
                        sum += block[(by * 8 + y) * 64 + bx * 8 + x];
                    }
                }
                let mean = sum / 64.0;
                let mut sse = 0.0;
                for y in 0..8 {
                    for x in 0..8 {
                        let d = block[(by * 8 + y) * 64 + bx * 8 + x] - mean;
                        sse += d * d;
                    }
                }
                sse
            })
            .sum();
        assert_eq!(min_partition_cost(&block, 0.0, 32.0, 1.0), full_split_sse);
    }
}
