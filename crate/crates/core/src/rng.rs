//! Reproducible random streams for ensemble fitting.
//!
//! Every tree gets its own stream: a ChaCha8 generator keyed by
//! `seed_from_u64(seed)` (the seed expanded through PCG32, as defined by
//! `rand_core`) with the ChaCha stream id set to the tree index. Bounded
//! integers use Lemire's widening-multiply method with rejection on
//! 64-bit draws, so results do not depend on any sampling helper whose
//! algorithm may change between library versions.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct TreeStream {
    inner: ChaCha8Rng,
}

impl TreeStream {
    pub fn new(seed: u64, tree_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(tree_index);
        TreeStream { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "empty range");
        let n = n as u64;
        let threshold = n.wrapping_neg() % n;
        loop {
            let product = u128::from(self.next_u64()) * u128::from(n);
            if (product as u64) >= threshold {
                return (product >> 64) as usize;
            }
        }
    }

    /// `k` distinct indices from `0..n` (partial Fisher-Yates), in draw order.
    pub fn subset(&mut self, n: usize, k: usize) -> Vec<usize> {
        let k = k.min(n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below(n - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = {
            let mut s = TreeStream::new(42, 0);
            (0..4).map(|_| s.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut s = TreeStream::new(42, 0);
            (0..4).map(|_| s.next_u64()).collect()
        };
        let c: Vec<u64> = {
            let mut s = TreeStream::new(42, 1);
            (0..4).map(|_| s.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn golden_draws() {
        let mut s = TreeStream::new(0, 0);
        let draws: Vec<usize> = (0..8).map(|_| s.below(10)).collect();
        assert_eq!(draws, GOLDEN_BELOW_10);
        let mut s = TreeStream::new(7, 3);
        assert_eq!(s.subset(12, 4), GOLDEN_SUBSET);
    }

    const GOLDEN_BELOW_10: [usize; 8] = [7, 4, 6, 0, 8, 5, 8, 9];
    const GOLDEN_SUBSET: [usize; 4] = [2, 0, 11, 6];

    #[test]
    fn below_is_roughly_uniform() {
        let mut s = TreeStream::new(1, 0);
        let mut counts = [0usize; 5];
        for _ in 0..50_000 {
            counts[s.below(5)] += 1;
        }
        for c in counts {
            assert!((9_500..10_500).contains(&c), "{counts:?}");
        }
    }

    #[test]
    fn subset_has_distinct_members() {
        let mut s = TreeStream::new(3, 9);
        for _ in 0..100 {
            let mut sub = s.subset(7, 3);
            assert_eq!(sub.len(), 3);
            sub.sort_unstable();
            sub.dedup();
            assert_eq!(sub.len(), 3);
            assert!(sub.iter().all(|&i| i < 7));
        }
        assert_eq!(s.subset(3, 5).len(), 3);
    }
}
