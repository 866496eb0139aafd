//! Seeded randomness. Every random quantity in the crate is drawn from a
//! ChaCha stream identified by `(seed, stream)`, so results do not depend on
//! scheduling or on how trials are split across workers.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub use rand_core::RngCore as Rng;

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw in `[0, 1)` with 53 random bits.
#[inline]
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform index in `0..n` (Lemire's multiply-and-reject).
pub fn index_below<R: RngCore + ?Sized>(rng: &mut R, n: u64) -> u64 {
    assert!(n > 0);
    let threshold = n.wrapping_neg() % n;
    loop {
        let m = (rng.next_u64() as u128) * (n as u128);
        if (m as u64) >= threshold {
            return (m >> 64) as u64;
        }
    }
}

/// Index of the first cumulative weight exceeding `u`; `cdf` must be
/// non-decreasing with its last entry treated as 1.
#[inline]
pub fn pick(cdf: &[f64], u: f64) -> usize {
    let last = cdf.len() - 1;
    if cdf.len() <= 16 {
        for (i, &c) in cdf[..last].iter().enumerate() {
            if u < c {
                return i;
            }
        }
        last
    } else {
        cdf[..last].partition_point(|&c| c <= u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: [u64; 4] = core::array::from_fn(|_| stream_rng(7, 3).next_u64());
        assert!(a.iter().all(|&v| v == a[0]));
        assert_ne!(stream_rng(7, 3).next_u64(), stream_rng(7, 4).next_u64());
    }

    #[test]
    fn pick_respects_cdf() {
        let cdf = [0.25, 0.5, 0.75, 1.0];
        assert_eq!(pick(&cdf, 0.0), 0);
        assert_eq!(pick(&cdf, 0.25), 1);
        assert_eq!(pick(&cdf, 0.9999), 3);
        let long: std::vec::Vec<f64> = (1..=32).map(|i| i as f64 / 32.0).collect();
        assert_eq!(pick(&long, 0.5), 16);
        assert_eq!(pick(&long, 0.999), 31);
    }

    #[test]
    fn index_below_stays_in_range() {
        let mut rng = stream_rng(1, 0);
        for n in 1..50 {
            assert!(index_below(&mut rng, n) < n);
        }
    }
}
