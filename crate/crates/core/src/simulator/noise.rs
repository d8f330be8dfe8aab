use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::geometry::Vec2;

const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

/// Per-individual Gaussian noise streams.
///
/// Individual `i` draws from ChaCha8 keyed by `seed_from_u64(seed)` on stream
/// `i`, so adding individuals leaves existing streams untouched. Each draw
/// consumes two 64-bit outputs and turns them into one isotropic 2D sample by
/// Box-Muller: `u1 = (a >> 11) + 1` and `u2 = b >> 11`, both scaled by
/// `2^-53`, giving `sqrt(-2 ln u1) * (cos 2 pi u2, sin 2 pi u2)`.
#[derive(Clone, Debug)]
pub struct NoiseSource {
    streams: Vec<ChaCha8Rng>,
    sigma: f64,
}

impl NoiseSource {
    pub fn new(seed: u64, individuals: usize, sigma: f64) -> Self {
        let streams = (0..individuals)
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                rng
            })
            .collect();
        NoiseSource { streams, sigma }
    }

    /// Next noise vector for individual `i`, scaled by the configured sigma.
    pub fn sample(&mut self, i: usize) -> Vec2 {
        let rng = &mut self.streams[i];
        let u1 = ((rng.next_u64() >> 11) + 1) as f64 * TWO_POW_M53;
        let u2 = (rng.next_u64() >> 11) as f64 * TWO_POW_M53;
        let r = (-2.0 * u1.ln()).sqrt() * self.sigma;
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        Vec2::new(r * c, r * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_independent_of_group_size() {
        let mut small = NoiseSource::new(7, 2, 1.0);
        let mut large = NoiseSource::new(7, 5, 1.0);
        for _ in 0..10 {
            for i in 0..2 {
                assert_eq!(small.sample(i), large.sample(i));
            }
            large.sample(4);
        }
    }

    #[test]
    fn moments_are_standard_normal() {
        let mut src = NoiseSource::new(11, 1, 1.0);
        let n = 200_000;
        let (mut sx, mut sxx, mut sxy) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let v = src.sample(0);
            sx += v.x + v.y;
            sxx += v.x * v.x + v.y * v.y;
            sxy += v.x * v.y;
        }
        let m = 2.0 * n as f64;
        assert!((sx / m).abs() < 0.01);
        assert!((sxx / m - 1.0).abs() < 0.01);
        assert!((sxy / n as f64).abs() < 0.01);
    }

    #[test]
    fn zero_sigma_is_silent() {
        let mut src = NoiseSource::new(3, 3, 0.0);
        assert_eq!(src.sample(2), Vec2::ZERO);
    }
}
