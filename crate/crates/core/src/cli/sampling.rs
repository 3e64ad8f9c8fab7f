//! Rejection sampling of base points in a complex ball.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::C64;

/// Consecutive rejections after which sampling gives up.
pub const MAX_CONSECUTIVE_REJECTIONS: usize = 10_000;

#[derive(Debug, Clone, Copy)]
pub struct SamplePlan {
    /// Radius of the ball in base coordinates.
    pub radius: f64,
    /// Smallest modulus allowed for a nonzero eigenvalue of `ad λ` or a root value.
    pub min_eigenvalue: f64,
    pub seed: u64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        Self {
            radius: 0.4,
            min_eigenvalue: 0.05,
            seed: 42,
        }
    }
}

impl SamplePlan {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Debug, Clone, Default)]
pub struct SampleStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// A complex vector uniform in the ball of radius `radius` in `k` complex
/// dimensions: real and imaginary parts uniform in `±radius/√2`, points
/// outside the ball redrawn.
pub fn ball_coefficients(rng: &mut ChaCha8Rng, k: usize, radius: f64) -> Vec<C64> {
    if radius == 0.0 {
        return vec![C64::new(0.0, 0.0); k];
    }
    let half = radius / 2.0_f64.sqrt();
    loop {
        let v: Vec<C64> = (0..k)
            .map(|_| {
                C64::new(
                    rng.random_range(-half..=half),
                    rng.random_range(-half..=half),
                )
            })
            .collect();
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= radius * radius {
            return v;
        }
    }
}

/// `Σ c_k b_k`.
pub fn combine(basis: &[Vec<C64>], coeffs: &[C64]) -> Vec<C64> {
    let d = basis.first().map_or(0, Vec::len);
    let mut out = vec![C64::new(0.0, 0.0); d];
    for (b, c) in basis.iter().zip(coeffs) {
        for (o, x) in out.iter_mut().zip(b) {
            *o += x * c;
        }
    }
    out
}

/// Draw `count` points `Σ c_k b_k` with `c` in the ball that pass `admissible`.
pub fn sample_points(
    plan: &SamplePlan,
    rng: &mut ChaCha8Rng,
    basis: &[Vec<C64>],
    count: usize,
    admissible: impl Fn(&[C64]) -> Result<()>,
) -> Result<(Vec<Vec<C64>>, SampleStats)> {
    let mut stats = SampleStats::default();
    let mut points = Vec::with_capacity(count);
    let mut streak = 0;
    while points.len() < count {
        let lambda = combine(basis, &ball_coefficients(rng, basis.len(), plan.radius));
        if admissible(&lambda).is_ok() {
            points.push(lambda);
            stats.accepted += 1;
            streak = 0;
        } else {
            stats.rejected += 1;
            streak += 1;
            if streak >= MAX_CONSECUTIVE_REJECTIONS {
                return Err(Error::SamplingTooConstrained { rejections: streak });
            }
        }
    }
    Ok((points, stats))
}
