//! Seeded randomness.
//!
//! All experiments draw from ChaCha8 seeded with the user's 64-bit seed. Each
//! stage of an experiment uses its own ChaCha stream (`set_stream(stage)`), so
//! adding draws to one stage never shifts the numbers seen by another.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generator for `stage` of an experiment seeded with `seed`.
pub fn stage_rng(seed: u64, stage: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stage);
    rng
}

/// `n` points uniform on the planar annulus `inner <= |x| <= outer`, by
/// rejection from the bounding square.
pub fn sample_annulus<R: Rng>(rng: &mut R, n: usize, inner: f64, outer: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = rng.gen_range(-outer..outer);
        let y = rng.gen_range(-outer..outer);
        let norm = (x * x + y * y).sqrt();
        if norm >= inner && norm <= outer {
            out.push(vec![x, y]);
        }
    }
    out
}

/// `n` points uniform on the closed planar disc of radius `radius`.
pub fn sample_disc<R: Rng>(rng: &mut R, n: usize, radius: f64) -> Vec<Vec<f64>> {
    sample_annulus(rng, n, 0.0, radius)
}

/// `n` points uniform in the box `[lo, hi)^dim`.
pub fn sample_box<R: Rng>(rng: &mut R, n: usize, dim: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.gen_range(lo..hi)).collect())
        .collect()
}
