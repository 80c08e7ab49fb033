//! Seeded random primitives shared by the data generator and the engine.
//!
//! Everything random in this crate reduces to the raw `u64` stream of a
//! ChaCha8 generator plus the fixed transforms below. The transforms are
//! written out explicitly (rather than pulled from a distributions crate)
//! so that a given seed reproduces identical bytes regardless of upstream
//! library churn.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

/// Create the generator for a seed.
pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from `[0, 1)` with 53 bits of precision.
pub fn unit_uniform(rng: &mut impl RngCore) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    (rng.next_u64() >> 11) as f64 * SCALE
}

/// Standard normal draw via the Box-Muller cosine branch.
///
/// Consumes exactly two `u64` values per call; the sine counterpart is
/// discarded to keep the draw count per sample fixed.
pub fn standard_normal(rng: &mut impl RngCore) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    // First uniform shifted into (0, 1] so the log is finite.
    let u1 = ((rng.next_u64() >> 11) + 1) as f64 * SCALE;
    let u2 = unit_uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Uniform integer in `[0, bound)` using Lemire's multiply-shift with
/// rejection, so every value is exactly equally likely.
pub fn uniform_index(rng: &mut impl RngCore, bound: usize) -> usize {
    assert!(bound > 0, "uniform_index requires a positive bound");
    let bound = bound as u64;
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let wide = u128::from(rng.next_u64()) * u128::from(bound);
        if (wide as u64) >= threshold {
            return (wide >> 64) as usize;
        }
    }
}

/// Select `k` distinct indices from `[0, n)` uniformly without replacement
/// (partial Fisher-Yates). The order of the returned indices is part of the
/// deterministic contract: it fixes cluster numbering.
pub fn sample_without_replacement(rng: &mut impl RngCore, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n, "cannot sample {k} distinct indices from {n}");
    let mut pool: Vec<usize> = (0..n).collect();
    for slot in 0..k {
        let pick = slot + uniform_index(rng, n - slot);
        pool.swap(slot, pick);
    }
    pool.truncate(k);
    pool
}
