//! Seeded randomness: the generator type every stochastic path uses, seed
//! derivation for independent substreams, and circular complex Gaussians.
//!
//! Reproducibility contract: the same `(algorithm, seed)` pair must produce
//! the same draws on every platform, so the generator is pinned to ChaCha8
//! rather than left to `rand`'s default (which may change between releases).

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// The deterministic RNG used throughout the crate.
pub type MonitorRng = ChaCha8Rng;

/// Derives a child seed from a base seed and a path of tags.
///
/// Each `(base, tags)` pair maps to a well-mixed 64-bit seed, so trials,
/// antennas, and scenario arms can each get an independent stream that is
/// still a pure function of the experiment seed. Mixing is SplitMix64, whose
/// finalizer diffuses every input bit across the output.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut state = base;
    for &t in tags {
        state = splitmix64(state ^ splitmix64(t));
    }
    splitmix64(state)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seeds a [`MonitorRng`] from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> MonitorRng {
    MonitorRng::seed_from_u64(seed)
}

/// One draw of a circularly-symmetric complex Gaussian with total variance
/// `variance` (so each of the real and imaginary parts has variance
/// `variance / 2`).
pub fn complex_gaussian(rng: &mut MonitorRng, variance: f64) -> Complex64 {
    let s = (variance * 0.5).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Fills `out` with i.i.d. circular complex Gaussian draws of the given
/// total variance.
pub fn complex_gaussian_into(rng: &mut MonitorRng, variance: f64, out: &mut [Complex64]) {
    let s = (variance * 0.5).sqrt();
    for v in out {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *v = Complex64::new(s * re, s * im);
    }
}
