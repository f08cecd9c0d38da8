//! Numeric building blocks: special functions, unitary DFTs, seeded complex
//! Gaussian noise, and fractional resampling.
//!
//! Everything here is deterministic given its inputs (and seed, where one is
//! taken); the rest of the crate builds its reproducibility guarantees on
//! that.

mod fft;
mod random;
mod resample;
mod special;

pub use fft::{dft, idft};
pub use random::{complex_gaussian, complex_gaussian_into, derive_seed, rng_from_seed, MonitorRng};
pub use resample::fractional_resample;
pub use special::{incomplete_beta_reg, inverse_incomplete_beta, log_gamma, BetaParams};
