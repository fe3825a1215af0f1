//! Deterministic random substreams.
//!
//! Every random quantity is drawn from a ChaCha8 stream selected by the run
//! seed and a `(tag, a, b)` key, so independent consumers never share state
//! and results do not depend on evaluation order.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matproc::CMatrix;

/// Channel matrices, keyed by `(j, i)`.
pub const TAG_CHANNEL: u64 = 1;
/// Random rows appended in the rank test.
pub const TAG_AUGMENT: u64 = 2;
/// Solver initialization, keyed by `(tx, attempt)`.
pub const TAG_SOLVER_INIT: u64 = 3;
/// Codebook entries, keyed by `(subspace, 0)`.
pub const TAG_CODEBOOK: u64 = 4;
/// Random receiver transforms, keyed by `(rx, 0)`.
pub const TAG_TRANSFORM: u64 = 5;
/// Per-trial seeds, keyed by `(trial, 0)`.
pub const TAG_TRIAL: u64 = 6;
/// Geodesic perturbations used by the large-codebook model.
pub const TAG_CODEBOOK_MODEL: u64 = 7;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a key into a single 64-bit value.
pub fn mix(tag: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(tag) ^ a) ^ b)
}

/// Returns the generator for `(seed, tag, a, b)`.
pub fn substream(seed: u64, tag: u64, a: u64, b: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(mix(tag, a, b));
    rng
}

/// Derives the seed of trial `t` from a run seed.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    mix(seed ^ TAG_TRIAL, trial, 0)
}

/// Circularly-symmetric complex Gaussian sample with unit variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. unit-variance complex Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}
