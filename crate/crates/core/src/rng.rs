//! Seeded randomness shared by samplers and experiments.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type ExperimentRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> ExperimentRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-trial seed derived from a master seed (splitmix64 finalizer), so trial
/// `i` sees the same stream regardless of scheduling.
pub fn derive_seed(master: u64, trial: u64) -> u64 {
    let mut z = master ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard complex Gaussian: `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}
