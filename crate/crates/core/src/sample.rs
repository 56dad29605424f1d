//! Seeded random sampling helpers shared by property checks and oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{C64, Mat2};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the closed disk of radius `r`.
pub fn disk<R: Rng>(rng: &mut R, r: f64) -> C64 {
    let rho = r * rng.random::<f64>().sqrt();
    let a = rng.random::<f64>() * std::f64::consts::TAU;
    C64::from_polar(rho, a)
}

/// Matrix with each entry uniform in the disk of radius `r`.
pub fn mat<R: Rng>(rng: &mut R, r: f64) -> Mat2 {
    Mat2::new(disk(rng, r), disk(rng, r), disk(rng, r), disk(rng, r))
}

/// Uniform on the unit circle.
pub fn circle<R: Rng>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU)
}

pub fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}
