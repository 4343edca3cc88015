//! Seeded random instances.
//!
//! Every trial draws from its own ChaCha stream derived from a master seed
//! and a `(check, trial)` counter, so trials can run in any order and still
//! reproduce bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{c64, Complex64, ComplexMatrix};

/// Independent stream for trial `trial` of check `check`.
pub fn trial_rng(seed: u64, check: u32, trial: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((check as u64) << 32) | trial as u64);
    rng
}

/// Standard complex Gaussian: real and imaginary parts `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows × cols` matrix of independent complex Gaussians scaled by `1/√cols`.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let scale = 1.0 / (cols.max(1) as f64).sqrt();
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng) * scale)
}

/// `count` independent `d × d` Gaussian matrices.
pub fn gaussian_family<R: Rng + ?Sized>(rng: &mut R, count: usize, d: usize) -> Vec<ComplexMatrix> {
    (0..count).map(|_| gaussian_matrix(rng, d, d)).collect()
}

/// Haar-ish unitary from the polar part of a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    gaussian_matrix(rng, d, d).map_singular_values(|_| 1.0)
}

/// Uniform point on the unit circle.
pub fn steinhaus<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(1.0, theta)
}
