#![allow(dead_code)]

use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mqs_core::fock::mode::CLONING_MODES;
use mqs_core::fock::{DensityOperator, MultiModeBasis};
use mqs_core::linalg::CMat;

pub fn small_basis() -> MultiModeBasis {
    MultiModeBasis::new(&CLONING_MODES, 3).unwrap()
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// `G G† / tr` with `G` of random rank.
pub fn random_density(seed: u64) -> DensityOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = small_basis();
    let n = basis.dim();
    let rank = rng.random_range(1..=n);
    let g: CMat = Mat::from_fn(n, rank, |_, _| random_complex(&mut rng));
    let mut m = &g * g.adjoint();
    let tr: f64 = (0..n).map(|i| m[(i, i)].re).sum();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] /= tr;
        }
    }
    DensityOperator::from_dense(basis, m, 0.0).unwrap()
}
