//! Random fixtures for unit tests.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::flops::FlopCounter;
use crate::matcore::{gram_regularized, ComplexMatrix, HermitianMatrix, C64};

pub struct TestRng(ChaCha8Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.0)
    }

    pub fn complex(&mut self) -> C64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        C64::new(s * self.normal(), s * self.normal())
    }
}

pub fn random_matrix(rng: &mut TestRng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| rng.complex())
}

/// Arbitrary (not necessarily definite) Hermitian matrix.
pub fn random_hermitian(rng: &mut TestRng, n: usize) -> HermitianMatrix {
    let a = random_matrix(rng, n, n);
    let sym = ComplexMatrix::from_fn(n, n, |j, k| a[(j, k)] + a[(k, j)].conj());
    HermitianMatrix::from_upper(&sym).unwrap()
}

/// `H^H H + alpha I` for a square Gaussian `H`.
pub fn random_spd(rng: &mut TestRng, n: usize, alpha: f64) -> HermitianMatrix {
    let h = random_matrix(rng, n, n);
    gram_regularized(&h, alpha, &mut FlopCounter::new()).unwrap()
}
