//! Seeded sampling of matrices.
//!
//! Every randomized routine in the crate draws from [`Rng`], a ChaCha stream
//! keyed by an explicit seed, so identical seeds give identical results.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matcore::{orthonormal_columns, CMatrix, C64};

/// Default seed shared by the decomposition routines and the CLI.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn seeded(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    pub fn complex_normal(&mut self) -> C64 {
        C64::new(self.normal(), self.normal()) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.0.gen_range(lo..hi)
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.0.gen_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.0.gen_bool(0.5)
    }

    /// Uniformly random unimodular complex number.
    pub fn phase(&mut self) -> C64 {
        C64::from_polar(1.0, self.uniform(0.0, std::f64::consts::TAU))
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix(rng: &mut Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| rng.complex_normal())
}

pub fn random_hermitian(rng: &mut Rng, n: usize) -> CMatrix {
    random_matrix(rng, n, n).hermitian_part()
}

/// Haar-distributed unitary (Gram–Schmidt of a Gaussian matrix).
pub fn random_unitary(rng: &mut Rng, n: usize) -> CMatrix {
    random_isometry(rng, n, n)
}

/// `rows × cols` matrix with orthonormal columns.
pub fn random_isometry(rng: &mut Rng, rows: usize, cols: usize) -> CMatrix {
    assert!(cols <= rows);
    loop {
        let g = random_matrix(rng, rows, cols);
        let columns: Vec<Vec<C64>> = (0..cols).map(|j| g.column(j)).collect();
        let q = orthonormal_columns(rows, &columns, 1e-8);
        if q.cols() == cols {
            return q;
        }
    }
}
