//! Seeded random data for sampled checks and tests.

use crate::numerics::{orthonormalize, Matrix, Tolerance};
use crate::scalar::{c, Real, C};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn seeded(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform on [-1, 1].
    pub fn unit(&mut self) -> f64 {
        self.0.gen_range(-1.0..=1.0)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.0.gen_range(0..n)
    }

    pub fn range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.0.gen_range(lo..=hi_inclusive)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.0.gen_bool(p)
    }

    pub fn real<T: Real>(&mut self) -> T {
        T::lit(self.unit())
    }

    pub fn complex<T: Real>(&mut self) -> C<T> {
        c(T::lit(self.unit()), T::lit(self.unit()))
    }

    pub fn cvec<T: Real>(&mut self, n: usize) -> Vec<C<T>> {
        (0..n).map(|_| self.complex()).collect()
    }

    pub fn matrix<T: Real>(&mut self, rows: usize, cols: usize) -> Matrix<T> {
        Matrix::from_fn(rows, cols, |_, _| self.complex())
    }

    pub fn hermitian<T: Real>(&mut self, n: usize) -> Matrix<T> {
        self.matrix(n, n).hermitian_part()
    }

    /// Haar-ish unitary from Gram-Schmidt of a random matrix.
    pub fn unitary<T: Real>(&mut self, n: usize) -> Matrix<T> {
        loop {
            let m: Matrix<T> = self.matrix(n, n);
            let q = orthonormalize(&m.columns(), &Tolerance::standard());
            if q.len() == n {
                return Matrix::from_columns(n, &q);
            }
        }
    }
}
