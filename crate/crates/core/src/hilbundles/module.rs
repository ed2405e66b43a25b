use crate::error::{Error, Result};
use crate::numerics::{Matrix, MatrixSubspace, Tolerance};
use crate::scalar::{Real, C};

/// A concrete right Hilbert module: X inside M_{p x q} over a *-algebra B inside M_q,
/// with <x, y> = x* y.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertModule<T> {
    algebra: MatrixSubspace<T>,
    space: MatrixSubspace<T>,
}

impl<T: Real> HilbertModule<T> {
    pub fn new(q: usize, algebra: &[Matrix<T>], p: usize, space: &[Matrix<T>], tol: &Tolerance<T>) -> Result<Self> {
        if let Some(m) = algebra.iter().find(|m| m.shape() != (q, q)) {
            return Err(Error::ShapeMismatch(format!("algebra element of shape {:?}, expected {q}x{q}", m.shape())));
        }
        if let Some(m) = space.iter().find(|m| m.shape() != (p, q)) {
            return Err(Error::ShapeMismatch(format!("module element of shape {:?}, expected {p}x{q}", m.shape())));
        }
        let algebra = MatrixSubspace::from_spanning(q, q, algebra, tol);
        let space = MatrixSubspace::from_spanning(p, q, space, tol);
        for x in space.basis() {
            for b in algebra.basis() {
                let xb = x.matmul(b);
                if !space.contains_scaled(&xb, T::one() + xb.max_abs(), tol) {
                    return Err(Error::NotModule("X B is not contained in X".into()));
                }
            }
            for y in space.basis() {
                let ip = x.adjoint().matmul(y);
                if !algebra.contains_scaled(&ip, T::one() + ip.max_abs(), tol) {
                    return Err(Error::NotModule("X* X is not contained in B".into()));
                }
            }
        }
        Ok(HilbertModule { algebra, space })
    }

    /// B as a module over itself.
    pub fn standard(q: usize, algebra: &[Matrix<T>], tol: &Tolerance<T>) -> Result<Self> {
        Self::new(q, algebra, q, algebra, tol)
    }

    pub fn algebra(&self) -> &MatrixSubspace<T> {
        &self.algebra
    }

    pub fn space(&self) -> &MatrixSubspace<T> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn element(&self, coords: &[C<T>]) -> Matrix<T> {
        self.space.element(coords)
    }

    pub fn coords(&self, x: &Matrix<T>) -> Vec<C<T>> {
        self.space.coords(x)
    }

    pub fn inner(&self, x: &Matrix<T>, y: &Matrix<T>) -> Matrix<T> {
        x.adjoint().matmul(y)
    }
}
