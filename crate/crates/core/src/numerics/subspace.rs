use super::matrix::{vdot, vnorm, Matrix};
use super::tolerance::Tolerance;
use crate::scalar::{Real, C};

/// Gram-Schmidt (two passes per vector) on flat vectors. Vectors whose residual after
/// projection is at most rel_rank times their norm are dropped.
pub fn orthonormalize<T: Real>(vectors: &[Vec<C<T>>], tol: &Tolerance<T>) -> Vec<Vec<C<T>>> {
    let mut out: Vec<Vec<C<T>>> = Vec::new();
    for v in vectors {
        let n0 = vnorm(v);
        if n0 == T::zero() {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let p = vdot(q, &w);
                for (x, &y) in w.iter_mut().zip(q) {
                    *x -= p * y;
                }
            }
        }
        let n = vnorm(&w);
        if n <= tol.rel_rank * n0 {
            continue;
        }
        for x in w.iter_mut() {
            *x = *x / n;
        }
        out.push(w);
    }
    out
}

/// Norm of the component of v orthogonal to an orthonormal family.
pub fn residual<T: Real>(basis: &[Vec<C<T>>], v: &[C<T>]) -> T {
    let mut w = v.to_vec();
    for _ in 0..2 {
        for q in basis {
            let p = vdot(q, &w);
            for (x, &y) in w.iter_mut().zip(q) {
                *x -= p * y;
            }
        }
    }
    vnorm(&w)
}

pub fn in_span<T: Real>(basis: &[Vec<C<T>>], v: &[C<T>], tol: &Tolerance<T>) -> bool {
    residual(basis, v) <= tol.rel_rank * vnorm(v)
}

/// Dimension of the span of the given vectors.
pub fn span_rank<T: Real>(vectors: &[Vec<C<T>>], tol: &Tolerance<T>) -> usize {
    orthonormalize(vectors, tol).len()
}

pub fn span_equal<T: Real>(a: &[Vec<C<T>>], b: &[Vec<C<T>>], tol: &Tolerance<T>) -> bool {
    let qa = orthonormalize(a, tol);
    let qb = orthonormalize(b, tol);
    qa.len() == qb.len() && b.iter().all(|v| in_span(&qa, v, tol)) && a.iter().all(|v| in_span(&qb, v, tol))
}

/// Column rank of a matrix.
pub fn column_rank<T: Real>(m: &Matrix<T>, tol: &Tolerance<T>) -> usize {
    span_rank(&m.columns(), tol)
}

/// Subspace of rows x cols matrices with a basis orthonormal for tr(A* B)/cols.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSubspace<T> {
    rows: usize,
    cols: usize,
    basis: Vec<Matrix<T>>,
}

impl<T: Real> MatrixSubspace<T> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        MatrixSubspace { rows, cols, basis: Vec::new() }
    }

    /// Spanned subspace. A spanning list that is already orthonormal is stored unchanged,
    /// so coordinates written against it stay meaningful.
    pub fn from_spanning(rows: usize, cols: usize, mats: &[Matrix<T>], tol: &Tolerance<T>) -> Self {
        let mut sp = MatrixSubspace { rows, cols, basis: Vec::new() };
        if sp.is_orthonormal_family(mats) {
            sp.basis = mats.to_vec();
            return sp;
        }
        let flat: Vec<Vec<C<T>>> = mats.iter().map(|m| m.data().to_vec()).collect();
        let s = T::from_usize(cols.max(1)).unwrap().sqrt();
        sp.basis = orthonormalize(&flat, tol)
            .into_iter()
            .map(|v| Matrix::from_vec(rows, cols, v.into_iter().map(|z| z * s).collect()).unwrap())
            .collect();
        sp
    }

    fn is_orthonormal_family(&self, mats: &[Matrix<T>]) -> bool {
        let eps = T::epsilon() * T::lit(64.0);
        for (i, a) in mats.iter().enumerate() {
            if a.shape() != (self.rows, self.cols) {
                return false;
            }
            for b in &mats[..=i] {
                let g = self.inner(b, a);
                let target = if std::ptr::eq(a, b) { T::one() } else { T::zero() };
                if (g.re - target).abs() > eps || g.im.abs() > eps {
                    return false;
                }
            }
        }
        true
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Matrix<T>] {
        &self.basis
    }

    /// tr(A* B)/cols
    pub fn inner(&self, a: &Matrix<T>, b: &Matrix<T>) -> C<T> {
        a.hs_inner(b) / T::from_usize(self.cols.max(1)).unwrap()
    }

    pub fn norm(&self, a: &Matrix<T>) -> T {
        self.inner(a, a).re.max(T::zero()).sqrt()
    }

    pub fn element(&self, coeffs: &[C<T>]) -> Matrix<T> {
        assert_eq!(coeffs.len(), self.dim(), "coefficient length");
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (b, &z) in self.basis.iter().zip(coeffs) {
            m.axpy(z, b);
        }
        m
    }

    pub fn coords(&self, m: &Matrix<T>) -> Vec<C<T>> {
        self.basis.iter().map(|b| self.inner(b, m)).collect()
    }

    pub fn project(&self, m: &Matrix<T>) -> Matrix<T> {
        self.element(&self.coords(m))
    }

    /// Norm of m minus its projection.
    pub fn residual(&self, m: &Matrix<T>) -> T {
        let mut r = m - &self.project(m);
        // second pass for stability
        let corr = self.project(&r);
        r = &r - &corr;
        self.norm(&r)
    }

    /// Membership with residual measured against `scale`.
    pub fn contains_scaled(&self, m: &Matrix<T>, scale: T, tol: &Tolerance<T>) -> bool {
        self.residual(m) <= tol.rel_rank * scale
    }

    pub fn contains(&self, m: &Matrix<T>, tol: &Tolerance<T>) -> bool {
        self.contains_scaled(m, self.norm(m), tol)
    }

    pub fn span_equal(&self, other: &Self, tol: &Tolerance<T>) -> bool {
        self.dim() == other.dim() && other.basis.iter().all(|b| self.contains_scaled(b, T::one(), tol))
    }
}
