use super::{left_regular, FellBundle};
use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::numerics::{column_rank, Matrix, MatrixSubspace, Tolerance};
use crate::scalar::{Real, C};

/// A finite group acting by *-automorphisms on a matrix *-subalgebra A of M_m.
/// Each automorphism is stored as its matrix in the orthonormal basis of A.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalSystem<T> {
    m: usize,
    algebra: MatrixSubspace<T>,
    group: FiniteGroup,
    alpha: Vec<Matrix<T>>,
}

impl<T: Real> DynamicalSystem<T> {
    /// Builds and validates. `alpha(g, a)` must return the image of `a` under the
    /// automorphism indexed by g; it is only evaluated on basis elements.
    pub fn new(
        m: usize,
        spanning: &[Matrix<T>],
        group: FiniteGroup,
        alpha: impl Fn(usize, &Matrix<T>) -> Matrix<T>,
        tol: &Tolerance<T>,
    ) -> Result<Self> {
        let algebra = MatrixSubspace::from_spanning(m, m, spanning, tol);
        check_star_algebra(&algebra, tol)?;
        let mut mats = Vec::with_capacity(group.order());
        for g in group.elements() {
            let mut cols = Vec::with_capacity(algebra.dim());
            for b in algebra.basis() {
                let img = alpha(g, b);
                if img.shape() != (m, m) || !algebra.contains_scaled(&img, T::one(), tol) {
                    return Err(Error::NotAutomorphism(format!("image under {g} leaves the algebra")));
                }
                cols.push(algebra.coords(&img));
            }
            mats.push(Matrix::from_columns(algebra.dim(), &cols));
        }
        Self::from_coordinate_maps(m, algebra, group, mats, tol)
    }

    /// Inner action a -> u_g a u_g*.
    pub fn inner(m: usize, spanning: &[Matrix<T>], group: FiniteGroup, u: &[Matrix<T>], tol: &Tolerance<T>) -> Result<Self> {
        if u.len() != group.order() {
            return Err(Error::SizeMismatch("one unitary per group element".into()));
        }
        Self::new(m, spanning, group, |g, a| u[g].matmul(a).matmul(&u[g].adjoint()), tol)
    }

    pub fn trivial(m: usize, spanning: &[Matrix<T>], group: FiniteGroup, tol: &Tolerance<T>) -> Result<Self> {
        Self::new(m, spanning, group, |_, a| a.clone(), tol)
    }

    pub fn from_coordinate_maps(
        m: usize,
        algebra: MatrixSubspace<T>,
        group: FiniteGroup,
        alpha: Vec<Matrix<T>>,
        tol: &Tolerance<T>,
    ) -> Result<Self> {
        let d = algebra.dim();
        if alpha.len() != group.order() || alpha.iter().any(|a| a.shape() != (d, d)) {
            return Err(Error::SizeMismatch("automorphism matrices".into()));
        }
        let sys = DynamicalSystem { m, algebra, group, alpha };
        sys.validate(tol)?;
        Ok(sys)
    }

    fn validate(&self, tol: &Tolerance<T>) -> Result<()> {
        let d = self.dim();
        let basis = self.algebra.basis();
        let eps = tol.rel_eq * T::lit(10.0);
        for g in self.group.elements() {
            if column_rank(&self.alpha[g], tol) != d {
                return Err(Error::NotAutomorphism(format!("map {g} is not bijective")));
            }
            for a in basis {
                let sa = self.apply(g, &a.adjoint());
                let as_ = self.apply(g, a).adjoint();
                if self.algebra.norm(&(&sa - &as_)) > eps * T::lit(d as f64).max(T::one()) {
                    return Err(Error::NotAutomorphism(format!("map {g} is not *-preserving")));
                }
                for b in basis {
                    let lhs = self.apply(g, &a.matmul(b));
                    let rhs = self.apply(g, a).matmul(&self.apply(g, b));
                    let scale = T::one() + self.algebra.norm(&lhs);
                    if self.algebra.norm(&(&lhs - &rhs)) > eps * scale {
                        return Err(Error::NotAutomorphism(format!("map {g} is not multiplicative")));
                    }
                }
            }
        }
        let e = self.group.identity();
        if (&self.alpha[e] - &Matrix::identity(d)).max_abs() > eps {
            return Err(Error::NotAction("identity does not act trivially".into()));
        }
        for g in self.group.elements() {
            for h in self.group.elements() {
                let lhs = self.alpha[g].matmul(&self.alpha[h]);
                if (&lhs - &self.alpha[self.group.mul(g, h)]).max_abs() > eps {
                    return Err(Error::NotAction(format!("composition fails at ({g}, {h})")));
                }
            }
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn algebra(&self) -> &MatrixSubspace<T> {
        &self.algebra
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn alpha_matrix(&self, g: usize) -> &Matrix<T> {
        &self.alpha[g]
    }

    pub fn apply(&self, g: usize, a: &Matrix<T>) -> Matrix<T> {
        self.algebra.element(&self.alpha[g].matvec(&self.algebra.coords(a)))
    }

    pub fn is_unital(&self) -> bool {
        self.algebra.contains_scaled(&Matrix::identity(self.m), T::one(), &Tolerance::standard())
    }

    /// Ambient dimension |G| m of the covariant realization.
    pub fn ambient_dim(&self) -> usize {
        self.group.order() * self.m
    }

    /// pi(a) = sum_h E_hh (x) alpha_{h^-1}(a)
    pub fn embed(&self, a: &Matrix<T>) -> Matrix<T> {
        let blocks: Vec<Matrix<T>> = self.group.elements().map(|h| self.apply(self.group.inv(h), a)).collect();
        Matrix::block_diag(&blocks)
    }

    /// U_g = u_g (x) 1_m
    pub fn unitary(&self, g: usize) -> Matrix<T> {
        left_regular::<T>(&self.group, g).kron(&Matrix::identity(self.m))
    }

    /// The element (a, g) of the semidirect product bundle, realized as pi(a) U_g.
    pub fn element(&self, a: &Matrix<T>, g: usize) -> Matrix<T> {
        self.embed(a).matmul(&self.unitary(g))
    }

    /// Inverse of `element` on the fiber over g.
    pub fn decompose(&self, g: usize, x: &Matrix<T>) -> Matrix<T> {
        let p = x.matmul(&self.unitary(g).adjoint());
        let e = self.group.identity();
        p.block(e * self.m, e * self.m, self.m, self.m)
    }

    /// Fell bundle of the system, fiber over g spanned by pi(b_i) U_g.
    pub fn bundle(&self) -> FellBundle<T> {
        let n = self.ambient_dim();
        let fibers = self
            .group
            .elements()
            .map(|g| self.algebra.basis().iter().map(|b| self.element(b, g)).collect())
            .collect();
        FellBundle::new(self.group.clone(), n, fibers, self.is_unital()).expect("shapes are consistent")
    }

    /// Coordinates in the bundle fiber over g of (a, g).
    pub fn fiber_coords(&self, bundle: &FellBundle<T>, a: &Matrix<T>, g: usize) -> Vec<C<T>> {
        bundle.coords(g, &self.element(a, g))
    }
}

fn check_star_algebra<T: Real>(alg: &MatrixSubspace<T>, tol: &Tolerance<T>) -> Result<()> {
    for a in alg.basis() {
        if !alg.contains_scaled(&a.adjoint(), T::one(), tol) {
            return Err(Error::InvalidBundle("algebra is not closed under adjoints".into()));
        }
        for b in alg.basis() {
            let p = a.matmul(b);
            if !alg.contains_scaled(&p, T::one() + alg.norm(&p), tol) {
                return Err(Error::InvalidBundle("algebra is not closed under products".into()));
            }
        }
    }
    Ok(())
}
