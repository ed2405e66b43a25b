//! Fell bundles realized as graded families of subspaces of one matrix algebra.

mod condexp;
mod dynamical;

pub use condexp::CondExpectation;
pub use dynamical::DynamicalSystem;

use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::numerics::{span_rank, Matrix, MatrixSubspace, Tolerance};
use crate::report::{AxiomReport, Worst};
use crate::scalar::{cone, Real, C};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct FellBundle<T> {
    group: FiniteGroup,
    n: usize,
    fibers: Vec<MatrixSubspace<T>>,
    unital: bool,
}

pub type BundleRef<T> = Arc<FellBundle<T>>;

impl<T: Real> FellBundle<T> {
    /// Fibers given by spanning sets of n x n matrices, one list per group element.
    /// Bases are orthonormalized for the normalized trace; nothing else is validated here.
    pub fn new(group: FiniteGroup, n: usize, spanning: Vec<Vec<Matrix<T>>>, unital: bool) -> Result<Self> {
        if spanning.len() != group.order() {
            return Err(Error::SizeMismatch(format!("{} fibers for a group of order {}", spanning.len(), group.order())));
        }
        let tol = Tolerance::standard();
        let mut fibers = Vec::with_capacity(spanning.len());
        for (g, mats) in spanning.iter().enumerate() {
            if let Some(m) = mats.iter().find(|m| m.shape() != (n, n)) {
                return Err(Error::ShapeMismatch(format!("fiber {g} holds a {:?} matrix, ambient is {n}x{n}", m.shape())));
            }
            fibers.push(MatrixSubspace::from_spanning(n, n, mats, &tol));
        }
        Ok(FellBundle { group, n, fibers, unital })
    }

    /// A single C*-algebra viewed as a bundle over the trivial group.
    pub fn over_trivial_group(n: usize, spanning: Vec<Matrix<T>>, unital: bool) -> Result<Self> {
        Self::new(FiniteGroup::trivial(), n, vec![spanning], unital)
    }

    /// M_k over the trivial group.
    pub fn full_matrix_algebra(k: usize) -> Self {
        let units = (0..k).flat_map(|i| (0..k).map(move |j| Matrix::unit(k, k, i, j))).collect();
        Self::over_trivial_group(k, units, true).unwrap()
    }

    /// Canonical group bundle: fiber over g is C u_g with u_g the left-regular permutation matrix.
    pub fn group_bundle(group: &FiniteGroup) -> Self {
        let n = group.order();
        let fibers = group.elements().map(|g| vec![left_regular(group, g)]).collect();
        Self::new(group.clone(), n, fibers, true).unwrap()
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn fiber(&self, g: usize) -> &MatrixSubspace<T> {
        &self.fibers[g]
    }

    pub fn fibers(&self) -> &[MatrixSubspace<T>] {
        &self.fibers
    }

    pub fn dim(&self, g: usize) -> usize {
        self.fibers[g].dim()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.fibers.iter().map(|f| f.dim()).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.fibers.iter().map(|f| f.dim()).sum()
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    pub fn basis(&self, g: usize, i: usize) -> &Matrix<T> {
        &self.fibers[g].basis()[i]
    }

    pub fn element(&self, g: usize, coeffs: &[C<T>]) -> Matrix<T> {
        self.fibers[g].element(coeffs)
    }

    pub fn coords(&self, g: usize, m: &Matrix<T>) -> Vec<C<T>> {
        self.fibers[g].coords(m)
    }

    /// Coordinates of m in A_g, failing with FiberEscape if m is not in A_g
    /// (residual compared against rel_rank * max(1, scale)).
    pub fn coords_checked(&self, g: usize, m: &Matrix<T>, scale: T, tol: &Tolerance<T>) -> Result<Vec<C<T>>> {
        let r = self.fibers[g].residual(m);
        if r > tol.rel_rank * scale.max(T::one()) {
            return Err(Error::FiberEscape { fiber: g, residual: r.to_f64_lossy() });
        }
        Ok(self.coords(g, m))
    }

    /// Normalized-trace norm, the Hilbert space norm on fibers.
    pub fn tau_norm(&self, m: &Matrix<T>) -> T {
        (m.hs_inner(m).re / T::from_usize(self.n.max(1)).unwrap()).max(T::zero()).sqrt()
    }

    /// Coordinates of the unit of the ambient algebra in A_e, if it lies there.
    pub fn unit_coords(&self) -> Option<Vec<C<T>>> {
        let e = self.group.identity();
        let id = Matrix::identity(self.n);
        let tol = Tolerance::standard();
        if self.fibers[e].contains_scaled(&id, T::one(), &tol) {
            Some(self.coords(e, &id))
        } else {
            None
        }
    }

    /// Coordinates of e^g_i e^h_j in A_{gh}.
    pub fn product_coords(&self, g: usize, i: usize, h: usize, j: usize) -> Vec<C<T>> {
        let p = self.basis(g, i).matmul(self.basis(h, j));
        self.coords(self.group.mul(g, h), &p)
    }

    /// Coordinates of (e^g_i)* in A_{g^-1}.
    pub fn star_coords(&self, g: usize, i: usize) -> Vec<C<T>> {
        self.coords(self.group.inv(g), &self.basis(g, i).adjoint())
    }

    /// Matrix of left multiplication by `a` from A_h into A_{gh}, where a is in A_g.
    pub fn left_mult(&self, g: usize, a: &Matrix<T>, h: usize) -> Matrix<T> {
        let gh = self.group.mul(g, h);
        let cols: Vec<Vec<C<T>>> = self.fibers[h].basis().iter().map(|b| self.coords(gh, &a.matmul(b))).collect();
        Matrix::from_columns(self.dim(gh), &cols)
    }

    /// Matrix of right multiplication by `b` from A_r into A_{rh}, where b is in A_h.
    pub fn right_mult(&self, h: usize, b: &Matrix<T>, r: usize) -> Matrix<T> {
        let rh = self.group.mul(r, h);
        let cols: Vec<Vec<C<T>>> = self.fibers[r].basis().iter().map(|x| self.coords(rh, &x.matmul(b))).collect();
        Matrix::from_columns(self.dim(rh), &cols)
    }

    /// Exhaustive axiom check over basis pairs.
    pub fn validate(&self, tol: &Tolerance<T>) -> AxiomReport {
        let mut rep = AxiomReport::new("fell_bundle");
        let g = &self.group;
        let shapes_ok = self.fibers.len() == g.order()
            && self.fibers.iter().all(|f| f.rows() == self.n && f.cols() == self.n);
        rep.flag("shape", shapes_ok, "");
        if !shapes_ok {
            return rep;
        }
        let mut grading = Worst::new();
        let mut involution = Worst::new();
        let mut cstar = Worst::new();
        for x in g.elements() {
            for a in self.fibers[x].basis() {
                let s = a.adjoint();
                involution.see(self.fibers[g.inv(x)].residual(&s) / self.tau_norm(&s).max(T::one()));
                let na = a.op_norm();
                let nn = s.matmul(a).op_norm();
                cstar.see((nn - na * na).abs() / (T::one() + na * na));
                for y in g.elements() {
                    for b in self.fibers[y].basis() {
                        let p = a.matmul(b);
                        grading.see(self.fibers[g.mul(x, y)].residual(&p) / self.tau_norm(&p).max(T::one()));
                    }
                }
            }
        }
        rep.residual("grading", grading.0, tol.rel_eq);
        rep.residual("involution", involution.0, tol.rel_eq);
        rep.residual("c_star_identity", cstar.0, tol.rel_eq);
        let all: Vec<Vec<C<T>>> =
            self.fibers.iter().flat_map(|f| f.basis().iter().map(|m| m.data().to_vec())).collect();
        let rank = span_rank(&all, tol);
        rep.flag("directness", rank == all.len(), format!("rank {rank} of {}", all.len()));
        if self.unital {
            let id = Matrix::identity(self.n);
            let r = self.fibers[g.identity()].residual(&id);
            rep.residual("unit", r, tol.rel_eq);
        }
        rep
    }

    /// span(A_g A_h) = A_{gh} for all g, h.
    pub fn check_saturated(&self, tol: &Tolerance<T>) -> bool {
        let g = &self.group;
        g.elements().all(|x| {
            g.elements().all(|y| {
                let prods: Vec<Vec<C<T>>> = self.fibers[x]
                    .basis()
                    .iter()
                    .flat_map(|a| self.fibers[y].basis().iter().map(move |b| a.matmul(b).data().to_vec()))
                    .collect();
                span_rank(&prods, tol) == self.dim(g.mul(x, y))
            })
        })
    }

    /// Sum of the ambient unit's coordinates; panics if not unital. Used by constructions needing 1.
    pub fn unit(&self) -> Result<Vec<C<T>>> {
        if !self.unital {
            return Err(Error::NotUnital);
        }
        self.unit_coords().ok_or(Error::NotUnital)
    }
}

/// Products and adjoints of basis elements re-expanded in fiber bases, computed once for
/// the duration of a check.
#[derive(Debug, Clone)]
pub struct StructureConstants<T> {
    /// prod[g][h][i][j] = coordinates of e^g_i e^h_j in A_{gh}
    pub prod: Vec<Vec<Vec<Vec<Vec<C<T>>>>>>,
    /// star[g][i] = coordinates of (e^g_i)* in A_{g^-1}
    pub star: Vec<Vec<Vec<C<T>>>>,
}

impl<T: Real> StructureConstants<T> {
    pub fn new(b: &FellBundle<T>) -> Self {
        let grp = b.group();
        let prod = grp
            .elements()
            .map(|g| {
                grp.elements()
                    .map(|h| {
                        (0..b.dim(g))
                            .map(|i| (0..b.dim(h)).map(|j| b.product_coords(g, i, h, j)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let star = grp.elements().map(|g| (0..b.dim(g)).map(|i| b.star_coords(g, i)).collect()).collect();
        StructureConstants { prod, star }
    }
}

/// Left-regular permutation matrix: u_g e_h = e_{gh}.
pub fn left_regular<T: Real>(group: &FiniteGroup, g: usize) -> Matrix<T> {
    let n = group.order();
    let mut u = Matrix::zeros(n, n);
    for h in group.elements() {
        u[(group.mul(g, h), h)] = cone();
    }
    u
}

pub(crate) fn same_bundle<T: Real>(a: &FellBundle<T>, b: &FellBundle<T>) -> bool {
    std::ptr::eq(a, b) || a == b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::vnorm;
    use crate::random::Rng;

    type B = FellBundle<f64>;

    #[test]
    fn group_bundle_relations() {
        for grp in [FiniteGroup::cyclic(2).unwrap(), FiniteGroup::cyclic(3).unwrap(), FiniteGroup::symmetric(3).unwrap()] {
            let b = B::group_bundle(&grp);
            assert!(b.validate(&Tolerance::standard()).passed());
            assert!(b.dims().iter().all(|&d| d == 1));
            for g in grp.elements() {
                for h in grp.elements() {
                    let p = b.basis(g, 0).matmul(b.basis(h, 0));
                    assert_eq!(&p, b.basis(grp.mul(g, h), 0));
                }
            }
        }
        let z3 = B::group_bundle(&FiniteGroup::cyclic(3).unwrap());
        let u = z3.basis(1, 0);
        assert_eq!(u.matmul(u).matmul(u), Matrix::identity(3));
    }

    #[test]
    fn perturbed_fiber_breaks_grading() {
        let grp = FiniteGroup::cyclic(2).unwrap();
        let mut rng = Rng::seeded(3);
        let u = left_regular::<f64>(&grp, 1);
        let bad = vec![vec![Matrix::identity(2)], vec![rng.matrix(2, 2)]];
        let b = B::new(grp, 2, bad, true).unwrap();
        let rep = b.validate(&Tolerance::standard());
        assert!(rep.failed("grading"));
        let _ = u;
    }

    #[test]
    fn full_matrix_algebra_is_a_bundle() {
        let m2 = B::full_matrix_algebra(2);
        assert!(m2.validate(&Tolerance::standard()).passed());
        assert_eq!(m2.dim(0), 4);
    }

    #[test]
    fn saturation() {
        let tol = Tolerance::standard();
        assert!(B::group_bundle(&FiniteGroup::symmetric(3).unwrap()).check_saturated(&tol));
        let grp = FiniteGroup::cyclic(2).unwrap();
        let b = B::new(grp, 1, vec![vec![Matrix::identity(1)], vec![]], true).unwrap();
        assert!(b.validate(&tol).passed());
        assert!(!b.check_saturated(&tol));
    }

    #[test]
    fn products_and_stars_land_in_fibers() {
        let b = B::group_bundle(&FiniteGroup::symmetric(3).unwrap());
        let grp = b.group().clone();
        for g in grp.elements() {
            let s = b.star_coords(g, 0);
            assert!((vnorm(&s) - 1.0).abs() < 1e-12);
            for h in grp.elements() {
                let p = b.product_coords(g, 0, h, 0);
                assert!((vnorm(&p) - 1.0).abs() < 1e-12);
            }
        }
    }
}
