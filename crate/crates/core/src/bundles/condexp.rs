use super::{BundleRef, FellBundle};
use crate::error::{Error, Result};
use crate::numerics::{psd_check, Matrix, Tolerance};
use crate::report::{AxiomReport, Worst};
use crate::scalar::{Real, C};

/// Conditional expectation from a Fell bundle onto a sub-bundle living in the same ambient
/// algebra, given fiberwise as matrices E_g: A_g -> B_g in the fiber bases.
#[derive(Debug, Clone)]
pub struct CondExpectation<T> {
    pub sup: BundleRef<T>,
    pub sub: BundleRef<T>,
    pub maps: Vec<Matrix<T>>,
}

impl<T: Real> CondExpectation<T> {
    pub fn new(sup: BundleRef<T>, sub: BundleRef<T>, maps: Vec<Matrix<T>>) -> Result<Self> {
        if sup.group() != sub.group() || sup.ambient_dim() != sub.ambient_dim() {
            return Err(Error::BundleMismatch);
        }
        for g in sup.group().elements() {
            if maps.get(g).map(|m| m.shape()) != Some((sub.dim(g), sup.dim(g))) {
                return Err(Error::ShapeMismatch(format!("expectation block {g}")));
            }
        }
        Ok(CondExpectation { sup, sub, maps })
    }

    /// Builds the fiber matrices from an ambient formula evaluated on basis elements.
    pub fn from_fn(sup: BundleRef<T>, sub: BundleRef<T>, f: impl Fn(usize, &Matrix<T>) -> Matrix<T>) -> Result<Self> {
        let maps = sup
            .group()
            .elements()
            .map(|g| {
                let cols: Vec<Vec<C<T>>> = sup.fiber(g).basis().iter().map(|a| sub.coords(g, &f(g, a))).collect();
                Matrix::from_columns(sub.dim(g), &cols)
            })
            .collect();
        Self::new(sup, sub, maps)
    }

    /// Identity expectation of a bundle onto itself.
    pub fn identity(b: BundleRef<T>) -> Self {
        let maps = b.dims().into_iter().map(Matrix::identity).collect();
        CondExpectation { sup: b.clone(), sub: b, maps }
    }

    /// E_g applied to an ambient element of A_g.
    pub fn apply(&self, g: usize, a: &Matrix<T>) -> Matrix<T> {
        self.sub.element(g, &self.maps[g].matvec(&self.sup.coords(g, a)))
    }

    /// Trace-localized Gram of the semi-inner product <a, a'> = E(a* a') on the fiber over r,
    /// indexed by (basis of A_r, basis of B_e).
    pub fn localized_gram(&self, r: usize) -> Matrix<T> {
        let e = self.sup.group().identity();
        let a = self.sup.fiber(r).basis();
        let f = self.sub.fiber(e).basis();
        let (na, nf) = (a.len(), f.len());
        let mut gram = Matrix::zeros(na * nf, na * nf);
        for i in 0..na {
            for j in 0..na {
                let ex = self.apply(e, &a[i].adjoint().matmul(&a[j]));
                for p in 0..nf {
                    let left = f[p].adjoint().matmul(&ex);
                    for q in 0..nf {
                        gram[(i * nf + p, j * nf + q)] = left.matmul(&f[q]).tau();
                    }
                }
            }
        }
        gram
    }

    pub fn check(&self, tol: &Tolerance<T>) -> AxiomReport {
        let mut rep = AxiomReport::new("conditional_expectation");
        let (sup, sub) = (&self.sup, &self.sub);
        let grp = sup.group();
        let mut contain = Worst::new();
        let mut idem = Worst::new();
        let mut bimod = Worst::new();
        let mut sa = Worst::new();
        for g in grp.elements() {
            for b in sub.fiber(g).basis() {
                contain.see(sup.fiber(g).residual(b));
                idem.see(sub.tau_norm(&(&self.apply(g, b) - b)));
            }
            for a in sup.fiber(g).basis() {
                let lhs = self.apply(grp.inv(g), &a.adjoint());
                let rhs = self.apply(g, a).adjoint();
                sa.see(sub.tau_norm(&(&lhs - &rhs)));
                for h in grp.elements() {
                    for b in sub.fiber(h).basis() {
                        for k in grp.elements() {
                            for b2 in sub.fiber(k).basis() {
                                let hgk = grp.mul(grp.mul(h, g), k);
                                let lhs = self.apply(hgk, &b.matmul(a).matmul(b2));
                                let rhs = b.matmul(&self.apply(g, a)).matmul(b2);
                                bimod.see(sub.tau_norm(&(&lhs - &rhs)) / (T::one() + sub.tau_norm(&rhs)));
                            }
                        }
                    }
                }
            }
        }
        rep.residual("containment", contain.0, tol.rel_eq);
        rep.residual("idempotence", idem.0, tol.rel_eq);
        rep.residual("self_adjoint", sa.0, tol.rel_eq);
        rep.residual("bimodularity", bimod.0, tol.rel_eq);
        let mut worst = T::zero();
        let mut ok = true;
        for r in grp.elements() {
            match psd_check(&self.localized_gram(r), tol) {
                Ok(p) => {
                    ok &= p.psd;
                    worst = worst.min(p.margin);
                }
                Err(_) => ok = false,
            }
        }
        rep.flag("positivity", ok, format!("min eigenvalue {:e}", worst.to_f64_lossy()));
        rep
    }
}

impl<T: Real> FellBundle<T> {
    /// Sub-bundle cut out by spanning sets inside each fiber of self.
    pub fn sub_bundle(&self, spanning: Vec<Vec<Matrix<T>>>, unital: bool) -> Result<FellBundle<T>> {
        FellBundle::new(self.group().clone(), self.ambient_dim(), spanning, unital)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundles::DynamicalSystem;
    use crate::groups::FiniteGroup;
    use std::sync::Arc;

    fn tol() -> Tolerance<f64> {
        Tolerance::standard()
    }

    fn swap_system() -> DynamicalSystem<f64> {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let swap = Matrix::real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let diag = vec![Matrix::unit(2, 2, 0, 0), Matrix::unit(2, 2, 1, 1)];
        DynamicalSystem::inner(2, &diag, z2, &[Matrix::identity(2), swap], &tol()).unwrap()
    }

    fn averaging(sys: &DynamicalSystem<f64>) -> (Arc<FellBundle<f64>>, Arc<FellBundle<f64>>) {
        let sup = Arc::new(sys.bundle());
        let sub = Arc::new(sup.sub_bundle((0..2).map(|g| vec![sys.unitary(g)]).collect(), true).unwrap());
        (sup, sub)
    }

    #[test]
    fn identity_expectation_passes() {
        let b = Arc::new(FellBundle::<f64>::group_bundle(&FiniteGroup::cyclic(3).unwrap()));
        assert!(CondExpectation::identity(b).check(&tol()).passed());
    }

    #[test]
    fn averaging_onto_group_bundle() {
        let sys = swap_system();
        let (sup, sub) = averaging(&sys);
        let e = CondExpectation::from_fn(sup, sub, |g, x| {
            let a = sys.decompose(g, x);
            let avg = (a[(0, 0)] + a[(1, 1)]) * 0.5;
            sys.element(&Matrix::identity(2).scale(avg), g)
        })
        .unwrap();
        let rep = e.check(&tol());
        assert!(rep.passed(), "{:?}", rep.failures());
    }

    #[test]
    fn doubled_expectation_is_not_idempotent() {
        let sys = swap_system();
        let (sup, sub) = averaging(&sys);
        let e = CondExpectation::from_fn(sup, sub, |g, x| {
            let a = sys.decompose(g, x);
            sys.element(&Matrix::identity(2).scale(a[(0, 0)] + a[(1, 1)]), g)
        })
        .unwrap();
        assert!(e.check(&tol()).failed("idempotence"));
    }
}
