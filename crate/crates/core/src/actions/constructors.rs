use super::{Action, HilbertRef};
use crate::bundles::{BundleRef, DynamicalSystem};
use crate::crosssec::RegRep;
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupHom};
use crate::hilbundles::{HilbertBundle, HilbertModule};
use crate::numerics::{Matrix, Tolerance};
use crate::scalar::{Real, C};
use std::sync::Arc;

fn columns<T: Real>(rows: usize, cols: Vec<Vec<C<T>>>) -> Matrix<T> {
    Matrix::from_columns(rows, &cols)
}

impl<T: Real> Action<T> {
    /// Left multiplication of a bundle on itself.
    pub fn trivial(b: BundleRef<T>) -> Self {
        let grp = b.group().clone();
        let target = Arc::new(HilbertBundle::trivial(b.clone()));
        let ops = grp
            .elements()
            .map(|g| grp.elements().map(|h| b.fiber(g).basis().iter().map(|a| b.left_mult(g, a, h)).collect()).collect())
            .collect();
        Action::new(b.clone(), GroupHom::identity(&grp), target, ops).expect("shapes follow the bundle")
    }

    /// The regular representation acting on the l2 bundle.
    pub fn l2(b: BundleRef<T>) -> Self {
        let grp = b.group().clone();
        let target = Arc::new(HilbertBundle::l2(b.clone()));
        let reg = RegRep::new(b.clone());
        let ops = grp
            .elements()
            .map(|g| grp.elements().map(|_| (0..b.dim(g)).map(|i| reg.image(g, i).clone()).collect()).collect())
            .collect();
        Action::new(b.clone(), GroupHom::identity(&grp), target, ops).expect("shapes follow the bundle")
    }

    /// Action on the |H|-fold regularized bundle: (rho(a) xi)(h') = rho(a) xi(phi(g)^-1 h').
    pub fn regularize(&self) -> Self {
        let hgrp = self.target.group().clone();
        let n = hgrp.order();
        let target = Arc::new(self.target.regularize(n));
        let ops = self
            .source
            .group()
            .elements()
            .map(|g| {
                let pg = self.phi.apply(g);
                let pgi = hgrp.inv(pg);
                hgrp.elements()
                    .map(|h| {
                        let gh = hgrp.mul(pg, h);
                        let (dr, dc) = (self.target.dim(gh), self.target.dim(h));
                        self.ops[g][h]
                            .iter()
                            .map(|op| {
                                let mut m = Matrix::zeros(n * dr, n * dc);
                                for t in hgrp.elements() {
                                    m.set_block(t * dr, hgrp.mul(pgi, t) * dc, op);
                                }
                                m
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Action::new(self.source.clone(), self.phi.clone(), target, ops).expect("shapes follow the action")
    }

    /// Action of the bundle of (A, G, alpha) on the module bundle of X over (B, H, beta):
    /// rho((a, g))(x, h) = (a gamma_g(x), phi(g) h), with A acting on X by left multiplication
    /// and gamma_g given in the coordinates of X.
    #[allow(clippy::too_many_arguments)]
    pub fn dynsys(
        sys_a: &DynamicalSystem<T>,
        base_a: BundleRef<T>,
        sys_b: &DynamicalSystem<T>,
        base_b: BundleRef<T>,
        module: &HilbertModule<T>,
        phi: GroupHom,
        gamma: &[Matrix<T>],
        tol: &Tolerance<T>,
    ) -> Result<Self> {
        let grp = sys_a.group().clone();
        let hgrp = sys_b.group().clone();
        if phi.source != grp || phi.target != hgrp || base_a.group() != &grp {
            return Err(Error::BundleMismatch);
        }
        let d = module.dim();
        let xs = module.space().basis();
        let p = xs.first().map(|x| x.rows()).unwrap_or(sys_a.m());
        if sys_a.m() != p {
            return Err(Error::CompatibilityViolation(format!("A lives in M_{} but X has {p} rows", sys_a.m())));
        }
        if gamma.len() != grp.order() || gamma.iter().any(|m| m.shape() != (d, d)) {
            return Err(Error::ShapeMismatch("one d x d matrix gamma_g per element of G".into()));
        }
        let eps = tol.rel_eq * T::lit(10.0);
        let scale = |m: &Matrix<T>| T::one() + m.max_abs();
        // left module and homomorphism property
        for a in sys_a.algebra().basis() {
            for x in xs {
                let ax = a.matmul(x);
                if !module.space().contains_scaled(&ax, scale(&ax), tol) {
                    return Err(Error::CompatibilityViolation("A X is not contained in X".into()));
                }
            }
        }
        let e = grp.identity();
        if (&gamma[e] - &Matrix::identity(d)).max_abs() > eps {
            return Err(Error::CompatibilityViolation("gamma_e is not the identity".into()));
        }
        for g in grp.elements() {
            for h in grp.elements() {
                if (&gamma[g].matmul(&gamma[h]) - &gamma[grp.mul(g, h)]).max_abs() > eps * scale(&gamma[g]) * scale(&gamma[h]) {
                    return Err(Error::CompatibilityViolation(format!("gamma is not multiplicative at ({g}, {h})")));
                }
            }
        }
        let gx = |g: usize, x: &Matrix<T>| module.element(&gamma[g].matvec(&module.coords(x)));
        for g in grp.elements() {
            let pg = phi.apply(g);
            for x in xs {
                let gxv = gx(g, x);
                for a in sys_a.algebra().basis() {
                    let lhs = gx(g, &a.matmul(x));
                    let rhs = sys_a.apply(g, a).matmul(&gxv);
                    if (&lhs - &rhs).max_abs() > eps * scale(&lhs) {
                        return Err(Error::CompatibilityViolation(format!("condition (i) fails at g = {g}")));
                    }
                }
                for b in sys_b.algebra().basis() {
                    let lhs = gx(g, &x.matmul(b));
                    let rhs = gxv.matmul(&sys_b.apply(pg, b));
                    if (&lhs - &rhs).max_abs() > eps * scale(&lhs) {
                        return Err(Error::CompatibilityViolation(format!("condition (ii') fails at g = {g}")));
                    }
                }
                for y in xs {
                    let lhs = module.inner(&gxv, &gx(g, y));
                    let rhs = sys_b.apply(pg, &module.inner(x, y));
                    if (&lhs - &rhs).max_abs() > eps * scale(&lhs) {
                        return Err(Error::CompatibilityViolation(format!("condition (iii') fails at g = {g}")));
                    }
                }
            }
        }
        let target = Arc::new(HilbertBundle::from_dynsys(module, sys_b, base_b, tol)?);
        let ops = grp
            .elements()
            .map(|g| {
                let under: Vec<Matrix<T>> = base_a.fiber(g).basis().iter().map(|el| sys_a.decompose(g, el)).collect();
                let ls: Vec<Matrix<T>> = under
                    .iter()
                    .map(|a| columns(d, xs.iter().map(|x| module.coords(&a.matmul(x))).collect()).matmul(&gamma[g]))
                    .collect();
                hgrp.elements().map(|_| ls.clone()).collect()
            })
            .collect();
        Action::new(base_a, phi, target, ops)
    }

    /// Action from a *-representation pi of the source bundle on a Hilbert module X over B,
    /// on the bundle (X x {h}) over the trivial system (B, H): rho(a)(x, h) = (pi_g(a) x, phi(g) h).
    /// `pi[g][i]` is the matrix of pi_g(e^g_i) in the coordinates of X.
    pub fn from_representation(
        source: BundleRef<T>,
        phi: GroupHom,
        module: &HilbertModule<T>,
        pi: &[Vec<Matrix<T>>],
        tol: &Tolerance<T>,
    ) -> Result<Self> {
        let grp = source.group().clone();
        let hgrp = phi.target.clone();
        if phi.source != grp {
            return Err(Error::BundleMismatch);
        }
        let d = module.dim();
        if pi.len() != grp.order() || grp.elements().any(|g| pi[g].len() != source.dim(g) || pi[g].iter().any(|m| m.shape() != (d, d))) {
            return Err(Error::ShapeMismatch("one d x d matrix per basis element".into()));
        }
        check_star_rep(&source, module, pi, tol)?;
        let q = module.algebra().cols();
        let sys_b = DynamicalSystem::trivial(q, module.algebra().basis(), hgrp.clone(), tol)?;
        let base_b = Arc::new(sys_b.bundle());
        let target = Arc::new(HilbertBundle::from_dynsys(module, &sys_b, base_b, tol)?);
        let ops = grp.elements().map(|g| hgrp.elements().map(|_| pi[g].clone()).collect()).collect();
        Action::new(source, phi, target, ops)
    }

    /// The same action seen as an action on a prescribed Hilbert bundle.
    pub fn with_target(&self, target: HilbertRef<T>) -> Result<Self> {
        if target.dims() != self.target.dims() {
            return Err(Error::ActionMismatch("fiber dimensions differ".into()));
        }
        Action::new(self.source.clone(), self.phi.clone(), target, self.ops.clone())
    }
}

fn check_star_rep<T: Real>(source: &BundleRef<T>, module: &HilbertModule<T>, pi: &[Vec<Matrix<T>>], tol: &Tolerance<T>) -> Result<()> {
    let grp: &FiniteGroup = source.group();
    let d = module.dim();
    let eps = tol.rel_eq * T::lit(10.0);
    let op = |g: usize, a: &[C<T>]| {
        let mut m = Matrix::zeros(d, d);
        for (i, &z) in a.iter().enumerate() {
            m.axpy(z, &pi[g][i]);
        }
        m
    };
    let xs = module.space().basis();
    // inner-product Gram of X in its own coordinates: <x_i, x_j> as matrices
    let ip: Vec<Vec<Matrix<T>>> = xs.iter().map(|x| xs.iter().map(|y| module.inner(x, y)).collect()).collect();
    for g in grp.elements() {
        for i in 0..source.dim(g) {
            let p = &pi[g][i];
            for h in grp.elements() {
                for j in 0..source.dim(h) {
                    let lhs = p.matmul(&pi[h][j]);
                    let rhs = op(grp.mul(g, h), &source.product_coords(g, i, h, j));
                    if (&lhs - &rhs).max_abs() > eps * (T::one() + lhs.max_abs()) {
                        return Err(Error::NotStarRep(format!("products fail at ({g}, {i}), ({h}, {j})")));
                    }
                }
            }
            // <pi(a) x, y> = <x, pi(a*) y>
            let back = op(grp.inv(g), &source.star_coords(g, i));
            for k in 0..d {
                for l in 0..d {
                    let mut lhs = Matrix::zeros(ip[0][0].rows(), ip[0][0].cols());
                    let mut rhs = lhs.clone();
                    for m in 0..d {
                        lhs.axpy(p[(m, k)].conj(), &ip[m][l]);
                        rhs.axpy(back[(m, l)], &ip[k][m]);
                    }
                    if (&lhs - &rhs).max_abs() > eps * (T::one() + lhs.max_abs()) {
                        return Err(Error::NotStarRep(format!("adjoint fails at ({g}, {i})")));
                    }
                }
            }
            // B-linearity: pi(a)(x b) = (pi(a) x) b
            for x in xs {
                let px = module.element(&p.matvec(&module.coords(x)));
                for b in module.algebra().basis() {
                    let lhs = module.element(&p.matvec(&module.coords(&x.matmul(b))));
                    let rhs = px.matmul(b);
                    if (&lhs - &rhs).max_abs() > eps * (T::one() + lhs.max_abs()) {
                        return Err(Error::NotStarRep(format!("pi_{g} is not B-linear")));
                    }
                }
            }
        }
    }
    Ok(())
}
