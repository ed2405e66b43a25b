//! Actions of a Fell bundle over G on a Hilbert bundle over H, along a homomorphism phi: G -> H.
//!
//! `ops[g][h][i]` is the matrix of rho(e^g_i): X_h -> X_{phi(g) h}.

mod constructors;

use crate::bundles::{same_bundle, BundleRef, StructureConstants};
use crate::crosssec::matrix_alg_psd;
use crate::error::{Error, Result};
use crate::groups::GroupHom;
use crate::hilbundles::{HilbertBundle, Quotient};
use crate::numerics::{Matrix, Tolerance};
use crate::pdmaps::BundleMap;
use crate::random::Rng;
use crate::report::{AxiomReport, Worst};
use crate::scalar::{Real, C};
use std::sync::Arc;

pub type HilbertRef<T> = Arc<HilbertBundle<T>>;

#[derive(Debug, Clone, PartialEq)]
pub struct Action<T> {
    source: BundleRef<T>,
    phi: GroupHom,
    target: HilbertRef<T>,
    ops: Vec<Vec<Vec<Matrix<T>>>>,
}

fn rel_diff<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> T {
    (a - b).max_abs() / (T::one() + a.max_abs().max(b.max_abs()))
}

impl<T: Real> Action<T> {
    pub fn new(source: BundleRef<T>, phi: GroupHom, target: HilbertRef<T>, ops: Vec<Vec<Vec<Matrix<T>>>>) -> Result<Self> {
        if &phi.source != source.group() || &phi.target != target.group() {
            return Err(Error::BundleMismatch);
        }
        let g_ord = source.group().order();
        if ops.len() != g_ord {
            return Err(Error::ShapeMismatch("one operator family per element of G".into()));
        }
        for g in source.group().elements() {
            if ops[g].len() != target.group().order() {
                return Err(Error::ShapeMismatch(format!("operators of A_{g} need one entry per element of H")));
            }
            for h in target.group().elements() {
                let want = (target.dim(target.group().mul(phi.apply(g), h)), target.dim(h));
                if ops[g][h].len() != source.dim(g) || ops[g][h].iter().any(|m| m.shape() != want) {
                    return Err(Error::ShapeMismatch(format!("operators of A_{g} on X_{h}")));
                }
            }
        }
        Ok(Action { source, phi, target, ops })
    }

    pub fn source(&self) -> &BundleRef<T> {
        &self.source
    }

    pub fn phi(&self) -> &GroupHom {
        &self.phi
    }

    pub fn target(&self) -> &HilbertRef<T> {
        &self.target
    }

    pub fn ops(&self) -> &[Vec<Vec<Matrix<T>>>] {
        &self.ops
    }

    /// Fiber index phi(g) h.
    pub fn shift(&self, g: usize, h: usize) -> usize {
        self.target.group().mul(self.phi.apply(g), h)
    }

    /// rho(a): X_h -> X_{phi(g) h} for a in A_g given by coordinates.
    pub fn op(&self, g: usize, a: &[C<T>], h: usize) -> Matrix<T> {
        let mut m = Matrix::zeros(self.target.dim(self.shift(g, h)), self.target.dim(h));
        for (i, &z) in a.iter().enumerate() {
            if z.norm_sqr() != T::zero() {
                m.axpy(z, &self.ops[g][h][i]);
            }
        }
        m
    }

    pub fn apply(&self, g: usize, a: &[C<T>], h: usize, x: &[C<T>]) -> Vec<C<T>> {
        self.op(g, a, h).matvec(x)
    }

    /// Definition-level checks plus the norm inequalities.
    pub fn validate(&self, tol: &Tolerance<T>) -> AxiomReport {
        let mut rep = AxiomReport::new("action");
        let a = &self.source;
        let x = &self.target;
        let grp = a.group();
        let hgrp = x.group();
        let b = x.base();
        let sc = StructureConstants::new(a);
        let mut mult = Worst::new();
        let mut adj = Worst::new();
        let mut tadj = Worst::new();
        let mut rlin = Worst::new();
        for g in grp.elements() {
            let gi = grp.inv(g);
            for h in hgrp.elements() {
                let gh = self.shift(g, h);
                for i in 0..a.dim(g) {
                    let op = &self.ops[g][h][i];
                    // (ii) products
                    for g2 in grp.elements() {
                        let g2h = self.shift(g2, h);
                        for j in 0..a.dim(g2) {
                            let lhs = self.ops[g][g2h][i].matmul(&self.ops[g2][h][j]);
                            let rhs = self.op(grp.mul(g, g2), &sc.prod[g][g2][i][j], h);
                            mult.see(rel_diff(&lhs, &rhs));
                        }
                    }
                    // (iii) <rho(a) x, y> = <x, rho(a*) y>
                    let star = &sc.star[g][i];
                    for s in hgrp.elements() {
                        let back = self.op(gi, star, s);
                        let gis = self.shift(gi, s);
                        for m in 0..b.dim(hgrp.mul(hgrp.inv(gh), s)) {
                            let lhs = op.adjoint().matmul(x.inner_tensor(gh, s, m));
                            let rhs = x.inner_tensor(h, gis, m).matmul(&back);
                            adj.see(rel_diff(&lhs, &rhs));
                        }
                    }
                    let lhs = op.adjoint().matmul(&x.trace_gram(gh));
                    let rhs = x.trace_gram(h).matmul(&self.op(gi, star, gh));
                    tadj.see(rel_diff(&lhs, &rhs));
                    // (iv) right linearity
                    for h2 in hgrp.elements() {
                        for k in 0..b.dim(h2) {
                            let lhs = x.right_tensor(gh, h2, k).matmul(op);
                            let rhs = self.ops[g][hgrp.mul(h, h2)][i].matmul(x.right_tensor(h, h2, k));
                            rlin.see(rel_diff(&lhs, &rhs));
                        }
                    }
                }
            }
        }
        rep.flag("fiber_targeting", true, "operator shapes checked at construction");
        rep.residual("multiplicativity", mult.0, tol.rel_eq);
        rep.residual("adjoint", adj.0, tol.rel_eq);
        rep.residual("trace_adjoint", tadj.0, tol.rel_eq);
        rep.residual("right_linearity", rlin.0, tol.rel_eq);

        let mut rng = Rng::seeded(0xac7);
        let mut bound = Worst::new();
        let mut dom = Worst::new();
        for g in grp.elements() {
            for h in hgrp.elements() {
                for i in 0..a.dim(g) {
                    for xi in 0..x.dim(h) {
                        let mut v = vec![C::new(T::zero(), T::zero()); x.dim(h)];
                        v[xi] = C::new(T::one(), T::zero());
                        let mut ai = vec![C::new(T::zero(), T::zero()); a.dim(g)];
                        ai[i] = C::new(T::one(), T::zero());
                        bound.see(self.norm_bound_slack(g, &ai, h, &v));
                    }
                }
            }
            if a.dim(g) > 0 {
                for _ in 0..2 {
                    let av = rng.cvec(a.dim(g));
                    let hs: Vec<usize> = (0..2).map(|_| rng.below(hgrp.order())).collect();
                    let xs: Vec<Vec<C<T>>> = hs.iter().map(|&h| rng.cvec(x.dim(h))).collect();
                    match self.gram_domination_margin(g, &av, &hs, &xs, tol) {
                        Ok(m) => dom.see(-m),
                        Err(_) => dom.see(T::infinity()),
                    }
                }
            }
        }
        rep.residual("norm_bound", bound.0, tol.rel_eq);
        rep.residual("gram_domination", dom.0, tol.rel_psd);
        rep
    }

    /// (||rho(a) x|| - ||a|| ||x||) / (1 + ||a|| ||x||); nonpositive for a genuine action.
    pub fn norm_bound_slack(&self, g: usize, a: &[C<T>], h: usize, x: &[C<T>]) -> T {
        let na = self.source.element(g, a).op_norm();
        let nx = self.target.norm(h, x);
        let y = self.apply(g, a, h, x);
        let ny = self.target.norm(self.shift(g, h), &y);
        (ny - na * nx) / (T::one() + na * nx)
    }

    /// Smallest eigenvalue, relative to ||a||^2 ||R||, of ||a||^2 R - S in the matrix algebra
    /// over the fibers h_i, where R = [<x_i, x_j>] and S = [<rho(a) x_i, rho(a) x_j>].
    pub fn gram_domination_margin(&self, g: usize, a: &[C<T>], hs: &[usize], xs: &[Vec<C<T>>], tol: &Tolerance<T>) -> Result<T> {
        let x = &self.target;
        let na2 = {
            let n = self.source.element(g, a).op_norm();
            n * n
        };
        let ys: Vec<Vec<C<T>>> = hs.iter().zip(xs).map(|(&h, v)| self.apply(g, a, h, v)).collect();
        let gh: Vec<usize> = hs.iter().map(|&h| self.shift(g, h)).collect();
        let mut scale = T::one();
        let blocks: Vec<Vec<Matrix<T>>> = (0..hs.len())
            .map(|i| {
                (0..hs.len())
                    .map(|j| {
                        let r = x.inner_elem(hs[i], &xs[i], hs[j], &xs[j]);
                        let s = x.inner_elem(gh[i], &ys[i], gh[j], &ys[j]);
                        scale = scale.max(na2 * r.op_norm());
                        &r.scale_real(na2) - &s
                    })
                    .collect()
            })
            .collect();
        let rep = matrix_alg_psd(x.base(), hs, &blocks, tol)?;
        Ok(rep.margin / scale)
    }

    /// T_g(a) = <x, rho(a) y> for x, y in X_e; y defaults to x.
    pub fn coefficient_map(&self, x: &[C<T>], y: Option<&[C<T>]>) -> Result<BundleMap<T>> {
        let e = self.target.group().identity();
        let de = self.target.dim(e);
        let y = y.unwrap_or(x);
        if x.len() != de {
            return Err(Error::WrongFiber { expected: de, got: x.len() });
        }
        if y.len() != de {
            return Err(Error::WrongFiber { expected: de, got: y.len() });
        }
        let blocks = self
            .source
            .group()
            .elements()
            .map(|g| {
                let pg = self.phi.apply(g);
                let cols: Vec<Vec<C<T>>> =
                    self.ops[g][e].iter().map(|op| self.target.inner_coords(e, x, pg, &op.matvec(y))).collect();
                Matrix::from_columns(self.target.base().dim(pg), &cols)
            })
            .collect();
        BundleMap::new(self.source.clone(), self.target.base().clone(), self.phi.clone(), blocks)
    }

    /// Conjugates the action by a unitary bundle map U: X -> X'.
    pub fn transport(&self, u: &[Matrix<T>], other: HilbertRef<T>, tol: &Tolerance<T>) -> Result<Action<T>> {
        let rep = self.target.check_unitary_bundle_map(&other, u, tol)?;
        if !rep.passed() {
            return Err(Error::NotUnitary(format!("{:?}", rep.failures())));
        }
        let inv: Vec<Matrix<T>> = u
            .iter()
            .map(|m| m.inverse().ok_or_else(|| Error::NotUnitary("singular block".into())))
            .collect::<Result<_>>()?;
        let ops = self
            .source
            .group()
            .elements()
            .map(|g| {
                self.target
                    .group()
                    .elements()
                    .map(|h| self.ops[g][h].iter().map(|op| u[self.shift(g, h)].matmul(op).matmul(&inv[h])).collect())
                    .collect()
            })
            .collect();
        Action::new(self.source.clone(), self.phi.clone(), other, ops)
    }

    /// Restriction to an invariant sub-bundle given by spanning columns per fiber.
    pub fn restrict(&self, spans: &[Matrix<T>], tol: &Tolerance<T>) -> Result<(Action<T>, Vec<Quotient<T>>)> {
        let (sub, q) = self.target.restrict(spans, tol)?;
        let mut ops = Vec::new();
        for g in self.source.group().elements() {
            let mut per_h = Vec::new();
            for h in self.target.group().elements() {
                let gh = self.shift(g, h);
                let mut list = Vec::new();
                for op in &self.ops[g][h] {
                    let img = op.matmul(&q[h].lift);
                    let back = q[gh].lift.matmul(&q[gh].q.matmul(&img));
                    if rel_diff(&img, &back) > tol.rel_eq * T::lit(100.0) {
                        return Err(Error::InvariantViolation("span is not invariant under the action".into()));
                    }
                    list.push(q[gh].q.matmul(&img));
                }
                per_h.push(list);
            }
            ops.push(per_h);
        }
        Ok((Action::new(self.source.clone(), self.phi.clone(), Arc::new(sub), ops)?, q))
    }

    pub fn direct_sum(&self, other: &Action<T>) -> Result<Action<T>> {
        if !same_bundle(&self.source, &other.source) || self.phi != other.phi {
            return Err(Error::ActionMismatch("different source bundles or homomorphisms".into()));
        }
        let target = Arc::new(self.target.direct_sum(&other.target)?);
        let ops = self
            .ops
            .iter()
            .zip(&other.ops)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.iter().zip(y).map(|(p, q)| Matrix::block_diag(&[p.clone(), q.clone()])).collect())
                    .collect()
            })
            .collect();
        Action::new(self.source.clone(), self.phi.clone(), target, ops)
    }

    /// Replaces one operator; used to build deliberately broken instances.
    pub fn perturb(&mut self, g: usize, h: usize, i: usize, delta: &Matrix<T>) {
        self.ops[g][h][i] = &self.ops[g][h][i] + delta;
    }

    /// When H is trivial, the operators pi_g(a) on the single fiber.
    pub fn as_representation(&self) -> Result<Vec<Vec<Matrix<T>>>> {
        if self.target.group().order() != 1 {
            return Err(Error::ActionMismatch("target group is not trivial".into()));
        }
        Ok(self.ops.iter().map(|per_h| per_h[0].clone()).collect())
    }
}
