//! The module Y = sum_h X_h over the cross-sectional algebra of the coefficient bundle, with the
//! left action induced by a bundle action. With finite groups Y needs no completion, and the
//! full and reduced versions coincide.

mod equivalence;

pub use equivalence::EquivalenceBundle;

use crate::actions::{Action, HilbertRef};
use crate::bundles::{left_regular, same_bundle};
use crate::crosssec::{RegRep, Section};
use crate::error::{Error, Result};
use crate::numerics::{column_rank, kron, orthonormalize, psd_check, vnorm, vsub, Matrix, Tolerance};
use crate::random::Rng;
use crate::report::{AxiomReport, Worst};
use crate::scalar::{czero, Real, C};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct Correspondence<T> {
    bundle: HilbertRef<T>,
    offsets: Vec<usize>,
    dim: usize,
    reg_b: RegRep<T>,
    left: Option<Action<T>>,
    reg_a: Option<RegRep<T>>,
}

/// Y^{rho,x}: the spans of (rho(a) x) b per fiber and the correspondence they carry.
#[derive(Debug, Clone)]
pub struct SubCorrespondence<T> {
    pub spans: Vec<Matrix<T>>,
    pub corr: Correspondence<T>,
}

fn sec_diff<T: Real>(a: &Section<T>, b: &Section<T>) -> T {
    let scale = T::one() + a.coeffs().iter().chain(b.coeffs()).flatten().map(|z| z.norm()).fold(T::zero(), T::max);
    a.distance(b) / scale
}

fn vec_diff<T: Real>(a: &[C<T>], b: &[C<T>]) -> T {
    vnorm(&vsub(a, b)) / (T::one() + vnorm(a).max(vnorm(b)))
}

impl<T: Real> Correspondence<T> {
    /// Right module of a Hilbert bundle; the bundle must validate.
    pub fn build(bundle: HilbertRef<T>, tol: &Tolerance<T>) -> Result<Self> {
        let rep = bundle.validate(tol);
        if !rep.passed() {
            return Err(Error::InvalidBundle(format!("Hilbert bundle fails {:?}", rep.failures())));
        }
        Ok(Self::build_unchecked(bundle))
    }

    pub fn build_unchecked(bundle: HilbertRef<T>) -> Self {
        let mut offsets = Vec::new();
        let mut dim = 0;
        for &d in bundle.dims() {
            offsets.push(dim);
            dim += d;
        }
        let reg_b = RegRep::new(bundle.base().clone());
        Correspondence { bundle, offsets, dim, reg_b, left: None, reg_a: None }
    }

    /// Installs (f xi)(h) = sum_g rho(f(g)) xi(phi(g)^-1 h). The action must act on this
    /// module's bundle and validate.
    pub fn attach_left_action(self, rho: Action<T>, tol: &Tolerance<T>) -> Result<Self> {
        if !(Arc::ptr_eq(rho.target(), &self.bundle) || **rho.target() == *self.bundle) {
            return Err(Error::ActionMismatch("action lives on a different Hilbert bundle".into()));
        }
        let rep = rho.validate(tol);
        if !rep.passed() {
            return Err(Error::ActionMismatch(format!("action fails {:?}", rep.failures())));
        }
        self.attach_left_action_unchecked(rho)
    }

    /// Installs the left action after checking only that it acts on this module's bundle.
    pub fn attach_left_action_unchecked(mut self, rho: Action<T>) -> Result<Self> {
        if rho.target().dims() != self.bundle.dims() || rho.target().group() != self.bundle.group() {
            return Err(Error::ActionMismatch("action lives on a different Hilbert bundle".into()));
        }
        self.reg_a = Some(RegRep::new(rho.source().clone()));
        self.left = Some(rho);
        Ok(self)
    }

    pub fn bundle(&self) -> &HilbertRef<T> {
        &self.bundle
    }

    pub fn left(&self) -> Option<&Action<T>> {
        self.left.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offset(&self, h: usize) -> usize {
        self.offsets[h]
    }

    pub fn part<'a>(&self, xi: &'a [C<T>], h: usize) -> &'a [C<T>] {
        &xi[self.offsets[h]..self.offsets[h] + self.bundle.dim(h)]
    }

    /// x (.) h: the vector supported at h with value x.
    pub fn single(&self, h: usize, x: &[C<T>]) -> Vec<C<T>> {
        let mut v = vec![czero(); self.dim];
        v[self.offsets[h]..self.offsets[h] + x.len()].copy_from_slice(x);
        v
    }

    pub fn random(&self, rng: &mut Rng) -> Vec<C<T>> {
        rng.cvec(self.dim)
    }

    fn hgroup(&self) -> &crate::groups::FiniteGroup {
        self.bundle.group()
    }

    /// Matrix of xi -> xi f: (xi f)(h) = sum_k xi(k) f(k^-1 h).
    pub fn right_matrix(&self, f: &Section<T>) -> Result<Matrix<T>> {
        if !same_bundle(f.bundle(), self.bundle.base()) {
            return Err(Error::BundleMismatch);
        }
        let grp = self.hgroup();
        let mut m = Matrix::zeros(self.dim, self.dim);
        for k in grp.elements() {
            for s in grp.elements() {
                let h = grp.mul(k, s);
                let blk = self.bundle.right_op(k, s, f.at(s));
                m.set_block(self.offsets[h], self.offsets[k], &blk);
            }
        }
        Ok(m)
    }

    pub fn right_act(&self, xi: &[C<T>], f: &Section<T>) -> Result<Vec<C<T>>> {
        Ok(self.right_matrix(f)?.matvec(xi))
    }

    /// <xi, eta>(h) = sum_k <xi(k), eta(kh)>.
    pub fn inner(&self, xi: &[C<T>], eta: &[C<T>]) -> Section<T> {
        let grp = self.hgroup();
        let b = self.bundle.base();
        let mut coeffs: Vec<Vec<C<T>>> = b.dims().into_iter().map(|d| vec![czero(); d]).collect();
        for h in grp.elements() {
            for k in grp.elements() {
                let kh = grp.mul(k, h);
                let c = self.bundle.inner_coords(k, self.part(xi, k), kh, self.part(eta, kh));
                for (acc, z) in coeffs[h].iter_mut().zip(c) {
                    *acc += z;
                }
            }
        }
        Section::new(b.clone(), coeffs).expect("shapes follow the bundle")
    }

    /// Block-diagonal Hilbert space Gram: tau of the unit-fiber component of the inner product.
    pub fn hilbert_gram(&self) -> Matrix<T> {
        let blocks: Vec<Matrix<T>> = self.hgroup().elements().map(|h| self.bundle.trace_gram(h)).collect();
        Matrix::block_diag(&blocks)
    }

    /// ||xi|| = ||<xi, xi>||^(1/2) in the cross-sectional C*-algebra of the coefficients.
    pub fn norm(&self, xi: &[C<T>]) -> T {
        self.reg_b.cstar_norm(&self.inner(xi, xi)).sqrt()
    }

    fn left_parts(&self) -> Result<(&Action<T>, &RegRep<T>)> {
        match (&self.left, &self.reg_a) {
            (Some(a), Some(r)) => Ok((a, r)),
            _ => Err(Error::ActionMismatch("no left action attached".into())),
        }
    }

    /// Matrix of xi -> f xi for a section f of the acting bundle.
    pub fn left_matrix(&self, f: &Section<T>) -> Result<Matrix<T>> {
        let (rho, _) = self.left_parts()?;
        if !same_bundle(f.bundle(), rho.source()) {
            return Err(Error::BundleMismatch);
        }
        let grp = rho.source().group();
        let hgrp = self.hgroup();
        let mut m = Matrix::zeros(self.dim, self.dim);
        for g in grp.elements() {
            if f.is_zero_at(g) {
                continue;
            }
            for src in hgrp.elements() {
                let dst = rho.shift(g, src);
                let blk = rho.op(g, f.at(g), src);
                let mut cur = m.block(self.offsets[dst], self.offsets[src], blk.rows(), blk.cols());
                cur.axpy(C::new(T::one(), T::zero()), &blk);
                m.set_block(self.offsets[dst], self.offsets[src], &cur);
            }
        }
        Ok(m)
    }

    pub fn left_act(&self, f: &Section<T>, xi: &[C<T>]) -> Result<Vec<C<T>>> {
        Ok(self.left_matrix(f)?.matvec(xi))
    }

    /// (||f xi|| - ||f|| ||xi||) / (1 + ||f|| ||xi||); nonpositive when the left action is bounded.
    pub fn left_bound_slack(&self, f: &Section<T>, xi: &[C<T>]) -> Result<T> {
        let (_, reg_a) = self.left_parts()?;
        let nf = reg_a.cstar_norm(f);
        let nx = self.norm(xi);
        let ny = self.norm(&self.left_act(f, xi)?);
        Ok((ny - nf * nx) / (T::one() + nf * nx))
    }

    /// z -> <x (.) e, z (x (.) e)> for x in X_e; equals the push-forward by the coefficient map.
    pub fn psi(&self, x: &[C<T>], f: &Section<T>) -> Result<Section<T>> {
        let e = self.hgroup().identity();
        if x.len() != self.bundle.dim(e) {
            return Err(Error::WrongFiber { expected: self.bundle.dim(e), got: x.len() });
        }
        let xi = self.single(e, x);
        Ok(self.inner(&xi, &self.left_act(f, &xi)?))
    }

    /// Randomized check of the module identities (and of the left action, if attached).
    pub fn validate(&self, samples: usize, seed: u64, tol: &Tolerance<T>) -> AxiomReport {
        let mut rep = AxiomReport::new("correspondence");
        let mut rng = Rng::seeded(seed);
        let b = self.bundle.base().clone();
        let mut lin = Worst::new();
        let mut herm = Worst::new();
        let mut assoc = Worst::new();
        let mut pos_ok = true;
        let mut pos_margin = T::infinity();
        let mut ok = true;
        for _ in 0..samples {
            let xi = self.random(&mut rng);
            let eta = self.random(&mut rng);
            let f = Section::random(b.clone(), &mut rng);
            let f2 = Section::random(b.clone(), &mut rng);
            let lhs = self.inner(&xi, &self.right_act(&eta, &f).unwrap());
            match self.inner(&xi, &eta).convolve(&f) {
                Ok(rhs) => lin.see(sec_diff(&lhs, &rhs)),
                Err(_) => ok = false,
            }
            match self.inner(&xi, &eta).star() {
                Ok(s) => herm.see(sec_diff(&s, &self.inner(&eta, &xi))),
                Err(_) => ok = false,
            }
            let l = self.right_act(&self.right_act(&xi, &f).unwrap(), &f2).unwrap();
            match f.convolve(&f2) {
                Ok(ff) => assoc.see(vec_diff(&l, &self.right_act(&xi, &ff).unwrap())),
                Err(_) => ok = false,
            }
            match psd_check(&self.reg_b.rep_matrix(&self.inner(&xi, &xi)), tol) {
                Ok(p) => {
                    pos_ok &= p.psd;
                    pos_margin = pos_margin.min(p.margin);
                }
                Err(_) => pos_ok = false,
            }
        }
        rep.flag("products_in_fibers", ok, "");
        rep.residual("inner_right_linearity", lin.0, tol.rel_eq);
        rep.residual("hermitian", herm.0, tol.rel_eq);
        rep.residual("right_associativity", assoc.0, tol.rel_eq);
        rep.flag("positivity", pos_ok, format!("min eigenvalue {:e}", pos_margin.to_f64_lossy()));
        let full = column_rank(&self.hilbert_gram(), tol) == self.dim;
        rep.flag("definiteness", full, "");
        if let Ok((rho, _)) = self.left_parts() {
            let a = rho.source().clone();
            let mut adj = Worst::new();
            let mut mult = Worst::new();
            let mut bimod = Worst::new();
            let mut bound = Worst::new();
            let mut ok = true;
            for _ in 0..samples {
                let xi = self.random(&mut rng);
                let eta = self.random(&mut rng);
                let f = Section::random(a.clone(), &mut rng);
                let f2 = Section::random(a.clone(), &mut rng);
                let g = Section::random(b.clone(), &mut rng);
                let fx = self.left_act(&f, &xi).unwrap();
                match f.star() {
                    Ok(fs) => adj.see(sec_diff(&self.inner(&fx, &eta), &self.inner(&xi, &self.left_act(&fs, &eta).unwrap()))),
                    Err(_) => ok = false,
                }
                match f.convolve(&f2) {
                    Ok(ff) => mult.see(vec_diff(
                        &self.left_act(&f, &self.left_act(&f2, &xi).unwrap()).unwrap(),
                        &self.left_act(&ff, &xi).unwrap(),
                    )),
                    Err(_) => ok = false,
                }
                bimod.see(vec_diff(
                    &self.left_act(&f, &self.right_act(&xi, &g).unwrap()).unwrap(),
                    &self.right_act(&fx, &g).unwrap(),
                ));
                bound.see(self.left_bound_slack(&f, &xi).unwrap());
            }
            rep.flag("left_products_in_fibers", ok, "");
            rep.residual("left_adjoint", adj.0, tol.rel_eq);
            rep.residual("left_multiplicativity", mult.0, tol.rel_eq);
            rep.residual("bimodule", bimod.0, tol.rel_eq);
            rep.residual("left_bounded", bound.0, tol.rel_eq);
        }
        rep
    }

    /// Spans of (rho(a) w) b with phi(g) h = k, over w running through `ws` (vectors of X_e).
    fn generated_spans(&self, ws: &[Vec<C<T>>], tol: &Tolerance<T>) -> Result<Vec<Matrix<T>>> {
        let (rho, _) = self.left_parts()?;
        let hgrp = self.hgroup();
        let a = rho.source();
        let b = self.bundle.base();
        let e = hgrp.identity();
        let mut vecs: Vec<Vec<Vec<C<T>>>> = vec![Vec::new(); hgrp.order()];
        for g in a.group().elements() {
            let pg = rho.phi().apply(g);
            for op in &rho.ops()[g][e] {
                for w in ws {
                    let v = op.matvec(w);
                    for h in hgrp.elements() {
                        let k = hgrp.mul(pg, h);
                        for m in 0..b.dim(h) {
                            vecs[k].push(self.bundle.right_tensor(pg, h, m).matvec(&v));
                        }
                    }
                }
            }
        }
        Ok(hgrp
            .elements()
            .map(|k| {
                let basis = orthonormalize(&vecs[k], tol);
                Matrix::from_columns(self.bundle.dim(k), &basis)
            })
            .collect())
    }

    /// Span{(rho(a) w) b : w in X_e} = X_k for every k.
    pub fn check_nondegenerate(&self, tol: &Tolerance<T>) -> Result<bool> {
        let e = self.hgroup().identity();
        let de = self.bundle.dim(e);
        let ws: Vec<Vec<C<T>>> = (0..de).map(|i| crate::hilbundles::unit_vec(de, i)).collect();
        let spans = self.generated_spans(&ws, tol)?;
        Ok(spans.iter().zip(self.bundle.dims()).all(|(s, &d)| s.cols() == d))
    }

    /// Span{(rho(a) x) b} = X_k for every k.
    pub fn check_cyclic(&self, x: &[C<T>], tol: &Tolerance<T>) -> Result<bool> {
        Ok(self.rank_profile(x, tol)?.iter().zip(self.bundle.dims()).all(|(r, d)| r == d))
    }

    /// Dimension of the span generated by x in each fiber.
    pub fn rank_profile(&self, x: &[C<T>], tol: &Tolerance<T>) -> Result<Vec<usize>> {
        let e = self.hgroup().identity();
        if x.len() != self.bundle.dim(e) {
            return Err(Error::WrongFiber { expected: self.bundle.dim(e), got: x.len() });
        }
        Ok(self.generated_spans(&[x.to_vec()], tol)?.iter().map(|s| s.cols()).collect())
    }

    /// The subcorrespondence generated by x, carried by the restricted bundle and action.
    pub fn subcorrespondence(&self, x: &[C<T>], tol: &Tolerance<T>) -> Result<SubCorrespondence<T>> {
        let e = self.hgroup().identity();
        if x.len() != self.bundle.dim(e) {
            return Err(Error::WrongFiber { expected: self.bundle.dim(e), got: x.len() });
        }
        let (rho, _) = self.left_parts()?;
        let spans = self.generated_spans(&[x.to_vec()], tol)?;
        let (sub_rho, _) = rho.restrict(&spans, tol)?;
        let mut corr = Correspondence::build_unchecked(sub_rho.target().clone());
        corr.reg_a = Some(RegRep::new(sub_rho.source().clone()));
        corr.left = Some(sub_rho);
        Ok(SubCorrespondence { spans, corr })
    }

    /// Psi(f) on l2(G) (x) Y: sum_g lambda_g (x) pi_g(f(g)).
    pub fn amplified_matrix(&self, f: &Section<T>) -> Result<Matrix<T>> {
        let (rho, _) = self.left_parts()?;
        let a = rho.source().clone();
        let grp = a.group();
        let mut m = Matrix::zeros(grp.order() * self.dim, grp.order() * self.dim);
        for g in grp.elements() {
            if f.is_zero_at(g) {
                continue;
            }
            let single = Section::singleton(a.clone(), g, f.at(g).to_vec())?;
            let pi = self.left_matrix(&single)?;
            m = &m + &kron(&left_regular(grp, g), &pi);
        }
        Ok(m)
    }

    /// The amplified assignment is multiplicative and *-preserving for the inner product
    /// 1 (x) (Hilbert Gram) on l2(G) (x) Y.
    pub fn check_amplified(&self, samples: usize, seed: u64, tol: &Tolerance<T>) -> Result<AxiomReport> {
        let (rho, _) = self.left_parts()?;
        let a = rho.source().clone();
        let gram = kron(&Matrix::identity(a.group().order()), &self.hilbert_gram());
        let mut rng = Rng::seeded(seed);
        let mut mult = Worst::new();
        let mut star = Worst::new();
        let rel = |x: &Matrix<T>, y: &Matrix<T>| (x - y).max_abs() / (T::one() + x.max_abs().max(y.max_abs()));
        for _ in 0..samples {
            let f = Section::random(a.clone(), &mut rng);
            let f2 = Section::random(a.clone(), &mut rng);
            let pf = self.amplified_matrix(&f)?;
            let lhs = self.amplified_matrix(&f.convolve(&f2)?)?;
            mult.see(rel(&lhs, &pf.matmul(&self.amplified_matrix(&f2)?)));
            let ps = self.amplified_matrix(&f.star()?)?;
            star.see(rel(&gram.matmul(&ps), &pf.adjoint().matmul(&gram)));
        }
        let mut rep = AxiomReport::new("amplified_correspondence");
        rep.residual("multiplicativity", mult.0, tol.rel_eq);
        rep.residual("adjoint", star.0, tol.rel_eq);
        Ok(rep)
    }
}

#[cfg(test)]
mod tests;
