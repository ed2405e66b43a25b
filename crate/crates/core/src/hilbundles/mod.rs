//! Hilbert bundles over a Fell bundle: fibered right modules with a bundle-valued inner product.
//!
//! Fibers are coordinate spaces. For x in X_r the right action of the k-th basis element of
//! B_h is the matrix `right[r][h][k]` (X_r -> X_{rh}), and for x in X_r, y in X_s the inner
//! product is sum_k (x* M_k y) f_k with M_k = `inner[r][s][k]` and f_k the basis of B_{r^-1 s}.

mod constructors;
mod module;

pub use module::HilbertModule;

use crate::bundles::{same_bundle, BundleRef, StructureConstants};
use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::numerics::{psd_check, range_eigenpairs, vdot, Matrix, Tolerance};
use crate::random::Rng;
use crate::report::{AxiomReport, Worst};
use crate::scalar::{c, czero, Real, C};
use std::ops::Deref;

#[derive(Debug, Clone, PartialEq)]
pub struct SemiInnerBundle<T> {
    base: BundleRef<T>,
    dims: Vec<usize>,
    right: Vec<Vec<Vec<Matrix<T>>>>,
    inner: Vec<Vec<Vec<Matrix<T>>>>,
}

/// A semi-inner bundle whose inner product is definite on every fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertBundle<T>(SemiInnerBundle<T>);

impl<T> Deref for HilbertBundle<T> {
    type Target = SemiInnerBundle<T>;
    fn deref(&self) -> &SemiInnerBundle<T> {
        &self.0
    }
}

/// Quotient data of one fiber: `q` maps old coordinates to new ones, `lift` is a right inverse.
#[derive(Debug, Clone)]
pub struct Quotient<T> {
    pub q: Matrix<T>,
    pub lift: Matrix<T>,
}

fn rel_diff<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> T {
    (a - b).max_abs() / (T::one() + a.max_abs().max(b.max_abs()))
}

impl<T: Real> SemiInnerBundle<T> {
    pub fn new(
        base: BundleRef<T>,
        dims: Vec<usize>,
        right: Vec<Vec<Vec<Matrix<T>>>>,
        inner: Vec<Vec<Vec<Matrix<T>>>>,
    ) -> Result<Self> {
        let grp = base.group();
        let n = grp.order();
        if dims.len() != n || right.len() != n || inner.len() != n {
            return Err(Error::ShapeMismatch("one entry per group element".into()));
        }
        for r in grp.elements() {
            if right[r].len() != n || inner[r].len() != n {
                return Err(Error::ShapeMismatch(format!("tensors at fiber {r}")));
            }
            for h in grp.elements() {
                let rh = grp.mul(r, h);
                if right[r][h].len() != base.dim(h) || right[r][h].iter().any(|m| m.shape() != (dims[rh], dims[r])) {
                    return Err(Error::ShapeMismatch(format!("right action X_{r} x B_{h}")));
                }
                let f = grp.mul(grp.inv(r), h);
                if inner[r][h].len() != base.dim(f) || inner[r][h].iter().any(|m| m.shape() != (dims[r], dims[h])) {
                    return Err(Error::ShapeMismatch(format!("inner product X_{r} x X_{h}")));
                }
            }
        }
        Ok(SemiInnerBundle { base, dims, right, inner })
    }

    pub fn base(&self) -> &BundleRef<T> {
        &self.base
    }

    pub fn group(&self) -> &FiniteGroup {
        self.base.group()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, r: usize) -> usize {
        self.dims[r]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn right_tensor(&self, r: usize, h: usize, k: usize) -> &Matrix<T> {
        &self.right[r][h][k]
    }

    pub fn inner_tensor(&self, r: usize, s: usize, k: usize) -> &Matrix<T> {
        &self.inner[r][s][k]
    }

    pub fn right_tensors(&self) -> &[Vec<Vec<Matrix<T>>>] {
        &self.right
    }

    pub fn inner_tensors(&self) -> &[Vec<Vec<Matrix<T>>>] {
        &self.inner
    }

    /// Matrix X_r -> X_{rh} of right multiplication by the element of B_h with coordinates b.
    pub fn right_op(&self, r: usize, h: usize, b: &[C<T>]) -> Matrix<T> {
        let rh = self.group().mul(r, h);
        let mut m = Matrix::zeros(self.dims[rh], self.dims[r]);
        for (k, &z) in b.iter().enumerate() {
            if z.norm_sqr() != T::zero() {
                m.axpy(z, &self.right[r][h][k]);
            }
        }
        m
    }

    pub fn act(&self, r: usize, x: &[C<T>], h: usize, b: &[C<T>]) -> Vec<C<T>> {
        self.right_op(r, h, b).matvec(x)
    }

    /// Coordinates of <x, y> in B_{r^-1 s}.
    pub fn inner_coords(&self, r: usize, x: &[C<T>], s: usize, y: &[C<T>]) -> Vec<C<T>> {
        self.inner[r][s].iter().map(|m| vdot(x, &m.matvec(y))).collect()
    }

    /// <x, y> as an ambient matrix.
    pub fn inner_elem(&self, r: usize, x: &[C<T>], s: usize, y: &[C<T>]) -> Matrix<T> {
        let f = self.group().mul(self.group().inv(r), s);
        self.base.element(f, &self.inner_coords(r, x, s, y))
    }

    /// ||x|| = ||<x, x>||^(1/2)
    pub fn norm(&self, r: usize, x: &[C<T>]) -> T {
        self.inner_elem(r, x, r, x).op_norm().sqrt()
    }

    /// tau(<e_i, e_j>): the Hilbert space inner product on X_r obtained from the trace.
    pub fn trace_gram(&self, r: usize) -> Matrix<T> {
        let e = self.group().identity();
        let taus: Vec<C<T>> = self.base.fiber(e).basis().iter().map(|f| f.tau()).collect();
        let mut k = Matrix::zeros(self.dims[r], self.dims[r]);
        for (m, &t) in self.inner[r][r].iter().zip(&taus) {
            k.axpy(t, m);
        }
        k
    }

    /// Gram of the vectors e_i f_beta (f_beta running over a basis of B_e) for tau o <.,.>.
    /// It is PSD exactly when <x, x> >= 0 for all x in X_r.
    pub fn localized_gram(&self, r: usize) -> Matrix<T> {
        let e = self.group().identity();
        let fb = self.base.fiber(e).basis();
        let nf = fb.len();
        let m = self.dims[r];
        // t[b][k][g] = tau(f_b* f_k f_g)
        let t: Vec<Vec<Vec<C<T>>>> = fb
            .iter()
            .map(|fbeta| {
                let fs = fbeta.adjoint();
                fb.iter().map(|fk| {
                    let left = fs.matmul(fk);
                    fb.iter().map(|fg| left.matmul(fg).tau()).collect()
                }).collect()
            })
            .collect();
        let mut g = Matrix::zeros(m * nf, m * nf);
        for i in 0..m {
            for j in 0..m {
                for (k, mk) in self.inner[r][r].iter().enumerate() {
                    let z = mk[(i, j)];
                    if z.norm_sqr() == T::zero() {
                        continue;
                    }
                    for b in 0..nf {
                        for gg in 0..nf {
                            g[(i * nf + b, j * nf + gg)] += z * t[b][k][gg];
                        }
                    }
                }
            }
        }
        g
    }

    /// Definition-level checks; definiteness only when `definite` is set.
    pub fn validate_with(&self, tol: &Tolerance<T>, definite: bool) -> AxiomReport {
        let mut rep = AxiomReport::new(if definite { "hilbert_bundle" } else { "semi_inner_bundle" });
        let grp = self.group().clone();
        let b = &self.base;
        let sc = StructureConstants::new(b);
        let els: Vec<usize> = grp.elements().collect();
        let mut assoc = Worst::new();
        let mut lin = Worst::new();
        let mut herm = Worst::new();
        let mut adj = Worst::new();
        for &r in &els {
            for &h in &els {
                let rh = grp.mul(r, h);
                for &h2 in &els {
                    let hh2 = grp.mul(h, h2);
                    for k in 0..b.dim(h) {
                        for l in 0..b.dim(h2) {
                            let lhs = self.right[rh][h2][l].matmul(&self.right[r][h][k]);
                            let rhs = self.right_op(r, hh2, &sc.prod[h][h2][k][l]);
                            assoc.see(rel_diff(&lhs, &rhs));
                        }
                    }
                }
            }
        }
        for &r in &els {
            let ri = grp.inv(r);
            for &s in &els {
                let f = grp.mul(ri, s);
                // hermitian symmetry: M^{s,r}_m = sum_j star(f, j)_m (M^{r,s}_j)*
                let mut expect = vec![Matrix::zeros(self.dims[s], self.dims[r]); b.dim(grp.inv(f))];
                for j in 0..b.dim(f) {
                    let mj = self.inner[r][s][j].adjoint();
                    for (m, &z) in sc.star[f][j].iter().enumerate() {
                        expect[m].axpy(z, &mj);
                    }
                }
                for (m, e) in expect.iter().enumerate() {
                    herm.see(rel_diff(&self.inner[s][r][m], e));
                }
                for &h in &els {
                    let sh = grp.mul(s, h);
                    let rh = grp.mul(r, h);
                    let fh = grp.mul(f, h);
                    let hif = grp.mul(grp.inv(h), f);
                    for k in 0..b.dim(h) {
                        // <x, y b> = <x, y> b
                        let mut rhs = vec![Matrix::zeros(self.dims[r], self.dims[s]); b.dim(fh)];
                        for j in 0..b.dim(f) {
                            for (m, &z) in sc.prod[f][h][j][k].iter().enumerate() {
                                rhs[m].axpy(z, &self.inner[r][s][j]);
                            }
                        }
                        for m in 0..b.dim(fh) {
                            let lhs = self.inner[r][sh][m].matmul(&self.right[s][h][k]);
                            lin.see(rel_diff(&lhs, &rhs[m]));
                        }
                        // <x b, y> = b* <x, y>
                        let bstar = b.basis(h, k).adjoint();
                        let mut rhs = vec![Matrix::zeros(self.dims[r], self.dims[s]); b.dim(hif)];
                        for j in 0..b.dim(f) {
                            let cs = b.coords(hif, &bstar.matmul(b.basis(f, j)));
                            for (m, &z) in cs.iter().enumerate() {
                                rhs[m].axpy(z, &self.inner[r][s][j]);
                            }
                        }
                        for m in 0..b.dim(hif) {
                            let lhs = self.right[r][h][k].adjoint().matmul(&self.inner[rh][s][m]);
                            adj.see(rel_diff(&lhs, &rhs[m]));
                        }
                    }
                }
            }
        }
        rep.residual("right_associativity", assoc.0, tol.rel_eq);
        rep.residual("inner_right_linearity", lin.0, tol.rel_eq);
        rep.residual("hermitian_symmetry", herm.0, tol.rel_eq);
        rep.residual("adjoint_compatibility", adj.0, tol.rel_eq);

        let mut pos_ok = true;
        let mut pos_margin = T::infinity();
        let mut def_ok = true;
        for &r in &els {
            match psd_check(&self.localized_gram(r), tol) {
                Ok(p) => {
                    pos_ok &= p.psd;
                    pos_margin = pos_margin.min(p.margin);
                }
                Err(_) => pos_ok = false,
            }
            if definite {
                let k = self.trace_gram(r);
                match range_eigenpairs(&k, tol) {
                    Ok((vals, _)) => def_ok &= vals.len() == self.dims[r],
                    Err(_) => def_ok = false,
                }
            }
        }
        rep.flag("positivity", pos_ok, format!("min localized eigenvalue {:e}", pos_margin.to_f64_lossy()));
        if definite {
            rep.flag("definiteness", def_ok, "");
        }
        if pos_ok {
            let (bnd, cs) = self.norm_inequalities(&els);
            rep.residual("right_action_bound", bnd, tol.rel_eq);
            rep.residual("cauchy_schwarz", cs, tol.rel_eq);
        }
        rep
    }

    /// Largest relative violations of ||x b|| <= ||x|| ||b|| and ||<x,y>|| <= ||x|| ||y|| over
    /// basis vectors and a few seeded random vectors.
    fn norm_inequalities(&self, els: &[usize]) -> (T, T) {
        let grp = self.group();
        let b = &self.base;
        let mut rng = Rng::seeded(0x5eed);
        let mut vecs: Vec<Vec<Vec<C<T>>>> = Vec::new();
        for &r in els {
            let d = self.dims[r];
            let mut vs: Vec<Vec<C<T>>> = (0..d)
                .map(|i| (0..d).map(|j| if i == j { c(T::one(), T::zero()) } else { czero() }).collect())
                .collect();
            if d > 0 {
                vs.push(rng.cvec(d));
                vs.push(rng.cvec(d));
            }
            vecs.push(vs);
        }
        let norms: Vec<Vec<T>> = els.iter().map(|&r| vecs[r].iter().map(|x| self.norm(r, x)).collect()).collect();
        let mut bnd = Worst::new();
        let mut cs = Worst::new();
        for &r in els {
            for (xi, x) in vecs[r].iter().enumerate() {
                let nx = norms[r][xi];
                for &h in els {
                    for k in 0..b.dim(h) {
                        let nb = b.basis(h, k).op_norm();
                        let y = self.act(r, x, h, &unit_vec(b.dim(h), k));
                        let ny = self.norm(grp.mul(r, h), &y);
                        bnd.see((ny - nx * nb) / (T::one() + nx * nb));
                    }
                }
                for &s in els {
                    for (yi, y) in vecs[s].iter().enumerate() {
                        let ny = norms[s][yi];
                        let v = self.inner_elem(r, x, s, y).op_norm();
                        cs.see((v - nx * ny) / (T::one() + nx * ny));
                    }
                }
            }
        }
        (bnd.0, cs.0)
    }

    pub fn validate(&self, tol: &Tolerance<T>) -> AxiomReport {
        self.validate_with(tol, false)
    }

    /// Quotient of every fiber by the kernel of its trace Gram. New coordinates are
    /// orthonormal for the trace inner product.
    pub fn separate(&self, tol: &Tolerance<T>) -> Result<(HilbertBundle<T>, Vec<Quotient<T>>)> {
        let rep = self.validate_with(tol, false);
        if !rep.passed() {
            return Err(Error::InvariantViolation(format!("semi-inner bundle fails {:?}", rep.failures())));
        }
        self.separate_unchecked(tol)
    }

    pub(crate) fn separate_unchecked(&self, tol: &Tolerance<T>) -> Result<(HilbertBundle<T>, Vec<Quotient<T>>)> {
        let grp = self.group().clone();
        let mut quots = Vec::with_capacity(grp.order());
        for r in grp.elements() {
            let k = self.trace_gram(r);
            let (vals, vecs) = range_eigenpairs(&k, tol)?;
            let m = self.dims[r];
            let keep = vals.len();
            let lift = Matrix::from_fn(m, keep, |i, j| vecs[(i, j)] / vals[j].sqrt());
            let q = Matrix::from_fn(keep, m, |i, j| vecs[(j, i)].conj() * vals[i].sqrt());
            quots.push(Quotient { q, lift });
        }
        let bundle = self.transform(&quots);
        Ok((HilbertBundle(bundle), quots))
    }

    /// Pushes the structure through per-fiber maps (q, lift) with q lift = 1.
    fn transform(&self, quots: &[Quotient<T>]) -> SemiInnerBundle<T> {
        let grp = self.group();
        let dims: Vec<usize> = quots.iter().map(|q| q.q.rows()).collect();
        let right = grp
            .elements()
            .map(|r| {
                grp.elements()
                    .map(|h| {
                        let rh = grp.mul(r, h);
                        self.right[r][h].iter().map(|m| quots[rh].q.matmul(m).matmul(&quots[r].lift)).collect()
                    })
                    .collect()
            })
            .collect();
        let inner = grp
            .elements()
            .map(|r| {
                grp.elements()
                    .map(|s| {
                        self.inner[r][s]
                            .iter()
                            .map(|m| quots[r].lift.adjoint().matmul(m).matmul(&quots[s].lift))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        SemiInnerBundle { base: self.base.clone(), dims, right, inner }
    }

    /// Direct sum of two bundles over the same base.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if !same_bundle(&self.base, &other.base) {
            return Err(Error::BundleMismatch);
        }
        let grp = self.group();
        let dims: Vec<usize> = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let right = grp
            .elements()
            .map(|r| {
                grp.elements()
                    .map(|h| {
                        self.right[r][h]
                            .iter()
                            .zip(&other.right[r][h])
                            .map(|(a, b)| Matrix::block_diag(&[a.clone(), b.clone()]))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let inner = grp
            .elements()
            .map(|r| {
                grp.elements()
                    .map(|s| {
                        self.inner[r][s]
                            .iter()
                            .zip(&other.inner[r][s])
                            .map(|(a, b)| Matrix::block_diag(&[a.clone(), b.clone()]))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(SemiInnerBundle { base: self.base.clone(), dims, right, inner })
    }

    /// Replaces one inner-product tensor entry; used to build deliberately broken instances.
    pub fn perturb_inner(&mut self, r: usize, s: usize, k: usize, delta: &Matrix<T>) {
        self.inner[r][s][k] = &self.inner[r][s][k] + delta;
    }

    pub fn perturb_right(&mut self, r: usize, h: usize, k: usize, delta: &Matrix<T>) {
        self.right[r][h][k] = &self.right[r][h][k] + delta;
    }
}

pub(crate) fn unit_vec<T: Real>(n: usize, i: usize) -> Vec<C<T>> {
    let mut v = vec![czero(); n];
    v[i] = c(T::one(), T::zero());
    v
}

impl<T: Real> HilbertBundle<T> {
    /// Accepts a semi-inner bundle whose trace Grams are all nonsingular.
    pub fn from_semi(semi: SemiInnerBundle<T>, tol: &Tolerance<T>) -> Result<Self> {
        for r in semi.group().elements() {
            let (vals, _) = range_eigenpairs(&semi.trace_gram(r), tol)?;
            if vals.len() != semi.dims[r] {
                return Err(Error::InvariantViolation(format!("inner product is degenerate on fiber {r}")));
            }
        }
        Ok(HilbertBundle(semi))
    }

    /// Skips the definiteness check; used to build deliberately broken instances.
    pub fn from_semi_unchecked(semi: SemiInnerBundle<T>) -> Self {
        HilbertBundle(semi)
    }

    pub fn semi(&self) -> &SemiInnerBundle<T> {
        &self.0
    }

    pub fn into_semi(self) -> SemiInnerBundle<T> {
        self.0
    }

    pub fn validate(&self, tol: &Tolerance<T>) -> AxiomReport {
        self.0.validate_with(tol, true)
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        Ok(HilbertBundle(self.0.direct_sum(&other.0)?))
    }

    /// Sub-bundle spanned fiberwise by the columns of `spans[r]` (coordinates in X_r).
    /// The span must be invariant under the right action. Returns the bundle together with
    /// the embeddings (old coordinates of the new basis) and left inverses.
    pub fn restrict(&self, spans: &[Matrix<T>], tol: &Tolerance<T>) -> Result<(HilbertBundle<T>, Vec<Quotient<T>>)> {
        let grp = self.group().clone();
        if spans.len() != grp.order() {
            return Err(Error::ShapeMismatch("one span per fiber".into()));
        }
        let mut quots = Vec::with_capacity(grp.order());
        for r in grp.elements() {
            let k = self.trace_gram(r);
            let s = &spans[r];
            // Gram of the spanning vectors in the trace inner product
            let g = s.adjoint().matmul(&k).matmul(s).hermitian_part();
            let (vals, vecs) = if s.cols() == 0 { (vec![], Matrix::zeros(0, 0)) } else { range_eigenpairs(&g, tol)? };
            let emb = s.matmul(&Matrix::from_fn(s.cols(), vals.len(), |i, j| vecs[(i, j)] / vals[j].sqrt()));
            let q = emb.adjoint().matmul(&k);
            quots.push(Quotient { q, lift: emb });
        }
        for r in grp.elements() {
            for h in grp.elements() {
                let rh = grp.mul(r, h);
                for m in &self.right[r][h] {
                    let img = m.matmul(&quots[r].lift);
                    let back = quots[rh].lift.matmul(&quots[rh].q.matmul(&img));
                    if rel_diff(&img, &back) > tol.rel_eq * T::lit(100.0) {
                        return Err(Error::InvariantViolation("span is not invariant under the right action".into()));
                    }
                }
            }
        }
        Ok((HilbertBundle(self.0.transform(&quots)), quots))
    }

    /// A unitary bundle map U = (U_r): preserves inner products, intertwines the right
    /// actions and is onto each fiber.
    pub fn check_unitary_bundle_map(&self, other: &HilbertBundle<T>, u: &[Matrix<T>], tol: &Tolerance<T>) -> Result<AxiomReport> {
        let grp = self.group();
        if !same_bundle(&self.base, &other.base) {
            return Err(Error::BundleMismatch);
        }
        if u.len() != grp.order() || grp.elements().any(|r| u[r].shape() != (other.dims[r], self.dims[r])) {
            return Err(Error::ShapeMismatch("unitary bundle map blocks".into()));
        }
        let mut rep = AxiomReport::new("unitary_bundle_map");
        let mut iso = Worst::new();
        let mut inter = Worst::new();
        let mut onto = true;
        for r in grp.elements() {
            for s in grp.elements() {
                for (k, m) in self.inner[r][s].iter().enumerate() {
                    let pulled = u[r].adjoint().matmul(&other.inner[r][s][k]).matmul(&u[s]);
                    iso.see(rel_diff(&pulled, m));
                }
            }
            for h in grp.elements() {
                let rh = grp.mul(r, h);
                for k in 0..self.base.dim(h) {
                    let lhs = u[rh].matmul(&self.right[r][h][k]);
                    let rhs = other.right[r][h][k].matmul(&u[r]);
                    inter.see(rel_diff(&lhs, &rhs));
                }
            }
            onto &= crate::numerics::column_rank(&u[r].adjoint(), tol) == other.dims[r];
        }
        rep.residual("isometry", iso.0, tol.rel_eq);
        rep.residual("intertwining", inter.0, tol.rel_eq);
        rep.flag("onto", onto, "");
        Ok(rep)
    }
}

#[cfg(test)]
mod tests;
