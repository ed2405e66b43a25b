//! Bundle maps T = (T_g: A_g -> B_phi(g)) and their positive definiteness.

mod gns;

pub use gns::GnsTriple;

use crate::bundles::{same_bundle, BundleRef};
use crate::crosssec::{RegRep, Section};
use crate::error::{Error, Result};
use crate::groups::GroupHom;
use crate::numerics::{jacobi_eigh, psd_check, psd_from_eigvals, Matrix, PsdReport, Tolerance};
use crate::random::Rng;
use crate::scalar::{czero, Real, C};

#[derive(Debug, Clone, PartialEq)]
pub struct BundleMap<T> {
    source: BundleRef<T>,
    target: BundleRef<T>,
    phi: GroupHom,
    blocks: Vec<Matrix<T>>,
}

/// One term (g_i, a_i, b_i) of a positivity witness.
#[derive(Debug, Clone)]
pub struct WitnessTerm<T> {
    pub g: usize,
    pub a: Matrix<T>,
    pub b: Matrix<T>,
}

#[derive(Debug, Clone)]
pub struct Witness<T> {
    pub terms: Vec<WitnessTerm<T>>,
    /// sum_ij b_i T(a_i* a_j) b_j* in the ambient algebra of the target
    pub sum: Matrix<T>,
    /// smallest eigenvalue of the Hermitian part of `sum`
    pub min_eig: T,
    /// size of the anti-Hermitian part of `sum`
    pub skew: T,
}

#[derive(Debug, Clone)]
pub struct PdCertificate<T> {
    pub passed: bool,
    /// smallest eigenvalue of the certificate Gram
    pub margin: T,
    pub threshold: T,
    pub gram: Matrix<T>,
    pub witness: Option<Witness<T>>,
}

#[derive(Debug, Clone)]
pub struct SampledReport<T> {
    pub passed: bool,
    pub samples: usize,
    /// smallest relative eigenvalue seen over all samples
    pub worst: T,
    pub witness: Option<Witness<T>>,
}

impl<T: Real> BundleMap<T> {
    pub fn new(source: BundleRef<T>, target: BundleRef<T>, phi: GroupHom, blocks: Vec<Matrix<T>>) -> Result<Self> {
        if &phi.source != source.group() || &phi.target != target.group() {
            return Err(Error::BundleMismatch);
        }
        if blocks.len() != source.group().order() {
            return Err(Error::SizeMismatch(format!("{} blocks for a group of order {}", blocks.len(), source.group().order())));
        }
        for g in source.group().elements() {
            let want = (target.dim(phi.apply(g)), source.dim(g));
            if blocks[g].shape() != want {
                return Err(Error::ShapeMismatch(format!("block {g} is {:?}, expected {:?}", blocks[g].shape(), want)));
            }
        }
        Ok(BundleMap { source, target, phi, blocks })
    }

    /// Blocks from an ambient formula on basis elements; images must land in the right fibers.
    pub fn from_fn(
        source: BundleRef<T>,
        target: BundleRef<T>,
        phi: GroupHom,
        f: impl Fn(usize, &Matrix<T>) -> Matrix<T>,
        tol: &Tolerance<T>,
    ) -> Result<Self> {
        let mut blocks = Vec::new();
        for g in source.group().elements() {
            let pg = phi.apply(g);
            let mut cols = Vec::new();
            for a in source.fiber(g).basis() {
                let img = f(g, a);
                cols.push(target.coords_checked(pg, &img, T::one() + img.max_abs(), tol)?);
            }
            blocks.push(Matrix::from_columns(target.dim(pg), &cols));
        }
        Self::new(source, target, phi, blocks)
    }

    pub fn identity(b: BundleRef<T>) -> Self {
        let phi = GroupHom::identity(b.group());
        let blocks = b.dims().into_iter().map(Matrix::identity).collect();
        BundleMap { source: b.clone(), target: b, phi, blocks }
    }

    pub fn zero(source: BundleRef<T>, target: BundleRef<T>, phi: GroupHom) -> Result<Self> {
        let blocks = source.group().elements().map(|g| Matrix::zeros(target.dim(phi.apply(g)), source.dim(g))).collect();
        Self::new(source, target, phi, blocks)
    }

    /// T_g = f(g) id on a bundle mapped to itself.
    pub fn multiplier(b: BundleRef<T>, f: &[C<T>]) -> Result<Self> {
        if f.len() != b.group().order() {
            return Err(Error::SizeMismatch("one scalar per group element".into()));
        }
        let phi = GroupHom::identity(b.group());
        let blocks = b.dims().into_iter().zip(f).map(|(d, &z)| Matrix::identity(d).scale(z)).collect();
        Self::new(b.clone(), b, phi, blocks)
    }

    pub fn source(&self) -> &BundleRef<T> {
        &self.source
    }

    pub fn target(&self) -> &BundleRef<T> {
        &self.target
    }

    pub fn phi(&self) -> &GroupHom {
        &self.phi
    }

    pub fn blocks(&self) -> &[Matrix<T>] {
        &self.blocks
    }

    pub fn block(&self, g: usize) -> &Matrix<T> {
        &self.blocks[g]
    }

    fn compatible(&self, other: &Self) -> bool {
        same_bundle(&self.source, &other.source) && same_bundle(&self.target, &other.target) && self.phi == other.phi
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.compatible(other) {
            return Err(Error::BundleMismatch);
        }
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect();
        Ok(BundleMap { blocks, ..self.clone() })
    }

    pub fn scale(&self, s: C<T>) -> Self {
        BundleMap { blocks: self.blocks.iter().map(|b| b.scale(s)).collect(), ..self.clone() }
    }

    /// max_g of the operator norm of T_g for the trace norms on the fibers.
    pub fn norm(&self) -> T {
        self.blocks.iter().map(|b| b.op_norm()).fold(T::zero(), T::max)
    }

    /// Largest entrywise difference between two maps.
    pub fn distance(&self, other: &Self) -> Result<T> {
        if !self.compatible(other) {
            return Err(Error::BundleMismatch);
        }
        Ok(self.blocks.iter().zip(&other.blocks).map(|(a, b)| (a - b).max_abs()).fold(T::zero(), T::max))
    }

    pub fn apply_coords(&self, g: usize, a: &[C<T>]) -> Vec<C<T>> {
        self.blocks[g].matvec(a)
    }

    /// T_g(a) for an ambient element a of A_g.
    pub fn apply(&self, g: usize, a: &Matrix<T>) -> Matrix<T> {
        self.target.element(self.phi.apply(g), &self.apply_coords(g, &self.source.coords(g, a)))
    }

    /// Graded push-forward of a section.
    pub fn phi_t(&self, f: &Section<T>) -> Result<Section<T>> {
        if !same_bundle(f.bundle(), &self.source) {
            return Err(Error::BundleMismatch);
        }
        let mut coeffs: Vec<Vec<C<T>>> = self.target.dims().into_iter().map(|d| vec![czero(); d]).collect();
        for g in self.source.group().elements() {
            let pg = self.phi.apply(g);
            for (c, v) in coeffs[pg].iter_mut().zip(self.apply_coords(g, f.at(g))) {
                *c += v;
            }
        }
        Section::new(self.target.clone(), coeffs)
    }

    fn index(&self) -> Vec<(usize, usize)> {
        self.source.group().elements().flat_map(|g| (0..self.source.dim(g)).map(move |k| (g, k))).collect()
    }

    fn check_valid(&self) -> Result<()> {
        if !self.phi.check_hom() {
            return Err(Error::InvalidBundle("phi is not a homomorphism".into()));
        }
        Ok(())
    }

    /// T(e_k* e_l) for basis elements of A_g and A_g', as an ambient matrix in B_phi(g^-1 g').
    fn t_of_products(&self) -> Vec<Vec<Matrix<T>>> {
        let grp = self.source.group();
        let idx = self.index();
        idx.iter()
            .map(|&(g, k)| {
                let ek = self.source.basis(g, k).adjoint();
                idx.iter()
                    .map(|&(g2, l)| {
                        let f = grp.mul(grp.inv(g), g2);
                        let p = ek.matmul(self.source.basis(g2, l));
                        self.apply(f, &p)
                    })
                    .collect()
            })
            .collect()
    }

    /// Exact certificate. Index set: (g, basis e_k of A_g, basis f_b of B_phi(g)); entry
    /// tau(f_b T(e_k* e_l) f_c*). For a tuple with a_i = e_k and b_i = sum_b conj(z_b) f_b the
    /// trace of sum_ij b_i T(a_i* a_j) b_j* is z* Q z, and compressing by spectral
    /// projections of B_e keeps the tuple shape, so Q >= 0 is equivalent to positive
    /// definiteness. A negative direction of Q gives the witness directly.
    pub fn pd_check_exact(&self, tol: &Tolerance<T>) -> Result<PdCertificate<T>> {
        self.check_valid()?;
        let tp = self.t_of_products();
        let idx = self.index();
        let mut rows: Vec<(usize, usize, usize)> = Vec::new();
        for (i, &(g, _)) in idx.iter().enumerate() {
            for b in 0..self.target.dim(self.phi.apply(g)) {
                rows.push((i, b, g));
            }
        }
        let n = rows.len();
        let mut q = Matrix::zeros(n, n);
        for (ri, &(i, b, g)) in rows.iter().enumerate() {
            let fb = self.target.basis(self.phi.apply(g), b);
            for (rj, &(j, c, g2)) in rows.iter().enumerate() {
                let fc = self.target.basis(self.phi.apply(g2), c);
                q[(ri, rj)] = fb.matmul(&tp[i][j]).matmul(&fc.adjoint()).tau();
            }
        }
        let scale = q.fro_norm();
        let defect = q.hermitian_defect();
        let herm_tol = tol.rel_eq * T::one().max(scale);
        if defect > herm_tol {
            // not Hermitian: some tuple sum fails to be self-adjoint
            let skew = Matrix::from_fn(n, n, |a, b| (q[(a, b)] - q[(b, a)].conj()) * C::new(T::zero(), -T::lit(0.5)));
            let (vals, vecs) = jacobi_eigh(&skew.hermitian_part(), true);
            let top = if vals[0].abs() > vals[n - 1].abs() { 0 } else { n - 1 };
            let z = vecs.col(top);
            let w = self.witness_from(&rows, &idx, &z);
            return Ok(PdCertificate { passed: false, margin: -defect, threshold: herm_tol, gram: q, witness: Some(w) });
        }
        let (vals, vecs) = jacobi_eigh(&q.hermitian_part(), true);
        let rep = psd_from_eigvals(&vals, tol);
        let witness = if rep.psd || n == 0 { None } else { Some(self.witness_from(&rows, &idx, &vecs.col(0))) };
        Ok(PdCertificate { passed: rep.psd, margin: rep.margin, threshold: rep.threshold, gram: q, witness })
    }

    fn witness_from(&self, rows: &[(usize, usize, usize)], idx: &[(usize, usize)], z: &[C<T>]) -> Witness<T> {
        let mut terms: Vec<WitnessTerm<T>> = Vec::new();
        let mut last = usize::MAX;
        for (r, &(i, b, g)) in rows.iter().enumerate() {
            let pg = self.phi.apply(g);
            if i != last {
                let (g, k) = idx[i];
                let n = self.target.ambient_dim();
                terms.push(WitnessTerm { g, a: self.source.basis(g, k).clone(), b: Matrix::zeros(n, n) });
                last = i;
            }
            let t = terms.last_mut().unwrap();
            t.b.axpy(z[r].conj(), self.target.basis(pg, b));
        }
        self.witness_sum(terms)
    }

    /// Evaluates sum_ij b_i T(a_i* a_j) b_j* for a tuple.
    pub fn witness_sum(&self, terms: Vec<WitnessTerm<T>>) -> Witness<T> {
        let grp = self.source.group();
        let n = self.target.ambient_dim();
        let mut sum = Matrix::zeros(n, n);
        for ti in &terms {
            let left = ti.a.adjoint();
            for tj in &terms {
                let f = grp.mul(grp.inv(ti.g), tj.g);
                let t = self.apply(f, &left.matmul(&tj.a));
                sum = &sum + &ti.b.matmul(&t).matmul(&tj.b.adjoint());
            }
        }
        let skew = (&sum - &sum.adjoint()).max_abs();
        let min_eig = jacobi_eigh(&sum.hermitian_part(), false).0.first().copied().unwrap_or(T::zero());
        Witness { terms, sum, min_eig, skew }
    }

    /// Rescales the b's by the weights minimizing v* (sum) v over unit weight vectors, a
    /// quadratic form in the weights.
    fn reweight(&self, terms: &mut [WitnessTerm<T>], v: &[C<T>]) {
        let grp = self.source.group();
        let len = terms.len();
        let bv: Vec<Vec<C<T>>> = terms.iter().map(|t| t.b.adjoint().matvec(v)).collect();
        let mut m = Matrix::zeros(len, len);
        for i in 0..len {
            let left = terms[i].a.adjoint();
            for j in 0..len {
                let f = grp.mul(grp.inv(terms[i].g), terms[j].g);
                let t = self.apply(f, &left.matmul(&terms[j].a));
                m[(i, j)] = crate::numerics::vdot(&bv[i], &t.matvec(&bv[j]));
            }
        }
        let (_, vecs) = jacobi_eigh(&m.hermitian_part(), true);
        let s = T::from_usize(len).unwrap().sqrt();
        for (i, t) in terms.iter_mut().enumerate() {
            t.b = t.b.scale(vecs[(i, 0)].conj() * s);
        }
    }

    /// Block matrix over the basis enumeration with (i, j) block the regular representation of
    /// T(a_i* a_j) placed at phi(g_i)^-1 phi(g_j).
    pub fn choi_matrix(&self) -> Matrix<T> {
        let reg = RegRep::new(self.target.clone());
        let tp = self.t_of_products();
        let idx = self.index();
        let tg = self.target.group();
        let d = reg.dim();
        let n = idx.len();
        let mut m = Matrix::zeros(n * d, n * d);
        for (i, &(g, _)) in idx.iter().enumerate() {
            for (j, &(g2, _)) in idx.iter().enumerate() {
                let h = tg.mul(tg.inv(self.phi.apply(g)), self.phi.apply(g2));
                let cs = self.target.coords(h, &tp[i][j]);
                let mut blk = Matrix::zeros(d, d);
                for (k, z) in cs.into_iter().enumerate() {
                    if z.norm_sqr() != T::zero() {
                        blk.axpy(z, reg.image(h, k));
                    }
                }
                m.set_block(i * d, j * d, &blk);
            }
        }
        m
    }

    pub fn choi_check(&self, tol: &Tolerance<T>) -> Result<PsdReport<T>> {
        self.check_valid()?;
        let m = self.choi_matrix();
        if m.hermitian_defect() > tol.rel_eq * T::one().max(m.fro_norm()) {
            return Ok(PsdReport { psd: false, margin: -m.hermitian_defect(), threshold: T::zero() });
        }
        psd_check(&m.hermitian_part(), tol)
    }

    /// Random tuples evaluated directly. Flags a sample only when the sum is off by more than
    /// the PSD tolerance relative to the size of its terms.
    pub fn pd_check_sampled(&self, samples: usize, seed: u64, tol: &Tolerance<T>) -> SampledReport<T> {
        let mut rng = Rng::seeded(seed);
        let grp = self.source.group();
        let maxd = grp.elements().map(|g| self.source.dim(g)).max().unwrap_or(0);
        let nmax = (grp.order() * maxd).max(1);
        let mut worst = T::infinity();
        let mut witness = None;
        let mut passed = true;
        let cands: Vec<usize> = grp.elements().filter(|&g| self.source.dim(g) > 0).collect();
        if cands.is_empty() {
            return SampledReport { passed, samples, worst: T::zero(), witness };
        }
        for _ in 0..samples {
            // either one term per nonzero fiber or a random multiset of fibers
            let gs: Vec<usize> = if rng.coin(0.5) {
                cands.clone()
            } else {
                (0..rng.range(1, nmax)).map(|_| cands[rng.below(cands.len())]).collect()
            };
            let mut terms: Vec<WitnessTerm<T>> = gs
                .into_iter()
                .map(|g| {
                    let pg = self.phi.apply(g);
                    let a = self.source.element(g, &rng.cvec(self.source.dim(g)));
                    let b = self.target.element(pg, &rng.cvec(self.target.dim(pg)));
                    WitnessTerm { g, a, b }
                })
                .collect();
            self.reweight(&mut terms, &rng.cvec(self.target.ambient_dim()));
            let mut scale = T::zero();
            for ti in &terms {
                for tj in &terms {
                    scale += ti.b.op_norm() * tj.b.op_norm() * ti.a.op_norm() * tj.a.op_norm();
                }
            }
            let scale = T::one().max(scale * T::one().max(self.norm()));
            let w = self.witness_sum(terms);
            let rel = w.min_eig / scale;
            let bad = w.min_eig < -tol.rel_psd * scale || w.skew > tol.rel_eq * scale;
            if rel < worst {
                worst = rel;
            }
            if bad {
                let better = match &witness {
                    None => true,
                    Some(old) => {
                        let o: &Witness<T> = old;
                        w.min_eig < o.min_eig
                    }
                };
                passed = false;
                if better {
                    witness = Some(w);
                }
            }
        }
        SampledReport { passed, samples, worst, witness }
    }
}

#[cfg(test)]
mod tests;
