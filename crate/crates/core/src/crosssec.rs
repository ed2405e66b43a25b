//! Convolution algebra of sections, its regular representation and the matrix algebras M_g.

use crate::bundles::{same_bundle, BundleRef, FellBundle};
use crate::error::{Error, Result};
use crate::numerics::{psd_check, span_rank, Matrix, PsdReport, Tolerance};
use crate::random::Rng;
use crate::scalar::{czero, Real, C};

/// Finitely supported section: per group element, coordinates in the fiber basis.
#[derive(Debug, Clone)]
pub struct Section<T> {
    bundle: BundleRef<T>,
    coeffs: Vec<Vec<C<T>>>,
}

impl<T: Real> Section<T> {
    pub fn new(bundle: BundleRef<T>, coeffs: Vec<Vec<C<T>>>) -> Result<Self> {
        if coeffs.len() != bundle.group().order() || coeffs.iter().zip(bundle.dims()).any(|(c, d)| c.len() != d) {
            return Err(Error::ShapeMismatch("section coefficients do not match fiber dimensions".into()));
        }
        Ok(Section { bundle, coeffs })
    }

    pub fn zero(bundle: BundleRef<T>) -> Self {
        let coeffs = bundle.dims().into_iter().map(|d| vec![czero(); d]).collect();
        Section { bundle, coeffs }
    }

    /// The section a (.) g.
    pub fn singleton(bundle: BundleRef<T>, g: usize, coords: Vec<C<T>>) -> Result<Self> {
        let mut s = Self::zero(bundle);
        if coords.len() != s.coeffs[g].len() {
            return Err(Error::ShapeMismatch("singleton coordinates".into()));
        }
        s.coeffs[g] = coords;
        Ok(s)
    }

    /// Basis singleton e^g_i (.) g.
    pub fn basis(bundle: BundleRef<T>, g: usize, i: usize) -> Self {
        let mut s = Self::zero(bundle);
        s.coeffs[g][i] = crate::scalar::cone();
        s
    }

    /// Section from ambient matrices, one per group element.
    pub fn from_elements(bundle: BundleRef<T>, elems: &[Matrix<T>], tol: &Tolerance<T>) -> Result<Self> {
        let coeffs = elems
            .iter()
            .enumerate()
            .map(|(g, m)| bundle.coords_checked(g, m, bundle.tau_norm(m), tol))
            .collect::<Result<Vec<_>>>()?;
        Self::new(bundle, coeffs)
    }

    pub fn random(bundle: BundleRef<T>, rng: &mut Rng) -> Self {
        let coeffs = bundle.dims().into_iter().map(|d| rng.cvec(d)).collect();
        Section { bundle, coeffs }
    }

    /// Concatenated coordinates, i.e. the section as a vector of l2 of the bundle.
    pub fn from_vector(bundle: BundleRef<T>, v: &[C<T>]) -> Self {
        let mut coeffs = Vec::new();
        let mut at = 0;
        for d in bundle.dims() {
            coeffs.push(v[at..at + d].to_vec());
            at += d;
        }
        Section { bundle, coeffs }
    }

    pub fn to_vector(&self) -> Vec<C<T>> {
        self.coeffs.concat()
    }

    pub fn bundle(&self) -> &BundleRef<T> {
        &self.bundle
    }

    pub fn coeffs(&self) -> &[Vec<C<T>>] {
        &self.coeffs
    }

    pub fn at(&self, g: usize) -> &[C<T>] {
        &self.coeffs[g]
    }

    pub fn element(&self, g: usize) -> Matrix<T> {
        self.bundle.element(g, &self.coeffs[g])
    }

    pub fn is_zero_at(&self, g: usize) -> bool {
        self.coeffs[g].iter().all(|z| z.norm_sqr() == T::zero())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if same_bundle(&self.bundle, &other.bundle) {
            Ok(())
        } else {
            Err(Error::BundleMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x + y).collect())
            .collect();
        Ok(Section { bundle: self.bundle.clone(), coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-crate::scalar::cone::<T>()))
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.iter().map(|&x| x * s).collect()).collect();
        Section { bundle: self.bundle.clone(), coeffs }
    }

    /// (f1 * f2)(h) = sum_g f1(g) f2(g^-1 h), computed in the ambient algebra.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let b = &self.bundle;
        let grp = b.group();
        let n = b.ambient_dim();
        let mut acc = vec![Matrix::zeros(n, n); grp.order()];
        let mut scale = vec![T::zero(); grp.order()];
        for g in grp.elements() {
            if self.is_zero_at(g) {
                continue;
            }
            let x = self.element(g);
            for k in grp.elements() {
                if other.is_zero_at(k) {
                    continue;
                }
                let y = other.element(k);
                let h = grp.mul(g, k);
                acc[h] = &acc[h] + &x.matmul(&y);
                scale[h] += x.op_norm() * b.tau_norm(&y);
            }
        }
        let tol = Tolerance::standard();
        let coeffs = grp
            .elements()
            .map(|h| b.coords_checked(h, &acc[h], scale[h], &tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(Section { bundle: b.clone(), coeffs })
    }

    /// f*(h) = f(h^-1)*
    pub fn star(&self) -> Result<Self> {
        let b = &self.bundle;
        let grp = b.group();
        let tol = Tolerance::standard();
        let coeffs = grp
            .elements()
            .map(|h| {
                let m = self.element(grp.inv(h)).adjoint();
                b.coords_checked(h, &m, b.tau_norm(&m), &tol)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Section { bundle: b.clone(), coeffs })
    }

    /// Largest coefficient difference.
    pub fn distance(&self, other: &Self) -> T {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| (x - y).norm()))
            .fold(T::zero(), T::max)
    }
}

/// Left regular representation on l2 of the bundle, each fiber with its normalized
/// Hilbert-Schmidt inner product. Basis images are computed once.
#[derive(Debug, Clone)]
pub struct RegRep<T> {
    bundle: BundleRef<T>,
    offsets: Vec<usize>,
    dim: usize,
    images: Vec<Vec<Matrix<T>>>,
}

impl<T: Real> RegRep<T> {
    pub fn new(bundle: BundleRef<T>) -> Self {
        let grp = bundle.group().clone();
        let dims = bundle.dims();
        let mut offsets = Vec::with_capacity(dims.len());
        let mut dim = 0;
        for d in &dims {
            offsets.push(dim);
            dim += d;
        }
        let images = grp
            .elements()
            .map(|g| {
                bundle
                    .fiber(g)
                    .basis()
                    .iter()
                    .map(|a| {
                        let mut m = Matrix::zeros(dim, dim);
                        for h in grp.elements() {
                            let src = grp.mul(grp.inv(g), h);
                            m.set_block(offsets[h], offsets[src], &bundle.left_mult(g, a, src));
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        RegRep { bundle, offsets, dim, images }
    }

    pub fn bundle(&self) -> &BundleRef<T> {
        &self.bundle
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offset(&self, g: usize) -> usize {
        self.offsets[g]
    }

    /// lambda(e^g_i (.) g)
    pub fn image(&self, g: usize, i: usize) -> &Matrix<T> {
        &self.images[g][i]
    }

    pub fn rep_matrix(&self, f: &Section<T>) -> Matrix<T> {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for (g, cs) in f.coeffs().iter().enumerate() {
            for (i, &z) in cs.iter().enumerate() {
                if z.norm_sqr() != T::zero() {
                    m.axpy(z, &self.images[g][i]);
                }
            }
        }
        m
    }

    /// Norm of f in the cross-sectional C*-algebra.
    pub fn cstar_norm(&self, f: &Section<T>) -> T {
        self.rep_matrix(f).op_norm()
    }

    /// lambda is injective on sections: the basis images are linearly independent.
    pub fn is_faithful(&self, tol: &Tolerance<T>) -> bool {
        let flat: Vec<Vec<C<T>>> = self.images.iter().flatten().map(|m| m.data().to_vec()).collect();
        span_rank(&flat, tol) == self.bundle.total_dim()
    }
}

/// The operator L_R on the direct sum of the fibers over g_i^-1, for R with (i, j) block
/// an ambient matrix in A_{g_i^-1 g_j}.
pub fn matrix_alg<T: Real>(bundle: &FellBundle<T>, gs: &[usize], blocks: &[Vec<Matrix<T>>], tol: &Tolerance<T>) -> Result<Matrix<T>> {
    let grp = bundle.group();
    let n = gs.len();
    if blocks.len() != n || blocks.iter().any(|r| r.len() != n) {
        return Err(Error::ShapeMismatch("R must be square with one block per index".into()));
    }
    let src: Vec<usize> = gs.iter().map(|&g| grp.inv(g)).collect();
    let mut offs = Vec::with_capacity(n);
    let mut total = 0;
    for &s in &src {
        offs.push(total);
        total += bundle.dim(s);
    }
    let mut l = Matrix::zeros(total, total);
    for i in 0..n {
        for j in 0..n {
            let f = grp.mul(src[i], gs[j]);
            let r = &blocks[i][j];
            if r.shape() != (bundle.ambient_dim(), bundle.ambient_dim()) {
                return Err(Error::BlockEscape(i, j));
            }
            if !bundle.fiber(f).contains_scaled(r, bundle.tau_norm(r).max(T::one()), tol) {
                return Err(Error::BlockEscape(i, j));
            }
            l.set_block(offs[i], offs[j], &bundle.left_mult(f, r, src[j]));
        }
    }
    Ok(l)
}

/// Positivity of R in M_g via L_R.
pub fn matrix_alg_psd<T: Real>(
    bundle: &FellBundle<T>,
    gs: &[usize],
    blocks: &[Vec<Matrix<T>>],
    tol: &Tolerance<T>,
) -> Result<PsdReport<T>> {
    psd_check(&matrix_alg(bundle, gs, blocks, tol)?, tol)
}
