use super::matrix::Matrix;
use super::tolerance::Tolerance;
use crate::error::{Error, Result};
use crate::scalar::{c, czero, Real};

const MAX_SWEEPS: usize = 80;

/// Cyclic Jacobi for a Hermitian matrix. Returns ascending eigenvalues and, if asked,
/// the unitary whose columns are the matching eigenvectors. The input is assumed Hermitian;
/// only its upper triangle and diagonal real parts really matter.
pub fn jacobi_eigh<T: Real>(m: &Matrix<T>, vectors: bool) -> (Vec<T>, Matrix<T>) {
    let n = m.rows();
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] = c(a[(i, i)].re, T::zero());
    }
    let mut w = if vectors { Matrix::identity(n) } else { Matrix::zeros(0, 0) };
    let total = a.fro_norm();
    let stop = total * T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= stop || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == T::zero() || r <= stop * T::lit(1e-3) {
                    continue;
                }
                rotate(&mut a, &mut w, p, q, vectors);
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    idx.sort_by(|&x, &y| diag[x].partial_cmp(&diag[y]).unwrap_or(std::cmp::Ordering::Equal));
    let vals = idx.iter().map(|&i| diag[i]).collect();
    let vecs = if vectors { Matrix::from_fn(n, n, |i, j| w[(i, idx[j])]) } else { w };
    (vals, vecs)
}

fn rotate<T: Real>(a: &mut Matrix<T>, w: &mut Matrix<T>, p: usize, q: usize, vectors: bool) {
    let n = a.rows();
    let apq = a[(p, q)];
    let r = apq.norm();
    let ph = apq / r;
    let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
    let theta = (aqq - app) / (r + r);
    let sgn = if theta >= T::zero() { T::one() } else { -T::one() };
    let t = sgn / (theta.abs() + (theta * theta + T::one()).sqrt());
    let cs = T::one() / (t * t + T::one()).sqrt();
    let sn = t * cs;
    // V = diag(1, conj(ph)) * [[c, s], [-s, c]] restricted to (p, q)
    let vpp = c(cs, T::zero());
    let vpq = c(sn, T::zero());
    let vqp = ph.conj() * (-sn);
    let vqq = ph.conj() * cs;
    for k in 0..n {
        let (x, y) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = x * vpp + y * vqp;
        a[(k, q)] = x * vpq + y * vqq;
    }
    for k in 0..n {
        let (x, y) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = vpp.conj() * x + vqp.conj() * y;
        a[(q, k)] = vpq.conj() * x + vqq.conj() * y;
    }
    a[(p, q)] = czero();
    a[(q, p)] = czero();
    a[(p, p)] = c(a[(p, p)].re, T::zero());
    a[(q, q)] = c(a[(q, q)].re, T::zero());
    if vectors {
        for k in 0..n {
            let (x, y) = (w[(k, p)], w[(k, q)]);
            w[(k, p)] = x * vpp + y * vqp;
            w[(k, q)] = x * vpq + y * vqq;
        }
    }
}

fn check_hermitian<T: Real>(m: &Matrix<T>, tol: &Tolerance<T>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let defect = m.hermitian_defect();
    if defect > tol.rel_eq * m.fro_norm() {
        return Err(Error::NotHermitian { defect: defect.to_f64_lossy() });
    }
    Ok(())
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigvals<T: Real>(m: &Matrix<T>, tol: &Tolerance<T>) -> Result<Vec<T>> {
    check_hermitian(m, tol)?;
    Ok(jacobi_eigh(&m.hermitian_part(), false).0)
}

/// Ascending eigenvalues with eigenvectors as columns.
pub fn hermitian_eigh<T: Real>(m: &Matrix<T>, tol: &Tolerance<T>) -> Result<(Vec<T>, Matrix<T>)> {
    check_hermitian(m, tol)?;
    Ok(jacobi_eigh(&m.hermitian_part(), true))
}

fn spectral_scale<T: Real>(vals: &[T]) -> T {
    vals.iter().map(|v| v.abs()).fold(T::zero(), T::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdReport<T> {
    pub psd: bool,
    /// Smallest eigenvalue.
    pub margin: T,
    /// The value the margin was compared against.
    pub threshold: T,
}

/// PSD test: smallest eigenvalue at least -rel_psd * max(1, ||M||). The Hermitian defect is
/// measured on the same absolute floor, so matrices that are zero up to roundoff pass.
pub fn psd_check<T: Real>(m: &Matrix<T>, tol: &Tolerance<T>) -> Result<PsdReport<T>> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let defect = m.hermitian_defect();
    if defect > tol.rel_eq * m.fro_norm().max(T::one()) {
        return Err(Error::NotHermitian { defect: defect.to_f64_lossy() });
    }
    let vals = jacobi_eigh(&m.hermitian_part(), false).0;
    Ok(psd_from_eigvals(&vals, tol))
}

pub fn psd_from_eigvals<T: Real>(vals: &[T], tol: &Tolerance<T>) -> PsdReport<T> {
    let margin = vals.first().copied().unwrap_or(T::zero());
    let threshold = -tol.rel_psd * spectral_scale(vals).max(T::one());
    PsdReport { psd: margin >= threshold, margin, threshold }
}

/// Orthonormal basis (as columns) of the kernel of a Hermitian PSD matrix.
pub fn null_space_basis<T: Real>(g: &Matrix<T>, tol: &Tolerance<T>) -> Result<Matrix<T>> {
    let (vals, vecs) = hermitian_eigh(g, tol)?;
    let rep = psd_from_eigvals(&vals, tol);
    if !rep.psd {
        return Err(Error::NotPsd { min_eig: rep.margin.to_f64_lossy() });
    }
    let cut = rank_cut(&vals, tol);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] <= cut).collect();
    Ok(Matrix::from_fn(g.rows(), keep.len(), |i, j| vecs[(i, keep[j])]))
}

/// Eigenpairs of a Hermitian PSD matrix above the numerical rank threshold.
pub fn range_eigenpairs<T: Real>(g: &Matrix<T>, tol: &Tolerance<T>) -> Result<(Vec<T>, Matrix<T>)> {
    let (vals, vecs) = hermitian_eigh(g, tol)?;
    let rep = psd_from_eigvals(&vals, tol);
    if !rep.psd {
        return Err(Error::NotPsd { min_eig: rep.margin.to_f64_lossy() });
    }
    let cut = rank_cut(&vals, tol);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > cut).collect();
    let kv = keep.iter().map(|&i| vals[i]).collect();
    Ok((kv, Matrix::from_fn(g.rows(), keep.len(), |i, j| vecs[(i, keep[j])])))
}

/// Number of eigenvalues above rel_rank * ||G||.
pub fn numerical_rank<T: Real>(g: &Matrix<T>, tol: &Tolerance<T>) -> Result<usize> {
    let vals = hermitian_eigvals(g, tol)?;
    let cut = rank_cut(&vals, tol);
    Ok(vals.iter().filter(|&&v| v > cut).count())
}

fn rank_cut<T: Real>(vals: &[T], tol: &Tolerance<T>) -> T {
    tol.rel_rank * spectral_scale(vals)
}

/// A Hermitian matrix with the prescribed spectrum in the eigenbasis u.
pub fn from_spectrum<T: Real>(vals: &[T], u: &Matrix<T>) -> Matrix<T> {
    let d = Matrix::diag(&vals.iter().map(|&v| c(v, T::zero())).collect::<Vec<_>>());
    u.matmul(&d).matmul(&u.adjoint())
}
