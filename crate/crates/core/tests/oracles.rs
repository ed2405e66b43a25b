//! Independent references: nalgebra on the real embedding, characteristic polynomials by the
//! Faddeev-LeVerrier recursion, and closed forms for cyclic groups.

use fellbundle::numerics::{hermitian_eigvals, null_space_basis, numerical_rank};
use fellbundle::random::Rng;
use fellbundle::*;
use nalgebra::DMatrix;
use std::f64::consts::PI;
use std::sync::Arc;

fn tol() -> Tolerance64 {
    Tolerance::standard()
}

/// [[A, -B], [B, A]] for H = A + iB; every eigenvalue of H appears twice.
fn real_embedding(h: &CMatrix) -> DMatrix<f64> {
    let n = h.rows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

#[test]
fn jacobi_matches_nalgebra() {
    let mut rng = Rng::seeded(1);
    for n in 1..=12 {
        let h: CMatrix = rng.hermitian(n);
        let mine = hermitian_eigvals(&h, &tol()).unwrap();
        let mut theirs: Vec<f64> = real_embedding(&h).symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut sorted = mine.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (i, v) in sorted.iter().enumerate() {
            assert!((v - theirs[2 * i]).abs() < 1e-10 * (1.0 + v.abs()), "n = {n}");
            assert!((v - theirs[2 * i + 1]).abs() < 1e-10 * (1.0 + v.abs()), "n = {n}");
        }
    }
}

/// Coefficients c_0..c_n of det(x - A), c_n = 1.
fn faddeev_leverrier(a: &CMatrix) -> Vec<C64> {
    let n = a.rows();
    let mut c = vec![C64::new(0.0, 0.0); n + 1];
    c[n] = C64::new(1.0, 0.0);
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a.matmul(&m);
        next.axpy(c[n - k + 1], &Matrix::identity(n));
        m = next;
        c[n - k] = -a.matmul(&m).trace() / (k as f64);
    }
    c
}

fn poly_from_roots(roots: &[f64]) -> Vec<C64> {
    let mut p = vec![C64::new(1.0, 0.0)];
    for &r in roots {
        let mut q = vec![C64::new(0.0, 0.0); p.len() + 1];
        for (i, &z) in p.iter().enumerate() {
            q[i + 1] += z;
            q[i] -= z * r;
        }
        p = q;
    }
    p
}

#[test]
fn eigenvalues_reproduce_characteristic_polynomial() {
    let mut rng = Rng::seeded(2);
    for n in 1..=7 {
        let h: CMatrix = rng.hermitian(n);
        let vals = hermitian_eigvals(&h, &tol()).unwrap();
        let want = faddeev_leverrier(&h);
        let got = poly_from_roots(&vals);
        for (a, b) in want.iter().zip(&got) {
            assert!((a - b).norm() < 1e-9, "n = {n}: {a} vs {b}");
        }
    }
}

#[test]
fn null_space_of_planted_spectrum() {
    let mut rng = Rng::seeded(3);
    for (n, zeros) in [(3, 1), (5, 2), (8, 5), (6, 0)] {
        let u: CMatrix = rng.unitary(n);
        let d: Vec<C64> = (0..n).map(|i| C64::new(if i < zeros { 0.0 } else { 1.0 + i as f64 }, 0.0)).collect();
        let g = u.matmul(&Matrix::diag(&d)).matmul(&u.adjoint());
        let ns = null_space_basis(&g, &tol()).unwrap();
        assert_eq!(ns.cols(), zeros);
        assert!(g.matmul(&ns).max_abs() < 1e-10);
        assert_eq!(numerical_rank(&g, &tol()).unwrap(), n - zeros);
    }
}

fn dft(f: &[C64], j: usize) -> C64 {
    let n = f.len();
    f.iter().enumerate().map(|(k, &z)| z * C64::from_polar(1.0, 2.0 * PI * (j * k) as f64 / n as f64)).sum()
}

#[test]
fn cyclic_norm_is_max_of_fourier_transform() {
    let mut rng = Rng::seeded(4);
    for n in 1..=7 {
        let b = Arc::new(FellBundle::group_bundle(&FiniteGroup::cyclic(n).unwrap()));
        let reg = RegRep::new(b.clone());
        for _ in 0..5 {
            let f: Vec<C64> = rng.cvec(n);
            let sec = Section::new(b.clone(), f.iter().map(|&z| vec![z]).collect()).unwrap();
            let want = (0..n).map(|j| dft(&f, j).norm()).fold(0.0, f64::max);
            assert!((reg.cstar_norm(&sec) - want).abs() < 1e-10 * (1.0 + want));
        }
    }
}

#[test]
fn cyclic_multiplier_margin_is_min_of_fourier_transform() {
    let mut rng = Rng::seeded(5);
    for n in 2..=6 {
        let b = Arc::new(FellBundle::group_bundle(&FiniteGroup::cyclic(n).unwrap()));
        for _ in 0..5 {
            // Hermitian: f(-k) = conj f(k)
            let mut f = vec![C64::new(0.0, 0.0); n];
            f[0] = C64::new(rng.unit() + 1.0, 0.0);
            for k in 1..n {
                if k < n - k {
                    f[k] = rng.complex();
                    f[n - k] = f[k].conj();
                } else if k == n - k {
                    f[k] = C64::new(rng.unit(), 0.0);
                }
            }
            let t = BundleMap::multiplier(b.clone(), &f).unwrap();
            let cert = t.pd_check_exact(&tol()).unwrap();
            let want = (0..n).map(|j| dft(&f, j).re).fold(f64::INFINITY, f64::min);
            assert!((cert.margin - want).abs() < 1e-10, "n = {n}");
            assert_eq!(cert.passed, want >= -1e-8 * (1.0 + f.iter().map(|z| z.norm()).sum::<f64>()));
        }
    }
}

#[test]
fn two_by_two_closed_form() {
    // [[a, z], [conj z, b]] has eigenvalues (a + b)/2 +- sqrt(((a - b)/2)^2 + |z|^2)
    let mut rng = Rng::seeded(6);
    for _ in 0..50 {
        let (a, b) = (rng.unit() * 3.0, rng.unit() * 3.0);
        let z: C64 = rng.complex();
        let h = Matrix::from_rows(&[vec![C64::new(a, 0.0), z], vec![z.conj(), C64::new(b, 0.0)]]).unwrap();
        let mut vals = hermitian_eigvals(&h, &tol()).unwrap();
        vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let r = (((a - b) / 2.0).powi(2) + z.norm_sqr()).sqrt();
        assert!((vals[0] - ((a + b) / 2.0 - r)).abs() < 1e-12);
        assert!((vals[1] - ((a + b) / 2.0 + r)).abs() < 1e-12);
    }
}
