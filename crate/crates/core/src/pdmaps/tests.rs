use super::*;
use crate::actions::Action;
use crate::bundles::{DynamicalSystem, FellBundle};
use crate::groups::FiniteGroup;
use crate::scalar::c;
use std::sync::Arc;

fn tol() -> Tolerance<f64> {
    Tolerance::standard()
}

fn gb(grp: FiniteGroup) -> BundleRef<f64> {
    Arc::new(FellBundle::group_bundle(&grp))
}

fn z2_map(t: f64) -> BundleMap<f64> {
    BundleMap::multiplier(gb(FiniteGroup::cyclic(2).unwrap()), &[c(1.0, 0.0), c(t, 0.0)]).unwrap()
}

fn ad_system() -> DynamicalSystem<f64> {
    let m2: Vec<Matrix<f64>> = (0..2).flat_map(|i| (0..2).map(move |j| Matrix::unit(2, 2, i, j))).collect();
    let u = Matrix::real(&[&[1.0, 0.0], &[0.0, -1.0]]);
    DynamicalSystem::inner(2, &m2, FiniteGroup::cyclic(2).unwrap(), &[Matrix::identity(2), u], &tol()).unwrap()
}

#[test]
fn identity_maps_are_pd() {
    let bundles = vec![
        gb(FiniteGroup::cyclic(3).unwrap()),
        gb(FiniteGroup::symmetric(3).unwrap()),
        Arc::new(FellBundle::full_matrix_algebra(2)),
        Arc::new(ad_system().bundle()),
    ];
    for b in bundles {
        let t = BundleMap::identity(b);
        let cert = t.pd_check_exact(&tol()).unwrap();
        assert!(cert.passed, "margin {}", cert.margin);
        assert!(t.choi_check(&tol()).unwrap().psd);
        assert!(t.pd_check_sampled(200, 1, &tol()).passed);
    }
}

#[test]
fn z2_circulant() {
    for &(t, ok) in &[(0.5, true), (1.0, true), (-0.9, true), (1.2, false), (2.0, false), (-3.0, false)] {
        let m = z2_map(t);
        let cert = m.pd_check_exact(&tol()).unwrap();
        assert_eq!(cert.passed, ok, "t = {t}");
        let oracle = 1.0 - f64::abs(t);
        assert!((cert.margin - oracle).abs() < 1e-12);
        assert_eq!(m.choi_check(&tol()).unwrap().psd, ok);
        if !ok {
            let w = cert.witness.unwrap();
            assert!(w.min_eig <= cert.margin + 1e-12);
            let s = m.pd_check_sampled(300, 7, &tol());
            assert!(!s.passed);
            assert!(s.witness.unwrap().min_eig < 0.0);
        }
    }
}

#[test]
fn explicit_unit_tuple_for_t_two() {
    let m = z2_map(2.0);
    let b = m.source().clone();
    let terms = vec![
        WitnessTerm { g: 0, a: b.basis(0, 0).clone(), b: b.basis(0, 0).clone() },
        WitnessTerm { g: 1, a: b.basis(1, 0).clone(), b: b.basis(1, 0).scale_real(-1.0) },
    ];
    let w = m.witness_sum(terms);
    assert!((w.min_eig - -2.0).abs() < 1e-12);
}

#[test]
fn non_hermitian_map_fails() {
    let m = BundleMap::multiplier(gb(FiniteGroup::cyclic(3).unwrap()), &[c(1.0, 0.0), c(0.3, 0.0), c(0.1, 0.0)]).unwrap();
    let cert = m.pd_check_exact(&tol()).unwrap();
    assert!(!cert.passed);
    let w = cert.witness.unwrap();
    assert!(w.skew > 1e-3 || w.min_eig < 0.0);
    assert!(!m.choi_check(&tol()).unwrap().psd);
}

#[test]
fn zero_map_and_push_forward() {
    let b = gb(FiniteGroup::symmetric(3).unwrap());
    let z = BundleMap::zero(b.clone(), b.clone(), GroupHom::identity(b.group())).unwrap();
    assert!(z.pd_check_exact(&tol()).unwrap().passed);
    assert!(z.pd_check_sampled(50, 0, &tol()).passed);
    let mut rng = Rng::seeded(3);
    let f = Section::random(b.clone(), &mut rng);
    let id = BundleMap::identity(b.clone());
    assert!(id.phi_t(&f).unwrap().distance(&f) < 1e-14);
    let mut mult = vec![c(0.0, 0.0); 6];
    mult[0] = c(1.0, 0.0);
    let pe = BundleMap::multiplier(b.clone(), &mult).unwrap().phi_t(&f).unwrap();
    assert!((1..6).all(|g| pe.is_zero_at(g)));
    let other = gb(FiniteGroup::cyclic(2).unwrap());
    assert!(matches!(id.phi_t(&Section::zero(other)), Err(Error::BundleMismatch)));
}

#[test]
fn gns_of_identity_on_z2() {
    let t = BundleMap::identity(gb(FiniteGroup::cyclic(2).unwrap()));
    let gns = t.gelfand_raikov(&tol()).unwrap();
    assert!(gns.round_trip_residual(&t).unwrap() <= 1e-12);
    // brute-force Gram of the pre-space over e: entries T(u_k* u_k') = u_{k^-1 k'}, rank 1
    assert_eq!(gns.bundle.dims(), &[1, 1]);
    assert!(gns.bundle.validate(&tol()).passed());
    assert!(gns.action.validate(&tol()).passed());
}

#[test]
fn gns_one_dimensional() {
    let b: BundleRef<f64> = Arc::new(FellBundle::full_matrix_algebra(1));
    let t = BundleMap::identity(b).scale(c(2.5, 0.0));
    let gns = t.gelfand_raikov(&tol()).unwrap();
    assert_eq!(gns.bundle.dims(), &[1]);
    let ip = gns.bundle.inner_coords(0, &gns.xi, 0, &gns.xi);
    assert!((ip[0] - c(2.5, 0.0)).norm() < 1e-12);
}

#[test]
fn gns_refusals() {
    assert!(matches!(z2_map(2.0).gelfand_raikov(&tol()), Err(Error::NotPositiveDefinite { .. })));
    let grp = FiniteGroup::cyclic(2).unwrap();
    let nonunital = Arc::new(FellBundle::new(grp, 2, vec![vec![Matrix::unit(2, 2, 0, 0)], vec![]], false).unwrap());
    assert!(matches!(BundleMap::identity(nonunital).gelfand_raikov(&tol()), Err(Error::NotUnital)));
}

#[test]
fn compression_maps() {
    // T_g(b) = a* b a as the coefficient of the trivial action at a
    let sys = ad_system();
    let b = Arc::new(sys.bundle());
    let act = Action::trivial(b.clone());
    let mut rng = Rng::seeded(11);
    let x = rng.cvec(b.dim(0));
    let t = act.coefficient_map(&x, None).unwrap();
    let a = b.element(0, &x);
    for g in 0..2 {
        for el in b.fiber(g).basis() {
            let want = a.adjoint().matmul(el).matmul(&a);
            assert!((&t.apply(g, el) - &want).max_abs() < 1e-12);
        }
    }
    assert!(t.pd_check_exact(&tol()).unwrap().passed);
    let gns = t.gelfand_raikov(&tol()).unwrap();
    assert!(gns.round_trip_residual(&t).unwrap() < 1e-10);
    assert!(gns.bundle.validate(&tol()).passed());
    assert!(gns.action.validate(&tol()).passed());
    // invertible a gives the fiber dimensions of the trivial bundle
    assert_eq!(gns.bundle.dims(), &b.dims()[..]);
}
