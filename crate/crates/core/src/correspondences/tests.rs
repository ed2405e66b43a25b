use super::*;
use crate::bundles::{BundleRef, DynamicalSystem, FellBundle};
use crate::groups::{FiniteGroup, GroupHom};
use crate::hilbundles::HilbertBundle;
use crate::pdmaps::BundleMap;
use crate::scalar::c;

fn tol() -> Tolerance<f64> {
    Tolerance::standard()
}

fn assert_pass(rep: &AxiomReport) {
    assert!(rep.passed(), "{}: {:?}", rep.subject, rep.failures());
}

fn gb(grp: FiniteGroup) -> BundleRef<f64> {
    Arc::new(FellBundle::group_bundle(&grp))
}

fn ad_bundle() -> BundleRef<f64> {
    let m2: Vec<Matrix<f64>> = (0..2).flat_map(|i| (0..2).map(move |j| Matrix::unit(2, 2, i, j))).collect();
    let u = Matrix::real(&[&[1.0, 0.0], &[0.0, -1.0]]);
    let sys = DynamicalSystem::inner(2, &m2, FiniteGroup::cyclic(2).unwrap(), &[Matrix::identity(2), u], &tol()).unwrap();
    Arc::new(sys.bundle())
}

fn trivial_corr(b: BundleRef<f64>) -> Correspondence<f64> {
    let act = Action::trivial(b);
    Correspondence::build(act.target().clone(), &tol()).unwrap().attach_left_action(act, &tol()).unwrap()
}

#[test]
fn trivial_correspondence_formula() {
    let b = ad_bundle();
    let y = trivial_corr(b.clone());
    assert_pass(&y.validate(20, 1, &tol()));
    let mut rng = Rng::seeded(2);
    let grp = b.group().clone();
    for g in grp.elements() {
        for g2 in grp.elements() {
            let a = rng.cvec(b.dim(g));
            let a2 = rng.cvec(b.dim(g2));
            let ip = y.inner(&y.single(g, &a), &y.single(g2, &a2));
            let h = grp.mul(grp.inv(g), g2);
            let want = b.coords(h, &b.element(g, &a).adjoint().matmul(&b.element(g2, &a2)));
            let want = Section::singleton(b.clone(), h, want).unwrap();
            assert!(ip.distance(&want) < 1e-12);
        }
    }
}

#[test]
fn single_fiber_norm() {
    let b = ad_bundle();
    let y = trivial_corr(b.clone());
    let mut rng = Rng::seeded(3);
    for k in 0..2 {
        let x = rng.cvec(b.dim(k));
        let want = b.element(k, &x).op_norm();
        assert!((y.norm(&y.single(k, &x)) - want).abs() < 1e-10 * (1.0 + want));
    }
}

#[test]
fn trivial_action_is_convolution() {
    let b = gb(FiniteGroup::symmetric(3).unwrap());
    let y = trivial_corr(b.clone());
    let mut rng = Rng::seeded(4);
    for _ in 0..5 {
        let f = Section::random(b.clone(), &mut rng);
        let xi = y.random(&mut rng);
        let lhs = Section::from_vector(b.clone(), &y.left_act(&f, &xi).unwrap());
        let rhs = f.convolve(&Section::from_vector(b.clone(), &xi)).unwrap();
        assert!(lhs.distance(&rhs) < 1e-12);
        let f2 = Section::random(b.clone(), &mut rng);
        let l = y.left_act(&f, &y.right_act(&xi, &f2).unwrap()).unwrap();
        let r = y.right_act(&y.left_act(&f, &xi).unwrap(), &f2).unwrap();
        assert!(vnorm(&vsub(&l, &r)) < 1e-10);
    }
}

#[test]
fn disjoint_supports() {
    let b = gb(FiniteGroup::cyclic(4).unwrap());
    let y = trivial_corr(b.clone());
    let ip = y.inner(&y.single(1, &[c(1.0, 0.0)]), &y.single(3, &[c(2.0, 0.0)]));
    for h in 0..4 {
        assert_eq!(ip.is_zero_at(h), h != 2);
    }
}

#[test]
fn psi_is_push_forward() {
    let b = ad_bundle();
    let act = Action::l2(b.clone());
    let y = Correspondence::build(act.target().clone(), &tol()).unwrap().attach_left_action(act.clone(), &tol()).unwrap();
    assert_pass(&y.validate(10, 5, &tol()));
    let mut rng = Rng::seeded(6);
    for _ in 0..5 {
        let x = rng.cvec(act.target().dim(0));
        let t: BundleMap<f64> = act.coefficient_map(&x, None).unwrap();
        let f = Section::random(b.clone(), &mut rng);
        let lhs = y.psi(&x, &f).unwrap();
        let rhs = t.phi_t(&f).unwrap();
        assert!(lhs.distance(&rhs) < 1e-10);
    }
}

#[test]
fn nondegeneracy_and_zero_action() {
    let b = gb(FiniteGroup::cyclic(3).unwrap());
    let y = trivial_corr(b.clone());
    assert!(y.check_nondegenerate(&tol()).unwrap());
    let zero = Action::trivial(b.clone());
    let ops = zero.ops().iter().map(|per| per.iter().map(|l| l.iter().map(|m| Matrix::zeros(m.rows(), m.cols())).collect()).collect()).collect();
    let zero = Action::new(b.clone(), GroupHom::identity(b.group()), zero.target().clone(), ops).unwrap();
    let y0 = Correspondence::build_unchecked(zero.target().clone()).attach_left_action(zero, &tol()).unwrap();
    assert!(!y0.check_nondegenerate(&tol()).unwrap());
    assert!(matches!(y.check_cyclic(&[], &tol()), Err(Error::WrongFiber { .. })));
    let none = Correspondence::build_unchecked(y.bundle().clone());
    assert!(matches!(none.check_nondegenerate(&tol()), Err(Error::ActionMismatch(_))));
}

fn regular_corr(b: BundleRef<f64>) -> (Correspondence<f64>, Vec<C<f64>>) {
    let act = Action::trivial(b.clone()).regularize();
    let y = Correspondence::build_unchecked(act.target().clone()).attach_left_action(act, &tol()).unwrap();
    let e = b.group().identity();
    // 1 (.) e: the unit in the copy indexed by e
    let mut x = vec![c(0.0, 0.0); y.bundle().dim(e)];
    let one = b.unit().unwrap();
    x[e * one.len()..(e + 1) * one.len()].copy_from_slice(&one);
    (y, x)
}

#[test]
fn regular_action_cyclicity() {
    for b in [gb(FiniteGroup::cyclic(3).unwrap()), gb(FiniteGroup::symmetric(3).unwrap()), ad_bundle()] {
        assert!(b.check_saturated(&tol()));
        let (y, x) = regular_corr(b.clone());
        assert!(y.check_cyclic(&x, &tol()).unwrap());
        let sub = y.subcorrespondence(&x, &tol()).unwrap();
        assert_eq!(sub.corr.dim(), y.dim());
    }
    let grp = FiniteGroup::cyclic(2).unwrap();
    let thin: BundleRef<f64> = Arc::new(FellBundle::new(grp, 1, vec![vec![Matrix::identity(1)], vec![]], true).unwrap());
    assert!(!thin.check_saturated(&tol()));
    let (y, x) = regular_corr(thin);
    assert!(!y.check_cyclic(&x, &tol()).unwrap());
    assert_eq!(y.rank_profile(&x, &tol()).unwrap(), vec![1, 0]);
}

#[test]
fn gns_vector_is_cyclic() {
    let b = ad_bundle();
    let gns = BundleMap::identity(b).gelfand_raikov(&tol()).unwrap();
    let y = Correspondence::build(gns.bundle.clone(), &tol()).unwrap().attach_left_action(gns.action.clone(), &tol()).unwrap();
    assert!(y.check_cyclic(&gns.xi, &tol()).unwrap());
}

#[test]
fn subcorrespondence_of_sum() {
    let b = gb(FiniteGroup::cyclic(2).unwrap());
    let t = Action::trivial(b.clone());
    let sum = t.direct_sum(&t).unwrap();
    let y = Correspondence::build_unchecked(sum.target().clone()).attach_left_action(sum, &tol()).unwrap();
    let x = vec![c(1.0, 0.0), c(0.0, 0.0)];
    assert!(!y.check_cyclic(&x, &tol()).unwrap());
    let sub = y.subcorrespondence(&x, &tol()).unwrap();
    assert_eq!(sub.corr.dim(), 2);
    assert_eq!(sub.corr.bundle().dims(), &[1, 1]);
    for (k, s) in sub.spans.iter().enumerate() {
        // the first summand sits in the first coordinate of each fiber
        assert!(s[(1, 0)].norm() < 1e-12, "fiber {k}");
    }
    assert_pass(&sub.corr.validate(10, 1, &tol()));
    let zero = y.subcorrespondence(&[c(0.0, 0.0); 2], &tol()).unwrap();
    assert_eq!(zero.corr.dim(), 0);
}

#[test]
fn amplified_is_representation() {
    for b in [gb(FiniteGroup::symmetric(3).unwrap()), ad_bundle()] {
        let y = trivial_corr(b.clone());
        let rep = y.check_amplified(5, 2, &tol()).unwrap();
        assert_pass(&rep);
        let f = Section::random(b.clone(), &mut Rng::seeded(1));
        assert_eq!(y.amplified_matrix(&f).unwrap().rows(), b.group().order() * y.dim());
    }
}

#[test]
fn representation_integrated_form() {
    // H trivial: f acts by sum_g pi_g(f(g))
    let s3 = FiniteGroup::symmetric(3).unwrap();
    let b = gb(s3.clone());
    let cols: Vec<Matrix<f64>> = (0..6).map(|i| Matrix::unit(6, 1, i, 0)).collect();
    let module = crate::hilbundles::HilbertModule::new(1, &[Matrix::identity(1)], 6, &cols, &tol()).unwrap();
    let pi: Vec<Vec<Matrix<f64>>> = s3.elements().map(|g| vec![b.basis(g, 0).clone()]).collect();
    let act = Action::from_representation(b.clone(), GroupHom::to_trivial(&s3), &module, &pi, &tol()).unwrap();
    let y = Correspondence::build_unchecked(act.target().clone()).attach_left_action(act, &tol()).unwrap();
    let f = Section::random(b.clone(), &mut Rng::seeded(9));
    let mut want = Matrix::zeros(6, 6);
    for g in s3.elements() {
        want.axpy(f.at(g)[0], &pi[g][0]);
    }
    assert!((&y.left_matrix(&f).unwrap() - &want).max_abs() < 1e-12);
}

fn m2_c() -> EquivalenceBundle<f64> {
    let m2: BundleRef<f64> = Arc::new(FellBundle::full_matrix_algebra(2));
    let cc: BundleRef<f64> = Arc::new(FellBundle::full_matrix_algebra(1));
    let cols = vec![Matrix::unit(2, 1, 0, 0), Matrix::unit(2, 1, 1, 0)];
    EquivalenceBundle::concrete(m2, cc, &[cols], &tol()).unwrap()
}

#[test]
fn morita_m2_c() {
    let e = m2_c();
    let rep = e.verify_imprimitivity(20, 0, &tol());
    assert_pass(&rep);
}

#[test]
fn morita_self_equivalence() {
    for b in [gb(FiniteGroup::cyclic(3).unwrap()), gb(FiniteGroup::symmetric(3).unwrap()), ad_bundle()] {
        let e = EquivalenceBundle::identity(b, &tol()).unwrap();
        assert_pass(&e.verify_imprimitivity(10, 1, &tol()));
    }
}

#[test]
fn morita_corner_fails_fullness() {
    let diag: BundleRef<f64> =
        Arc::new(FellBundle::over_trivial_group(2, vec![Matrix::unit(2, 2, 0, 0), Matrix::unit(2, 2, 1, 1)], true).unwrap());
    let cc: BundleRef<f64> = Arc::new(FellBundle::full_matrix_algebra(1));
    let e = EquivalenceBundle::concrete(diag, cc, &[vec![Matrix::unit(2, 1, 0, 0)]], &tol()).unwrap();
    let rep = e.verify_imprimitivity(10, 0, &tol());
    assert!(rep.failed("left_fullness"));
    assert!(!rep.failed("right_fullness"));
    assert!(!rep.passed());
}

#[test]
fn morita_shape_errors() {
    let m2: BundleRef<f64> = Arc::new(FellBundle::full_matrix_algebra(2));
    let z2 = gb(FiniteGroup::cyclic(2).unwrap());
    assert!(matches!(EquivalenceBundle::concrete(m2.clone(), z2, &[vec![]], &tol()), Err(Error::BundleMismatch)));
    let cc: BundleRef<f64> = Arc::new(FellBundle::full_matrix_algebra(1));
    assert!(matches!(
        EquivalenceBundle::concrete(m2, cc, &[vec![Matrix::identity(2)]], &tol()),
        Err(Error::ShapeMismatch(_))
    ));
}

#[test]
fn hilbert_bundle_built_from_equivalence() {
    let e = m2_c();
    let hb: HilbertBundle<f64> = e.right_bundle(&tol()).unwrap();
    assert_eq!(hb.dims(), &[2]);
    assert_eq!(e.left_bundle(&tol()).unwrap().dims(), &[2]);
}
