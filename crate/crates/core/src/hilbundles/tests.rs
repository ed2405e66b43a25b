use super::*;
use crate::bundles::{CondExpectation, DynamicalSystem, FellBundle};
use crate::groups::FiniteGroup;
use std::sync::Arc;

fn tol() -> Tolerance<f64> {
    Tolerance::standard()
}

fn swap_system() -> DynamicalSystem<f64> {
    let z2 = FiniteGroup::cyclic(2).unwrap();
    let swap = Matrix::real(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let diag = vec![Matrix::unit(2, 2, 0, 0), Matrix::unit(2, 2, 1, 1)];
    DynamicalSystem::inner(2, &diag, z2, &[Matrix::identity(2), swap], &tol()).unwrap()
}

fn assert_pass(rep: &AxiomReport) {
    assert!(rep.passed(), "{}: {:?}", rep.subject, rep.failures());
}

#[test]
fn trivial_bundle_is_hilbert() {
    for grp in [FiniteGroup::cyclic(3).unwrap(), FiniteGroup::symmetric(3).unwrap()] {
        let b = Arc::new(FellBundle::<f64>::group_bundle(&grp));
        assert_pass(&HilbertBundle::trivial(b).validate(&tol()));
    }
    let m2 = Arc::new(FellBundle::<f64>::full_matrix_algebra(2));
    let x = HilbertBundle::trivial(m2);
    assert_pass(&x.validate(&tol()));
    assert_eq!(x.dims(), &[4]);
}

#[test]
fn l2_bundle_is_hilbert() {
    let sys = swap_system();
    let b = Arc::new(sys.bundle());
    let x = HilbertBundle::l2(b.clone());
    assert_eq!(x.dims(), &[4, 4]);
    assert_pass(&x.validate(&tol()));
    let g = Arc::new(FellBundle::<f64>::group_bundle(&FiniteGroup::symmetric(3).unwrap()));
    assert_pass(&HilbertBundle::l2(g).validate(&tol()));
}

#[test]
fn row_vectors_over_m2() {
    let m2 = Arc::new(FellBundle::<f64>::full_matrix_algebra(2));
    let rows = vec![vec![Matrix::unit(1, 2, 0, 0), Matrix::unit(1, 2, 0, 1)]];
    let x = HilbertBundle::concrete(m2.clone(), 1, &rows, &tol()).unwrap();
    assert_eq!(x.dims(), &[2]);
    assert_pass(&x.validate(&tol()));
    // a single row entry is not closed under the right action
    let bad = vec![vec![Matrix::unit(1, 2, 0, 0)]];
    assert!(matches!(HilbertBundle::concrete(m2, 1, &bad, &tol()), Err(Error::NotModule(_))));
}

#[test]
fn dynsys_module_bundle() {
    let sys = swap_system();
    let base = Arc::new(sys.bundle());
    let diag = vec![Matrix::unit(2, 2, 0, 0), Matrix::unit(2, 2, 1, 1)];
    let module = HilbertModule::standard(2, &diag, &tol()).unwrap();
    let x = HilbertBundle::from_dynsys(&module, &sys, base.clone(), &tol()).unwrap();
    assert_pass(&x.validate(&tol()));
    let cols = [Matrix::unit(3, 2, 0, 0), Matrix::unit(3, 2, 1, 1), Matrix::unit(3, 2, 2, 1)];
    let module = HilbertModule::new(2, &diag, 3, &cols, &tol()).unwrap();
    let y = HilbertBundle::from_dynsys(&module, &sys, base.clone(), &tol()).unwrap();
    assert_eq!(y.dims(), &[3, 3]);
    assert_pass(&y.validate(&tol()));
    // full row space is not a module over the diagonal: x* y leaves the algebra
    let rows = [Matrix::unit(1, 2, 0, 0), Matrix::unit(1, 2, 0, 1)];
    assert!(matches!(HilbertModule::new(2, &diag, 1, &rows, &tol()), Err(Error::NotModule(_))));
}

#[test]
fn condexp_bundle_separates() {
    let sys = swap_system();
    let sup = Arc::new(sys.bundle());
    let sub = Arc::new(sup.sub_bundle((0..2).map(|g| vec![sys.unitary(g)]).collect(), true).unwrap());
    let avg = CondExpectation::from_fn(sup, sub, |g, x| {
        let a = sys.decompose(g, x);
        sys.element(&Matrix::identity(2).scale((a[(0, 0)] + a[(1, 1)]) * 0.5), g)
    })
    .unwrap();
    let semi = SemiInnerBundle::from_condexp(&avg);
    assert_pass(&semi.validate(&tol()));
    let (h, q) = semi.separate(&tol()).unwrap();
    assert_eq!(h.dims(), &[2, 2]);
    assert_pass(&h.validate(&tol()));
    for r in 0..2 {
        let id = q[r].q.matmul(&q[r].lift);
        assert!((&id - &Matrix::identity(2)).max_abs() < 1e-12);
        assert!((&h.trace_gram(r) - &Matrix::identity(2)).max_abs() < 1e-12);
    }
}

#[test]
fn degenerate_form_is_quotiented() {
    let b = Arc::new(FellBundle::<f64>::group_bundle(&FiniteGroup::cyclic(2).unwrap()));
    let x = HilbertBundle::trivial(b.clone());
    // double every vector and zero out the second copy's inner product
    let mut semi = x.direct_sum(&x).unwrap().into_semi();
    for r in 0..2 {
        for s in 0..2 {
            let mut d = Matrix::zeros(2, 2);
            d[(1, 1)] = -semi.inner_tensor(r, s, 0)[(1, 1)];
            semi.perturb_inner(r, s, 0, &d);
        }
    }
    assert_pass(&semi.validate(&tol()));
    assert!(HilbertBundle::from_semi(semi.clone(), &tol()).is_err());
    let (h, _) = semi.separate(&tol()).unwrap();
    assert_eq!(h.dims(), &[1, 1]);
    assert_pass(&h.validate(&tol()));
}

#[test]
fn perturbation_is_detected() {
    let b = Arc::new(FellBundle::<f64>::group_bundle(&FiniteGroup::cyclic(3).unwrap()));
    let x = HilbertBundle::trivial(b);
    let mut semi = x.semi().clone();
    let mut d = Matrix::zeros(1, 1);
    d[(0, 0)] = c(1e-3, 0.0);
    semi.perturb_inner(0, 1, 0, &d);
    assert!(semi.validate(&tol()).failed("hermitian_symmetry"));
    let mut semi = x.semi().clone();
    semi.perturb_right(1, 1, 0, &d);
    assert!(!semi.validate(&tol()).passed());
}

#[test]
fn regularize_and_sum() {
    let sys = swap_system();
    let x = HilbertBundle::l2(Arc::new(sys.bundle()));
    let r = x.regularize(3);
    assert_eq!(r.dims(), &[12, 12]);
    assert_pass(&r.validate(&tol()));
    let s = x.direct_sum(&HilbertBundle::trivial(x.base().clone())).unwrap();
    assert_eq!(s.dims(), &[6, 6]);
    assert_pass(&s.validate(&tol()));
}

#[test]
fn restriction_and_unitaries() {
    let sys = swap_system();
    let b = Arc::new(sys.bundle());
    let x = HilbertBundle::trivial(b.clone());
    let s = x.direct_sum(&x).unwrap();
    // first summand
    let spans: Vec<Matrix<f64>> = (0..2).map(|_| Matrix::vstack(&[Matrix::identity(2), Matrix::zeros(2, 2)])).collect();
    let (sub, q) = s.restrict(&spans, &tol()).unwrap();
    assert_pass(&sub.validate(&tol()));
    let u: Vec<Matrix<f64>> = q.iter().map(|p| p.q.matmul(&spans[0])).collect();
    assert_pass(&x.check_unitary_bundle_map(&sub, &u, &tol()).unwrap());
    // a non-invariant span
    let mut v = Matrix::zeros(4, 1);
    v[(0, 0)] = c(1.0, 0.0);
    v[(1, 0)] = c(1.0, 0.0);
    assert!(s.restrict(&[v.clone(), v], &tol()).is_err());
    let half: Vec<Matrix<f64>> = (0..2).map(|_| Matrix::identity(2).scale_real(0.5)).collect();
    assert!(x.check_unitary_bundle_map(&x, &half, &tol()).unwrap().failed("isometry"));
}
