mod common;

use common::*;
use fellbundle::crosssec::matrix_alg_psd;
use fellbundle::formats::SectionDoc;
use fellbundle::numerics::{hermitian_eigvals, kron, psd_check};
use fellbundle::random::Rng;
use fellbundle::*;
use proptest::prelude::*;
use std::sync::Arc;

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn pick(i: usize) -> BundleRef<f64> {
    let z = zoo();
    z[i % z.len()].1.clone()
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).max_abs() / (1.0 + a.max_abs().max(b.max_abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectrum_is_unitarily_invariant(n in 1usize..9, seed in any::<u64>()) {
        let mut rng = Rng::seeded(seed);
        let h: CMatrix = rng.hermitian(n);
        let u: CMatrix = rng.unitary(n);
        let a = sorted(hermitian_eigvals(&h, &tol()).unwrap());
        let b = sorted(hermitian_eigvals(&u.matmul(&h).matmul(&u.adjoint()), &tol()).unwrap());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        // the trace is the sum of the eigenvalues
        prop_assert!((a.iter().sum::<f64>() - h.trace().re).abs() < 1e-10);
    }

    #[test]
    fn kron_mixed_product(p in 1usize..4, q in 1usize..4, seed in any::<u64>()) {
        let mut rng = Rng::seeded(seed);
        let (a, c): (CMatrix, CMatrix) = (rng.matrix(p, p), rng.matrix(p, p));
        let (b, d): (CMatrix, CMatrix) = (rng.matrix(q, q), rng.matrix(q, q));
        let lhs = kron(&a, &b).matmul(&kron(&c, &d));
        let rhs = kron(&a.matmul(&c), &b.matmul(&d));
        prop_assert!(rel(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn cstar_identity(i in 0usize..7, seed in any::<u64>()) {
        let b = pick(i);
        let reg = RegRep::new(b.clone());
        let f = Section::random(b.clone(), &mut Rng::seeded(seed));
        let n = reg.cstar_norm(&f);
        let nn = reg.cstar_norm(&f.star().unwrap().convolve(&f).unwrap());
        prop_assert!((nn - n * n).abs() <= 1e-10 * (1.0 + n * n));
    }

    #[test]
    fn convolution_is_an_associative_star_algebra(i in 0usize..7, seed in any::<u64>()) {
        let b = pick(i);
        let mut rng = Rng::seeded(seed);
        let (f, g, h) = (Section::random(b.clone(), &mut rng), Section::random(b.clone(), &mut rng), Section::random(b.clone(), &mut rng));
        let l = f.convolve(&g).unwrap().convolve(&h).unwrap();
        let r = f.convolve(&g.convolve(&h).unwrap()).unwrap();
        prop_assert!(l.distance(&r) < 1e-10);
        let s1 = f.convolve(&g).unwrap().star().unwrap();
        let s2 = g.star().unwrap().convolve(&f.star().unwrap()).unwrap();
        prop_assert!(s1.distance(&s2) < 1e-10);
        prop_assert!(f.star().unwrap().star().unwrap().distance(&f) < 1e-14);
        // the regular representation is multiplicative
        let reg = RegRep::new(b.clone());
        let m = reg.rep_matrix(&f.convolve(&g).unwrap());
        prop_assert!(rel(&m, &reg.rep_matrix(&f).matmul(&reg.rep_matrix(&g))) < 1e-10);
    }

    #[test]
    fn exact_and_sampled_never_disagree(n in 2usize..7, seed in any::<u64>()) {
        let mut rng = Rng::seeded(seed);
        let b = group_bundle(FiniteGroup::cyclic(n).unwrap());
        let mut f = vec![C64::new(0.0, 0.0); n];
        f[0] = C64::new(1.0 + rng.unit(), 0.0);
        for k in 1..n {
            if k < n - k {
                f[k] = rng.complex();
                f[n - k] = f[k].conj();
            } else if k == n - k {
                f[k] = C64::new(rng.unit(), 0.0);
            }
        }
        let t = BundleMap::multiplier(b, &f).unwrap();
        let exact = t.pd_check_exact(&tol()).unwrap();
        let sampled = t.pd_check_sampled(200, seed, &tol());
        if exact.passed {
            prop_assert!(sampled.passed);
        }
        if !sampled.passed {
            prop_assert!(!exact.passed);
        }
    }

    #[test]
    fn coefficient_maps_are_positive_definite(i in 0usize..6, seed in any::<u64>()) {
        let b = pick(i);
        let mut rng = Rng::seeded(seed);
        let act = if seed % 2 == 0 { Action::trivial(b.clone()) } else { Action::l2(b.clone()) };
        let x = rng.cvec(act.target().dim(0));
        let t = act.coefficient_map(&x, None).unwrap();
        prop_assert!(t.pd_check_exact(&tol()).unwrap().passed);
        prop_assert!(t.choi_check(&tol()).unwrap().psd);
        prop_assert!(t.pd_check_sampled(50, seed, &tol()).passed);
    }

    #[test]
    fn cauchy_schwarz(i in 0usize..7, seed in any::<u64>()) {
        let b = pick(i);
        let x = HilbertBundle::l2(b.clone());
        let mut rng = Rng::seeded(seed);
        let grp = b.group().clone();
        let (r, s) = (rng.below(grp.order()), rng.below(grp.order()));
        let u = rng.cvec(x.dim(r));
        let v = rng.cvec(x.dim(s));
        let ip = x.inner_elem(r, &u, s, &v);
        let lhs = ip.adjoint().matmul(&ip);
        let rhs = x.inner_elem(s, &v, s, &v).scale_real(x.inner_elem(r, &u, r, &u).op_norm());
        let d = &rhs - &lhs;
        let rep = psd_check(&d.hermitian_part(), &tol()).unwrap();
        prop_assert!(rep.psd, "margin {}", rep.margin);
    }

    #[test]
    fn gram_of_vectors_is_positive_in_matrix_algebra(i in 0usize..7, len in 1usize..4, seed in any::<u64>()) {
        let b = pick(i);
        let x = HilbertBundle::l2(b.clone());
        let mut rng = Rng::seeded(seed);
        let hs: Vec<usize> = (0..len).map(|_| rng.below(b.group().order())).collect();
        let xs: Vec<Vec<C64>> = hs.iter().map(|&h| rng.cvec(x.dim(h))).collect();
        let blocks: Vec<Vec<CMatrix>> = (0..len)
            .map(|p| (0..len).map(|q| x.inner_elem(hs[p], &xs[p], hs[q], &xs[q])).collect())
            .collect();
        let rep = matrix_alg_psd(&b, &hs, &blocks, &tol()).unwrap();
        prop_assert!(rep.psd, "margin {}", rep.margin);
    }

    #[test]
    fn separation_is_idempotent(i in 0usize..7) {
        let b = pick(i);
        let x = HilbertBundle::trivial(b.clone());
        // X (+) X with <(x1, x2), (y1, y2)> = <x1 + x2, y1 + y2>
        let ones = Matrix::from_fn(2, 2, |_, _| C64::new(1.0, 0.0));
        let id2: CMatrix = Matrix::identity(2);
        let grp = b.group().clone();
        let right = grp.elements().map(|r| grp.elements().map(|h| (0..b.dim(h)).map(|k| kron(&id2, x.right_tensor(r, h, k))).collect()).collect()).collect();
        let inner = grp.elements().map(|r| grp.elements().map(|s| {
            let f = grp.mul(grp.inv(r), s);
            (0..b.dim(f)).map(|k| kron(&ones, x.inner_tensor(r, s, k))).collect()
        }).collect()).collect();
        let dims: Vec<usize> = x.dims().iter().map(|d| 2 * d).collect();
        let semi = SemiInnerBundle::new(b.clone(), dims, right, inner).unwrap();
        prop_assert!(semi.validate(&tol()).passed());
        let (h, _) = semi.separate(&tol()).unwrap();
        prop_assert_eq!(h.dims(), x.dims());
        prop_assert!(h.validate(&tol()).passed());
        let (h2, q) = h.semi().separate(&tol()).unwrap();
        prop_assert_eq!(h2.dims(), h.dims());
        for (r, qr) in q.iter().enumerate() {
            prop_assert_eq!(qr.q.rows(), h.dim(r));
        }
    }

    #[test]
    fn sections_survive_serialization(i in 0usize..7, seed in any::<u64>()) {
        let b = pick(i);
        let f = Section::random(b.clone(), &mut Rng::seeded(seed));
        let s = serde_json::to_string(&SectionDoc::from_section(&f)).unwrap();
        let back = serde_json::from_str::<SectionDoc>(&s).unwrap().build(b.clone()).unwrap();
        prop_assert_eq!(back.distance(&f), 0.0);
        prop_assert_eq!(Section::from_vector(b.clone(), &f.to_vector()).distance(&f), 0.0);
    }

    #[test]
    fn action_inequalities(i in 0usize..7, seed in any::<u64>()) {
        let b = pick(i);
        let act = Action::l2(b.clone());
        let mut rng = Rng::seeded(seed);
        let n = b.group().order();
        let g = rng.below(n);
        let h = rng.below(n);
        let a = rng.cvec(b.dim(g));
        let x = rng.cvec(act.target().dim(h));
        prop_assert!(act.norm_bound_slack(g, &a, h, &x) <= 1e-9);
        let hs: Vec<usize> = (0..3).map(|_| rng.below(n)).collect();
        let xs: Vec<Vec<C64>> = hs.iter().map(|&k| rng.cvec(act.target().dim(k))).collect();
        prop_assert!(act.gram_domination_margin(g, &a, &hs, &xs, &tol()).unwrap() >= -1e-9);
    }

    #[test]
    fn correspondence_module_identities(i in 0usize..7, seed in any::<u64>()) {
        let b = pick(i);
        let act = Action::trivial(b.clone());
        let y = Correspondence::build(act.target().clone(), &tol()).unwrap().attach_left_action(act, &tol()).unwrap();
        prop_assert!(y.validate(4, seed, &tol()).passed());
        let mut rng = Rng::seeded(seed);
        let k = rng.below(b.group().order());
        let xk = rng.cvec(b.dim(k));
        let want = if b.dim(k) == 0 { 0.0 } else { b.element(k, &xk).op_norm() };
        prop_assert!((y.norm(&y.single(k, &xk)) - want).abs() <= 1e-10 * (1.0 + want));
    }
}

#[test]
fn f32_instantiation() {
    let b: Arc<FellBundle<f32>> = Arc::new(FellBundle::group_bundle(&FiniteGroup::cyclic(3).unwrap()));
    let t = BundleMap::identity(b.clone());
    let tol32 = Tolerance::<f32>::standard();
    assert!(t.pd_check_exact(&tol32).unwrap().passed);
    assert!(b.validate(&tol32).passed());
}
