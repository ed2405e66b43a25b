use super::Correspondence;
use crate::actions::Action;
use crate::bundles::BundleRef;
use crate::crosssec::{RegRep, Section};
use crate::error::{Error, Result};
use crate::groups::GroupHom;
use crate::hilbundles::HilbertBundle;
use crate::numerics::{span_rank, Matrix, MatrixSubspace, Tolerance};
use crate::random::Rng;
use crate::report::{AxiomReport, Worst};
use crate::scalar::{czero, Real, C};
use std::sync::Arc;

/// Concrete equivalence data between bundles over the same group: X_g inside M_{p x q}, with
/// the left bundle in M_p, the right one in M_q, A<x, y> = x y* and <x, y>_B = x* y.
#[derive(Debug, Clone)]
pub struct EquivalenceBundle<T> {
    left: BundleRef<T>,
    right: BundleRef<T>,
    spaces: Vec<MatrixSubspace<T>>,
}

impl<T: Real> EquivalenceBundle<T> {
    pub fn concrete(left: BundleRef<T>, right: BundleRef<T>, fibers: &[Vec<Matrix<T>>], tol: &Tolerance<T>) -> Result<Self> {
        if left.group() != right.group() {
            return Err(Error::BundleMismatch);
        }
        if fibers.len() != left.group().order() {
            return Err(Error::SizeMismatch("one fiber per group element".into()));
        }
        let (p, q) = (left.ambient_dim(), right.ambient_dim());
        if let Some(m) = fibers.iter().flatten().find(|m| m.shape() != (p, q)) {
            return Err(Error::ShapeMismatch(format!("fiber element of shape {:?}, expected {p}x{q}", m.shape())));
        }
        let spaces = fibers.iter().map(|f| MatrixSubspace::from_spanning(p, q, f, tol)).collect();
        Ok(EquivalenceBundle { left, right, spaces })
    }

    /// A unital bundle as an equivalence between itself and itself.
    pub fn identity(b: BundleRef<T>, tol: &Tolerance<T>) -> Result<Self> {
        let fibers: Vec<Vec<Matrix<T>>> = b.fibers().iter().map(|f| f.basis().to_vec()).collect();
        Self::concrete(b.clone(), b, &fibers, tol)
    }

    pub fn left(&self) -> &BundleRef<T> {
        &self.left
    }

    pub fn right(&self) -> &BundleRef<T> {
        &self.right
    }

    pub fn fiber(&self, g: usize) -> &MatrixSubspace<T> {
        &self.spaces[g]
    }

    fn fibers(&self) -> Vec<Vec<Matrix<T>>> {
        self.spaces.iter().map(|s| s.basis().to_vec()).collect()
    }

    /// Right Hilbert bundle over the right coefficients.
    pub fn right_bundle(&self, tol: &Tolerance<T>) -> Result<HilbertBundle<T>> {
        HilbertBundle::concrete(self.right.clone(), self.left.ambient_dim(), &self.fibers(), tol)
    }

    /// The left structure as a right Hilbert bundle: fiber g is (X_{g^-1})*.
    pub fn left_bundle(&self, tol: &Tolerance<T>) -> Result<HilbertBundle<T>> {
        let grp = self.left.group();
        let fibers: Vec<Vec<Matrix<T>>> =
            grp.elements().map(|g| self.spaces[grp.inv(g)].basis().iter().map(|x| x.adjoint()).collect()).collect();
        HilbertBundle::concrete(self.left.clone(), self.right.ambient_dim(), &fibers, tol)
    }

    /// Left multiplication as an action on the right Hilbert bundle.
    pub fn left_action(&self, bundle: Arc<HilbertBundle<T>>, tol: &Tolerance<T>) -> Result<Action<T>> {
        let grp = self.left.group();
        let mut ops = Vec::new();
        for g in grp.elements() {
            let mut per_h = Vec::new();
            for h in grp.elements() {
                let gh = grp.mul(g, h);
                let mut list = Vec::new();
                for a in self.left.fiber(g).basis() {
                    let mut cols = Vec::new();
                    for x in self.spaces[h].basis() {
                        let ax = a.matmul(x);
                        if !self.spaces[gh].contains_scaled(&ax, T::one() + ax.max_abs(), tol) {
                            return Err(Error::NotModule(format!("A_{g} X_{h} is not contained in X_{gh}")));
                        }
                        cols.push(self.spaces[gh].coords(&ax));
                    }
                    list.push(Matrix::from_columns(self.spaces[gh].dim(), &cols));
                }
                per_h.push(list);
            }
            ops.push(per_h);
        }
        Action::new(self.left.clone(), GroupHom::identity(grp), bundle, ops)
    }

    /// Left inner product on Y with values in sections of the left bundle:
    /// (h) = sum_k A<xi(hk), eta(k)>.
    pub fn left_inner(&self, y: &Correspondence<T>, xi: &[C<T>], eta: &[C<T>]) -> Section<T> {
        let grp = self.left.group();
        let mut coeffs: Vec<Vec<C<T>>> = self.left.dims().into_iter().map(|d| vec![czero(); d]).collect();
        for h in grp.elements() {
            let mut acc = Matrix::zeros(self.left.ambient_dim(), self.left.ambient_dim());
            for k in grp.elements() {
                let hk = grp.mul(h, k);
                let x = self.spaces[hk].element(y.part(xi, hk));
                let z = self.spaces[k].element(y.part(eta, k));
                acc = &acc + &x.matmul(&z.adjoint());
            }
            coeffs[h] = self.left.coords(h, &acc);
        }
        Section::new(self.left.clone(), coeffs).expect("shapes follow the bundle")
    }

    /// span of <X_r, X_{rf}>_B over r equals B_f, and span of A<X_{fr}, X_r> equals A_f.
    fn fullness(&self, tol: &Tolerance<T>) -> (bool, bool) {
        let grp = self.left.group();
        let mut right_ok = true;
        let mut left_ok = true;
        for f in grp.elements() {
            let mut rv = Vec::new();
            let mut lv = Vec::new();
            for r in grp.elements() {
                let rf = grp.mul(r, f);
                let fr = grp.mul(f, r);
                for x in self.spaces[r].basis() {
                    for y in self.spaces[rf].basis() {
                        rv.push(self.right.coords(f, &x.adjoint().matmul(y)));
                    }
                }
                for x in self.spaces[fr].basis() {
                    for y in self.spaces[r].basis() {
                        lv.push(self.left.coords(f, &x.matmul(&y.adjoint())));
                    }
                }
            }
            right_ok &= span_rank(&rv, tol) == self.right.dim(f);
            left_ok &= span_rank(&lv, tol) == self.left.dim(f);
        }
        (left_ok, right_ok)
    }

    /// Both one-sided structures, compatibility, fullness, the imprimitivity identity on Y and
    /// equality of the two norms of random vectors.
    pub fn verify_imprimitivity(&self, samples: usize, seed: u64, tol: &Tolerance<T>) -> AxiomReport {
        let mut rep = AxiomReport::new("imprimitivity");
        let right = self.right_bundle(tol);
        let left = self.left_bundle(tol);
        rep.flag("right_module", right.as_ref().map(|b| b.validate(tol).passed()).unwrap_or(false), "");
        rep.flag("left_module", left.as_ref().map(|b| b.validate(tol).passed()).unwrap_or(false), "");
        let grp = self.left.group();
        let mut compat = Worst::new();
        for g in grp.elements() {
            for h in grp.elements() {
                for k in grp.elements() {
                    for x in self.spaces[g].basis() {
                        for y in self.spaces[h].basis() {
                            let l = x.matmul(&y.adjoint());
                            for z in self.spaces[k].basis() {
                                let lhs = l.matmul(z);
                                let rhs = x.matmul(&y.adjoint().matmul(z));
                                compat.see((&lhs - &rhs).max_abs() / (T::one() + lhs.max_abs()));
                            }
                        }
                    }
                }
            }
        }
        rep.residual("compatibility", compat.0, tol.rel_eq);
        let (lf, rf) = self.fullness(tol);
        rep.flag("left_fullness", lf, "");
        rep.flag("right_fullness", rf, "");
        let Ok(right) = right else {
            return rep;
        };
        let bundle = Arc::new(right);
        let action = match self.left_action(bundle.clone(), tol) {
            Ok(a) => a,
            Err(e) => {
                rep.flag("left_action", false, e.to_string());
                return rep;
            }
        };
        let y = match Correspondence::build_unchecked(bundle).attach_left_action(action, tol) {
            Ok(y) => y,
            Err(e) => {
                rep.flag("left_action", false, e.to_string());
                return rep;
            }
        };
        rep.flag("left_action", true, "");
        let reg_a = RegRep::new(self.left.clone());
        let reg_b = RegRep::new(self.right.clone());
        let mut rng = Rng::seeded(seed);
        let mut ident = Worst::new();
        let mut norms = Worst::new();
        for _ in 0..samples {
            let f = y.random(&mut rng);
            let g = y.random(&mut rng);
            let h = y.random(&mut rng);
            let lhs = y.left_act(&self.left_inner(&y, &f, &g), &h).unwrap();
            let rhs = y.right_act(&f, &y.inner(&g, &h)).unwrap();
            let diff: T = lhs.iter().zip(&rhs).map(|(a, b)| (*a - b).norm()).fold(T::zero(), T::max);
            let scale = T::one() + lhs.iter().chain(&rhs).map(|z| z.norm()).fold(T::zero(), T::max);
            ident.see(diff / scale);
            let na = reg_a.cstar_norm(&self.left_inner(&y, &f, &f));
            let nb = reg_b.cstar_norm(&y.inner(&f, &f));
            norms.see((na - nb).abs() / T::one().max(na.max(nb)));
        }
        rep.residual("imprimitivity_identity", ident.0, tol.rel_eq);
        // the two norms agree to the PSD tolerance: both come from eigenvalue computations
        rep.residual("norm_equality", norms.0, tol.rel_psd);
        rep
    }
}
