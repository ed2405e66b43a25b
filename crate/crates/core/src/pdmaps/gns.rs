use super::BundleMap;
use crate::actions::{Action, HilbertRef};
use crate::error::{Error, Result};
use crate::hilbundles::SemiInnerBundle;
use crate::numerics::{Matrix, Tolerance};
use crate::scalar::{czero, Real, C};
use std::sync::Arc;

/// Hilbert bundle, action and cyclic vector reproducing a positive definite map.
#[derive(Debug, Clone)]
pub struct GnsTriple<T> {
    pub bundle: HilbertRef<T>,
    pub action: Action<T>,
    pub xi: Vec<C<T>>,
    /// fiber dimensions before separation
    pub raw_dims: Vec<usize>,
}

impl<T: Real> GnsTriple<T> {
    /// max over g and basis a of A_g of ||T_g(a) - <xi, rho(a) xi>|| in the ambient operator norm.
    pub fn round_trip_residual(&self, t: &BundleMap<T>) -> Result<T> {
        let back = self.action.coefficient_map(&self.xi, None)?;
        let src = t.source();
        let mut worst = T::zero();
        for g in src.group().elements() {
            let pg = t.phi().apply(g);
            for i in 0..src.dim(g) {
                let d = &t.block(g).col(i).iter().zip(back.block(g).col(i)).map(|(a, b)| *a - b).collect::<Vec<_>>();
                worst = worst.max(t.target().element(pg, d).op_norm());
            }
        }
        Ok(worst)
    }
}

impl<T: Real> BundleMap<T> {
    /// Gelfand-Raikov construction. Over r the pre-space is the sum over k of
    /// A_k (x) B_{phi(k)^-1 r} with [a (.) b, a' (.) b'] = b* T(a* a') b'; it is separated
    /// through the trace-localized Gram.
    pub fn gelfand_raikov(&self, tol: &Tolerance<T>) -> Result<GnsTriple<T>> {
        let a = self.source.clone();
        let b = self.target.clone();
        let (ua, ub) = match (a.unit_coords(), b.unit_coords()) {
            (Some(x), Some(y)) if a.is_unital() && b.is_unital() => (x, y),
            _ => return Err(Error::NotUnital),
        };
        let cert = self.pd_check_exact(tol)?;
        if !cert.passed {
            return Err(Error::NotPositiveDefinite { margin: cert.margin.to_f64_lossy() });
        }
        let grp = a.group().clone();
        let hgrp = b.group().clone();
        let phi = &self.phi;
        // component of k in the pre-space over r lives in A_k (x) B_{phi(k)^-1 r}
        let bfib = |k: usize, r: usize| hgrp.mul(hgrp.inv(phi.apply(k)), r);
        let mut offs = vec![vec![0usize; grp.order()]; hgrp.order()];
        let mut dims = vec![0usize; hgrp.order()];
        for r in hgrp.elements() {
            for k in grp.elements() {
                offs[r][k] = dims[r];
                dims[r] += a.dim(k) * b.dim(bfib(k, r));
            }
        }
        let right: Vec<Vec<Vec<Matrix<T>>>> = hgrp
            .elements()
            .map(|r| {
                let rh_of = |h: usize| hgrp.mul(r, h);
                hgrp.elements()
                    .map(|h| {
                        let rh = rh_of(h);
                        b.fiber(h)
                            .basis()
                            .iter()
                            .map(|f| {
                                let mut m = Matrix::zeros(dims[rh], dims[r]);
                                for k in grp.elements() {
                                    let blk = Matrix::identity(a.dim(k)).kron(&b.right_mult(h, f, bfib(k, r)));
                                    m.set_block(offs[rh][k], offs[r][k], &blk);
                                }
                                m
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        // T(e_i* e_i') for basis elements of A_k and A_k'
        let tp: Vec<Vec<Vec<Vec<Matrix<T>>>>> = grp
            .elements()
            .map(|k| {
                grp.elements()
                    .map(|k2| {
                        let f = grp.mul(grp.inv(k), k2);
                        a.fiber(k)
                            .basis()
                            .iter()
                            .map(|e| {
                                let es = e.adjoint();
                                a.fiber(k2).basis().iter().map(|e2| self.apply(f, &es.matmul(e2))).collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut inner: Vec<Vec<Vec<Matrix<T>>>> = Vec::new();
        for r in hgrp.elements() {
            let mut per_s = Vec::new();
            for s in hgrp.elements() {
                let f = hgrp.mul(hgrp.inv(r), s);
                let mut ms = vec![Matrix::zeros(dims[r], dims[s]); b.dim(f)];
                for k in grp.elements() {
                    let bk = b.fiber(bfib(k, r)).basis();
                    for k2 in grp.elements() {
                        let bk2 = b.fiber(bfib(k2, s)).basis();
                        for i in 0..a.dim(k) {
                            for (j, fj) in bk.iter().enumerate() {
                                let left = fj.adjoint();
                                for i2 in 0..a.dim(k2) {
                                    let mid = left.matmul(&tp[k][k2][i][i2]);
                                    for (j2, fj2) in bk2.iter().enumerate() {
                                        let cs = b.coords(f, &mid.matmul(fj2));
                                        let row = offs[r][k] + i * bk.len() + j;
                                        let col = offs[s][k2] + i2 * bk2.len() + j2;
                                        for (m, z) in cs.into_iter().enumerate() {
                                            ms[m][(row, col)] = z;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                per_s.push(ms);
            }
            inner.push(per_s);
        }
        let semi = SemiInnerBundle::new(b.clone(), dims.clone(), right, inner)?;
        let (bundle, quot) = semi.separate_unchecked(tol)?;
        let bundle = Arc::new(bundle);
        let ops = grp
            .elements()
            .map(|g| {
                let pg = phi.apply(g);
                hgrp.elements()
                    .map(|r| {
                        let pr = hgrp.mul(pg, r);
                        a.fiber(g)
                            .basis()
                            .iter()
                            .map(|el| {
                                let mut m = Matrix::zeros(dims[pr], dims[r]);
                                for k in grp.elements() {
                                    let gk = grp.mul(g, k);
                                    let blk = a.left_mult(g, el, k).kron(&Matrix::identity(b.dim(bfib(k, r))));
                                    m.set_block(offs[pr][gk], offs[r][k], &blk);
                                }
                                quot[pr].q.matmul(&m).matmul(&quot[r].lift)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let action = Action::new(a.clone(), phi.clone(), bundle.clone(), ops)?;
        let e = grp.identity();
        let he = hgrp.identity();
        let mut xi0 = vec![czero(); dims[he]];
        let nb = b.dim(bfib(e, he));
        for (i, &x) in ua.iter().enumerate() {
            for (j, &y) in ub.iter().enumerate() {
                xi0[offs[he][e] + i * nb + j] = x * y;
            }
        }
        let xi = quot[he].q.matvec(&xi0);
        Ok(GnsTriple { bundle, action, xi, raw_dims: dims })
    }
}
