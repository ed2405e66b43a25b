use super::{HilbertBundle, HilbertModule, SemiInnerBundle};
use crate::bundles::{BundleRef, CondExpectation, DynamicalSystem};
use crate::error::{Error, Result};
use crate::numerics::{Matrix, MatrixSubspace, Tolerance};
use crate::scalar::{Real, C};

type Tensors<T> = Vec<Vec<Vec<Matrix<T>>>>;

fn columns<T: Real>(rows: usize, cols: Vec<Vec<C<T>>>) -> Matrix<T> {
    Matrix::from_columns(rows, &cols)
}

impl<T: Real> HilbertBundle<T> {
    /// The bundle acting on itself: X_r = B_r, <x, y> = x* y.
    pub fn trivial(base: BundleRef<T>) -> Self {
        let grp = base.group().clone();
        let dims = base.dims();
        let right: Tensors<T> = grp
            .elements()
            .map(|r| grp.elements().map(|h| base.fiber(h).basis().iter().map(|b| base.right_mult(h, b, r)).collect()).collect())
            .collect();
        let inner: Tensors<T> = grp
            .elements()
            .map(|r| {
                grp.elements()
                    .map(|s| {
                        let f = grp.mul(grp.inv(r), s);
                        let prods: Vec<Vec<Vec<C<T>>>> = base
                            .fiber(r)
                            .basis()
                            .iter()
                            .map(|x| base.fiber(s).basis().iter().map(|y| base.coords(f, &x.adjoint().matmul(y))).collect())
                            .collect();
                        (0..base.dim(f))
                            .map(|k| Matrix::from_fn(dims[r], dims[s], |i, j| prods[i][j][k]))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let semi = SemiInnerBundle::new(base, dims, right, inner).expect("shapes follow the base bundle");
        HilbertBundle(semi)
    }

    /// Fibers X_r inside M_{p x N} (N the ambient size of the base) with matrix products for
    /// the right action and <x, y> = x* y. Fails with NotModule if a product leaves its fiber.
    pub fn concrete(base: BundleRef<T>, p: usize, fibers: &[Vec<Matrix<T>>], tol: &Tolerance<T>) -> Result<Self> {
        let grp = base.group().clone();
        let n = base.ambient_dim();
        if fibers.len() != grp.order() {
            return Err(Error::SizeMismatch(format!("{} fibers for a group of order {}", fibers.len(), grp.order())));
        }
        if let Some(m) = fibers.iter().flatten().find(|m| m.shape() != (p, n)) {
            return Err(Error::ShapeMismatch(format!("module element of shape {:?}, expected {p}x{n}", m.shape())));
        }
        let spaces: Vec<MatrixSubspace<T>> = fibers.iter().map(|f| MatrixSubspace::from_spanning(p, n, f, tol)).collect();
        let dims: Vec<usize> = spaces.iter().map(|s| s.dim()).collect();
        let mut right: Tensors<T> = Vec::new();
        let mut inner: Tensors<T> = Vec::new();
        for r in grp.elements() {
            let mut rr = Vec::new();
            let mut ir = Vec::new();
            for h in grp.elements() {
                let rh = grp.mul(r, h);
                let mut ops = Vec::new();
                for b in base.fiber(h).basis() {
                    let mut cols = Vec::new();
                    for x in spaces[r].basis() {
                        let xb = x.matmul(b);
                        if !spaces[rh].contains_scaled(&xb, T::one() + xb.max_abs(), tol) {
                            return Err(Error::NotModule(format!("X_{r} B_{h} is not contained in X_{rh}")));
                        }
                        cols.push(spaces[rh].coords(&xb));
                    }
                    ops.push(columns(dims[rh], cols));
                }
                rr.push(ops);
                let s = h;
                let f = grp.mul(grp.inv(r), s);
                let mut prods = Vec::new();
                for x in spaces[r].basis() {
                    let mut row = Vec::new();
                    for y in spaces[s].basis() {
                        let ip = x.adjoint().matmul(y);
                        if !base.fiber(f).contains_scaled(&ip, T::one() + ip.max_abs(), tol) {
                            return Err(Error::NotModule(format!("<X_{r}, X_{s}> is not contained in B_{f}")));
                        }
                        row.push(base.coords(f, &ip));
                    }
                    prods.push(row);
                }
                ir.push((0..base.dim(f)).map(|k| Matrix::from_fn(dims[r], dims[s], |i, j| prods[i][j][k])).collect());
            }
            right.push(rr);
            inner.push(ir);
        }
        Ok(HilbertBundle(SemiInnerBundle::new(base, dims, right, inner)?))
    }

    /// X_r replaced by the direct sum of `copies` copies of itself.
    pub fn regularize(&self, copies: usize) -> Self {
        let id = Matrix::identity(copies);
        let grp = self.group();
        let map = |t: &Tensors<T>| -> Tensors<T> {
            grp.elements()
                .map(|r| grp.elements().map(|h| t[r][h].iter().map(|m| id.kron(m)).collect()).collect())
                .collect()
        };
        let dims = self.dims.iter().map(|d| d * copies).collect();
        HilbertBundle(SemiInnerBundle {
            base: self.base.clone(),
            dims,
            right: map(&self.right),
            inner: map(&self.inner),
        })
    }

    /// The l2 bundle: fiber r is the direct sum of all B_t, (xi b)(t) = xi(t s^-1) b for b in B_s,
    /// and <xi, eta> = sum_t xi(t r)* eta(t s) for xi in fiber r, eta in fiber s.
    pub fn l2(base: BundleRef<T>) -> Self {
        let grp = base.group().clone();
        let bd = base.dims();
        let total: usize = bd.iter().sum();
        let offs: Vec<usize> = bd.iter().scan(0, |acc, d| {
            let o = *acc;
            *acc += d;
            Some(o)
        }).collect();
        let right_s: Vec<Vec<Matrix<T>>> = grp
            .elements()
            .map(|s| {
                let si = grp.inv(s);
                base.fiber(s)
                    .basis()
                    .iter()
                    .map(|b| {
                        let mut m = Matrix::zeros(total, total);
                        for t in grp.elements() {
                            let u = grp.mul(t, si);
                            m.set_block(offs[t], offs[u], &base.right_mult(s, b, u));
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        let right: Tensors<T> = grp.elements().map(|_| right_s.clone()).collect();
        let inner: Tensors<T> = grp
            .elements()
            .map(|r| {
                let ri = grp.inv(r);
                grp.elements()
                    .map(|s| {
                        let f = grp.mul(ri, s);
                        let mut ms = vec![Matrix::zeros(total, total); base.dim(f)];
                        for u in grp.elements() {
                            let v = grp.mul(grp.mul(u, ri), s);
                            for (i, x) in base.fiber(u).basis().iter().enumerate() {
                                for (j, y) in base.fiber(v).basis().iter().enumerate() {
                                    let cs = base.coords(f, &x.adjoint().matmul(y));
                                    for (k, z) in cs.into_iter().enumerate() {
                                        ms[k][(offs[u] + i, offs[v] + j)] = z;
                                    }
                                }
                            }
                        }
                        ms
                    })
                    .collect()
            })
            .collect();
        let dims = vec![total; grp.order()];
        HilbertBundle(SemiInnerBundle::new(base, dims, right, inner).expect("shapes follow the base bundle"))
    }

    /// Bundle X x G over the bundle of a dynamical system (B, G, beta), for a Hilbert module X
    /// over B: (x, g)(a, h) = (x beta_g(a), gh) and <(x, g), (y, h)> = (beta_{g^-1}(x* y), g^-1 h).
    /// `base` must be the bundle of `sys`.
    pub fn from_dynsys(module: &HilbertModule<T>, sys: &DynamicalSystem<T>, base: BundleRef<T>, tol: &Tolerance<T>) -> Result<Self> {
        if base.group() != sys.group() || base.ambient_dim() != sys.ambient_dim() {
            return Err(Error::BundleMismatch);
        }
        if !module.algebra().span_equal(sys.algebra(), tol) {
            return Err(Error::NotModule("module coefficient algebra differs from the system algebra".into()));
        }
        let grp = sys.group().clone();
        let d = module.dim();
        let xs = module.space().basis();
        // algebra elements underlying each base basis vector
        let under: Vec<Vec<Matrix<T>>> = grp
            .elements()
            .map(|h| base.fiber(h).basis().iter().map(|e| sys.decompose(h, e)).collect())
            .collect();
        let right: Tensors<T> = grp
            .elements()
            .map(|g| {
                grp.elements()
                    .map(|h| {
                        under[h]
                            .iter()
                            .map(|a| {
                                let ba = sys.apply(g, a);
                                columns(d, xs.iter().map(|x| module.coords(&x.matmul(&ba))).collect())
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let inner: Tensors<T> = grp
            .elements()
            .map(|g| {
                let gi = grp.inv(g);
                grp.elements()
                    .map(|h| {
                        let f = grp.mul(gi, h);
                        let prods: Vec<Vec<Vec<C<T>>>> = xs
                            .iter()
                            .map(|x| {
                                xs.iter()
                                    .map(|y| {
                                        let a = sys.apply(gi, &module.inner(x, y));
                                        base.coords(f, &sys.element(&a, f))
                                    })
                                    .collect()
                            })
                            .collect();
                        (0..base.dim(f)).map(|k| Matrix::from_fn(d, d, |i, j| prods[i][j][k])).collect()
                    })
                    .collect()
            })
            .collect();
        Ok(HilbertBundle(SemiInnerBundle::new(base, vec![d; grp.order()], right, inner)?))
    }
}

impl<T: Real> SemiInnerBundle<T> {
    /// X_r = A_r over the sub-bundle, right action by multiplication and <x, y> = E(x* y).
    pub fn from_condexp(e: &CondExpectation<T>) -> Self {
        let sup = &e.sup;
        let sub = &e.sub;
        let grp = sup.group().clone();
        let dims = sup.dims();
        let right: Tensors<T> = grp
            .elements()
            .map(|r| grp.elements().map(|h| sub.fiber(h).basis().iter().map(|b| sup.right_mult(h, b, r)).collect()).collect())
            .collect();
        let inner: Tensors<T> = grp
            .elements()
            .map(|r| {
                grp.elements()
                    .map(|s| {
                        let f = grp.mul(grp.inv(r), s);
                        let prods: Vec<Vec<Vec<C<T>>>> = sup
                            .fiber(r)
                            .basis()
                            .iter()
                            .map(|x| {
                                sup.fiber(s)
                                    .basis()
                                    .iter()
                                    .map(|y| sub.coords(f, &e.apply(f, &x.adjoint().matmul(y))))
                                    .collect()
                            })
                            .collect();
                        (0..sub.dim(f)).map(|k| Matrix::from_fn(dims[r], dims[s], |i, j| prods[i][j][k])).collect()
                    })
                    .collect()
            })
            .collect();
        SemiInnerBundle::new(sub.clone(), dims, right, inner).expect("shapes follow the bundles")
    }
}
