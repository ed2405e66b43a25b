//! JSON-facing documents. Complex numbers are `[re, im]` pairs, group elements are indices,
//! per-element data sits in maps keyed by the element index. Coordinates refer to the fiber
//! bases stored with the bundle; an orthonormal spanning list is kept as the basis verbatim,
//! so writing a bundle and reading it back reproduces it exactly.

use crate::actions::Action;
use crate::bundles::{BundleRef, FellBundle};
use crate::correspondences::EquivalenceBundle;
use crate::crosssec::Section;
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupHom};
use crate::hilbundles::{HilbertBundle, SemiInnerBundle};
use crate::numerics::{Matrix, Tolerance};
use crate::pdmaps::BundleMap;
use crate::scalar::{Real, C};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

pub type ComplexDoc = [f64; 2];
pub type VecDoc = Vec<ComplexDoc>;
pub type MatrixDoc = Vec<Vec<ComplexDoc>>;
pub type PerElement<V> = BTreeMap<Elem, V>;

/// Group element used as a map key; written as a decimal string, ordered numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Elem(pub usize);

impl Serialize for Elem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Elem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Elem;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a group element index")
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Elem, E> {
                Ok(Elem(v as usize))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<Elem, E> {
                v.trim().parse().map(Elem).map_err(|_| E::custom(format!("bad group element {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

fn fmt(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn scalar_to_doc<T: Real>(z: C<T>) -> ComplexDoc {
    [z.re.to_f64_lossy(), z.im.to_f64_lossy()]
}

fn scalar_from_doc<T: Real>(z: &ComplexDoc) -> Result<C<T>> {
    if !(z[0].is_finite() && z[1].is_finite()) {
        return Err(fmt("non-finite number"));
    }
    Ok(C::new(T::lit(z[0]), T::lit(z[1])))
}

pub fn vec_to_doc<T: Real>(v: &[C<T>]) -> VecDoc {
    v.iter().map(|&z| scalar_to_doc(z)).collect()
}

pub fn vec_from_doc<T: Real>(v: &VecDoc) -> Result<Vec<C<T>>> {
    v.iter().map(scalar_from_doc).collect()
}

pub fn matrix_to_doc<T: Real>(m: &Matrix<T>) -> MatrixDoc {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| scalar_to_doc(m[(i, j)])).collect()).collect()
}

/// Rows of `[re, im]` pairs. An empty list is the 0 x 0 matrix unless a shape is expected.
pub fn matrix_from_doc<T: Real>(d: &MatrixDoc) -> Result<Matrix<T>> {
    let rows: Vec<Vec<C<T>>> = d.iter().map(vec_from_doc).collect::<Result<_>>()?;
    if rows.is_empty() {
        return Ok(Matrix::zeros(0, 0));
    }
    Matrix::from_rows(&rows).map_err(|_| fmt("ragged matrix rows"))
}

fn shaped<T: Real>(d: &MatrixDoc, rows: usize, cols: usize, what: &str) -> Result<Matrix<T>> {
    if d.is_empty() && rows * cols == 0 {
        return Ok(Matrix::zeros(rows, cols));
    }
    let m = matrix_from_doc(d)?;
    if m.shape() != (rows, cols) {
        return Err(fmt(format!("{what}: expected {rows}x{cols}, got {}x{}", m.rows(), m.cols())));
    }
    Ok(m)
}

fn dense<V: Clone>(map: &PerElement<V>, n: usize, what: &str, default: Option<V>) -> Result<Vec<V>> {
    if let Some(k) = map.keys().find(|k| k.0 >= n) {
        return Err(fmt(format!("{what}: key {} outside a group of order {n}", k.0)));
    }
    (0..n)
        .map(|g| match (map.get(&Elem(g)), &default) {
            (Some(v), _) => Ok(v.clone()),
            (None, Some(d)) => Ok(d.clone()),
            (None, None) => Err(fmt(format!("{what}: missing entry for element {g}"))),
        })
        .collect()
}

fn per_element<V>(items: impl IntoIterator<Item = V>) -> PerElement<V> {
    items.into_iter().enumerate().map(|(g, v)| (Elem(g), v)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupDoc {
    Cyclic { cyclic: usize },
    Symmetric { symmetric: usize },
    Table { order: usize, table: Vec<Vec<usize>> },
}

impl GroupDoc {
    pub fn from_group(g: &FiniteGroup) -> Self {
        GroupDoc::Table { order: g.order(), table: g.table().to_vec() }
    }

    pub fn build(&self) -> Result<FiniteGroup> {
        match self {
            GroupDoc::Cyclic { cyclic } => FiniteGroup::cyclic(*cyclic),
            GroupDoc::Symmetric { symmetric } => FiniteGroup::symmetric(*symmetric),
            GroupDoc::Table { order, table } => {
                if table.len() != *order {
                    return Err(fmt(format!("table has {} rows, order is {order}", table.len())));
                }
                FiniteGroup::from_table(table.clone())
            }
        }
    }
}

fn hom_from_doc(map: &Option<Vec<usize>>, src: &FiniteGroup, tgt: &FiniteGroup) -> Result<GroupHom> {
    match map {
        Some(m) => GroupHom::new(src.clone(), tgt.clone(), m.clone()),
        None if src == tgt => Ok(GroupHom::identity(src)),
        None => Err(fmt("phi is required when the groups differ")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleDoc {
    pub group: GroupDoc,
    pub ambient_dim: usize,
    /// Spanning matrices per element; missing elements are zero fibers.
    pub fibers: PerElement<Vec<MatrixDoc>>,
    #[serde(default)]
    pub unital: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BundleSpec {
    GroupBundle { group_bundle: GroupDoc },
    MatrixAlgebra { matrix_algebra: usize },
    Explicit(BundleDoc),
}

impl BundleSpec {
    pub fn from_bundle<T: Real>(b: &FellBundle<T>) -> Self {
        BundleSpec::Explicit(BundleDoc {
            group: GroupDoc::from_group(b.group()),
            ambient_dim: b.ambient_dim(),
            fibers: per_element(b.fibers().iter().map(|f| f.basis().iter().map(matrix_to_doc).collect())),
            unital: b.is_unital(),
        })
    }

    pub fn build<T: Real>(&self) -> Result<BundleRef<T>> {
        let b = match self {
            BundleSpec::GroupBundle { group_bundle } => FellBundle::group_bundle(&group_bundle.build()?),
            BundleSpec::MatrixAlgebra { matrix_algebra } => {
                if *matrix_algebra == 0 {
                    return Err(fmt("matrix_algebra needs a positive size"));
                }
                FellBundle::full_matrix_algebra(*matrix_algebra)
            }
            BundleSpec::Explicit(d) => {
                let grp = d.group.build()?;
                let n = d.ambient_dim;
                let raw = dense(&d.fibers, grp.order(), "fibers", Some(Vec::new()))?;
                let spanning = raw
                    .iter()
                    .map(|ms| ms.iter().map(|m| shaped(m, n, n, "fiber element")).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                FellBundle::new(grp, n, spanning, d.unital)?
            }
        };
        Ok(Arc::new(b))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleMapDoc {
    pub source: BundleSpec,
    /// Defaults to the source bundle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<BundleSpec>,
    /// Group homomorphism as a list of images; defaults to the identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<usize>>,
    /// Block of g: dim B_phi(g) x dim A_g in fiber coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<PerElement<MatrixDoc>>,
    /// Alternative to blocks: T_g = f(g) id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplier: Option<VecDoc>,
}

impl BundleMapDoc {
    pub fn from_map<T: Real>(t: &BundleMap<T>) -> Self {
        BundleMapDoc {
            source: BundleSpec::from_bundle(t.source()),
            target: Some(BundleSpec::from_bundle(t.target())),
            phi: Some(t.phi().map.clone()),
            blocks: Some(per_element(t.blocks().iter().map(matrix_to_doc))),
            multiplier: None,
        }
    }

    pub fn build<T: Real>(&self) -> Result<BundleMap<T>> {
        let a = self.source.build::<T>()?;
        let b = match &self.target {
            Some(s) => s.build::<T>()?,
            None => a.clone(),
        };
        match (&self.blocks, &self.multiplier) {
            (Some(blocks), None) => {
                let phi = hom_from_doc(&self.phi, a.group(), b.group())?;
                let docs = dense(blocks, a.group().order(), "blocks", None)?;
                let blocks = a
                    .group()
                    .elements()
                    .map(|g| shaped(&docs[g], b.dim(phi.apply(g)), a.dim(g), "block"))
                    .collect::<Result<Vec<_>>>()?;
                BundleMap::new(a, b, phi, blocks)
            }
            (None, Some(f)) => {
                if self.target.is_some() || self.phi.is_some() {
                    return Err(fmt("a multiplier maps a bundle to itself"));
                }
                BundleMap::multiplier(a, &vec_from_doc(f)?)
            }
            _ => Err(fmt("give exactly one of blocks and multiplier")),
        }
    }
}

pub type Tensor = PerElement<PerElement<Vec<MatrixDoc>>>;

fn tensor_to_doc<T: Real>(t: &[Vec<Vec<Matrix<T>>>]) -> Tensor {
    per_element(t.iter().map(|row| per_element(row.iter().map(|l| l.iter().map(matrix_to_doc).collect()))))
}

/// Dense tensor from its document; `shape(i, j)` gives (count, rows, cols) of entry (i, j).
fn tensor_from_doc<T: Real>(
    d: &Tensor,
    n: usize,
    m: usize,
    what: &str,
    shape: impl Fn(usize, usize) -> (usize, usize, usize),
) -> Result<Vec<Vec<Vec<Matrix<T>>>>> {
    let outer = dense(d, n, what, None)?;
    outer
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let inner = dense(row, m, what, Some(Vec::new()))?;
            inner
                .iter()
                .enumerate()
                .map(|(j, list)| {
                    let (count, r, c) = shape(i, j);
                    if list.len() != count && !(list.is_empty() && r * c == 0) {
                        return Err(fmt(format!("{what}[{i}][{j}]: expected {count} matrices, got {}", list.len())));
                    }
                    if list.is_empty() {
                        return Ok(vec![Matrix::zeros(r, c); count]);
                    }
                    list.iter().map(|x| shaped(x, r, c, what)).collect()
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HilbertBundleDoc {
    pub base: BundleSpec,
    pub dims: Vec<usize>,
    /// right[r][h][k]: matrix of x -> x b_k from X_r to X_rh.
    pub right: Tensor,
    /// inner[r][s][k]: coefficient matrices of <x, y> on the basis of B_{r^-1 s}.
    pub inner: Tensor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HilbertSpec {
    Trivial { trivial: BundleSpec },
    L2 { l2: BundleSpec },
    Explicit(HilbertBundleDoc),
}

impl HilbertSpec {
    pub fn from_bundle<T: Real>(x: &SemiInnerBundle<T>) -> Self {
        HilbertSpec::Explicit(HilbertBundleDoc {
            base: BundleSpec::from_bundle(x.base()),
            dims: x.dims().to_vec(),
            right: tensor_to_doc(x.right_tensors()),
            inner: tensor_to_doc(x.inner_tensors()),
        })
    }

    /// The raw structure; may be degenerate.
    pub fn build_semi<T: Real>(&self) -> Result<SemiInnerBundle<T>> {
        match self {
            HilbertSpec::Trivial { trivial } => Ok(HilbertBundle::trivial(trivial.build()?).into_semi()),
            HilbertSpec::L2 { l2 } => Ok(HilbertBundle::l2(l2.build()?).into_semi()),
            HilbertSpec::Explicit(d) => {
                let base = d.base.build::<T>()?;
                let grp = base.group().clone();
                let n = grp.order();
                if d.dims.len() != n {
                    return Err(fmt("one dimension per group element"));
                }
                let dims = &d.dims;
                let right = tensor_from_doc(&d.right, n, n, "right", |r, h| (base.dim(h), dims[grp.mul(r, h)], dims[r]))?;
                let inner =
                    tensor_from_doc(&d.inner, n, n, "inner", |r, s| (base.dim(grp.mul(grp.inv(r), s)), dims[r], dims[s]))?;
                SemiInnerBundle::new(base, d.dims.clone(), right, inner)
            }
        }
    }

    pub fn build<T: Real>(&self, tol: &Tolerance<T>) -> Result<HilbertBundle<T>> {
        HilbertBundle::from_semi(self.build_semi()?, tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionDoc {
    pub source: BundleSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<usize>>,
    pub target: HilbertSpec,
    /// ops[g][h][i]: matrix of rho(a_i) from X_h to X_phi(g)h, a_i the i-th basis element of A_g.
    pub ops: Tensor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActionSpec {
    Trivial { trivial: BundleSpec },
    L2 { l2: BundleSpec },
    Regular { regular: BundleSpec },
    Explicit(ActionDoc),
}

impl ActionSpec {
    pub fn from_action<T: Real>(a: &Action<T>) -> Self {
        ActionSpec::Explicit(ActionDoc {
            source: BundleSpec::from_bundle(a.source()),
            phi: Some(a.phi().map.clone()),
            target: HilbertSpec::from_bundle(a.target().semi()),
            ops: tensor_to_doc(a.ops()),
        })
    }

    pub fn build<T: Real>(&self, tol: &Tolerance<T>) -> Result<Action<T>> {
        match self {
            ActionSpec::Trivial { trivial } => Ok(Action::trivial(trivial.build()?)),
            ActionSpec::L2 { l2 } => Ok(Action::l2(l2.build()?)),
            ActionSpec::Regular { regular } => Ok(Action::trivial(regular.build()?).regularize()),
            ActionSpec::Explicit(d) => {
                let a = d.source.build::<T>()?;
                let x = Arc::new(d.target.build(tol)?);
                let phi = hom_from_doc(&d.phi, a.group(), x.group())?;
                let hg = x.group().clone();
                let ops = tensor_from_doc(&d.ops, a.group().order(), hg.order(), "ops", |g, h| {
                    (a.dim(g), x.dim(hg.mul(phi.apply(g), h)), x.dim(h))
                })?;
                Action::new(a, phi, x, ops)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorDoc {
    pub fiber: usize,
    pub coords: VecDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionDoc {
    pub coeffs: PerElement<VecDoc>,
}

impl SectionDoc {
    pub fn from_section<T: Real>(f: &Section<T>) -> Self {
        SectionDoc { coeffs: per_element(f.coeffs().iter().map(|c| vec_to_doc(c))) }
    }

    /// Missing elements are zero.
    pub fn build<T: Real>(&self, b: BundleRef<T>) -> Result<Section<T>> {
        let n = b.group().order();
        let raw = dense(&self.coeffs, n, "coeffs", Some(Vec::new()))?;
        let coeffs = raw
            .iter()
            .enumerate()
            .map(|(g, v)| if v.is_empty() { Ok(vec![C::new(T::zero(), T::zero()); b.dim(g)]) } else { vec_from_doc(v) })
            .collect::<Result<Vec<_>>>()?;
        Section::new(b, coeffs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceDoc {
    pub left: BundleSpec,
    pub right: BundleSpec,
    /// Spanning p x q matrices of X_g, p and q the ambient sizes of the left and right bundles.
    pub fibers: PerElement<Vec<MatrixDoc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EquivalenceSpec {
    Identity { identity: BundleSpec },
    Explicit(EquivalenceDoc),
}

impl EquivalenceSpec {
    pub fn from_equivalence<T: Real>(e: &EquivalenceBundle<T>) -> Self {
        let grp = e.left().group();
        EquivalenceSpec::Explicit(EquivalenceDoc {
            left: BundleSpec::from_bundle(e.left()),
            right: BundleSpec::from_bundle(e.right()),
            fibers: per_element(grp.elements().map(|g| e.fiber(g).basis().iter().map(matrix_to_doc).collect())),
        })
    }

    pub fn build<T: Real>(&self, tol: &Tolerance<T>) -> Result<EquivalenceBundle<T>> {
        match self {
            EquivalenceSpec::Identity { identity } => EquivalenceBundle::identity(identity.build()?, tol),
            EquivalenceSpec::Explicit(d) => {
                let a = d.left.build::<T>()?;
                let b = d.right.build::<T>()?;
                let (p, q) = (a.ambient_dim(), b.ambient_dim());
                let raw = dense(&d.fibers, a.group().order(), "fibers", Some(Vec::new()))?;
                let fibers = raw
                    .iter()
                    .map(|ms| ms.iter().map(|m| shaped(m, p, q, "equivalence fiber")).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                EquivalenceBundle::concrete(a, b, &fibers, tol)
            }
        }
    }
}

/// Correspondence input: an action, optionally a vector of X_e to test for cyclicity, and
/// optionally a section of the acting bundle for the push-forward identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceDoc {
    pub action: ActionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<VecDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnsDoc {
    pub action: ActionSpec,
    pub xi: VectorDoc,
}

/// Any input file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Document {
    Group(GroupDoc),
    Bundle(BundleSpec),
    BundleMap(BundleMapDoc),
    HilbertBundle(HilbertSpec),
    Action(ActionSpec),
    Correspondence(CorrespondenceDoc),
    Equivalence(EquivalenceSpec),
    Gns(GnsDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Group(_) => "group",
            Document::Bundle(_) => "bundle",
            Document::BundleMap(_) => "bundle_map",
            Document::HilbertBundle(_) => "hilbert_bundle",
            Document::Action(_) => "action",
            Document::Correspondence(_) => "correspondence",
            Document::Equivalence(_) => "equivalence",
            Document::Gns(_) => "gns",
        }
    }
}
