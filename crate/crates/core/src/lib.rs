//! Fell bundles over finite groups, made concrete.
//!
//! Every bundle is a graded family of subspaces of one matrix algebra, so cross-sectional
//! algebras, bundle maps, Hilbert bundles, actions and the associated correspondences all
//! reduce to finite matrix identities. Since every finite group is amenable, full and
//! reduced cross-sectional algebras coincide and a single regular representation is used.

pub mod actions;
pub mod bundles;
pub mod correspondences;
pub mod crosssec;
pub mod error;
pub mod formats;
pub mod groups;
pub mod hilbundles;
pub mod numerics;
pub mod pdmaps;
pub mod random;
pub mod report;
pub mod scalar;

pub use actions::{Action, HilbertRef};
pub use bundles::{BundleRef, CondExpectation, DynamicalSystem, FellBundle};
pub use correspondences::{Correspondence, EquivalenceBundle, SubCorrespondence};
pub use crosssec::{RegRep, Section};
pub use error::{Error, Result};
pub use groups::{FiniteGroup, GroupHom};
pub use hilbundles::{HilbertBundle, HilbertModule, SemiInnerBundle};
pub use numerics::{Matrix, Tolerance};
pub use pdmaps::{BundleMap, GnsTriple, PdCertificate, SampledReport, Witness, WitnessTerm};
pub use report::{AxiomCheck, AxiomReport};
pub use scalar::{Real, C};

pub type C64 = num_complex::Complex<f64>;
pub type CMatrix = Matrix<f64>;
pub type CMatrix32 = Matrix<f32>;
pub type Tolerance64 = Tolerance<f64>;
pub type FellBundle64 = FellBundle<f64>;
pub type Section64 = Section<f64>;
pub type BundleMap64 = BundleMap<f64>;
pub type HilbertBundle64 = HilbertBundle<f64>;
pub type Action64 = Action<f64>;
pub type Correspondence64 = Correspondence<f64>;
