#![allow(dead_code)]

use fellbundle::*;
use std::sync::Arc;

pub fn tol() -> Tolerance64 {
    Tolerance::standard()
}

pub fn group_bundle(g: FiniteGroup) -> BundleRef<f64> {
    Arc::new(FellBundle::group_bundle(&g))
}

fn m2_units() -> Vec<CMatrix> {
    (0..2).flat_map(|i| (0..2).map(move |j| Matrix::unit(2, 2, i, j))).collect()
}

/// M_2 graded by Z/2 through conjugation with diag(1, -1).
pub fn ad_system() -> DynamicalSystem<f64> {
    let u = Matrix::real(&[&[1.0, 0.0], &[0.0, -1.0]]);
    DynamicalSystem::inner(2, &m2_units(), FiniteGroup::cyclic(2).unwrap(), &[Matrix::identity(2), u], &tol()).unwrap()
}

/// Diagonal matrices with Z/2 swapping the entries.
pub fn swap_system() -> DynamicalSystem<f64> {
    let swap = Matrix::real(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let diag = [Matrix::unit(2, 2, 0, 0), Matrix::unit(2, 2, 1, 1)];
    DynamicalSystem::inner(2, &diag, FiniteGroup::cyclic(2).unwrap(), &[Matrix::identity(2), swap], &tol()).unwrap()
}

/// Z/2 over the scalars with a zero fiber over the generator.
pub fn thin_z2() -> BundleRef<f64> {
    Arc::new(FellBundle::new(FiniteGroup::cyclic(2).unwrap(), 1, vec![vec![Matrix::identity(1)], vec![]], true).unwrap())
}

/// Named unital test bundles.
pub fn zoo() -> Vec<(&'static str, BundleRef<f64>)> {
    vec![
        ("Z/2", group_bundle(FiniteGroup::cyclic(2).unwrap())),
        ("Z/3", group_bundle(FiniteGroup::cyclic(3).unwrap())),
        ("S3", group_bundle(FiniteGroup::symmetric(3).unwrap())),
        ("M2", Arc::new(FellBundle::full_matrix_algebra(2))),
        ("Ad M2", Arc::new(ad_system().bundle())),
        ("swap diag", Arc::new(swap_system().bundle())),
        ("thin Z/2", thin_z2()),
    ]
}
