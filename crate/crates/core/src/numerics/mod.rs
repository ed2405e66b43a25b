//! Dense complex linear algebra used by every other module.

pub mod eigen;
pub mod matrix;
pub mod subspace;
pub mod tolerance;

pub use eigen::{
    hermitian_eigh, hermitian_eigvals, jacobi_eigh, null_space_basis, numerical_rank, psd_check, psd_from_eigvals,
    range_eigenpairs, PsdReport,
};
pub use matrix::{kron, vadd, vdot, vnorm, vscale, vsub, Matrix};
pub use subspace::{column_rank, in_span, orthonormalize, span_equal, span_rank, MatrixSubspace};
pub use tolerance::Tolerance;
