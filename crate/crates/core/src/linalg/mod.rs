//! Dense complex linear algebra at desk scale (dimensions up to ~100).

mod eigen;
mod gram_schmidt;
mod matrix;

pub use eigen::{
    absolute_value, hermitian_eigen, hermitian_spectrum, is_psd, numerical_rank, operator_norm,
    psd_sqrt, singular_decomposition, singular_values, HermitianEigen, HermitianSpectrum,
};
pub(crate) use eigen::psd_verdict;
pub use gram_schmidt::{gram_matrix, gram_schmidt, orthonormality_defect};
pub use matrix::{hs_inner, kron, ComplexMatrix, C64};
pub(crate) use matrix::{ONE, ZERO};
