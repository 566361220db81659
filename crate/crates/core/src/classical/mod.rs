//! Copy superoperators induced by orthonormal bases of `M_n`.
//!
//! Vectorization convention, used everywhere in this module: an `n x n`
//! matrix is flattened row-major, so the matrix unit `|i><j|` sits at index
//! `i * n + j`. A [`Superoperator`] from `M_a` to `M_b` is the `b^2 x a^2`
//! matrix acting on such vectors. The copy map `delta` of a basis sends
//! `rho` to `sum_alpha Tr(alpha^dagger rho) alpha (x) alpha`, with the
//! Kronecker convention of [`crate::linalg::kron`].

mod basis;
mod canonical;
mod conditions;
mod superop;

pub use basis::{pauli_basis, MatrixBasis};
pub use canonical::{canonical_from_vectors, is_canonical, CanonicalVerdict};
pub use conditions::{condition_report, Check, ConditionOptions, ConditionReport, SubsetMode};
pub use superop::{
    adjoint_superop, choi, choi_from_superop, comultiplication_superop, delta_dag_id, is_cp,
    verify_frobenius, ChoiMatrix, CpVerdict, Superoperator,
};
