//! Numerical and combinatorial tools for classical structures in categories
//! of completely positive maps.
//!
//! * [`linalg`]: small dense complex linear algebra (Jacobi eigensolver,
//!   Hilbert–Schmidt geometry, Gram–Schmidt).
//! * [`classical`]: copy superoperators built from orthonormal bases of
//!   `M_n`, their Choi matrices, and the full condition report.
//! * [`search`]: seeded, worker-count-independent random basis search.
//! * [`metrology`]: parallel (GHZ) versus sequential phase-estimation
//!   diagrams under dephasing maps.
//! * [`rel`]: finite relations, abelian groupoids and completely positive
//!   relations, with exhaustive enumeration on small sets.

pub mod classical;
pub mod error;
pub mod linalg;
pub mod metrology;
pub mod rel;
pub mod rng;
pub mod search;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};

/// Default absolute/relative tolerance used across the crate.
pub const DEFAULT_TOL: f64 = 1e-9;
