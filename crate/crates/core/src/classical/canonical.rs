use serde::{Deserialize, Serialize};

use super::basis::MatrixBasis;
use super::superop::comultiplication_superop;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hs_inner, numerical_rank, psd_verdict, ComplexMatrix, HermitianSpectrum, C64};

fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn orthonormality_gap(vectors: &[Vec<C64>]) -> f64 {
    let mut worst = 0.0_f64;
    for (i, u) in vectors.iter().enumerate() {
        for (j, v) in vectors.iter().enumerate() {
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner(u, v) - expect).norm());
        }
    }
    worst
}

/// Basis `{u_i u_j^dagger}` in lexicographic `(i, j)` order.
pub fn canonical_from_vectors(vectors: &[Vec<C64>], tol: f64) -> Result<MatrixBasis> {
    let n = vectors.len();
    if n == 0 || vectors.iter().any(|v| v.len() != n) {
        return Err(Error::Basis(format!("need {n} vectors of length {n}")));
    }
    let gap = orthonormality_gap(vectors);
    if gap > tol {
        return Err(Error::Basis(format!("vectors are not orthonormal (deviation {gap:e})")));
    }
    let mut elements = Vec::with_capacity(n * n);
    for u in vectors {
        for v in vectors {
            elements.push(ComplexMatrix::outer(u, v));
        }
    }
    MatrixBasis::new_unvalidated(elements)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalVerdict {
    pub canonical: bool,
    /// The recovered orthonormal family, phase-aligned so that
    /// `canonical_from_vectors` reproduces the basis.
    pub vectors: Option<Vec<Vec<C64>>>,
    pub diagnostic: String,
}

impl CanonicalVerdict {
    fn no(diagnostic: String) -> Self {
        Self { canonical: false, vectors: None, diagnostic }
    }
}

/// Decides whether the copy map of `basis` is induced by an orthonormal
/// family of vectors.
///
/// Rank-one PSD elements give the candidate vectors. Their phases are not
/// free: the element `u_0 u_j^dagger` fixes the phase of `u_j` relative to
/// `u_0`, so the family is aligned against those elements before the copy
/// superoperators are compared.
pub fn is_canonical(basis: &MatrixBasis, tol: f64) -> Result<CanonicalVerdict> {
    let n = basis.n();
    let mut raw: Vec<Vec<C64>> = Vec::new();
    for alpha in basis.elements() {
        let eig = hermitian_eigen(alpha)?;
        let spectrum = HermitianSpectrum { eigenvalues: eig.values.clone(), residual: eig.residual };
        if !psd_verdict(&spectrum, tol) || numerical_rank(alpha, tol)? != 1 {
            continue;
        }
        let scale = eig.values[0].max(0.0).sqrt();
        raw.push(eig.vector(0).into_iter().map(|z| z * scale).collect());
    }
    if raw.len() != n {
        return Ok(CanonicalVerdict::no(format!(
            "found {} rank-one PSD elements, need {n}",
            raw.len()
        )));
    }
    let gap = orthonormality_gap(&raw);
    if gap > tol {
        return Ok(CanonicalVerdict::no(format!(
            "rank-one PSD elements are not orthonormal projectors (deviation {gap:e})"
        )));
    }

    let mut aligned = raw.clone();
    for j in 1..n {
        let probe = ComplexMatrix::outer(&raw[0], &raw[j]);
        let mut best = C64::new(0.0, 0.0);
        for beta in basis.elements() {
            let c = hs_inner(&probe, beta)?;
            if c.norm() > best.norm() {
                best = c;
            }
        }
        if best.norm() < 0.5 {
            return Ok(CanonicalVerdict::no(format!(
                "no element aligned with u_0 u_{j}^dagger"
            )));
        }
        let phase = best.conj() / best.norm();
        aligned[j] = raw[j].iter().map(|z| z * phase).collect();
    }

    let rebuilt = canonical_from_vectors(&aligned, tol.max(gap))?;
    let deviation = comultiplication_superop(basis)
        .matrix()
        .max_abs_diff(comultiplication_superop(&rebuilt).matrix());
    if deviation > tol {
        return Ok(CanonicalVerdict::no(format!(
            "copy superoperator differs from the canonical rebuild by {deviation:e}"
        )));
    }
    Ok(CanonicalVerdict {
        canonical: true,
        vectors: Some(aligned),
        diagnostic: format!("canonical (superoperator deviation {deviation:e})"),
    })
}
