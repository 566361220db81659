use super::matrix::{hs_inner, ComplexMatrix};
use crate::error::{Error, Result};

/// Modified Gram–Schmidt under the Hilbert–Schmidt inner product.
///
/// Input order is preserved. A vector whose residual norm after projection
/// drops below `tol` is reported as a dependence error naming its index.
pub fn gram_schmidt(vectors: &[ComplexMatrix], tol: f64) -> Result<Vec<ComplexMatrix>> {
    let Some(first) = vectors.first() else {
        return Ok(Vec::new());
    };
    let shape = first.shape();
    if !first.is_square() || vectors.iter().any(|v| v.shape() != shape) {
        return Err(Error::Dimension("gram_schmidt needs equal square shapes".into()));
    }
    let mut out: Vec<ComplexMatrix> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for q in &out {
            let c = hs_inner(q, &w)?;
            w = w - q.scale(c);
        }
        let norm = w.frobenius_norm();
        if norm < tol {
            return Err(Error::Dependence { index, norm });
        }
        out.push(w.scale_real(1.0 / norm));
    }
    Ok(out)
}

/// Gram matrix `G[i][j] = <v_i, v_j>`.
pub fn gram_matrix(vectors: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let k = vectors.len();
    let mut g = ComplexMatrix::zeros(k.max(1), k.max(1));
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = hs_inner(&vectors[i], &vectors[j])?;
        }
    }
    Ok(g)
}

/// Largest deviation of the Gram matrix from the identity.
pub fn orthonormality_defect(vectors: &[ComplexMatrix]) -> Result<f64> {
    if vectors.is_empty() {
        return Ok(0.0);
    }
    Ok(gram_matrix(vectors)?.max_abs_diff(&ComplexMatrix::identity(vectors.len())))
}
