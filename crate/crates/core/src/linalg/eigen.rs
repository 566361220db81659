use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const CONVERGENCE: f64 = 1e-13;

/// Eigenvalues of the Hermitian part of a matrix, sorted descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Largest entrywise deviation of the input from Hermiticity.
    pub residual: f64,
}

impl HermitianSpectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_radius(&self) -> f64 {
        self.max().abs().max(self.min().abs())
    }
}

/// Full eigendecomposition of the Hermitian part: `vectors` holds the unit
/// eigenvectors as columns, in the same (descending) order as `values`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
    pub residual: f64,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.col(k)
    }
}

fn require_square(a: &ComplexMatrix, what: &str) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension(format!("{what} needs a square matrix, got {:?}", a.shape())))
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi diagonalization of `(a + a†)/2`.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    require_square(a, "hermitian_eigen")?;
    let residual = a.hermiticity_residual();
    let n = a.rows();
    let mut h = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = CONVERGENCE * h.frobenius_norm();

    let mut converged = n == 1;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&h) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut h, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&h);
        if off > threshold {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS, off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| h[(j, j)].re.total_cmp(&h[(i, i)].re));
    let values = order.iter().map(|&i| h[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, dst)] = v[(r, src)];
        }
    }
    Ok(HermitianEigen { values, vectors, residual })
}

/// One complex Jacobi rotation annihilating `h[p][q]`.
///
/// The rotation is `J = D R` with `D = diag(1, e^{-i theta})` on (p, q)
/// making the pivot real, followed by the classical real Jacobi rotation.
fn rotate(h: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = h[(p, q)];
    let mag = apq.norm();
    if mag < f64::MIN_POSITIVE {
        return;
    }
    let app = h[(p, p)].re;
    let aqq = h[(q, q)].re;
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let j_pp = C64::new(c, 0.0);
    let j_pq = C64::new(s, 0.0);
    let j_qp = -phase.conj() * s;
    let j_qq = phase.conj() * c;

    let n = h.rows();
    // h <- h J
    for k in 0..n {
        let hkp = h[(k, p)];
        let hkq = h[(k, q)];
        h[(k, p)] = hkp * j_pp + hkq * j_qp;
        h[(k, q)] = hkp * j_pq + hkq * j_qq;
    }
    // h <- J† h
    for k in 0..n {
        let hpk = h[(p, k)];
        let hqk = h[(q, k)];
        h[(p, k)] = j_pp.conj() * hpk + j_qp.conj() * hqk;
        h[(q, k)] = j_pq.conj() * hpk + j_qq.conj() * hqk;
    }
    h[(p, q)] = ZERO;
    h[(q, p)] = ZERO;
    h[(p, p)] = C64::new(h[(p, p)].re, 0.0);
    h[(q, q)] = C64::new(h[(q, q)].re, 0.0);
    // v <- v J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
}

/// Eigenvalues of `(a + a†)/2` together with the Hermiticity residual.
pub fn hermitian_spectrum(a: &ComplexMatrix) -> Result<HermitianSpectrum> {
    let eig = hermitian_eigen(a)?;
    Ok(HermitianSpectrum { eigenvalues: eig.values, residual: eig.residual })
}

/// Positive semidefiniteness with a Hermiticity gate.
///
/// Accepts iff `residual <= tol * ||a||` and the smallest eigenvalue is at
/// least `-tol * max(1, ||a||)`, where `||a||` is the spectral radius of the
/// Hermitian part.
pub fn is_psd(a: &ComplexMatrix, tol: f64) -> Result<bool> {
    let spec = hermitian_spectrum(a)?;
    Ok(psd_verdict(&spec, tol))
}

pub(crate) fn psd_verdict(spec: &HermitianSpectrum, tol: f64) -> bool {
    let norm = spec.spectral_radius();
    spec.residual <= tol * norm && spec.min() >= -tol * norm.max(1.0)
}

/// Singular values, descending, and the right singular vectors (columns).
///
/// Vectors come from the spectral decomposition of `a† a`; each singular
/// value is then measured directly as `|a v_k|`, which stays accurate near
/// zero where `sqrt(lambda_k)` would amplify rounding.
pub fn singular_decomposition(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let gram = a.dagger().mul_unchecked(a);
    let eig = hermitian_eigen(&gram)?;
    let mut pairs: Vec<(f64, usize)> = (0..gram.rows())
        .map(|k| {
            let col = eig.vector(k);
            let av = a.apply_vec(&col).expect("shape fixed by construction");
            (av.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(), k)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let n = gram.rows();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &(_, src)) in pairs.iter().enumerate() {
        for r in 0..n {
            vectors[(r, dst)] = eig.vectors[(r, src)];
        }
    }
    Ok((pairs.into_iter().map(|p| p.0).collect(), vectors))
}

pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(singular_decomposition(a)?.0)
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// `|a| = sqrt(a† a)`.
pub fn absolute_value(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(a, "absolute_value")?;
    let (sigma, v) = singular_decomposition(a)?;
    let n = a.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &s) in sigma.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = v[(i, k)] * s;
            for j in 0..n {
                out[(i, j)] += vi * v[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

/// Count of singular values above `tol` times the largest one.
pub fn numerical_rank(a: &ComplexMatrix, tol: f64) -> Result<usize> {
    let sigma = singular_values(a)?;
    let top = sigma.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sigma.iter().filter(|&&s| s > tol * top).count())
}

/// Principal square root of a PSD matrix (negative eigenvalues clamped).
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(a)?;
    let n = a.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let s = eig.values[k].max(0.0).sqrt();
        if s == 0.0 {
            continue;
        }
        let col = eig.vector(k);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += col[i] * col[j].conj() * s;
            }
        }
    }
    Ok(out)
}
