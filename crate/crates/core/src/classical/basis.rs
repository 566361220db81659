use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{orthonormality_defect, ComplexMatrix, C64};

/// `n^2` matrices of size `n x n`, orthonormal under the Hilbert–Schmidt
/// inner product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixBasis {
    n: usize,
    elements: Vec<ComplexMatrix>,
}

impl MatrixBasis {
    /// Validates shapes and orthonormality (Gram deviation at most `tol`).
    pub fn new(elements: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let basis = Self::new_unvalidated(elements)?;
        let defect = basis.orthonormality_defect();
        if defect > tol {
            return Err(Error::Basis(format!(
                "Gram matrix deviates from identity by {defect:e} (tolerance {tol:e})"
            )));
        }
        Ok(basis)
    }

    /// Checks shapes only. Everything downstream assumes orthonormality, so
    /// results on a non-orthonormal family are meaningless but well defined.
    pub fn new_unvalidated(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::Basis("empty basis".into()));
        };
        let n = first.rows();
        if elements.len() != n * n {
            return Err(Error::Basis(format!(
                "expected {} elements for n = {n}, got {}",
                n * n,
                elements.len()
            )));
        }
        if let Some(i) = elements.iter().position(|e| e.shape() != (n, n)) {
            return Err(Error::Basis(format!("element {i} is not {n}x{n}")));
        }
        Ok(Self { n, elements })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn orthonormality_defect(&self) -> f64 {
        orthonormality_defect(&self.elements).unwrap_or(f64::INFINITY)
    }

    /// The matrix-unit basis `|i><j|`, lexicographic in `(i, j)`.
    pub fn matrix_units(n: usize) -> Self {
        let mut elements = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut e = ComplexMatrix::zeros(n, n);
                e[(i, j)] = C64::new(1.0, 0.0);
                elements.push(e);
            }
        }
        Self { n, elements }
    }

    /// Index of an element equal to `m` entrywise within `tol`.
    pub fn find(&self, m: &ComplexMatrix, tol: f64) -> Option<usize> {
        self.elements.iter().position(|e| e.approx_eq(m, tol))
    }

    /// True when `m` is (entrywise within `tol`) zero or one of the elements.
    pub fn contains_or_zero(&self, m: &ComplexMatrix, tol: f64) -> bool {
        m.max_abs() <= tol || self.find(m, tol).is_some()
    }
}

/// Normalized Pauli basis `{I, X, Y, Z} / sqrt(2)`.
pub fn pauli_basis() -> MatrixBasis {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| C64::new(re * h, im * h);
    let z = C64::new(0.0, 0.0);
    let mk = |d: [C64; 4]| ComplexMatrix::new(2, 2, d.to_vec()).expect("2x2");
    MatrixBasis {
        n: 2,
        elements: vec![
            mk([c(1., 0.), z, z, c(1., 0.)]),
            mk([z, c(1., 0.), c(1., 0.), z]),
            mk([z, c(0., -1.), c(0., 1.), z]),
            mk([c(1., 0.), z, z, c(-1., 0.)]),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gram_matrix, hs_inner};

    #[test]
    fn pauli_gram_is_identity() {
        let b = pauli_basis();
        let g = gram_matrix(b.elements()).unwrap();
        assert!(g.approx_eq(&ComplexMatrix::identity(4), 1e-15));
        assert!(hs_inner(&b.elements()[0], &b.elements()[1]).unwrap().norm() < 1e-16);
    }

    #[test]
    fn rejects_wrong_count_and_non_orthonormal() {
        let i2 = ComplexMatrix::identity(2);
        assert!(matches!(MatrixBasis::new(vec![i2.clone()], 1e-9), Err(Error::Basis(_))));
        let err = MatrixBasis::new(vec![i2.clone(), i2.clone(), i2.clone(), i2], 1e-9);
        assert!(matches!(err, Err(Error::Basis(_))));
    }

    #[test]
    fn matrix_units_validate() {
        for n in 1..=3 {
            let b = MatrixBasis::matrix_units(n);
            assert!(MatrixBasis::new(b.elements().to_vec(), 1e-12).is_ok());
        }
    }
}
