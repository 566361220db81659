use serde::{Deserialize, Serialize};

use super::basis::MatrixBasis;
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_spectrum, kron, psd_verdict, ComplexMatrix, HermitianSpectrum, C64, ZERO,
};

/// Linear map `M_{n_in} -> M_{n_out}` on row-major vectorized matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Superoperator {
    n_in: usize,
    n_out: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn new(n_in: usize, n_out: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.shape() != (n_out * n_out, n_in * n_in) {
            return Err(Error::Dimension(format!(
                "superoperator {n_in}->{n_out} needs a {}x{} matrix, got {:?}",
                n_out * n_out,
                n_in * n_in,
                matrix.shape()
            )));
        }
        Ok(Self { n_in, n_out, matrix })
    }

    /// `rho -> sum_s b_s rho b_s^dagger`; all Kraus operators share one shape.
    pub fn from_kraus(kraus: &[ComplexMatrix]) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::Validation("empty Kraus family".into()));
        };
        let (r, c) = first.shape();
        if kraus.iter().any(|k| k.shape() != (r, c)) {
            return Err(Error::Dimension("Kraus operators differ in shape".into()));
        }
        let mut m = ComplexMatrix::zeros(r * r, c * c);
        for b in kraus {
            m = m + kron(b, &b.conj());
        }
        Ok(Self { n_in: c, n_out: r, matrix: m })
    }

    pub fn identity(n: usize) -> Self {
        Self { n_in: n, n_out: n, matrix: ComplexMatrix::identity(n * n) }
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.shape() != (self.n_in, self.n_in) {
            return Err(Error::Dimension(format!(
                "superoperator expects {}x{} input, got {:?}",
                self.n_in,
                self.n_in,
                rho.shape()
            )));
        }
        let out = self.matrix.apply_vec(rho.data())?;
        ComplexMatrix::unvectorize(self.n_out, out)
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &Superoperator) -> Result<Superoperator> {
        if first.n_out != self.n_in {
            return Err(Error::Dimension(format!(
                "cannot compose {}->{} after {}->{}",
                self.n_in, self.n_out, first.n_in, first.n_out
            )));
        }
        Ok(Self {
            n_in: first.n_in,
            n_out: self.n_out,
            matrix: self.matrix.matmul(&first.matrix)?,
        })
    }

    pub fn adjoint(&self) -> Superoperator {
        Self { n_in: self.n_out, n_out: self.n_in, matrix: self.matrix.dagger() }
    }

    /// Largest deviation of `S^dagger S` from the identity.
    pub fn isometry_defect(&self) -> f64 {
        let g = &self.matrix.dagger() * &self.matrix;
        g.max_abs_diff(&ComplexMatrix::identity(g.rows()))
    }
}

/// Copy superoperator `rho -> sum_alpha Tr(alpha^dagger rho) alpha (x) alpha`.
pub fn comultiplication_superop(basis: &MatrixBasis) -> Superoperator {
    let n = basis.n();
    let n2 = n * n;
    let mut m = ComplexMatrix::zeros(n2 * n2, n2);
    for alpha in basis.elements() {
        let aa = kron(alpha, alpha);
        // Column (j,k) receives conj(alpha[j,k]) * vec(alpha (x) alpha).
        for (col, a_jk) in alpha.data().iter().enumerate() {
            let w = a_jk.conj();
            if w == ZERO {
                continue;
            }
            for (row, &v) in aa.data().iter().enumerate() {
                m[(row, col)] += w * v;
            }
        }
    }
    Superoperator { n_in: n, n_out: n2, matrix: m }
}

pub fn adjoint_superop(s: &Superoperator) -> Superoperator {
    s.adjoint()
}

/// `delta^dagger(I (x) I) = sum_alpha conj(Tr alpha)^2 alpha`.
pub fn delta_dag_id(basis: &MatrixBasis) -> ComplexMatrix {
    let n = basis.n();
    let mut out = ComplexMatrix::zeros(n, n);
    for alpha in basis.elements() {
        let t = alpha.trace().conj();
        out = out + alpha.scale(t * t);
    }
    out
}

/// `n^3 x n^3` Choi matrix with row `(j'', j', j)` and column `(k'', k', k)`,
/// each flattened as `a * n^2 + b * n + c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiMatrix {
    pub n: usize,
    pub matrix: ComplexMatrix,
}

pub fn choi(basis: &MatrixBasis) -> ChoiMatrix {
    let n = basis.n();
    let n3 = n * n * n;
    let mut m = ComplexMatrix::zeros(n3, n3);
    for alpha in basis.elements() {
        for j2 in 0..n {
            for j1 in 0..n {
                for j in 0..n {
                    let row = (j2 * n + j1) * n + j;
                    for k2 in 0..n {
                        for k1 in 0..n {
                            let pre = alpha[(j1, k1)] * alpha[(j2, k2)];
                            if pre == ZERO {
                                continue;
                            }
                            for k in 0..n {
                                let col = (k2 * n + k1) * n + k;
                                m[(row, col)] += alpha[(j, k)].conj() * pre;
                            }
                        }
                    }
                }
            }
        }
    }
    ChoiMatrix { n, matrix: m }
}

/// Choi matrix read off a copy superoperator:
/// entry `<j'' j'| delta(|j><k|) |k'' k'>`.
pub fn choi_from_superop(s: &Superoperator) -> Result<ChoiMatrix> {
    let n = s.n_in();
    if s.n_out() != n * n {
        return Err(Error::Dimension("expected a map M_n -> M_n (x) M_n".into()));
    }
    let n2 = n * n;
    let n3 = n2 * n;
    let mut m = ComplexMatrix::zeros(n3, n3);
    for j2 in 0..n {
        for j1 in 0..n {
            for j in 0..n {
                for k2 in 0..n {
                    for k1 in 0..n {
                        for k in 0..n {
                            let out_row = (j2 * n + j1) * n2 + (k2 * n + k1);
                            m[((j2 * n + j1) * n + j, (k2 * n + k1) * n + k)] =
                                s.matrix()[(out_row, j * n + k)];
                        }
                    }
                }
            }
        }
    }
    Ok(ChoiMatrix { n, matrix: m })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpVerdict {
    pub is_cp: bool,
    /// Smallest eigenvalue of the Hermitian part of the Choi matrix.
    pub min_eigenvalue: f64,
    pub spectrum: HermitianSpectrum,
}

/// Complete positivity via positive semidefiniteness of the Choi matrix.
pub fn is_cp(basis: &MatrixBasis, tol: f64) -> Result<CpVerdict> {
    let spectrum = hermitian_spectrum(&choi(basis).matrix)?;
    Ok(CpVerdict {
        is_cp: psd_verdict(&spectrum, tol),
        min_eigenvalue: spectrum.min(),
        spectrum,
    })
}

/// Reindex the copy superoperator as a plain linear map
/// `C^{N} -> C^{N} (x) C^{N}`, `N = n^2`, sending `vec(alpha)` to
/// `vec(alpha) (x) vec(alpha)`.
fn copy_map_on_vectors(s: &Superoperator) -> ComplexMatrix {
    let n = s.n_in();
    let n2 = n * n;
    let mut t = ComplexMatrix::zeros(n2 * n2, n2);
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let src = (i * n + k) * n2 + (j * n + l);
                    let dst = (i * n + j) * n2 + (k * n + l);
                    for c in 0..n2 {
                        t[(dst, c)] = s.matrix()[(src, c)];
                    }
                }
            }
        }
    }
    t
}

fn swap_operator(d: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            s[(b * d + a, a * d + b)] = C64::new(1.0, 0.0);
        }
    }
    s
}

/// Frobenius, speciality and commutativity axioms for the copy map of
/// `basis`, viewed on the Hilbert space `M_n`. Limited to `n <= 3`.
pub fn verify_frobenius(basis: &MatrixBasis, tol: f64) -> Result<bool> {
    let n = basis.n();
    if n > 3 {
        return Err(Error::Capability(format!(
            "Frobenius verification materializes n^6 x n^4 operators; n = {n} exceeds 3"
        )));
    }
    let d = n * n;
    let t = copy_map_on_vectors(&comultiplication_superop(basis));
    let td = t.dagger();
    let id = ComplexMatrix::identity(d);

    let special = (&td * &t).approx_eq(&id, tol);
    let commutative = (&swap_operator(d) * &t).approx_eq(&t, tol);

    let middle = &t * &td;
    let left = &kron(&id, &td) * &kron(&t, &id);
    let right = &kron(&td, &id) * &kron(&id, &t);
    let frobenius = left.approx_eq(&middle, tol) && right.approx_eq(&middle, tol);

    Ok(special && commutative && frobenius)
}
