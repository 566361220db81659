//! Parallel (GHZ) and sequential phase-estimation diagrams for quantum maps
//! compatible with the copy structure of the standard basis.
//!
//! Both diagrams are evaluated as scalars. With `eta_m = sum_j |j...j>`
//! (unnormalized), the parallel scalar is
//! `<eta_m| (F_1 (x) ... (x) F_m)(|eta_m><eta_m|) |eta_m>` and the sequential
//! one applies the maps in turn to `|eta_1><eta_1|` on a single wire. Both
//! equal `n^2` for identity maps; the probability of the GHZ projector
//! outcome on the normalized GHZ input is therefore `scalar / n^2`.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{canonical_from_vectors, comultiplication_superop, Superoperator};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, kron, operator_norm, ComplexMatrix, C64, ONE, ZERO};
use crate::rng::{derive_seed, rng_from_seed};

/// Phase rotation with general dephasing: Kraus operators
/// `b_s = sqrt(r_s) sum_j exp(-i (phi_j + 2 pi j s / n)) |j><j|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DephasingPhaseMap {
    n: usize,
    phases: Vec<f64>,
    weights: Vec<f64>,
}

impl DephasingPhaseMap {
    pub fn new(phases: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let n = phases.len();
        if n == 0 || weights.len() != n {
            return Err(Error::Validation(format!(
                "need n >= 1 phases and n weights, got {} and {}",
                n,
                weights.len()
            )));
        }
        if phases.iter().chain(&weights).any(|x| !x.is_finite()) {
            return Err(Error::Validation("non-finite phase or weight".into()));
        }
        if weights.iter().any(|&r| r < 0.0) {
            return Err(Error::Validation("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { n, phases, weights })
    }

    /// Pure rotation: weight concentrated on `s = 0`.
    pub fn pure(phases: Vec<f64>) -> Result<Self> {
        let mut w = vec![0.0; phases.len()];
        if let Some(first) = w.first_mut() {
            *first = 1.0;
        }
        Self::new(phases, w)
    }

    /// Uniform phases in `[0, 2 pi)` and weights drawn uniformly from the simplex.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        let phases = (0..n).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
        let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let total: f64 = raw.iter().sum();
        let mut weights: Vec<f64> = raw.iter().map(|x| x / total).collect();
        // Push the rounding residue into the last weight so the sum is 1 to the ulp.
        let head: f64 = weights[..n - 1].iter().sum();
        weights[n - 1] = (1.0 - head).max(0.0);
        Self::new(phases, weights).expect("valid by construction")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceMode {
    /// `sum_s b_s^dagger b_s = I`.
    Preserving,
    /// `sum_s b_s^dagger b_s <= I`.
    NonIncreasing,
}

/// Completely positive map given by Kraus operators on `C^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumMap {
    n: usize,
    kraus: Vec<ComplexMatrix>,
}

impl QuantumMap {
    pub fn new(kraus: Vec<ComplexMatrix>, mode: TraceMode, tol: f64) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::Validation("a quantum map needs at least one Kraus operator".into()));
        };
        let n = first.rows();
        if kraus.iter().any(|k| k.shape() != (n, n)) {
            return Err(Error::Dimension(format!("Kraus operators must all be {n}x{n}")));
        }
        let map = Self { n, kraus };
        let gap = &ComplexMatrix::identity(n) - &map.kraus_sum();
        match mode {
            TraceMode::Preserving if gap.max_abs() > tol => Err(Error::Validation(format!(
                "not trace preserving: |I - sum b^dagger b|_max = {:e}",
                gap.max_abs()
            ))),
            TraceMode::NonIncreasing if !crate::linalg::is_psd(&gap, tol)? => {
                Err(Error::Validation("not trace non-increasing".into()))
            }
            _ => Ok(map),
        }
    }

    pub fn unitary(u: ComplexMatrix, tol: f64) -> Result<Self> {
        Self::new(vec![u], TraceMode::Preserving, tol)
    }

    pub fn identity(n: usize) -> Self {
        Self { n, kraus: vec![ComplexMatrix::identity(n)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    fn kraus_sum(&self) -> ComplexMatrix {
        self.kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.n, self.n), |acc, b| acc + &b.dagger() * b)
    }

    pub fn superoperator(&self) -> Superoperator {
        Superoperator::from_kraus(&self.kraus).expect("nonempty, equal shapes")
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.n, self.n), |acc, b| acc + &(b * rho) * &b.dagger())
    }

    fn all_diagonal(&self) -> bool {
        self.kraus.iter().all(|b| b.is_diagonal(0.0))
    }
}

/// Diagonal Kraus operators of a [`DephasingPhaseMap`]; zero weights dropped.
pub fn kraus_of(map: &DephasingPhaseMap) -> QuantumMap {
    let n = map.n;
    let kraus = (0..n)
        .filter(|&s| map.weights[s] > 0.0)
        .map(|s| {
            let amp = map.weights[s].sqrt();
            let diag: Vec<C64> = (0..n)
                .map(|j| {
                    let angle = map.phases[j] + 2.0 * PI * (j * s) as f64 / n as f64;
                    C64::from_polar(amp, -angle)
                })
                .collect();
            ComplexMatrix::from_diagonal(&diag)
        })
        .collect();
    QuantumMap { n, kraus }
}

/// Superoperator of `rho -> sum_s (b_s (x) I) rho (b_s (x) I)^dagger`, or with
/// the identity on the left when `left` is false.
fn tensor_with_identity(map: &QuantumMap, left: bool) -> Superoperator {
    let id = ComplexMatrix::identity(map.n);
    let kraus: Vec<ComplexMatrix> = map
        .kraus
        .iter()
        .map(|b| if left { kron(b, &id) } else { kron(&id, b) })
        .collect();
    Superoperator::from_kraus(&kraus).expect("nonempty")
}

/// Commutation of the map with the copy superoperator of the basis
/// `vectors`, on either output leg.
pub fn is_compatible(map: &QuantumMap, vectors: &[Vec<C64>], tol: f64) -> Result<bool> {
    if vectors.len() != map.n {
        return Err(Error::Dimension(format!(
            "{} basis vectors for a map on C^{}",
            vectors.len(),
            map.n
        )));
    }
    let copy = comultiplication_superop(&canonical_from_vectors(vectors, tol.max(1e-12))?);
    let f = map.superoperator();
    let lhs = copy.compose(&f)?;
    let left = tensor_with_identity(map, true).compose(&copy)?;
    let right = tensor_with_identity(map, false).compose(&copy)?;
    Ok(lhs.matrix().approx_eq(left.matrix(), tol) && lhs.matrix().approx_eq(right.matrix(), tol))
}

pub fn standard_basis(n: usize) -> Vec<Vec<C64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { ONE } else { ZERO }).collect())
        .collect()
}

/// Kraus operators from the eigendecomposition of the Choi matrix
/// `sum_{jk} |j><k| (x) F(|j><k|)`, keeping eigenvalues above `tol`.
pub fn canonical_kraus(map: &QuantumMap, tol: f64) -> Result<Vec<ComplexMatrix>> {
    let n = map.n;
    let s = map.superoperator();
    let mut choi = ComplexMatrix::zeros(n * n, n * n);
    for j in 0..n {
        for a in 0..n {
            for k in 0..n {
                for b in 0..n {
                    choi[(j * n + a, k * n + b)] = s.matrix()[(a * n + b, j * n + k)];
                }
            }
        }
    }
    let eig = hermitian_eigen(&choi)?;
    let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let mut out = Vec::new();
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda <= tol * top.max(1.0) {
            continue;
        }
        let v = eig.vector(k);
        let mut op = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            for a in 0..n {
                op[(a, j)] = v[j * n + a] * lambda.sqrt();
            }
        }
        out.push(op);
    }
    Ok(out)
}

/// Canonical Kraus operators are normal and pairwise commuting.
pub fn has_commuting_kraus(map: &QuantumMap, tol: f64) -> Result<bool> {
    let ops = canonical_kraus(map, tol)?;
    for (i, a) in ops.iter().enumerate() {
        if operator_norm(&a.commutator(&a.dagger())?)? > tol {
            return Ok(false);
        }
        for b in &ops[i + 1..] {
            if operator_norm(&a.commutator(b)?)? > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn check_dims(maps: &[QuantumMap], n: usize) -> Result<()> {
    if maps.is_empty() {
        return Err(Error::Validation("need at least one map".into()));
    }
    if let Some(i) = maps.iter().position(|m| m.n != n) {
        return Err(Error::Dimension(format!("map {i} acts on C^{}, expected C^{n}", maps[i].n)));
    }
    Ok(())
}

/// Parallel diagram by summation over Kraus-index tuples:
/// `sum_s |sum_{j,k} prod_i b^(i)_{s_i}[j,k]|^2`.
pub fn parallel_scalar(maps: &[QuantumMap], n: usize) -> Result<f64> {
    check_dims(maps, n)?;
    let diagonal = maps.iter().all(QuantumMap::all_diagonal);
    let counts: Vec<usize> = maps.iter().map(|m| m.kraus.len()).collect();
    let mut index = vec![0usize; maps.len()];
    let mut total = 0.0;
    loop {
        let mut amp = ZERO;
        for j in 0..n {
            if diagonal {
                amp += maps.iter().zip(&index).map(|(m, &s)| m.kraus[s][(j, j)]).product::<C64>();
            } else {
                for k in 0..n {
                    amp += maps.iter().zip(&index).map(|(m, &s)| m.kraus[s][(j, k)]).product::<C64>();
                }
            }
        }
        total += amp.norm_sqr();
        // Mixed-radix increment.
        let mut pos = 0;
        loop {
            if pos == index.len() {
                return Ok(total);
            }
            index[pos] += 1;
            if index[pos] < counts[pos] {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
    }
}

fn check_permutation(perm: &[usize], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    if perm.len() != m {
        return Err(Error::Validation(format!("permutation of length {} for {m} maps", perm.len())));
    }
    for &p in perm {
        if p >= m || seen[p] {
            return Err(Error::Validation(format!("{perm:?} is not a permutation of 0..{m}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Sequential diagram: `perm[0]` acts first.
pub fn sequential_scalar(maps: &[QuantumMap], perm: &[usize], n: usize) -> Result<f64> {
    check_dims(maps, n)?;
    check_permutation(perm, maps.len())?;
    let eta = vec![ONE; n];
    let mut rho = ComplexMatrix::outer(&eta, &eta);
    for &p in perm {
        rho = maps[p].apply(&rho);
    }
    Ok(rho.data().iter().sum::<C64>().re)
}

/// Phase family for sweeps: at angle `phi` the phases are `generator * phi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTemplate {
    pub generator: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SweepTemplate {
    /// Qubit phase gate `diag(1, e^{-i phi})` with dephasing weights.
    pub fn qubit(weights: [f64; 2]) -> Self {
        Self { generator: vec![0.0, 1.0], weights: weights.to_vec() }
    }

    pub fn n(&self) -> usize {
        self.generator.len()
    }

    pub fn at(&self, phi: f64) -> Result<DephasingPhaseMap> {
        DephasingPhaseMap::new(self.generator.iter().map(|g| g * phi).collect(), self.weights.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub phi: f64,
    pub p_parallel: f64,
    pub p_sequential: f64,
    pub fisher: Option<f64>,
}

/// Below this `p (1 - p)` the Fisher information is reported as missing.
pub const FISHER_FLOOR: f64 = 1e-12;

/// Probabilities at each grid angle for `m` copies of the template map, and
/// the classical Fisher information `(dp/dphi)^2 / (p (1 - p))` by central
/// differences on the parallel column (missing at the endpoints).
pub fn sweep(template: &SweepTemplate, m: usize, grid: &[f64]) -> Result<Vec<SweepRow>> {
    if grid.len() < 3 {
        return Err(Error::Validation("sweep grid needs at least 3 points".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation("sweep grid must be strictly ascending".into()));
    }
    if m == 0 {
        return Err(Error::Validation("m must be positive".into()));
    }
    let n = template.n();
    let norm = (n * n) as f64;
    let identity: Vec<usize> = (0..m).collect();
    let probs: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&phi| {
            let map = kraus_of(&template.at(phi)?);
            let maps = vec![map; m];
            Ok((parallel_scalar(&maps, n)? / norm, sequential_scalar(&maps, &identity, n)? / norm))
        })
        .collect::<Result<_>>()?;

    let last = grid.len() - 1;
    Ok((0..grid.len())
        .map(|i| {
            let (p, q) = probs[i];
            let fisher = if i == 0 || i == last || p * (1.0 - p) < FISHER_FLOOR {
                None
            } else {
                let dp = (probs[i + 1].0 - probs[i - 1].0) / (grid[i + 1] - grid[i - 1]);
                Some(dp * dp / (p * (1.0 - p)))
            };
            SweepRow { phi: grid[i], p_parallel: p, p_sequential: q, fisher }
        })
        .collect())
}

/// `steps` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps < 2 {
        return vec![lo];
    }
    let h = (hi - lo) / (steps - 1) as f64;
    let mut grid: Vec<f64> = (0..steps).map(|i| lo + h * i as f64).collect();
    grid[steps - 1] = hi;
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequentializationReport {
    pub n: usize,
    pub m: usize,
    pub parallel: f64,
    pub sequential: Vec<f64>,
    pub permutations: Vec<Vec<usize>>,
    pub max_deviation: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compares the parallel scalar with the sequential one over sampled
/// permutations (identity and reversal always included).
pub fn verify_sequentialization(
    maps: &[QuantumMap],
    n: usize,
    num_perms: usize,
    seed: u64,
    tol: f64,
) -> Result<SequentializationReport> {
    check_dims(maps, n)?;
    let basis = standard_basis(n);
    for (i, map) in maps.iter().enumerate() {
        if !is_compatible(map, &basis, tol.max(1e-9))? {
            return Err(Error::Precondition(format!(
                "map {i} is not compatible with the standard copy structure"
            )));
        }
    }
    let m = maps.len();
    let identity: Vec<usize> = (0..m).collect();
    let mut perms = vec![identity.clone()];
    let reversed: Vec<usize> = identity.iter().rev().copied().collect();
    if !perms.contains(&reversed) {
        perms.push(reversed);
    }
    let distinct: usize = (1..=m).try_fold(1usize, |acc, k| acc.checked_mul(k)).unwrap_or(usize::MAX);
    let target = num_perms.max(1).min(distinct);
    let mut rng = rng_from_seed(derive_seed(seed, 0));
    while perms.len() < target {
        let mut p = identity.clone();
        p.shuffle(&mut rng);
        if !perms.contains(&p) {
            perms.push(p);
        }
    }
    perms.truncate(target);

    let parallel = parallel_scalar(maps, n)?;
    let sequential: Vec<f64> =
        perms.iter().map(|p| sequential_scalar(maps, p, n)).collect::<Result<_>>()?;
    let max_deviation = sequential.iter().map(|s| (s - parallel).abs()).fold(0.0, f64::max);
    let pass = max_deviation <= tol * parallel.abs().max(1.0);
    Ok(SequentializationReport { n, m, parallel, sequential, permutations: perms, max_deviation, tol, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hadamard() -> QuantumMap {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        QuantumMap::unitary(ComplexMatrix::from_real(2, 2, &[h, h, h, -h]).unwrap(), 1e-12).unwrap()
    }

    #[test]
    fn pure_rotation_single_kraus() {
        let q = kraus_of(&DephasingPhaseMap::pure(vec![0.1, 0.2, 0.3]).unwrap());
        assert_eq!(q.kraus().len(), 1);
        for (j, phi) in [0.1, 0.2, 0.3].iter().enumerate() {
            assert!((q.kraus()[0][(j, j)] - C64::from_polar(1.0, -phi)).norm() < 1e-15);
        }
    }

    #[test]
    fn qubit_dephasing_kraus_pair() {
        let phi = 0.7;
        let (r0, r1) = (0.8, 0.2);
        let q = kraus_of(&DephasingPhaseMap::new(vec![0.0, phi], vec![r0, r1]).unwrap());
        let e = C64::from_polar(1.0, -phi);
        let b0 = ComplexMatrix::from_diagonal(&[ONE, e]).scale_real(f64::sqrt(r0));
        let b1 = ComplexMatrix::from_diagonal(&[ONE, -e]).scale_real(f64::sqrt(r1));
        assert!(q.kraus()[0].approx_eq(&b0, 1e-15));
        assert!(q.kraus()[1].approx_eq(&b1, 1e-15));
    }

    #[test]
    fn bad_weights_rejected() {
        assert!(matches!(
            DephasingPhaseMap::new(vec![0.0, 0.0], vec![0.5, 0.6]),
            Err(Error::Validation(_))
        ));
        assert!(DephasingPhaseMap::new(vec![0.0, 0.0], vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn compatibility_examples() {
        let std2 = standard_basis(2);
        let mut rng = rng_from_seed(5);
        let q = kraus_of(&DephasingPhaseMap::random(&mut rng, 2));
        assert!(is_compatible(&q, &std2, 1e-9).unwrap());
        assert!(!is_compatible(&hadamard(), &std2, 1e-9).unwrap());
        assert!(is_compatible(&QuantumMap::identity(3), &standard_basis(3), 1e-9).unwrap());
        assert!(matches!(is_compatible(&q, &standard_basis(3), 1e-9), Err(Error::Dimension(_))));
    }

    #[test]
    fn commuting_kraus_examples() {
        let mut rng = rng_from_seed(6);
        assert!(has_commuting_kraus(&kraus_of(&DephasingPhaseMap::random(&mut rng, 3)), 1e-9).unwrap());
        let k0 = ComplexMatrix::from_real(2, 2, &[1., 0., 0., 0.]).unwrap();
        let k1 = ComplexMatrix::from_real(2, 2, &[0., 1., 0., 0.]).unwrap();
        let amp = QuantumMap::new(vec![k0, k1], TraceMode::Preserving, 1e-12).unwrap();
        assert!(!has_commuting_kraus(&amp, 1e-9).unwrap());
        assert!(has_commuting_kraus(&hadamard(), 1e-9).unwrap());
    }

    #[test]
    fn canonical_kraus_reproduces_channel() {
        let mut rng = rng_from_seed(8);
        let q = kraus_of(&DephasingPhaseMap::random(&mut rng, 3));
        let ops = canonical_kraus(&q, 1e-12).unwrap();
        let rebuilt = Superoperator::from_kraus(&ops).unwrap();
        assert!(rebuilt.matrix().approx_eq(q.superoperator().matrix(), 1e-12));
    }

    #[test]
    fn identity_scalars() {
        let maps = vec![QuantumMap::identity(2); 2];
        assert!((parallel_scalar(&maps, 2).unwrap() - 4.0).abs() < 1e-12);
        assert!((sequential_scalar(&maps, &[0, 1], 2).unwrap() - 4.0).abs() < 1e-12);
        for m in 1..=5 {
            let maps = vec![QuantumMap::identity(3); m];
            assert!((parallel_scalar(&maps, 3).unwrap() - 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_rotation_three_copies() {
        for phi in [0.0, 0.4, PI / 3.0, 1.9] {
            let q = kraus_of(&DephasingPhaseMap::pure(vec![0.0, phi]).unwrap());
            let maps = vec![q; 3];
            let expect = 4.0 * (1.5 * phi).cos().powi(2);
            assert!((parallel_scalar(&maps, 2).unwrap() - expect).abs() < 1e-12);
            for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                assert!((sequential_scalar(&maps, &perm, 2).unwrap() - expect).abs() < 1e-12);
            }
        }
        let q = kraus_of(&DephasingPhaseMap::pure(vec![0.0, PI / 3.0]).unwrap());
        assert!(parallel_scalar(&vec![q; 3], 2).unwrap().abs() < 1e-12);
    }

    #[test]
    fn dephasing_closed_form() {
        let (r0, r1) = (0.7, 0.3);
        for m in 1..=5 {
            for phi in [0.2, 1.1, 2.5] {
                let q = kraus_of(&DephasingPhaseMap::new(vec![0.0, phi], vec![r0, r1]).unwrap());
                let maps = vec![q; m];
                let expect = 2.0 + 2.0 * (r0 - r1).powi(m as i32) * (m as f64 * phi).cos();
                assert!((parallel_scalar(&maps, 2).unwrap() - expect).abs() < 1e-12);
                let perm: Vec<usize> = (0..m).collect();
                assert!((sequential_scalar(&maps, &perm, 2).unwrap() - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn general_kraus_path_matches_density_matrix_oracle() {
        // Non-diagonal maps: compare the Kraus-sum formula with an explicit
        // n^m x n^m density-matrix evaluation.
        let n = 2;
        let q = hadamard();
        let maps = vec![q.clone(), QuantumMap::identity(2)];
        let eta: Vec<C64> = (0..4).map(|i| if i == 0 || i == 3 { ONE } else { ZERO }).collect();
        let rho = ComplexMatrix::outer(&eta, &eta);
        let big = kron(&q.kraus()[0], &ComplexMatrix::identity(2));
        let out = &(&big * &rho) * &big.dagger();
        let expect: C64 = (0..4).flat_map(|a| (0..4).map(move |b| (a, b))).filter(|&(a, b)| eta[a] != ZERO && eta[b] != ZERO).map(|(a, b)| out[(a, b)]).sum();
        assert!((parallel_scalar(&maps, n).unwrap() - expect.re).abs() < 1e-12);
    }

    #[test]
    fn invalid_permutation_rejected() {
        let maps = vec![QuantumMap::identity(2); 3];
        assert!(sequential_scalar(&maps, &[0, 0, 1], 2).is_err());
        assert!(sequential_scalar(&maps, &[0, 1], 2).is_err());
    }

    #[test]
    fn sweep_examples() {
        let noiseless = SweepTemplate::qubit([1.0, 0.0]);
        let rows = sweep(&noiseless, 4, &[0.2, 0.3, 0.4]).unwrap();
        assert!((rows[1].p_parallel - 0.6f64.cos().powi(2)).abs() < 1e-12);
        assert!(rows[0].fisher.is_none() && rows[2].fisher.is_none());
        assert!(sweep(&noiseless, 4, &[0.1, 0.2]).is_err());
        assert!(sweep(&noiseless, 4, &[0.3, 0.2, 0.4]).is_err());
    }

    #[test]
    fn sequentialization_examples() {
        let mut rng = rng_from_seed(9);
        let maps: Vec<QuantumMap> = (0..5).map(|_| kraus_of(&DephasingPhaseMap::random(&mut rng, 3))).collect();
        let r = verify_sequentialization(&maps, 3, 20, 1, 1e-9).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.permutations.len(), 20);

        let one = verify_sequentialization(&maps[..1], 3, 20, 1, 1e-9).unwrap();
        assert!(one.pass);
        assert_eq!(one.permutations.len(), 1);

        let mixed = vec![kraus_of(&DephasingPhaseMap::random(&mut rng, 2)), hadamard()];
        assert!(matches!(
            verify_sequentialization(&mixed, 2, 5, 1, 1e-9),
            Err(Error::Precondition(msg)) if msg.contains("map 1")
        ));
    }
}
