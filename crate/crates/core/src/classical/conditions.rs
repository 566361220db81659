use serde::{Deserialize, Serialize};

use super::basis::MatrixBasis;
use super::canonical::is_canonical;
use super::superop::{choi, comultiplication_superop, delta_dag_id, Superoperator};
use crate::error::{Error, Result};
use crate::linalg::{
    absolute_value, hermitian_spectrum, is_psd, numerical_rank, operator_norm, psd_verdict,
    ComplexMatrix, C64,
};
use crate::rng::{density_matrix, derive_seed, hermitian_matrix, rng_from_seed, unit_vector};

/// Subset-sum strategy for the identity decomposition condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetMode {
    /// Exhaustive for `n <= 4`, heuristic above.
    Auto,
    /// Exhaustive; a capability error for `n > 4`.
    Exhaustive,
    /// Only the candidate `{alpha PSD, Tr alpha = 1}`.
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionOptions {
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub subset_mode: SubsetMode,
}

impl Default for ConditionOptions {
    fn default() -> Self {
        Self { tol: crate::DEFAULT_TOL, samples: 64, seed: 0, subset_mode: SubsetMode::Auto }
    }
}

/// Outcome of one condition. `metric` is the worst deviation seen (or the
/// quantity being bounded); `witness` names a violating instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub holds: bool,
    pub metric: f64,
    pub witness: Option<String>,
}

impl Check {
    fn pass(metric: f64) -> Self {
        Self { holds: true, metric, witness: None }
    }

    fn fail(metric: f64, witness: String) -> Self {
        Self { holds: false, metric, witness: Some(witness) }
    }

    fn from_bound(metric: f64, bound: f64, witness: impl FnOnce() -> String) -> Self {
        if metric <= bound {
            Self::pass(metric)
        } else {
            Self::fail(metric, witness())
        }
    }
}

/// Every sufficient and equivalent condition for a copy map, evaluated on
/// one basis. Field names follow the condition they test; lettered
/// comments give the usual labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub n: usize,
    // Necessary conditions for complete positivity.
    pub adjoint_closure: Check,
    pub absvalue_closure: Check,
    pub homomorphism_identity: Check,
    pub psd_copyables_commute: Check,
    // Properties of delta^dagger(I).
    pub ddag_id_psd: Check,
    pub ddag_id_invertible: Check,
    pub ddag_id_geq_id: Check,
    // Equivalent conditions (b)-(n).
    pub pure_state_preservation_sampled: Check,
    pub trace_preserving: Check,
    pub ddag_unital: Check,
    pub ddag_leq_id: Check,
    pub trace_nonincreasing_sampled: Check,
    pub opnorm_le_1: Check,
    pub identity_subset_sum: Check,
    /// True when the subset search was heuristic rather than exhaustive.
    pub identity_subset_heuristic: bool,
    pub psd_trace_one: Check,
    pub rank_one: Check,
    pub adjoint_square_closure: Check,
    pub composition_closure: Check,
    pub delta_id_idempotent: Check,
    pub kraus_rank_one: Check,
    pub is_cp: bool,
    pub is_canonical: bool,
    pub min_choi_eigenvalue: f64,
}

impl ConditionReport {
    /// `(name, check)` for every condition, in declaration order.
    pub fn checks(&self) -> Vec<(&'static str, &Check)> {
        vec![
            ("adjoint_closure", &self.adjoint_closure),
            ("absvalue_closure", &self.absvalue_closure),
            ("homomorphism_identity", &self.homomorphism_identity),
            ("psd_copyables_commute", &self.psd_copyables_commute),
            ("ddag_id_psd", &self.ddag_id_psd),
            ("ddag_id_invertible", &self.ddag_id_invertible),
            ("ddag_id_geq_id", &self.ddag_id_geq_id),
            ("pure_state_preservation_sampled", &self.pure_state_preservation_sampled),
            ("trace_preserving", &self.trace_preserving),
            ("ddag_unital", &self.ddag_unital),
            ("ddag_leq_id", &self.ddag_leq_id),
            ("trace_nonincreasing_sampled", &self.trace_nonincreasing_sampled),
            ("opnorm_le_1", &self.opnorm_le_1),
            ("identity_subset_sum", &self.identity_subset_sum),
            ("psd_trace_one", &self.psd_trace_one),
            ("rank_one", &self.rank_one),
            ("adjoint_square_closure", &self.adjoint_square_closure),
            ("composition_closure", &self.composition_closure),
            ("delta_id_idempotent", &self.delta_id_idempotent),
            ("kraus_rank_one", &self.kraus_rank_one),
        ]
    }

    /// The conditions that are equivalent to canonicity, (b) through (n).
    pub fn equivalent_checks(&self) -> Vec<(&'static str, &Check)> {
        self.checks().into_iter().skip(7).collect()
    }

    pub fn all_hold(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.holds) && self.is_cp && self.is_canonical
    }
}

struct Ctx<'a> {
    basis: &'a MatrixBasis,
    delta: Superoperator,
    tol: f64,
    samples: usize,
    seed: u64,
}

impl Ctx<'_> {
    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.delta.apply(rho).expect("shape fixed by basis")
    }

    fn is_psd(&self, m: &ComplexMatrix) -> Result<bool> {
        is_psd(m, self.tol)
    }

    fn psd_elements(&self) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, a) in self.basis.elements().iter().enumerate() {
            if self.is_psd(a)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Relative bound `tol * max(1, scale)`.
    fn bound(&self, scale: f64) -> f64 {
        self.tol * scale.max(1.0)
    }
}

pub fn condition_report(basis: &MatrixBasis, opts: &ConditionOptions) -> Result<ConditionReport> {
    if opts.samples == 0 {
        return Err(Error::Validation("samples must be at least 1".into()));
    }
    let n = basis.n();
    let exhaustive = match opts.subset_mode {
        SubsetMode::Auto => n <= 4,
        SubsetMode::Exhaustive if n > 4 => {
            return Err(Error::Capability(format!(
                "exhaustive subset search over 2^{} subsets (n = {n} > 4)",
                n * n
            )))
        }
        SubsetMode::Exhaustive => true,
        SubsetMode::Heuristic => false,
    };
    let ctx = Ctx {
        basis,
        delta: comultiplication_superop(basis),
        tol: opts.tol,
        samples: opts.samples,
        seed: opts.seed,
    };
    let ddag = delta_dag_id(basis);
    let psd = ctx.psd_elements()?;
    let choi_m = choi(basis).matrix;
    let choi_spec = hermitian_spectrum(&choi_m)?;

    Ok(ConditionReport {
        n,
        adjoint_closure: adjoint_closure(&ctx),
        absvalue_closure: absvalue_closure(&ctx)?,
        homomorphism_identity: homomorphism_identity(&ctx),
        psd_copyables_commute: psd_commute(&ctx, &psd)?,
        ddag_id_psd: bool_check(ctx.is_psd(&ddag)?, hermitian_spectrum(&ddag)?.min(), "delta^dagger(I) has a negative eigenvalue"),
        ddag_id_invertible: ddag_invertible(&ctx, &ddag)?,
        ddag_id_geq_id: ddag_vs_identity(&ctx, &ddag, true)?,
        pure_state_preservation_sampled: purity(&ctx)?,
        trace_preserving: trace_preserving(&ctx),
        ddag_unital: {
            let d = ddag.max_abs_diff(&ComplexMatrix::identity(n));
            Check::from_bound(d, ctx.tol, || format!("|delta^dagger(I) - I|_max = {d:e}"))
        },
        ddag_leq_id: ddag_vs_identity(&ctx, &ddag, false)?,
        trace_nonincreasing_sampled: trace_nonincreasing(&ctx),
        opnorm_le_1: {
            let norm = operator_norm(&ddag)?;
            Check::from_bound(norm, 1.0 + ctx.tol, || format!("||delta^dagger(I)|| = {norm}"))
        },
        identity_subset_sum: if exhaustive { subset_sum_exhaustive(&ctx) } else { subset_sum_heuristic(&ctx, &psd) },
        identity_subset_heuristic: !exhaustive,
        psd_trace_one: psd_trace_one(&ctx, &psd),
        rank_one: rank_one(&ctx)?,
        adjoint_square_closure: adjoint_square_closure(&ctx),
        composition_closure: composition_closure(&ctx),
        delta_id_idempotent: delta_id_idempotent(&ctx),
        kraus_rank_one: {
            let rank = numerical_rank(&choi_m, ctx.tol)?;
            bool_check(rank == 1, rank as f64, &format!("Choi rank {rank}"))
        },
        is_cp: psd_verdict(&choi_spec, ctx.tol),
        is_canonical: is_canonical(basis, ctx.tol)?.canonical,
        min_choi_eigenvalue: choi_spec.min(),
    })
}

fn bool_check(holds: bool, metric: f64, witness: &str) -> Check {
    if holds {
        Check::pass(metric)
    } else {
        Check::fail(metric, witness.to_string())
    }
}

fn adjoint_closure(ctx: &Ctx) -> Check {
    for (i, a) in ctx.basis.elements().iter().enumerate() {
        if ctx.basis.find(&a.dagger(), ctx.tol).is_none() {
            return Check::fail(1.0, format!("alpha_{i}^dagger is not a basis element"));
        }
    }
    Check::pass(0.0)
}

fn absvalue_closure(ctx: &Ctx) -> Result<Check> {
    for (i, a) in ctx.basis.elements().iter().enumerate() {
        if !ctx.basis.contains_or_zero(&absolute_value(a)?, ctx.tol) {
            return Ok(Check::fail(1.0, format!("|alpha_{i}| is neither 0 nor a basis element")));
        }
    }
    Ok(Check::pass(0.0))
}

/// `delta(I) delta(ab) = delta(a) delta(b)`: every ordered pair of basis
/// elements first, then random Hermitian pairs.
fn homomorphism_identity(ctx: &Ctx) -> Check {
    let n = ctx.basis.n();
    let d_id = ctx.apply(&ComplexMatrix::identity(n));
    let deviation = |a: &ComplexMatrix, b: &ComplexMatrix| {
        let lhs = &d_id * &ctx.apply(&(a * b));
        let rhs = &ctx.apply(a) * &ctx.apply(b);
        let scale = lhs.max_abs().max(rhs.max_abs());
        (lhs.max_abs_diff(&rhs), ctx.bound(scale))
    };
    let mut worst = 0.0_f64;
    let el = ctx.basis.elements();
    for (i, a) in el.iter().enumerate() {
        for (j, b) in el.iter().enumerate() {
            let (d, bound) = deviation(a, b);
            worst = worst.max(d);
            if d > bound {
                return Check::fail(d, format!("basis pair (alpha_{i}, alpha_{j})"));
            }
        }
    }
    let mut rng = rng_from_seed(derive_seed(ctx.seed, 0));
    for s in 0..ctx.samples {
        let a = hermitian_matrix(&mut rng, n);
        let b = hermitian_matrix(&mut rng, n);
        let (d, bound) = deviation(&a, &b);
        worst = worst.max(d);
        if d > bound {
            return Check::fail(d, format!("random Hermitian pair #{s}"));
        }
    }
    Check::pass(worst)
}

fn psd_commute(ctx: &Ctx, psd: &[usize]) -> Result<Check> {
    let el = ctx.basis.elements();
    let mut worst = 0.0_f64;
    for (x, &i) in psd.iter().enumerate() {
        for &j in &psd[x + 1..] {
            let c = el[i].commutator(&el[j])?.frobenius_norm();
            worst = worst.max(c);
            if c > ctx.tol {
                return Ok(Check::fail(c, format!("[alpha_{i}, alpha_{j}] != 0")));
            }
        }
    }
    Ok(Check::pass(worst))
}

fn ddag_invertible(ctx: &Ctx, ddag: &ComplexMatrix) -> Result<Check> {
    let spec = hermitian_spectrum(ddag)?;
    let smallest = spec.eigenvalues.iter().map(|e| e.abs()).fold(f64::INFINITY, f64::min);
    let ok = spec.residual <= ctx.bound(spec.spectral_radius()) && smallest > ctx.bound(spec.spectral_radius());
    Ok(bool_check(ok, smallest, "delta^dagger(I) is singular or not Hermitian"))
}

/// `ddag >= I` when `lower` is set, `ddag <= I` otherwise.
fn ddag_vs_identity(ctx: &Ctx, ddag: &ComplexMatrix, lower: bool) -> Result<Check> {
    let id = ComplexMatrix::identity(ddag.rows());
    let diff = if lower { ddag - &id } else { &id - ddag };
    let spec = hermitian_spectrum(&diff)?;
    let ok = psd_verdict(&spec, ctx.tol);
    let relation = if lower { ">= I" } else { "<= I" };
    Ok(bool_check(ok, spec.min(), &format!("delta^dagger(I) {relation} fails (min eigenvalue {:e})", spec.min())))
}

/// `delta(psi psi^dagger)` must be a pure state: Hermitian, unit trace,
/// unit purity, PSD.
fn purity(ctx: &Ctx) -> Result<Check> {
    let n = ctx.basis.n();
    let mut rng = rng_from_seed(derive_seed(ctx.seed, 1));
    let mut worst = 0.0_f64;
    for s in 0..ctx.samples {
        let psi = unit_vector(&mut rng, n);
        let out = ctx.apply(&ComplexMatrix::outer(&psi, &psi));
        let spec = hermitian_spectrum(&out)?;
        let trace_err = (out.trace() - C64::new(1.0, 0.0)).norm();
        let purity_err = ((&out * &out).trace() - C64::new(1.0, 0.0)).norm();
        let neg = (-spec.min()).max(0.0);
        let dev = trace_err.max(purity_err).max(neg).max(spec.residual);
        worst = worst.max(dev);
        if dev > ctx.tol {
            return Ok(Check::fail(
                dev,
                format!("sample #{s}: trace error {trace_err:e}, purity error {purity_err:e}, min eigenvalue {:e}", spec.min()),
            ));
        }
    }
    Ok(Check::pass(worst))
}

/// `Tr delta(|j><k|) = delta_jk` for every matrix unit.
fn trace_preserving(ctx: &Ctx) -> Check {
    let n = ctx.basis.n();
    let mut worst = 0.0_f64;
    let mut witness = None;
    for j in 0..n {
        for k in 0..n {
            let t: C64 = ctx
                .basis
                .elements()
                .iter()
                .map(|a| a[(j, k)].conj() * a.trace() * a.trace())
                .sum();
            let expect = if j == k { 1.0 } else { 0.0 };
            let d = (t - expect).norm();
            if d > worst {
                worst = d;
                witness = Some(format!("Tr delta(|{j}><{k}|) = {:.6}{:+.6}i", t.re, t.im));
            }
        }
    }
    match witness {
        Some(w) if worst > ctx.tol => Check::fail(worst, w),
        _ => Check::pass(worst),
    }
}

fn trace_nonincreasing(ctx: &Ctx) -> Check {
    let n = ctx.basis.n();
    let mut rng = rng_from_seed(derive_seed(ctx.seed, 2));
    let mut worst = f64::NEG_INFINITY;
    for s in 0..ctx.samples {
        let rho = density_matrix(&mut rng, n);
        let t = ctx.apply(&rho).trace();
        let excess = (t.re - 1.0).max(t.im.abs());
        worst = worst.max(excess);
        if excess > ctx.tol {
            return Check::fail(excess, format!("sample #{s}: Tr delta(rho) = {:.9}{:+.3e}i", t.re, t.im));
        }
    }
    Check::pass(worst)
}

/// Gray-code walk over all `2^(n^2)` subsets.
fn subset_sum_exhaustive(ctx: &Ctx) -> Check {
    let el = ctx.basis.elements();
    let n = ctx.basis.n();
    let id = ComplexMatrix::identity(n);
    let count = el.len();
    let mut sum = ComplexMatrix::zeros(n, n);
    let mut mask: u64 = 0;
    let mut best = f64::INFINITY;
    for g in 1u64..(1u64 << count) {
        let bit = g.trailing_zeros() as usize;
        mask ^= 1 << bit;
        if mask & (1 << bit) != 0 {
            sum = sum + el[bit].clone();
        } else {
            sum = sum - el[bit].clone();
        }
        let d = sum.max_abs_diff(&id);
        if d < 1e-6 {
            // Re-sum from scratch to shed accumulated rounding.
            let fresh = (0..count)
                .filter(|i| mask & (1 << i) != 0)
                .fold(ComplexMatrix::zeros(n, n), |acc, i| acc + el[i].clone());
            let d = fresh.max_abs_diff(&id);
            best = best.min(d);
            if d <= ctx.tol {
                let idx: Vec<usize> = (0..count).filter(|i| mask & (1 << i) != 0).collect();
                return Check { holds: true, metric: d, witness: Some(format!("subset {idx:?}")) };
            }
        } else {
            best = best.min(d);
        }
    }
    Check::fail(best, "no subset of the basis sums to the identity".into())
}

fn subset_sum_heuristic(ctx: &Ctx, psd: &[usize]) -> Check {
    let el = ctx.basis.elements();
    let n = ctx.basis.n();
    let chosen: Vec<usize> = psd
        .iter()
        .copied()
        .filter(|&i| (el[i].trace() - C64::new(1.0, 0.0)).norm() <= ctx.tol)
        .collect();
    let sum = chosen.iter().fold(ComplexMatrix::zeros(n, n), |acc, &i| acc + el[i].clone());
    let d = sum.max_abs_diff(&ComplexMatrix::identity(n));
    if d <= ctx.tol {
        Check { holds: true, metric: d, witness: Some(format!("subset {chosen:?} (heuristic)")) }
    } else {
        Check::fail(d, format!("heuristic subset {chosen:?} misses the identity"))
    }
}

fn psd_trace_one(ctx: &Ctx, psd: &[usize]) -> Check {
    let mut worst = 0.0_f64;
    for &i in psd {
        let d = (ctx.basis.elements()[i].trace() - C64::new(1.0, 0.0)).norm();
        worst = worst.max(d);
        if d > ctx.tol {
            return Check::fail(d, format!("Tr alpha_{i} = {}", ctx.basis.elements()[i].trace()));
        }
    }
    Check::pass(worst)
}

fn rank_one(ctx: &Ctx) -> Result<Check> {
    for (i, a) in ctx.basis.elements().iter().enumerate() {
        if a.max_abs() <= ctx.tol {
            continue;
        }
        let r = numerical_rank(a, ctx.tol)?;
        if r != 1 {
            return Ok(Check::fail(r as f64, format!("rank(alpha_{i}) = {r}")));
        }
    }
    Ok(Check::pass(1.0))
}

fn adjoint_square_closure(ctx: &Ctx) -> Check {
    for (i, a) in ctx.basis.elements().iter().enumerate() {
        if !ctx.basis.contains_or_zero(&(&a.dagger() * a), ctx.tol) {
            return Check::fail(1.0, format!("alpha_{i}^dagger alpha_{i} is not copyable"));
        }
    }
    Check::pass(0.0)
}

fn composition_closure(ctx: &Ctx) -> Check {
    let el = ctx.basis.elements();
    for (i, a) in el.iter().enumerate() {
        for (j, b) in el.iter().enumerate() {
            if !ctx.basis.contains_or_zero(&(a * b), ctx.tol) {
                return Check::fail(1.0, format!("alpha_{i} alpha_{j} is not copyable"));
            }
        }
    }
    Check::pass(0.0)
}

fn delta_id_idempotent(ctx: &Ctx) -> Check {
    let d = ctx.apply(&ComplexMatrix::identity(ctx.basis.n()));
    let dev = (&d * &d).max_abs_diff(&d);
    let bound = ctx.bound(d.max_abs());
    Check::from_bound(dev, bound, || format!("|delta(I)^2 - delta(I)|_max = {dev:e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{canonical_from_vectors, pauli_basis};
    use crate::rng::orthonormal_vectors;

    fn opts() -> ConditionOptions {
        ConditionOptions { samples: 16, ..Default::default() }
    }

    #[test]
    fn canonical_n2_all_true() {
        let r = condition_report(&MatrixBasis::matrix_units(2), &opts()).unwrap();
        for (name, c) in r.checks() {
            assert!(c.holds, "{name}: {c:?}");
        }
        assert!(r.is_cp && r.is_canonical);
        assert!(!r.identity_subset_heuristic);
    }

    #[test]
    fn one_dimensional_all_true() {
        let b = MatrixBasis::new(vec![ComplexMatrix::identity(1)], 1e-12).unwrap();
        let r = condition_report(&b, &opts()).unwrap();
        assert!(r.all_hold(), "{r:#?}");
    }

    #[test]
    fn pauli_profile() {
        let r = condition_report(&pauli_basis(), &opts()).unwrap();
        assert!(r.adjoint_closure.holds);
        assert!(r.absvalue_closure.holds);
        assert!(!r.homomorphism_identity.holds);
        assert_eq!(r.homomorphism_identity.witness.as_deref(), Some("basis pair (alpha_1, alpha_2)"));
        assert!(!r.opnorm_le_1.holds);
        assert!((r.opnorm_le_1.metric - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(!r.is_cp);
        assert!(!r.is_canonical);
        assert!(r.equivalent_checks().iter().any(|(_, c)| !c.holds));
        // delta^dagger(I) = sqrt(2) I satisfies all three lemma properties.
        assert!(r.ddag_id_psd.holds && r.ddag_id_invertible.holds && r.ddag_id_geq_id.holds);
    }

    #[test]
    fn pauli_homomorphism_witness_values() {
        // delta(a2) delta(a3) = -1/2 a4(x)a4 while delta(I) delta(a2 a3) = (i/2) a4(x)a4.
        let b = pauli_basis();
        let s = comultiplication_superop(&b);
        let el = b.elements();
        let a44 = crate::linalg::kron(&el[3], &el[3]);
        let lhs = &s.apply(&el[1]).unwrap() * &s.apply(&el[2]).unwrap();
        assert!(lhs.approx_eq(&a44.scale_real(-0.5), 1e-15));
        let rhs = &s.apply(&ComplexMatrix::identity(2)).unwrap() * &s.apply(&(&el[1] * &el[2])).unwrap();
        assert!(rhs.approx_eq(&a44.scale(C64::new(0.0, 0.5)), 1e-15));
    }

    #[test]
    fn random_canonical_n3_all_true() {
        let mut rng = rng_from_seed(3);
        let b = canonical_from_vectors(&orthonormal_vectors(&mut rng, 3), 1e-12).unwrap();
        let r = condition_report(&b, &opts()).unwrap();
        for (name, c) in r.checks() {
            assert!(c.holds, "{name}: {c:?}");
        }
        assert!(r.is_cp && r.is_canonical);
    }

    #[test]
    fn exhaustive_subset_refused_above_four() {
        let b = MatrixBasis::matrix_units(5);
        let o = ConditionOptions { subset_mode: SubsetMode::Exhaustive, ..opts() };
        assert!(matches!(condition_report(&b, &o), Err(Error::Capability(_))));
        let o = ConditionOptions { subset_mode: SubsetMode::Auto, samples: 2, ..opts() };
        let r = condition_report(&b, &o).unwrap();
        assert!(r.identity_subset_heuristic);
        assert!(r.identity_subset_sum.holds);
    }

    #[test]
    fn zero_samples_rejected() {
        let o = ConditionOptions { samples: 0, ..opts() };
        assert!(condition_report(&pauli_basis(), &o).is_err());
    }
}
