//! Randomized counterexample search: bases of `M_n` that are completely
//! positive but not canonical.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{is_canonical, is_cp, MatrixBasis};
use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt, ComplexMatrix, C64};
use crate::rng::{derive_seed, gaussian_matrix, rng_from_seed};

const MAX_ATTEMPTS: u64 = 8;
/// Non-CP trials whose minimal Choi eigenvalue lies in `[-NEAR_MISS, 0)`.
pub const NEAR_MISS: f64 = 1e-6;

/// `n^2` standard complex Gaussian matrices through modified Gram–Schmidt.
///
/// Deterministic in `(n, seed)`. A dependent draw (probability zero in
/// exact arithmetic) is retried from `derive_seed(seed, attempt)`.
pub fn random_orthonormal_basis(n: usize, seed: u64) -> Result<MatrixBasis> {
    if n == 0 {
        return Err(Error::Validation("n must be positive".into()));
    }
    let mut last = None;
    for attempt in 0..MAX_ATTEMPTS {
        let s = if attempt == 0 { seed } else { derive_seed(seed, attempt) };
        let mut rng = rng_from_seed(s);
        let raw: Vec<ComplexMatrix> = (0..n * n).map(|_| gaussian_matrix(&mut rng, n, n)).collect();
        match gram_schmidt(&raw, 1e-9) {
            Ok(q) => return MatrixBasis::new(q, 1e-9),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Validation("basis generation failed".into())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub trials: u64,
    pub master_seed: u64,
    pub tol: f64,
    pub workers: usize,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.trials == 0 || self.workers == 0 {
            return Err(Error::Validation("n, trials and workers must be positive".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Validation("tol must be positive".into()));
        }
        Ok(())
    }
}

/// Plain nested-array form of a basis: `matrices[a][i][j] = [re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisRecord {
    pub n: usize,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

impl BasisRecord {
    pub fn from_basis(basis: &MatrixBasis) -> Self {
        let n = basis.n();
        let matrices = basis
            .elements()
            .iter()
            .map(|m| (0..n).map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect()).collect())
            .collect();
        Self { n, matrices }
    }

    fn to_elements(&self) -> Result<Vec<ComplexMatrix>> {
        self.matrices
            .iter()
            .enumerate()
            .map(|(a, rows)| {
                if rows.len() != self.n || rows.iter().any(|r| r.len() != self.n) {
                    return Err(Error::Basis(format!("matrix {a} is not {0}x{0}", self.n)));
                }
                let data = rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
                ComplexMatrix::new(self.n, self.n, data)
            })
            .collect()
    }

    pub fn to_basis(&self, tol: f64) -> Result<MatrixBasis> {
        MatrixBasis::new(self.to_elements()?, tol)
    }

    pub fn to_basis_unvalidated(&self) -> Result<MatrixBasis> {
        MatrixBasis::new_unvalidated(self.to_elements()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: u64,
    pub seed: u64,
    pub basis: BasisRecord,
    pub min_choi_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: u64,
    pub is_cp: bool,
    pub is_canonical: bool,
    pub min_choi_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub n: usize,
    pub master_seed: u64,
    pub tol: f64,
    pub trials_run: u64,
    pub cp_count: u64,
    pub canonical_count: u64,
    pub near_miss_count: u64,
    pub cp_trials: Vec<u64>,
    pub canonical_trials: Vec<u64>,
    pub counterexamples: Vec<Counterexample>,
    /// Smallest and largest minimal Choi eigenvalue over all trials.
    pub min_choi_eigenvalue_range: [f64; 2],
    #[serde(skip)]
    pub wall_time: f64,
}

/// Search with Gaussian bases from [`random_orthonormal_basis`].
pub fn run_search(config: &SearchConfig) -> Result<SearchReport> {
    run_search_with(config, random_orthonormal_basis)
}

/// Search with a caller-supplied basis generator `(n, trial_seed) -> basis`.
pub fn run_search_with<G>(config: &SearchConfig, generate: G) -> Result<SearchReport>
where
    G: Fn(usize, u64) -> Result<MatrixBasis> + Sync,
{
    config.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;

    let evaluate = |trial: u64| -> Result<(TrialOutcome, Option<Counterexample>)> {
        let seed = derive_seed(config.master_seed, trial);
        let basis = generate(config.n, seed)?;
        let cp = is_cp(&basis, config.tol)?;
        let canonical = is_canonical(&basis, config.tol)?.canonical;
        let outcome = TrialOutcome {
            trial,
            is_cp: cp.is_cp,
            is_canonical: canonical,
            min_choi_eigenvalue: cp.min_eigenvalue,
        };
        let cx = (cp.is_cp && !canonical).then(|| Counterexample {
            trial,
            seed,
            basis: BasisRecord::from_basis(&basis),
            min_choi_eigenvalue: cp.min_eigenvalue,
        });
        Ok((outcome, cx))
    };

    let results: Vec<(TrialOutcome, Option<Counterexample>)> =
        pool.install(|| (0..config.trials).into_par_iter().map(evaluate).collect::<Result<_>>())?;

    let mut report = SearchReport {
        n: config.n,
        master_seed: config.master_seed,
        tol: config.tol,
        trials_run: results.len() as u64,
        cp_count: 0,
        canonical_count: 0,
        near_miss_count: 0,
        cp_trials: Vec::new(),
        canonical_trials: Vec::new(),
        counterexamples: Vec::new(),
        min_choi_eigenvalue_range: [f64::INFINITY, f64::NEG_INFINITY],
        wall_time: 0.0,
    };
    for (o, cx) in results {
        if o.is_cp {
            report.cp_count += 1;
            report.cp_trials.push(o.trial);
        } else if (-NEAR_MISS..0.0).contains(&o.min_choi_eigenvalue) {
            report.near_miss_count += 1;
        }
        if o.is_canonical {
            report.canonical_count += 1;
            report.canonical_trials.push(o.trial);
        }
        let r = &mut report.min_choi_eigenvalue_range;
        r[0] = r[0].min(o.min_choi_eigenvalue);
        r[1] = r[1].max(o.min_choi_eigenvalue);
        report.counterexamples.extend(cx);
    }
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Re-checks a stored counterexample: `(is_cp, is_canonical)`.
pub fn replay(cx: &Counterexample, tol: f64) -> Result<(bool, bool)> {
    let basis = cx.basis.to_basis(tol.max(1e-9))?;
    Ok((is_cp(&basis, tol)?.is_cp, is_canonical(&basis, tol)?.canonical))
}
