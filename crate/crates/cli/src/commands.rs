use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cpm_core::classical::{
    comultiplication_superop, condition_report, is_cp, pauli_basis, ConditionOptions, ConditionReport, SubsetMode,
};
use cpm_core::linalg::hermitian_spectrum;
use cpm_core::metrology::{
    kraus_of, linear_grid, sweep, verify_sequentialization, DephasingPhaseMap, QuantumMap, SequentializationReport,
    SweepRow, SweepTemplate,
};
use cpm_core::rel::{enumerate_partial, EnumerationOptions};
use cpm_core::rng::{derive_seed, rng_from_seed};
use cpm_core::search::{run_search, SearchConfig};
use serde::Serialize;

use crate::error::{CliError, CliResult, EXIT_COUNTEREXAMPLE, EXIT_NEGATIVE, EXIT_OK};
use crate::formats::{self, envelope, BasisFile, MapFile};
use crate::{CheckBasisArgs, Command, Format, MetrologyCommand, RelArgs, SearchArgs, SweepArgs, VerifyArgs};

fn io(e: std::io::Error) -> CliError {
    CliError::io("writing output", e)
}

fn workers(requested: Option<usize>) -> CliResult<usize> {
    match requested {
        Some(0) => Err(CliError::Usage("--workers must be positive".into())),
        Some(w) => Ok(w),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    match command {
        Command::CheckBasis(a) => check_basis(&a, out),
        Command::PauliDemo => {
            write!(out, "{}", pauli_demo()?.render()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Search(a) => search(&a, out),
        Command::RelEnumerate(a) => rel_enumerate(&a, out),
        Command::Metrology(MetrologyCommand::Sweep(a)) => metrology_sweep(&a, out, err),
        Command::Metrology(MetrologyCommand::Verify(a)) => metrology_verify(&a, out),
    }
}

fn verdict_code(report: &ConditionReport) -> i32 {
    match (report.is_cp, report.is_canonical) {
        (false, _) => EXIT_NEGATIVE,
        (true, false) => EXIT_COUNTEREXAMPLE,
        (true, true) => EXIT_OK,
    }
}

fn render_report(report: &ConditionReport) -> String {
    let mut s = format!("n = {}\n", report.n);
    for (name, check) in report.checks() {
        let flag = if check.holds { "PASS" } else { "FAIL" };
        s += &format!("{flag} {name:<34} metric = {:.6e}", check.metric);
        if let Some(w) = &check.witness {
            s += &format!("  [{w}]");
        }
        s.push('\n');
    }
    if report.identity_subset_heuristic {
        s += "note: identity subset sum used the heuristic candidate only\n";
    }
    s += &format!("min Choi eigenvalue = {:.12}\n", report.min_choi_eigenvalue);
    s += &format!("completely positive: {}\ncanonical: {}\n", report.is_cp, report.is_canonical);
    s
}

fn check_basis(a: &CheckBasisArgs, out: &mut dyn Write) -> CliResult<i32> {
    let start = Instant::now();
    let basis = BasisFile::load(&a.input, a.tol, !a.no_validate)?;
    let opts = ConditionOptions { tol: a.tol, samples: a.samples, seed: a.seed, subset_mode: SubsetMode::Auto };
    let report = condition_report(&basis, &opts)?;
    let code = verdict_code(&report);
    match a.format {
        Format::Json => {
            let text = envelope("check-basis", a, Some(a.seed), start.elapsed().as_secs_f64(), &report)?;
            out.write_all(text.as_bytes()).map_err(io)?;
        }
        Format::Text => out.write_all(render_report(&report).as_bytes()).map_err(io)?,
    }
    if code == EXIT_COUNTEREXAMPLE {
        let dump = formats::to_json(&BasisFile::new(&basis))?;
        writeln!(out, "COUNTEREXAMPLE: completely positive but not canonical").map_err(io)?;
        write!(out, "{dump}").map_err(io)?;
        writeln!(out, "replay: cpm-workbench check-basis --input {} --tol {}", a.input.display(), a.tol).map_err(io)?;
    }
    Ok(code)
}

/// Numbers behind the Pauli-basis counterexample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PauliDemo {
    /// Spectrum of `sqrt(2) alpha_1 + alpha_2 + alpha_4`.
    pub combination_eigenvalues: Vec<f64>,
    /// Spectrum of its image under the copy map.
    pub image_eigenvalues: Vec<f64>,
    pub choi_min_eigenvalue: f64,
    pub is_cp: bool,
}

impl PauliDemo {
    pub fn image_min(&self) -> f64 {
        self.image_eigenvalues.last().copied().unwrap_or(f64::NAN)
    }

    pub fn render(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:.12}")).collect::<Vec<_>>().join(", ");
        let mut s = String::from("Pauli basis {I, X, Y, Z}/sqrt(2)\n");
        s += &format!("eigenvalues of sqrt(2) a1 + a2 + a4: [{}]\n", list(&self.combination_eigenvalues));
        s += &format!("eigenvalues of its 4x4 image: [{}]\n", list(&self.image_eigenvalues));
        s += &format!(
            "negative image eigenvalue: {:.12} (expected (sqrt(2) - 2)/2 = {:.12})\n",
            self.image_min(),
            (2f64.sqrt() - 2.0) / 2.0
        );
        s += &format!("min Choi eigenvalue: {:.12}\n", self.choi_min_eigenvalue);
        s += if self.is_cp { "verdict: completely positive\n" } else { "verdict: NOT completely positive\n" };
        s
    }
}

pub fn pauli_demo() -> CliResult<PauliDemo> {
    let basis = pauli_basis();
    let a = basis.elements();
    let combination = &(&a[0].scale_real(2f64.sqrt()) + &a[1]) + &a[3];
    let image = comultiplication_superop(&basis).apply(&combination)?;
    let cp = is_cp(&basis, cpm_core::DEFAULT_TOL)?;
    Ok(PauliDemo {
        combination_eigenvalues: hermitian_spectrum(&combination)?.eigenvalues,
        image_eigenvalues: hermitian_spectrum(&image)?.eigenvalues,
        choi_min_eigenvalue: cp.min_eigenvalue,
        is_cp: cp.is_cp,
    })
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    path.with_file_name(name)
}

fn search(a: &SearchArgs, out: &mut dyn Write) -> CliResult<i32> {
    let config = SearchConfig {
        n: a.n as usize,
        trials: a.trials,
        master_seed: a.seed,
        tol: a.tol,
        workers: workers(a.workers)?,
    };
    let report = run_search(&config)?;
    let text = envelope("search", a, Some(a.seed), report.wall_time, &report)?;
    formats::write(&a.out, &text)?;
    writeln!(
        out,
        "n = {}: {} trials, {} CP, {} canonical, {} near misses, {} counterexamples ({:.2} s)",
        report.n,
        report.trials_run,
        report.cp_count,
        report.canonical_count,
        report.near_miss_count,
        report.counterexamples.len(),
        report.wall_time
    )
    .map_err(io)?;
    writeln!(
        out,
        "min Choi eigenvalue range: [{:.6e}, {:.6e}]",
        report.min_choi_eigenvalue_range[0], report.min_choi_eigenvalue_range[1]
    )
    .map_err(io)?;
    if report.counterexamples.is_empty() {
        return Ok(EXIT_OK);
    }
    for cx in &report.counterexamples {
        let path = sibling(&a.out, &format!(".cx-{}.json", cx.trial));
        let file = BasisFile { format_version: formats::FORMAT_VERSION, record: cx.basis.clone() };
        file.save(&path)?;
        writeln!(
            out,
            "COUNTEREXAMPLE trial {} (seed {}): replay with cpm-workbench check-basis --input {}",
            cx.trial,
            cx.seed,
            path.display()
        )
        .map_err(io)?;
    }
    Ok(EXIT_COUNTEREXAMPLE)
}

fn rel_enumerate(a: &RelArgs, out: &mut dyn Write) -> CliResult<i32> {
    let start = Instant::now();
    let opts = EnumerationOptions {
        cap: if a.no_cap { u64::MAX } else { a.cap },
        workers: workers(a.workers)?,
        start_partition: a.start_partition,
    };
    let report = enumerate_partial(a.size as usize, &opts)?;
    let text = envelope("rel-enumerate", a, None, start.elapsed().as_secs_f64(), &report)?;
    formats::write(&a.out, &text)?;
    writeln!(
        out,
        "|X| = {}: {} candidates over {} partitions, {} survivors, {} canonical structures",
        report.x_size,
        report.candidates,
        report.partitions,
        report.survivors.len(),
        report.canonical.len()
    )
    .map_err(io)?;
    if let Some(p) = report.incomplete {
        return Err(CliError::Budget { processed: p.processed, next_partition: p.next_partition });
    }
    if report.survivors_match_canonical {
        writeln!(out, "survivors equal the canonical structures").map_err(io)?;
        return Ok(EXIT_OK);
    }
    if a.start_partition > 0 {
        writeln!(out, "resumed run covers part of the search; no comparison made").map_err(io)?;
        return Ok(EXIT_NEGATIVE);
    }
    for s in report.survivors.iter().filter(|s| !s.is_canonical) {
        writeln!(out, "NON-CANONICAL SURVIVOR: {}", serde_json::to_string(&s.groupoid).unwrap_or_default())
            .map_err(io)?;
    }
    Ok(EXIT_COUNTEREXAMPLE)
}

fn dephasing_weights(n: usize, weights: &Option<Vec<f64>>) -> CliResult<Vec<f64>> {
    let w = weights.clone().unwrap_or_else(|| (0..n).map(|s| if s == 0 { 1.0 } else { 0.0 }).collect());
    if w.len() != n {
        return Err(CliError::Usage(format!("--weights needs {n} values, got {}", w.len())));
    }
    Ok(w)
}

/// `(max p - min p) / 2` over the parallel column.
pub fn fringe_amplitude(rows: &[SweepRow]) -> f64 {
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.p_parallel), hi.max(r.p_parallel)));
    (hi - lo) / 2.0
}

pub fn peak_fisher(rows: &[SweepRow]) -> Option<f64> {
    rows.iter().filter_map(|r| r.fisher).reduce(f64::max)
}

/// CSV text with header `phi,p_parallel,p_sequential,fisher`; a missing
/// Fisher value is an empty field.
pub fn sweep_csv(rows: &[SweepRow]) -> CliResult<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Data(e.to_string());
    w.write_record(["phi", "p_parallel", "p_sequential", "fisher"]).map_err(fail)?;
    for r in rows {
        let fisher = r.fisher.map(|f| f.to_string()).unwrap_or_default();
        w.write_record([r.phi.to_string(), r.p_parallel.to_string(), r.p_sequential.to_string(), fisher])
            .map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Data(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Data(e.to_string()))
}

fn metrology_sweep(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let start = Instant::now();
    let generator = a.phases.clone().unwrap_or_else(|| (0..a.n).map(|j| j as f64).collect());
    if generator.len() != a.n {
        return Err(CliError::Usage(format!("--phases needs {} values, got {}", a.n, generator.len())));
    }
    let template = SweepTemplate { generator, weights: dephasing_weights(a.n, &a.weights)? };
    template.at(0.0)?;
    let rows = sweep(&template, a.m, &linear_grid(a.phi_min, a.phi_max, a.steps))?;
    let csv_text = sweep_csv(&rows)?;
    let summary = format!(
        "peak_fisher = {}\nfringe_amplitude = {}\n",
        peak_fisher(&rows).map_or("none".to_string(), |f| f.to_string()),
        fringe_amplitude(&rows)
    );
    match &a.out {
        Some(path) => {
            formats::write(path, &csv_text)?;
            let manifest = formats::RunManifest::new("metrology sweep", a, None, start.elapsed().as_secs_f64(), &csv_text)?;
            formats::write(&sibling(path, ".manifest.json"), &formats::to_json(&manifest)?)?;
            out.write_all(summary.as_bytes()).map_err(io)?;
        }
        None => {
            out.write_all(csv_text.as_bytes()).map_err(io)?;
            err.write_all(summary.as_bytes()).map_err(io)?;
        }
    }
    Ok(EXIT_OK)
}

fn verify_maps(a: &VerifyArgs) -> CliResult<Vec<QuantumMap>> {
    if a.m == 0 || a.n == 0 {
        return Err(CliError::Usage("--n and --m must be positive".into()));
    }
    if let Some(path) = &a.map {
        let map = MapFile::load(path, a.tol.max(1e-12))?;
        if map.n() != a.n {
            return Err(CliError::Data(format!("map acts on C^{}, expected C^{}", map.n(), a.n)));
        }
        return Ok(vec![map; a.m]);
    }
    if let Some(phases) = &a.phases {
        if phases.len() != a.n {
            return Err(CliError::Usage(format!("--phases needs {} values, got {}", a.n, phases.len())));
        }
        let map = DephasingPhaseMap::new(phases.clone(), dephasing_weights(a.n, &a.weights)?)?;
        return Ok(vec![kraus_of(&map); a.m]);
    }
    if a.weights.is_some() {
        return Err(CliError::Usage("--weights requires --phases".into()));
    }
    let mut rng = rng_from_seed(derive_seed(a.seed, 1));
    Ok((0..a.m).map(|_| kraus_of(&DephasingPhaseMap::random(&mut rng, a.n))).collect())
}

fn metrology_verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult<i32> {
    let start = Instant::now();
    let maps = verify_maps(a)?;
    let report: SequentializationReport = verify_sequentialization(&maps, a.n, a.perms, a.seed, a.tol)?;
    if let Some(path) = &a.out {
        let text = envelope("metrology verify", a, Some(a.seed), start.elapsed().as_secs_f64(), &report)?;
        formats::write(path, &text)?;
    }
    writeln!(out, "parallel = {}", report.parallel).map_err(io)?;
    writeln!(out, "permutations = {}", report.permutations.len()).map_err(io)?;
    writeln!(out, "max_deviation = {:e}", report.max_deviation).map_err(io)?;
    writeln!(out, "{}", if report.pass { "PASS" } else { "FAIL" }).map_err(io)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_NEGATIVE })
}
