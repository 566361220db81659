//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cpm_core::classical::{
    canonical_from_vectors, choi, choi_from_superop, comultiplication_superop, condition_report, is_canonical, is_cp,
    pauli_basis, verify_frobenius, ConditionOptions, MatrixBasis,
};
use cpm_core::metrology::{kraus_of, linear_grid, sweep, verify_sequentialization, DephasingPhaseMap, SweepTemplate};
use cpm_core::rel::{
    all_groupoids, canonical_cpm_structure, groupoid_to_delta, is_cp_relation, kraus_relation_search, Doubling,
    FiniteRelation, EnumerationReport,
};
use cpm_core::rng::{orthonormal_vectors, rng_from_seed};
use cpm_core::search::{random_orthonormal_basis, SearchReport};
use cpm_workbench::commands::{fringe_amplitude, pauli_demo, peak_fisher};
use cpm_workbench::formats::Envelope;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("cpm-workbench").chain(args.iter().copied());
    let code = cpm_workbench::run(argv, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}

fn read_envelope<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Envelope<T>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("{what} took {t:?}, limit {limit:?}"))
}

fn pauli_fixture() -> Outcome {
    let start = Instant::now();
    let demo = pauli_demo().map_err(|e| e.to_string())?;
    let ev = &demo.combination_eigenvalues;
    ensure((ev[0] - 2.0).abs() < 1e-9 && ev[1].abs() < 1e-9, || format!("combination eigenvalues {ev:?}"))?;
    let expected = (2f64.sqrt() - 2.0) / 2.0;
    ensure((demo.image_min() - expected).abs() < 1e-9, || format!("image minimum {}", demo.image_min()))?;
    ensure(!demo.is_cp && demo.choi_min_eigenvalue < -0.1, || format!("Choi minimum {}", demo.choi_min_eigenvalue))?;
    let (code, text, _) = cli(&["pauli-demo"]);
    ensure(code == 0 && text.contains("NOT completely positive"), || format!("pauli-demo exit {code}"))?;
    within(start, Duration::from_secs(1), "Pauli demo")?;
    Ok(format!("image minimum {:.10}, Choi minimum {:.6}", demo.image_min(), demo.choi_min_eigenvalue))
}

fn canonical_suite() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        for trial in 0..100u64 {
            let seed = 1000 * n as u64 + trial;
            let basis = canonical_from_vectors(&orthonormal_vectors(&mut rng_from_seed(seed), n), 1e-12)
                .map_err(|e| e.to_string())?;
            let cp = is_cp(&basis, 1e-9).map_err(|e| e.to_string())?;
            ensure(cp.is_cp && cp.min_eigenvalue >= -1e-9, || format!("n={n} seed {seed}: min Choi {}", cp.min_eigenvalue))?;
            worst = worst.min(cp.min_eigenvalue);
            let opts = ConditionOptions { seed, ..Default::default() };
            let report = condition_report(&basis, &opts).map_err(|e| e.to_string())?;
            if let Some((name, c)) = report.checks().into_iter().find(|(_, c)| !c.holds) {
                return Err(format!("n={n} seed {seed}: {name} failed ({:?})", c.witness));
            }
            ensure(report.all_hold(), || format!("n={n} seed {seed}: report not all true"))?;
            ensure(is_canonical(&basis, 1e-9).map_err(|e| e.to_string())?.canonical, || {
                format!("n={n} seed {seed}: not recognised as canonical")
            })?;
        }
    }
    within(start, Duration::from_secs(30), "canonical suite")?;
    Ok(format!("300 families, worst min Choi eigenvalue {worst:.3e}"))
}

fn evidence_replication(dir: &Path) -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for n in ["2", "3"] {
        let out = dir.join(format!("search-{n}.json"));
        let (code, text, err) =
            cli(&["search", "--n", n, "--trials", "1000", "--seed", "2024", "--workers", "4", "--out", out.to_str().unwrap()]);
        ensure(code == 0, || format!("n={n}: exit {code}\n{text}{err}"))?;
        let env: Envelope<SearchReport> = read_envelope(&out)?;
        ensure(env.body.trials_run == 1000 && env.body.counterexamples.is_empty(), || format!("n={n}: report mismatch"))?;
        notes.push(format!("n={n}: {} CP of 1000", env.body.cp_count));
    }
    within(start, Duration::from_secs(600), "search")?;
    Ok(format!("{}, no counterexamples", notes.join("; ")))
}

fn rel_theorem(dir: &Path) -> Outcome {
    let mut notes = Vec::new();
    for (size, limit) in [(2usize, Duration::from_secs(1)), (3, Duration::from_secs(600))] {
        let start = Instant::now();
        let out = dir.join(format!("rel-{size}.json"));
        let s = size.to_string();
        let (code, text, err) = cli(&["rel-enumerate", "--size", &s, "--workers", "4", "--out", out.to_str().unwrap()]);
        let elapsed = start.elapsed();
        ensure(code == 0, || format!("size {size}: exit {code}\n{text}{err}"))?;
        ensure(elapsed < limit, || format!("size {size} took {elapsed:?}"))?;
        let env: Envelope<EnumerationReport> = read_envelope(&out)?;
        let survivors: BTreeSet<FiniteRelation> =
            env.body.survivors.iter().map(|s| groupoid_to_delta(&s.groupoid)).collect();
        let canonical: BTreeSet<FiniteRelation> = all_groupoids(size).iter().map(canonical_cpm_structure).collect();
        ensure(survivors == canonical, || {
            format!("size {size}: {} survivors vs {} canonical", survivors.len(), canonical.len())
        })?;
        notes.push(format!("|X|={size}: {} survivors = canonical ({:.2} s)", survivors.len(), elapsed.as_secs_f64()));
    }
    ensure(notes[0].contains(": 3 survivors") && notes[1].contains(": 10 survivors"), || notes.join("; "))?;
    Ok(notes.join("; "))
}

fn cp_oracle() -> Outcome {
    let start = Instant::now();
    let d = Doubling::single(2).map_err(|e| e.to_string())?;
    let mut cp = 0;
    for mask in 0u32..1 << 16 {
        let r = FiniteRelation::from_pairs(4, 4, (0..16).filter(|b| mask >> b & 1 == 1).map(|b| (b / 4, b % 4)))
            .map_err(|e| e.to_string())?;
        let by_conditions = is_cp_relation(&r, &d, &d).map_err(|e| e.to_string())?;
        let by_kraus = kraus_relation_search(&r, 2, 2, 4).map_err(|e| e.to_string())?.is_some();
        ensure(by_conditions == by_kraus, || format!("mismatch on relation {mask:#06x}"))?;
        cp += by_conditions as usize;
    }
    within(start, Duration::from_secs(60), "oracle")?;
    Ok(format!("65536 relations agree, {cp} completely positive"))
}

fn sequentialization() -> Outcome {
    let mut rng = rng_from_seed(77);
    let mut worst: f64 = 0.0;
    for draw in 0..25u64 {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=6);
        let maps: Vec<_> = (0..m).map(|_| kraus_of(&DephasingPhaseMap::random(&mut rng, n))).collect();
        let r = verify_sequentialization(&maps, n, 20, draw, 1e-9).map_err(|e| e.to_string())?;
        ensure(r.pass, || format!("draw {draw} (n={n}, m={m}): deviation {:e}", r.max_deviation))?;
        worst = worst.max(r.max_deviation / r.parallel.abs().max(1.0));
    }
    let (code, text, _) = cli(&["metrology", "verify", "--n", "3", "--m", "5", "--perms", "20"]);
    ensure(code == 0 && text.contains("PASS"), || format!("CLI verify exit {code}"))?;
    Ok(format!("25 draws, worst relative deviation {worst:.2e}"))
}

fn heisenberg_scaling() -> Outcome {
    let start = Instant::now();
    let grid = linear_grid(0.0, std::f64::consts::PI, 2001);
    let mut peaks = Vec::new();
    for m in [1usize, 2, 4, 8] {
        let rows = sweep(&SweepTemplate::qubit([1.0, 0.0]), m, &grid).map_err(|e| e.to_string())?;
        let peak = peak_fisher(&rows).ok_or("no Fisher values")?;
        let target = (m * m) as f64;
        ensure((peak - target).abs() <= 0.01 * target, || format!("m={m}: peak Fisher {peak}"))?;
        peaks.push(format!("{peak:.4}"));
    }
    let noisy = SweepTemplate::qubit([0.9, 0.1]);
    let rows = sweep(&noisy, 3, &linear_grid(0.0, std::f64::consts::PI / 3.0, 3)).map_err(|e| e.to_string())?;
    let amplitude = fringe_amplitude(&rows);
    ensure((amplitude - 0.256).abs() <= 1e-9, || format!("fringe amplitude {amplitude}"))?;
    let (code, text, _) = cli(&["metrology", "sweep", "--m", "4", "--out", "/dev/null"]);
    ensure(code == 0 && text.contains("peak_fisher"), || format!("CLI sweep exit {code}"))?;
    within(start, Duration::from_secs(5), "sweeps")?;
    Ok(format!("peaks [{}] for m = 1,2,4,8; amplitude {amplitude:.12}", peaks.join(", ")))
}

fn property_suite(dir: &Path) -> Outcome {
    let mut bases: Vec<MatrixBasis> = vec![pauli_basis(), MatrixBasis::matrix_units(3)];
    for seed in 0..100u64 {
        let n = 1 + (seed % 3) as usize;
        bases.push(random_orthonormal_basis(n, seed).map_err(|e| e.to_string())?);
        bases.push(canonical_from_vectors(&orthonormal_vectors(&mut rng_from_seed(seed), n + 1), 1e-12).map_err(|e| e.to_string())?);
    }
    let mut worst_iso: f64 = 0.0;
    let mut worst_choi: f64 = 0.0;
    for b in &bases {
        let s = comultiplication_superop(b);
        worst_iso = worst_iso.max(s.isometry_defect());
        let via_superop = choi_from_superop(&s).map_err(|e| e.to_string())?;
        worst_choi = worst_choi.max(choi(b).matrix.max_abs_diff(&via_superop.matrix));
    }
    ensure(worst_iso <= 1e-9, || format!("isometry defect {worst_iso:e}"))?;
    ensure(worst_choi <= 1e-10, || format!("Choi mismatch {worst_choi:e}"))?;

    for seed in 0..100u64 {
        let n = 1 + (seed % 3) as usize;
        let b = random_orthonormal_basis(n, 5000 + seed).map_err(|e| e.to_string())?;
        ensure(verify_frobenius(&b, 1e-9).map_err(|e| e.to_string())?, || format!("Frobenius failed, seed {seed}"))?;
    }

    let mut bodies = Vec::new();
    for workers in ["1", "4"] {
        let out = dir.join(format!("det-{workers}.json"));
        let (code, _, err) =
            cli(&["search", "--n", "2", "--trials", "200", "--seed", "9", "--workers", workers, "--out", out.to_str().unwrap()]);
        ensure(code == 0, || format!("search exit {code}: {err}"))?;
        let env: Envelope<serde_json::Value> = read_envelope(&out)?;
        bodies.push((serde_json::to_string(&env.body).map_err(|e| e.to_string())?, env.manifest.result_digest));
    }
    ensure(bodies[0] == bodies[1], || "search bodies differ across worker counts".into())?;
    Ok(format!(
        "{} bases: isometry defect {worst_iso:.1e}, Choi mismatch {worst_choi:.1e}; Frobenius 100/100; digests equal",
        bases.len()
    ))
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Criterion> = vec![
        ("Pauli fixture", Box::new(pauli_fixture)),
        ("canonical suite", Box::new(canonical_suite)),
        ("evidence replication", Box::new(|| evidence_replication(dir.path()))),
        ("Rel theorem, exhaustive", Box::new(|| rel_theorem(dir.path()))),
        ("CP-relation characterization oracle", Box::new(cp_oracle)),
        ("sequentialization", Box::new(sequentialization)),
        ("Heisenberg scaling", Box::new(heisenberg_scaling)),
        ("property suite", Box::new(|| property_suite(dir.path()))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} ({secs:.2} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({secs:.2} s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
