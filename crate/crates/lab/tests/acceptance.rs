//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use tgasum::catalog;
use tgasum::exec::RayonExecutor;
use tgasum::suites::permutation_instance;
use tgasum::ExperimentConfig;
use tgasum_core::constants::{ConstantEstimate, Estimator, Witness, DEFAULT_T_GRID};
use tgasum_core::greedy::{self, GreedyOrdering};
use tgasum_core::search::{self, SearchConfig};
use tgasum_core::verify::*;
use tgasum_core::{approx_eq, CoefVector, Sign, SignPattern, Space, SpaceSpec, Weights};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.1?}, limit {limit:?}"))
}

fn space(spec: &SpaceSpec) -> Space {
    Space::new(spec).expect("valid space")
}

fn c1_vp_identity() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    for (name, spec) in catalog::all(catalog::DEFAULT_CAP) {
        let r = check_vp_identity_with(&space(&spec), 10_000, 2024, &RayonExecutor).map_err(|e| e.to_string())?;
        ensure(r.status == CheckStatus::ExactPass, || format!("{name}: {:?}, slack {}", r.status, r.worst_slack))?;
        ensure(r.instances == 10_000, || format!("{name}: {} instances", r.instances))?;
        total += r.instances;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{total} instances over {} spaces in {:.1?}", catalog::PRESETS.len(), start.elapsed()))
}

fn c2_permutation_average() -> Outcome {
    let start = Instant::now();
    for (n, expected) in [(1u64, 2u64), (2, 21), (3, 600)] {
        let c = permutation_average_coefficient(n).map_err(|e| e.to_string())?;
        ensure(c == expected, || format!("n = {n}: coefficient {c}"))?;
        for k in 0..20 {
            let (signs, tail) = permutation_instance(n as usize, 77, k);
            let r = check_permutation_average(n as usize, &signs, &tail).map_err(|e| e.to_string())?;
            ensure(r.status == CheckStatus::ExactPass, || format!("n = {n}, instance {k}: {:?}", r.status))?;
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("coefficients 2, 21, 600; 60 instances in {:.1?}", start.elapsed()))
}

fn c3_unconditional_catalog() -> Outcome {
    let start = Instant::now();
    let cap = 8;
    let specs = [
        SpaceSpec::lp(1.0, cap),
        SpaceSpec::lp(2.0, cap),
        SpaceSpec::l_inf(cap),
        SpaceSpec::lorentz(Weights::Harmonic, cap),
        catalog::preset("weighted_l1_geometric", cap).unwrap(),
    ];
    let cfg = SearchConfig::exhaustive(cap);
    for spec in &specs {
        let s = space(spec);
        let est = Estimator::with_executor(&s, &cfg, &RayonExecutor);
        let label = s.label();
        let check = |e: ConstantEstimate| -> Result<(), String> {
            ensure(approx_eq(e.value, 1.0, 1e-9), || format!("{label}: {} = {}", e.constant.name(), e.value))
        };
        for f in [
            Estimator::qg,
            Estimator::suppression_qg,
            Estimator::cqg,
            Estimator::vpqg,
            Estimator::succ,
            Estimator::ucc,
            Estimator::qglc,
        ] {
            check(f(&est).map_err(|e| e.to_string())?)?;
        }
        for func in [est.phi(&DEFAULT_T_GRID), est.theta(&DEFAULT_T_GRID)] {
            let func = func.map_err(|e| e.to_string())?;
            ensure(func.points.len() == DEFAULT_T_GRID.len(), || format!("{label}: missing grid points"))?;
            for p in func.points {
                check(p.estimate)?;
            }
        }
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!("all constants 1 on {} spaces at window {cap} in {:.1?}", specs.len(), start.elapsed()))
}

fn signs_along(p: &SignPattern) -> Vec<Sign> {
    p.iter().map(|(_, s)| s).collect()
}

fn c4_summing_refutation() -> Outcome {
    let start = Instant::now();
    let s = space(&SpaceSpec::summing(8));
    let cfg = SearchConfig::exhaustive(8);
    let e = Estimator::with_executor(&s, &cfg, &RayonExecutor).ucc().map_err(|e| e.to_string())?;
    ensure(e.value >= 4.0, || format!("ucc = {}", e.value))?;
    ensure(e.reproduces(&s, 1e-12).map_err(|e| e.to_string())?, || "witness does not reproduce".into())?;
    let Witness::IndicatorPair { numerator, denominator } = &e.witness else {
        return Err(format!("unexpected witness {:?}", e.witness));
    };
    let num = signs_along(numerator);
    let den = signs_along(denominator);
    ensure(num.windows(2).all(|w| w[0] == w[1]), || format!("numerator signs {num:?} not constant"))?;
    ensure(den.windows(2).all(|w| w[0] != w[1]), || format!("denominator signs {den:?} not alternating"))?;

    let budget = ClassifyBudget { search: cfg.clone(), ..ClassifyBudget::default() };
    let c = classify_basis(&s, &budget, &RayonExecutor).map_err(|e| e.to_string())?;
    let ucc = c.row(Property::Ucc);
    ensure(matches!(ucc.verdict, Verdict::FailsWithWitness { .. }), || format!("ucc verdict {:?}", ucc.verdict))?;
    let vp = c.row(Property::Vpqg);
    ensure(vp.verdict.fails(), || format!("vpqg verdict {:?}", vp.verdict))?;
    let via = vp.implied_failure.as_ref().ok_or("vpqg failure not derived by implication")?;
    ensure(via.via == Property::Ucc, || format!("vpqg fails via {:?}", via.via))?;
    within(start, Duration::from_secs(120))?;
    Ok(format!("ucc >= {} with |A| = {}; vpqg fails via \"{}\" ({:.1?})", e.value, num.len(), via.rule, start.elapsed()))
}

fn c5_cesaro_mean() -> Outcome {
    let cfg = SearchConfig::random(16, 10_000, 5);
    let mut worst: f64 = 0.0;
    for k in 0..10_000u64 {
        let x = search::random_candidate(&cfg, k).map_err(|e| e.to_string())?;
        let mut rng = search::sample_rng(99, k);
        let o = random_greedy_ordering(&x, x.len() + 4, &mut rng).map_err(|e| e.to_string())?;
        let n = rng.random_range(1..=o.len());
        let c = greedy::cesaro_sum(&x, &o, n).map_err(|e| e.to_string())?;
        let mut mean = CoefVector::zero();
        for j in 1..=n {
            mean = mean.add(&greedy::greedy_sum(&x, &o, j).map_err(|e| e.to_string())?);
        }
        let mean = mean.scaled(1.0 / n as f64);
        let rel = c.max_abs_diff(&mean) / x.sup_norm();
        worst = worst.max(rel);
        ensure(rel <= 1e-12, || format!("instance {k}: relative gap {rel:e}"))?;
    }
    Ok(format!("10000 instances, worst relative gap {worst:.2e}"))
}

fn c6_inequality_chains() -> Outcome {
    let start = Instant::now();
    let cfg = SearchConfig::exhaustive_with_grid(6);
    let mut n = 0;
    for (name, spec) in catalog::all(8) {
        let s = space(&spec);
        let q = check_qglc_bound(&s, &cfg, &RayonExecutor).map_err(|e| e.to_string())?;
        let d = check_dem_implies_qg(&s, &cfg, &RayonExecutor, DEFAULT_DEMOCRACY_THRESHOLD).map_err(|e| e.to_string())?;
        for r in [q, d] {
            ensure(r.status != CheckStatus::CounterexampleFound, || format!("{name}: {} refuted, slack {}", r.check, r.worst_slack))?;
            n += 1;
        }
    }
    Ok(format!("{n} chain checks, no counterexample ({:.1?})", start.elapsed()))
}

/// `psi_1(z) = sum_{k >= 0} 1 / (z + k)^2` by its asymptotic expansion.
fn trigamma(z: f64) -> f64 {
    let (z2, z3, z5, z7, z9) = (z * z, z.powi(3), z.powi(5), z.powi(7), z.powi(9));
    1.0 / z + 1.0 / (2.0 * z2) + 1.0 / (6.0 * z3) - 1.0 / (30.0 * z5) + 1.0 / (42.0 * z7) - 1.0 / (30.0 * z9)
}

fn c7_subsequence() -> Outcome {
    let horizon = 512;
    let s = space(&SpaceSpec::lp(2.0, horizon));
    let x = CoefVector::from_dense(&(1..=horizon).map(|j| 1.0 / j as f64).collect::<Vec<_>>()).unwrap();
    let o = GreedyOrdering::lowest_index(&x, horizon).unwrap();
    let r = find_convergent_subsequence(&s, &x, &o, &GapSequence::dyadic(10), &[1e-1, 1e-2], DEFAULT_SUBSEQUENCE_EPS, None)
        .map_err(|e| e.to_string())?;
    ensure(r.monotone && r.residuals.windows(2).all(|w| w[1] <= w[0]), || format!("residuals {:?}", r.residuals))?;
    let last = *r.d.last().ok_or("empty subsequence")?;
    // x has support 1..=horizon, so the tail stops there.
    let expected = (trigamma(last as f64 + 1.0) - trigamma(horizon as f64 + 1.0)).sqrt();
    let got = *r.residuals.last().unwrap();
    ensure((got - expected).abs() <= 1e-9, || format!("final residual {got} vs {expected}"))?;
    Ok(format!("{:?} route, d = {:?}, final residual {got:.12}", r.route, r.d))
}

fn c8_ell1_decay() -> Outcome {
    let x = CoefVector::from_dense(&(1..=512).map(|j| 0.5f64.powi(j)).collect::<Vec<_>>()).unwrap();
    let o = GreedyOrdering::lowest_index(&x, 512).unwrap();
    let (l, eps) = (2, 1.0);
    let r = check_ell1_decay(&x, &o, &GapSequence::dyadic(10), l, eps, DecayVariant::I).map_err(|e| e.to_string())?;
    let first = r.first_index.ok_or("oscillation hypothesis never holds")?;
    let used = r.windows.iter().filter(|w| w.index >= first).count();
    ensure(used >= 6, || format!("only {used} windows"))?;
    let bound = l as f64 / (l as f64 + eps) + 0.05;
    let fitted = r.fitted_ratio.ok_or("no fitted ratio")?;
    ensure(fitted <= bound, || format!("fitted ratio {fitted} > {bound}"))?;
    ensure(r.report.status != CheckStatus::CounterexampleFound, || "window mass exceeds its bound".into())?;
    Ok(format!("fitted ratio {fitted:.3e} over {used} windows, bound {bound:.4}"))
}

fn c9_log_window() -> Outcome {
    let start = Instant::now();
    let window = 6;
    let mut lines = Vec::new();
    for (name, spec) in catalog::all(8) {
        let s = space(&spec);
        let cfg = SearchConfig::exhaustive(window);
        let consts = ChainConstants::compute(&Estimator::with_executor(&s, &cfg, &RayonExecutor)).map_err(|e| e.to_string())?;
        let random = SearchConfig::random(window, 1000, 31);
        let r = check_log_window_batch(&s, &consts, &random, 1000, &[1, 2, 3, 4, 8], &RayonExecutor)
            .map_err(|e| e.to_string())?;
        let note = "1000 of 1000 instances found a qualifying i";
        ensure(r.status == CheckStatus::ConsistentWithinBudget && r.notes.iter().any(|n| n == note), || {
            format!("{name}: {:?}, {:?}", r.status, r.notes)
        })?;
        lines.push(name);
    }
    Ok(format!("1000 of 1000 on each of {} spaces ({:.1?})", lines.len(), start.elapsed()))
}

fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for e in fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.insert(p.strip_prefix(root).unwrap().display().to_string(), fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

const REPRO_CONFIG: &str = r#"
suites = ["identities", "constants", "thresholds", "psi", "subsequences", "democracy", "classify", "question1", "question2"]

[[spaces]]
preset = "summing"
dimension_cap = 8

[[spaces]]
preset = "lorentz_harmonic"
dimension_cap = 16

[budget]
seed = 20240611
window = 4
identity_samples = 200
log_window_samples = 40
classify_windows = [3, 4]
question1_dims = [4, 6]
question_samples = 40
horizon = 64
"#;

fn c10_reproducibility() -> Outcome {
    let cfg: ExperimentConfig = toml::from_str(REPRO_CONFIG).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut trees = Vec::new();
    for (k, jobs) in [1, 1, 2].into_iter().enumerate() {
        let out = dir.path().join(format!("run{k}"));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| e.to_string())?;
        pool.install(|| tgasum::run(&cfg, &out)).map_err(|e| e.to_string())?;
        trees.push(tree(&out));
    }
    for (k, t) in trees.iter().enumerate().skip(1) {
        ensure(t == &trees[0], || {
            let diff: Vec<&String> = t.keys().filter(|p| trees[0].get(*p) != t.get(*p)).collect();
            format!("run {k} differs: {diff:?}")
        })?;
    }
    Ok(format!("3 runs (jobs 1, 1, 2) produced identical trees of {} files", trees[0].len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("vp decomposition identities", c1_vp_identity),
        ("permutation-average identity", c2_permutation_average),
        ("unconditional catalog exactness", c3_unconditional_catalog),
        ("summing basis refutations", c4_summing_refutation),
        ("cesaro arithmetic mean", c5_cesaro_mean),
        ("inequality chains", c6_inequality_chains),
        ("subsequence convergence", c7_subsequence),
        ("l1 window decay", c8_ell1_decay),
        ("log-window bound", c9_log_window),
        ("reproducibility", c10_reproducibility),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or("panic".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
