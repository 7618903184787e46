//! One function per suite; each returns a [`SuiteOutput`] for a single space.

use anyhow::Result;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};
use tgasum_core::constants::{
    describe, ConstantEstimate, Estimator, SignMode, DEFAULT_PSI_S_GRID, DEFAULT_PSI_T_GRID, DEFAULT_T_GRID,
};
use tgasum_core::greedy::{self, GreedyOrdering, TiePolicy};
use tgasum_core::search::{self, Executor, SearchConfig};
use tgasum_core::verify::{self, CheckReport, ClassifyBudget, DecayVariant, GapSequence, ResidualRow};
use tgasum_core::{CoefVector, Sign, SignPattern, Space};

use crate::config::{Budget, Suite};
use crate::exec::RayonExecutor;

/// Cap on orderings and greedy sets enumerated per vector in the question presets.
const PER_VECTOR_CAP: usize = 2_000;
/// Tolerance of the `cqg = 1` filter of the second question.
const ONE_TOL: f64 = 1e-9;

pub struct SuiteOutput {
    pub checks: Vec<CheckReport>,
    pub estimates: Vec<ConstantEstimate>,
    pub data: Value,
    pub summary: Vec<String>,
    pub residuals: Option<Vec<ResidualRow>>,
}

impl SuiteOutput {
    fn new() -> Self {
        SuiteOutput { checks: Vec::new(), estimates: Vec::new(), data: Value::Null, summary: Vec::new(), residuals: None }
    }

    fn estimate(&mut self, e: ConstantEstimate) {
        self.summary.push(describe(&e));
        self.estimates.push(e);
    }

    fn check(&mut self, r: CheckReport) {
        self.summary.push(format!("{}: {:?}", r.check, r.status));
        self.checks.push(r);
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

pub fn run_suite(suite: Suite, space: &Space, budget: &Budget, seed: u64) -> Result<SuiteOutput> {
    let exec = RayonExecutor;
    match suite {
        Suite::Identities => identities(space, budget, seed, &exec),
        Suite::Constants => constants(space, budget, seed, &exec),
        Suite::Thresholds => thresholds(space, budget, seed, &exec),
        Suite::Psi => psi(space, budget, seed, &exec),
        Suite::Subsequences => subsequences(space, budget, seed, &exec),
        Suite::Democracy => democracy(space, budget, seed, &exec),
        Suite::Classify => classify(space, budget, seed, &exec),
        Suite::Question1 => question1(space, budget, seed, &exec),
        Suite::Question2 => question2(space, budget, seed, &exec),
    }
}

/// A random `(eps, tail)` for the permutation average with `|A| = 2n`:
/// signs on `1..=2n`, up to four tail coefficients in `[-1, 1]` after `2n`.
pub fn permutation_instance(n: usize, seed: u64, k: u64) -> (SignPattern, CoefVector) {
    let mut rng = search::sample_rng(seed, k);
    let signs = SignPattern::new(
        (1..=2 * n).map(|i| (i, if rng.random_bool(0.5) { Sign::Minus } else { Sign::Plus })),
    )
    .expect("distinct indices");
    let t = rng.random_range(0..=4usize);
    let tail = CoefVector::from_pairs((1..=t).map(|j| (2 * n + 2 * j - 1, rng.random_range(-1.0..=1.0))))
        .expect("distinct indices");
    (signs, tail)
}

fn identities<E: Executor>(space: &Space, budget: &Budget, seed: u64, exec: &E) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new();
    out.check(verify::check_vp_identity_with(space, budget.identity_samples, seed, exec)?);
    for n in 1..=3 {
        let mut worst: Option<CheckReport> = None;
        let reports: Vec<Result<CheckReport>> = exec.map_indexed(20, |k| {
            let (eps, tail) = permutation_instance(n, search::sub_seed(seed, n as u64), k as u64);
            Ok(verify::check_permutation_average(n, &eps, &tail)?)
        });
        let mut count = 0;
        for r in reports {
            let r = r?;
            count += r.instances;
            if worst.as_ref().is_none_or(|w| r.worst_slack < w.worst_slack) {
                worst = Some(r);
            }
        }
        let mut r = worst.expect("twenty instances");
        r.instances = count;
        r.check = format!("permutation_average_n{n}");
        out.check(r);
    }
    Ok(out)
}

fn constants<E: Executor>(space: &Space, budget: &Budget, seed: u64, exec: &E) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new();
    let cfg = budget.search(space.cap(), seed);
    let est = Estimator::with_executor(space, &cfg, exec);
    out.estimate(est.qg()?);
    out.estimate(est.suppression_qg()?);
    out.estimate(est.tqg()?);
    out.estimate(est.cqg()?);
    out.estimate(est.vpqg()?);
    out.estimate(est.succ()?);
    out.estimate(est.ucc()?);
    out.estimate(est.qglc()?);
    out.estimate(est.almost_greedy()?);
    let chain_cfg = if cfg.is_exhaustive() { SearchConfig { seed, ..SearchConfig::exhaustive_with_grid(cfg.window) } } else { cfg.clone() };
    out.check(verify::check_qglc_bound(space, &chain_cfg, exec)?);
    out.data = json!({ "alpha": to_value(&space.alpha_constants()), "search": to_value(&cfg) });
    Ok(out)
}

fn thresholds<E: Executor>(space: &Space, budget: &Budget, seed: u64, exec: &E) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new();
    let cfg = budget.search(space.cap(), seed);
    let est = Estimator::with_executor(space, &cfg, exec);
    let fs = [est.phi(&DEFAULT_T_GRID)?, est.theta(&DEFAULT_T_GRID)?, est.phi_u(&DEFAULT_T_GRID)?];
    for f in &fs {
        for p in &f.points {
            out.summary.push(format!("{:?}({}) = {} ({:?})", f.function, p.t, p.estimate.value, p.estimate.mode));
        }
    }
    out.data = to_value(&fs);
    Ok(out)
}

fn psi<E: Executor>(space: &Space, budget: &Budget, seed: u64, exec: &E) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new();
    let cfg = budget.search(space.cap(), seed);
    let est = Estimator::with_executor(space, &cfg, exec);
    let mut grid = Vec::new();
    for &t in &DEFAULT_PSI_T_GRID {
        for &s in &DEFAULT_PSI_S_GRID {
            let e = est.psi(t, s)?;
            out.summary.push(format!("psi({t}, {s}) = {} ({:?})", e.value, e.mode));
            grid.push(json!({ "t": t, "s": s, "value": e.value }));
            out.estimates.push(e);
        }
    }
    out.data = json!({ "grid": grid });
    Ok(out)
}

fn dense(len: usize, f: impl Fn(usize) -> f64) -> CoefVector {
    CoefVector::from_dense(&(1..=len).map(f).collect::<Vec<_>>()).expect("finite coefficients")
}

fn dyadic_upto(h: usize) -> GapSequence {
    GapSequence::dyadic((usize::BITS - h.leading_zeros()) as usize)
}

fn subsequences<E: Executor>(space: &Space, budget: &Budget, seed: u64, exec: &E) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new();
    let h = budget.horizon.min(space.cap());
    let cfg = budget.search(space.cap(), seed);
    let est = Estimator::with_executor(space, &cfg, exec);
    let consts = verify::ChainConstants::compute(&est)?;
    let gaps = dyadic_upto(h);
    let l = gaps.bounded_gap_witness().expect("dyadic");

    let harmonic = dense(h, |j| 1.0 / j as f64);
    let ho = GreedyOrdering::lowest_index(&harmonic, h)?;
    let psi_d = est.psi(1.0, 1.0 / (2.0 * l as f64 + verify::DEFAULT_SUBSEQUENCE_EPS))?;
    let factor = consts.vpqg.value + 2.0 * psi_d.value;
    let sub = verify::find_convergent_subsequence(
        space,
        &harmonic,
        &ho,
        &gaps,
        &[1e-1, 1e-2, 1e-3],
        verify::DEFAULT_SUBSEQUENCE_EPS,
        Some(factor),
    )?;
    out.summary.push(format!(
        "harmonic subsequence: route {:?}, |d| = {}, final residual {}",
        sub.route,
        sub.d.len(),
        sub.residuals.last().copied().unwrap_or(0.0)
    ));
    if let Some(b) = &sub.bound_check {
        out.check(b.clone());
    }
    out.residuals = Some(verify::residual_curve(space, &harmonic, &ho, h)?);

    let geo = dense(h.min(1000), |j| 0.5f64.powi(j as i32));
    let go = GreedyOrdering::lowest_index(&geo, geo.len())?;
    let mut decay = Vec::new();
    for variant in [DecayVariant::I, DecayVariant::Ii] {
        let r = verify::check_ell1_decay(&geo, &go, &dyadic_upto(geo.len()), l, 1.0, variant)?;
        out.summary.push(format!("ell1 decay {variant:?}: fitted {:?}, predicted {}", r.fitted_ratio, r.predicted_ratio));
        decay.push(json!({
            "variant": variant,
            "first_index": r.first_index,
            "fitted_ratio": r.fitted_ratio,
            "predicted_ratio": r.predicted_ratio,
            "windows": to_value(&r.windows),
        }));
        out.check(r.report);
    }

    let w = h.min(16);
    let x = dense(w, |j| if j % 3 == 2 { -1.0 } else { 1.0 } * 0.8f64.powi(j as i32 - 1));
    let xo = GreedyOrdering::lowest_index(&x, w)?;
    let terms: Vec<usize> = gaps.terms().iter().copied().filter(|&t| 2 * t <= w).collect();
    if !terms.is_empty() {
        out.check(verify::check_gap_window(&est, &consts, &x, &xo, &GapSequence::new(terms, Some(l))?)?);
    }

    let lw_cfg = SearchConfig::random(space.cap().min(8), budget.log_window_samples.max(1), search::sub_seed(seed, 9));
    let ns: Vec<usize> = [1, 2, 4].into_iter().filter(|&n| lw_cfg.window >= n).collect();
    out.check(verify::check_log_window_batch(space, &consts, &lw_cfg, budget.log_window_samples, &ns, exec)?);

    out.data = json!({
        "subsequence": to_value(&sub),
        "ell1_decay": decay,
        "chain": { "vpqg": consts.vpqg.value, "psi_quarter": consts.psi_quarter.value, "log_window_factor": consts.log_window_factor() },
    });
    Ok(out)
}

fn democracy<E: Executor>(space: &Space, budget: &Budget, seed: u64, exec: &E) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new();
    let cfg = budget.search(space.cap(), seed);
    let est = Estimator::with_executor(space, &cfg, exec);
    let ms: Vec<usize> = (1..=cfg.window).collect();
    let dem = est.democracy_functions(&ms, SignMode::ConstantSigns)?;
    let sup = est.democracy_functions(&ms, SignMode::AllSigns)?;
    out.summary.push(format!("democracy constant {}", dem.constant().0));
    out.summary.push(format!("superdemocracy constant {}", sup.constant().0));
    let chain_cfg = if cfg.is_exhaustive() { SearchConfig { seed, ..SearchConfig::exhaustive_with_grid(cfg.window) } } else { cfg.clone() };
    out.check(verify::check_dem_implies_qg(space, &chain_cfg, exec, verify::DEFAULT_DEMOCRACY_THRESHOLD)?);
    let m2 = cfg.window.min(4);
    if cfg.window + m2 <= space.cap() {
        let big_m = sup.rows.iter().find(|r| r.m == m2).map(|r| r.sup).unwrap_or(1.0);
        let s = verify::check_spreading_condition(space, big_m, cfg.window, m2, &cfg)?;
        out.summary.push(format!("spreading condition M = {big_m}: found {:?}", s.found));
        out.check(s.report);
    }
    out.data = json!({ "democracy": to_value(&dem), "superdemocracy": to_value(&sup) });
    Ok(out)
}

fn classify<E: Executor>(space: &Space, budget: &Budget, seed: u64, exec: &E) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new();
    let windows: Vec<usize> = budget.classify_windows.iter().copied().filter(|&w| w <= space.cap()).collect();
    let cb = ClassifyBudget { windows, search: budget.search(space.cap(), seed), ..ClassifyBudget::default() };
    let r = verify::classify_basis(space, &cb, exec)?;
    for row in &r.rows {
        let via = row.implied_failure.as_ref().map(|i| format!(" (fails via {:?}: {})", i.via, i.rule)).unwrap_or_default();
        out.summary.push(format!("{:?}: {:?}{via}", row.property, row.verdict));
    }
    out.data = to_value(&r);
    Ok(out)
}

/// `max ||C_n(x)|| / ||x||` over enumerated greedy orderings and `n`.
pub fn vector_cqg(space: &Space, x: &CoefVector) -> Result<f64> {
    let nx = space.norm(x)?;
    let mut best: f64 = 0.0;
    for o in greedy::greedy_orderings(x, x.len(), TiePolicy::Enumerate, PER_VECTOR_CAP)? {
        for n in 1..=x.len() {
            best = best.max(space.norm(&greedy::cesaro_sum(x, &o, n)?)? / nx);
        }
    }
    Ok(best)
}

/// `max ||P_A x|| / ||x||` over enumerated greedy sets.
pub fn vector_qg(space: &Space, x: &CoefVector) -> Result<(f64, Vec<usize>)> {
    let nx = space.norm(x)?;
    let mut best = (0.0, Vec::new());
    for m in 1..=x.len() {
        for a in greedy::greedy_sets(x, m, TiePolicy::Enumerate, PER_VECTOR_CAP)? {
            let r = space.norm(&greedy::projection(x, &a))? / nx;
            if r > best.0 {
                best = (r, a);
            }
        }
    }
    Ok(best)
}

fn question1<E: Executor>(space: &Space, budget: &Budget, seed: u64, exec: &E) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new();
    let mut rows = Vec::new();
    for &d in budget.question1_dims.iter().filter(|&&d| d <= space.cap()) {
        let mut cfg = SearchConfig::random(d, budget.question_samples.max(1), search::sub_seed(seed, d as u64));
        cfg.tie_enumeration_max_support = cfg.tie_enumeration_max_support.min(8);
        let est = Estimator::with_executor(space, &cfg, exec);
        let (qg, cqg, vpqg) = (est.qg()?, est.cqg()?, est.vpqg()?);
        rows.push(json!({ "dimension": d, "qg": qg.value, "cqg": cqg.value, "vpqg": vpqg.value }));
        out.estimates.extend([qg, cqg, vpqg]);
    }
    let col = |k: &str| -> Vec<f64> { rows.iter().map(|r| r[k].as_f64().expect("numeric")).collect() };
    let growth = |v: &[f64]| if v.len() >= 2 { v[v.len() - 1] / v[0] } else { 1.0 };
    let (gq, gc, gv) = (growth(&col("qg")), growth(&col("cqg")), growth(&col("vpqg")));
    let candidate = rows.len() >= 2 && gq >= 1.5 && gc <= 1.2 && gv <= 1.2;
    out.summary.push(if candidate {
        format!("candidate surfaced: qg grows by {gq} while cqg grows by {gc} and vpqg by {gv}")
    } else {
        format!("no candidate: growth qg {gq}, cqg {gc}, vpqg {gv}")
    });
    out.data = json!({ "rows": rows, "growth": { "qg": gq, "cqg": gc, "vpqg": gv }, "candidate": candidate });
    Ok(out)
}

fn question2<E: Executor>(space: &Space, budget: &Budget, seed: u64, exec: &E) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new();
    let cfg = budget.search(space.cap(), seed);
    let cands = search::candidates(&cfg, space.cap())?;
    let results = exec.map_indexed(cands.len(), |k| -> Result<(f64, Option<(f64, Vec<usize>)>)> {
        let x = &cands[k];
        let c = vector_cqg(space, x)?;
        Ok((c, if c <= 1.0 + ONE_TOL { Some(vector_qg(space, x)?) } else { None }))
    });
    let mut family_cqg: f64 = 0.0;
    let mut filtered = 0usize;
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    for (k, r) in results.into_iter().enumerate() {
        let (c, q) = r?;
        family_cqg = family_cqg.max(c);
        if let Some((q, a)) = q {
            filtered += 1;
            if best.as_ref().is_none_or(|b| q > b.0) {
                best = Some((q, k, a));
            }
        }
    }
    let max_qg = best.as_ref().map(|b| b.0);
    // Only a family that is 1-CQG as a whole can exhibit the gap.
    let one_cqg = family_cqg <= 1.0 + ONE_TOL;
    let found = one_cqg && max_qg.is_some_and(|q| q > 1.0 + ONE_TOL);
    out.summary.push(if found {
        format!("1-CQG counterexample candidate: the family is 1-CQG and a qg ratio {} occurs", max_qg.unwrap_or(0.0))
    } else {
        "no 1-CQG counterexample found".to_string()
    });
    out.summary.push(format!(
        "family cqg {family_cqg}; {filtered} of {} vectors have cqg ratio 1, largest qg ratio among them {:?}",
        cands.len(),
        max_qg
    ));
    out.data = json!({
        "searched": cands.len(),
        "family_cqg": family_cqg,
        "with_cqg_one": filtered,
        "max_qg_ratio": max_qg,
        "witness": best.map(|(_, k, a)| json!({ "x": to_value(&cands[k]), "set": a })),
        "found": found,
    });
    Ok(out)
}
