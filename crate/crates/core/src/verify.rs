//! Checkers for the summation identities, the inequality chains between the
//! constants, the subsequence bounds and a classification report.
//!
//! Inequality checks validate the implementation: the inequalities are
//! known to hold, so a violation over an exhaustively enumerated family with
//! exact constants on both sides means a bug.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{ConstantEstimate, ConstantKind, EstimateMode, Estimator, SignMode, Witness};
use crate::error::{domain, input, Error, Result};
use crate::greedy::{self, GreedyOrdering};
use crate::search::{self, Executor, SearchConfig, Sequential};
use crate::spaces::{Space, SpaceSpec};
use crate::vector::{CoefVector, SignPattern};

/// Relative tolerance of the exact identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Slack allowed on the right-hand side of a searched inequality.
pub const RELATION_TOL: f64 = 1e-12;
/// Oscillation threshold of the low-oscillation set in the democracy argument.
pub const DEFAULT_DEMOCRACY_OSC: f64 = 4.0;
/// Democracy ratios above this are treated as non-democratic.
pub const DEFAULT_DEMOCRACY_THRESHOLD: f64 = 4.0;
/// Default `epsilon` of the low-oscillation set `D` in subsequence selection.
pub const DEFAULT_SUBSEQUENCE_EPS: f64 = 0.5;

const VALIDATION_NOTE: &str =
    "inequality checks validate the implementation; a violation with exact constants is a bug";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    /// Algebraic identity held at tolerance on every instance.
    ExactPass,
    /// No violation on the searched family.
    ConsistentWithinBudget,
    CounterexampleFound,
    /// The hypothesis of the checked statement fails; nothing was asserted.
    PreconditionFailed,
    /// A violation against estimated (lower-bound) constants; not a refutation.
    Inconclusive,
}

impl CheckStatus {
    pub fn is_failure(self) -> bool {
        self == CheckStatus::CounterexampleFound
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantUse {
    pub name: String,
    pub value: f64,
    pub mode: EstimateMode,
}

impl ConstantUse {
    fn of(name: &str, e: &ConstantEstimate) -> Self {
        ConstantUse { name: name.into(), value: e.value, mode: e.mode }
    }

    fn exact(name: &str, value: f64) -> Self {
        ConstantUse { name: name.into(), value, mode: EstimateMode::ExactOverFamily }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub space: Option<String>,
    pub status: CheckStatus,
    pub instances: u64,
    /// Smallest `bound - value` seen (negative on violation).
    pub worst_slack: f64,
    pub constants: Vec<ConstantUse>,
    pub notes: Vec<String>,
    /// The worst instance, replayable.
    pub payload: Option<Payload>,
}

impl CheckReport {
    fn new(check: &str, space: Option<&Space>) -> Self {
        CheckReport {
            check: check.into(),
            space: space.map(|s| s.label()),
            status: CheckStatus::ConsistentWithinBudget,
            instances: 0,
            worst_slack: f64::INFINITY,
            constants: Vec::new(),
            notes: Vec::new(),
            payload: None,
        }
    }

    fn all_exact(&self) -> bool {
        self.constants.iter().all(|c| c.mode == EstimateMode::ExactOverFamily)
    }

    /// Status for a searched inequality given whether a violation was seen.
    fn settle(&mut self, violated: bool, refutable: bool) {
        self.status = match (violated, refutable) {
            (false, _) => CheckStatus::ConsistentWithinBudget,
            (true, true) => CheckStatus::CounterexampleFound,
            (true, false) => CheckStatus::Inconclusive,
        };
        if self.worst_slack == f64::INFINITY {
            self.worst_slack = 0.0;
        }
    }
}

/// A replayable instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    /// `2 C_{2n} - C_n` against both decompositions.
    VpIdentity { x: CoefVector, ordering: GreedyOrdering, n: usize, discrepancy: f64 },
    PermutationAverage { n: usize, signs: SignPattern, tail: CoefVector, discrepancy: f64 },
    /// `lhs <= rhs` where `lhs` is the witness ratio.
    Relation { space: SpaceSpec, relation: String, witness: Witness, lhs: f64, rhs: f64 },
    /// `||G_n(x)|| <= factor ||x||`.
    GreedySumBound { space: SpaceSpec, x: CoefVector, ordering: GreedyOrdering, n: usize, factor: f64, ratio: f64 },
    /// Some `0 <= i <= floor(log2 n) + 3` with `||G_{2^i n}(x)|| <= factor ||x||`.
    LogWindow { space: SpaceSpec, x: CoefVector, ordering: GreedyOrdering, n: usize, factor: f64, best_ratio: f64 },
    Ell1Decay { x: CoefVector, ordering: GreedyOrdering, gaps: GapSequence, l: u64, eps: f64, variant: DecayVariant },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub report: CheckReport,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// Set when the recomputed values differ from the stored ones.
    pub mismatch: Option<String>,
}

/// Recomputes a stored instance.
pub fn replay(payload: &Payload) -> Result<ReplayOutcome> {
    let close = |a: f64, b: f64| crate::approx_eq(a, b, 1e-9);
    let mut mismatch = None;
    let (check, lhs, rhs, space) = match payload {
        Payload::VpIdentity { x, ordering, n, discrepancy } => {
            ordering.validate(x)?;
            let d = vp_discrepancy(x, ordering, *n)?;
            if !close(d, *discrepancy) {
                mismatch = Some(format!("discrepancy {d} differs from the stored {discrepancy}"));
            }
            ("vp_identity", d, IDENTITY_TOL, None)
        }
        Payload::PermutationAverage { n, signs, tail, discrepancy } => {
            let (d, _) = permutation_average(*n, signs, tail)?;
            if !close(d, *discrepancy) {
                mismatch = Some(format!("discrepancy {d} differs from the stored {discrepancy}"));
            }
            ("permutation_average", d, IDENTITY_TOL, None)
        }
        Payload::Relation { space, witness, lhs, rhs, .. } => {
            let sp = Space::new(space)?;
            witness.validate()?;
            let r = witness.ratio(&sp)?;
            if !close(r, *lhs) {
                mismatch = Some(format!("witness ratio {r} differs from the stored {lhs}"));
            }
            ("relation", r, *rhs, Some(sp))
        }
        Payload::GreedySumBound { space, x, ordering, n, factor, ratio } => {
            let sp = Space::new(space)?;
            ordering.validate(x)?;
            let r = sp.norm(&greedy::greedy_sum(x, ordering, *n)?)? / sp.norm(x)?;
            if !close(r, *ratio) {
                mismatch = Some(format!("ratio {r} differs from the stored {ratio}"));
            }
            ("greedy_sum_bound", r, *factor, Some(sp))
        }
        Payload::LogWindow { space, x, ordering, n, factor, best_ratio } => {
            let sp = Space::new(space)?;
            ordering.validate(x)?;
            let r = log_window_best(&sp, x, ordering, *n)?.1;
            if !close(r, *best_ratio) {
                mismatch = Some(format!("best ratio {r} differs from the stored {best_ratio}"));
            }
            ("log_window", r, *factor, Some(sp))
        }
        Payload::Ell1Decay { x, ordering, gaps, l, eps, variant } => {
            let rep = check_ell1_decay(x, ordering, gaps, *l, *eps, *variant)?;
            let holds = rep.report.status != CheckStatus::CounterexampleFound;
            let slack = rep.report.worst_slack;
            return Ok(ReplayOutcome { report: rep.report, lhs: -slack, rhs: 0.0, holds, mismatch: None });
        }
    };
    let holds = lhs <= rhs * (1.0 + RELATION_TOL) + RELATION_TOL;
    let mut report = CheckReport::new(&format!("replay_{check}"), space.as_ref());
    report.instances = 1;
    report.worst_slack = rhs - lhs;
    report.status = match (holds, check) {
        (true, "vp_identity" | "permutation_average") => CheckStatus::ExactPass,
        (true, _) => CheckStatus::ConsistentWithinBudget,
        (false, _) => CheckStatus::CounterexampleFound,
    };
    report.notes.push(format!("lhs = {lhs}, rhs = {rhs}"));
    if let Some(m) = &mismatch {
        report.notes.push(format!("mismatch: {m}"));
    }
    report.payload = Some(payload.clone());
    Ok(ReplayOutcome { report, lhs, rhs, holds, mismatch })
}

/// A greedy ordering with ties broken at random, padded to `len`.
pub fn random_greedy_ordering<R: Rng>(x: &CoefVector, len: usize, rng: &mut R) -> Result<GreedyOrdering> {
    let mut keyed: Vec<(f64, u64, usize)> = x.iter().map(|(i, v)| (v.abs(), rng.random::<u64>(), i)).collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let o = GreedyOrdering::new(x, keyed.into_iter().map(|k| k.2).collect())?;
    o.padded(x, len.max(x.len()))
}

/// Largest coefficient discrepancy (relative to `||x||_inf`) between
/// `2 C_{2n} - C_n`, `G_n + sum_j ((n + 1 - j) / n) x*_{k_{n+j}} x_{k_{n+j}}`
/// and `G_n + C_n^{O_n}(x - G_n)`.
pub fn vp_discrepancy(x: &CoefVector, o: &GreedyOrdering, n: usize) -> Result<f64> {
    let vp = greedy::vp_sum(x, o, n)?;
    let direct = greedy::vp_sum_direct(x, o, n);
    let (residual, shifted) = greedy::shifted_ordering(x, o, n)?;
    let split = greedy::greedy_sum(x, o, n)?.add(&greedy::cesaro_sum(&residual, &shifted, n)?);
    let scale = x.sup_norm().max(f64::MIN_POSITIVE);
    Ok(vp.max_abs_diff(&direct).max(vp.max_abs_diff(&split)) / scale)
}

fn identity_report(check: &str, space: Option<&Space>, worst: Option<(f64, Payload)>, instances: u64) -> CheckReport {
    let mut r = CheckReport::new(check, space);
    r.instances = instances;
    let (d, payload) = match worst {
        Some((d, p)) => (d, Some(p)),
        None => (0.0, None),
    };
    r.worst_slack = IDENTITY_TOL - d;
    r.status = if d <= IDENTITY_TOL { CheckStatus::ExactPass } else { CheckStatus::CounterexampleFound };
    r.notes.push(format!("largest relative coefficient discrepancy {d}"));
    r.payload = payload;
    r
}

/// Both decompositions of the de la Vallée-Poussin sum on `samples` random
/// `(x, ordering, n)` with supports in `[1, min(cap, 16)]`.
pub fn check_vp_identity(space: &Space, samples: usize, seed: u64) -> Result<CheckReport> {
    check_vp_identity_with(space, samples, seed, &Sequential)
}

pub fn check_vp_identity_with<E: Executor>(space: &Space, samples: usize, seed: u64, exec: &E) -> Result<CheckReport> {
    let cfg = SearchConfig::random(space.cap().min(16), samples.max(1), seed);
    let results = exec.map_indexed(samples, |k| -> Result<(f64, Payload)> {
        let x = search::random_candidate(&cfg, k as u64)?;
        let mut rng = search::sample_rng(search::sub_seed(seed, 0x0dd), k as u64);
        let n = rng.random_range(1..=x.len());
        let o = random_greedy_ordering(&x, 2 * n, &mut rng)?;
        let d = vp_discrepancy(&x, &o, n)?;
        Ok((d, Payload::VpIdentity { x, ordering: o, n, discrepancy: d }))
    });
    let picks: Vec<Option<(f64, Payload)>> = results.into_iter().map(|r| r.map(Some)).collect::<Result<_>>()?;
    let worst = search::argmax(picks).map(|(_, d, p)| (d, p));
    Ok(identity_report("vp_identity", Some(space), worst, samples as u64))
}

/// Both decompositions for every greedy ordering of `x` (ties enumerated up
/// to `cap` orderings) and every `1 <= n <= |supp x|`.
pub fn check_vp_identity_all_orderings(x: &CoefVector, cap: usize) -> Result<CheckReport> {
    let orders = greedy::greedy_orderings(x, x.len(), greedy::TiePolicy::Enumerate, cap)?;
    let mut worst: Option<(f64, Payload)> = None;
    let mut count = 0;
    for o in orders {
        for n in 1..=x.len() {
            let o = o.padded(x, (2 * n).max(x.len()))?;
            let d = vp_discrepancy(x, &o, n)?;
            count += 1;
            if worst.as_ref().is_none_or(|w| d > w.0) {
                worst = Some((d, Payload::VpIdentity { x: x.clone(), ordering: o, n, discrepancy: d }));
            }
        }
    }
    Ok(identity_report("vp_identity_all_orderings", None, worst, count))
}

/// `(2n - 1)! (3n + 1) / 2` in integer arithmetic.
pub fn permutation_average_coefficient(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(domain("n must be positive"));
    }
    let fact: u64 = (1..2 * n).try_fold(1u64, |acc, k| acc.checked_mul(k)).ok_or_else(|| domain("factorial overflow"))?;
    let num = fact.checked_mul(3 * n + 1).ok_or_else(|| domain("coefficient overflow"))?;
    debug_assert!(num % 2 == 0);
    Ok(num / 2)
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Sums `2 C_{2n} - C_n` of `1_{eps, A} + tail` over the orderings that list
/// `A` first in every order; returns the relative discrepancy from
/// `((2n - 1)! (3n + 1) / 2) 1_{eps, A}` and the coefficient.
fn permutation_average(n: usize, signs: &SignPattern, tail: &CoefVector) -> Result<(f64, u64)> {
    if n > 3 {
        return Err(Error::Budget { what: "permutation average (2n)!".into(), count: (1..=2 * n as u128).product(), cap: 720 });
    }
    if signs.len() != 2 * n {
        return Err(input(format!("|A| = {} but 2n = {}", signs.len(), 2 * n)));
    }
    if !tail.in_q() {
        return Err(input("the tail must lie in Q"));
    }
    let block = signs.domain();
    if block.iter().any(|&i| tail.contains(i)) {
        return Err(input("the tail must be supported off A"));
    }
    let coef = permutation_average_coefficient(n as u64)?;
    let v = signs.indicator().add(tail);
    let tail_order = GreedyOrdering::lowest_index(tail, tail.len())?;
    let mut perm = block.clone();
    let mut total = CoefVector::zero();
    loop {
        let mut idx = perm.clone();
        idx.extend_from_slice(tail_order.indices());
        let o = GreedyOrdering::new(&v, idx)?;
        total = total.add(&greedy::vp_sum(&v, &o, n)?);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let expected = signs.indicator().scaled(coef as f64);
    Ok((total.max_abs_diff(&expected) / coef as f64, coef))
}

/// The averaging identity over all `(2n)!` orderings of `A`, `n <= 3`.
pub fn check_permutation_average(n: usize, signs: &SignPattern, tail: &CoefVector) -> Result<CheckReport> {
    let (d, coef) = permutation_average(n, signs, tail)?;
    let payload = Payload::PermutationAverage { n, signs: signs.clone(), tail: tail.clone(), discrepancy: d };
    let mut r = identity_report("permutation_average", None, Some((d, payload)), 1);
    r.notes.push(format!("coefficient (2n-1)!(3n+1)/2 = {coef}"));
    Ok(r)
}

struct Relation<'a> {
    label: String,
    estimate: &'a ConstantEstimate,
    rhs: f64,
}

fn relation_report(check: &str, space: &Space, relations: &[Relation], constants: Vec<ConstantUse>) -> CheckReport {
    let mut r = CheckReport::new(check, Some(space));
    r.constants = constants;
    r.notes.push(VALIDATION_NOTE.into());
    let mut violated = false;
    for rel in relations {
        r.instances += rel.estimate.budget.instances;
        let slack = rel.rhs - rel.estimate.value;
        let ok = rel.estimate.value <= rel.rhs * (1.0 + RELATION_TOL) + RELATION_TOL;
        violated |= !ok;
        r.notes.push(format!("{}: {} <= {}", rel.label, rel.estimate.value, rel.rhs));
        if slack < r.worst_slack {
            r.worst_slack = slack;
            r.payload = Some(Payload::Relation {
                space: space.spec().clone(),
                relation: rel.label.clone(),
                witness: rel.estimate.witness.clone(),
                lhs: rel.estimate.value,
                rhs: rel.rhs,
            });
        }
    }
    let exact = r.all_exact();
    r.settle(violated, exact);
    r
}

/// `qglc <= 4K/3 + a1 a2` and `ucc <= 2 (a1 a2 + 4K/3)` with `K` the
/// de la Vallée-Poussin constant, all over the same search family.
pub fn check_qglc_bound<E: Executor>(space: &Space, cfg: &SearchConfig, exec: &E) -> Result<CheckReport> {
    let est = Estimator::with_executor(space, cfg, exec);
    let k = est.vpqg()?;
    let q = est.qglc()?;
    let u = est.ucc()?;
    let a = space.alpha_constants();
    let aa = a.alpha1 * a.alpha2;
    let rels = [
        Relation { label: "qglc <= 4 vpqg / 3 + a1 a2".into(), estimate: &q, rhs: 4.0 * k.value / 3.0 + aa },
        Relation { label: "ucc <= 2 (a1 a2 + 4 vpqg / 3)".into(), estimate: &u, rhs: 2.0 * (aa + 4.0 * k.value / 3.0) },
    ];
    let constants = vec![
        ConstantUse::of("vpqg", &k),
        ConstantUse::of("qglc", &q),
        ConstantUse::of("ucc", &u),
        ConstantUse::exact("alpha1_alpha2", aa),
    ];
    Ok(relation_report("qglc_bound", space, &rels, constants))
}

/// Democracy implies quasi-greedy for a de la Vallée-Poussin basis:
/// `qg <= K1 + 2 Psi(1, 1/4) + 4 K2 Psi(1, 1/4)`. Skipped when the
/// constant-sign democracy ratio of the window exceeds `threshold`.
pub fn check_dem_implies_qg<E: Executor>(space: &Space, cfg: &SearchConfig, exec: &E, threshold: f64) -> Result<CheckReport> {
    let est = Estimator::with_executor(space, cfg, exec);
    let ms: Vec<usize> = (1..=cfg.window).collect();
    let dem = est.democracy_functions(&ms, SignMode::ConstantSigns)?;
    let (dem_ratio, _, _) = dem.constant();
    if dem_ratio > threshold {
        let mut r = CheckReport::new("dem_implies_qg", Some(space));
        r.status = CheckStatus::PreconditionFailed;
        r.worst_slack = 0.0;
        r.constants.push(ConstantUse::exact("democracy", dem_ratio));
        r.notes.push(format!("skipped: democracy ratio {dem_ratio} exceeds {threshold}; the hypothesis fails"));
        return Ok(r);
    }
    let sup = est.democracy_functions(&ms, SignMode::AllSigns)?;
    let (k2, _, _) = sup.constant();
    let k1 = est.vpqg()?;
    let psi = est.psi(1.0, 1.0 / DEFAULT_DEMOCRACY_OSC)?;
    let qg = est.qg()?;
    let k4 = k1.value + 2.0 * psi.value + 4.0 * k2 * psi.value;
    let mode = |exact: bool| if exact { EstimateMode::ExactOverFamily } else { EstimateMode::RandomSearch };
    let constants = vec![
        ConstantUse { name: "democracy".into(), value: dem_ratio, mode: mode(dem.exact()) },
        ConstantUse { name: "superdemocracy".into(), value: k2, mode: mode(sup.exact()) },
        ConstantUse::of("vpqg", &k1),
        ConstantUse::of("psi(1,1/4)", &psi),
        ConstantUse::of("qg", &qg),
    ];
    let rels = [Relation { label: "qg <= K1 + 2 psi + 4 K2 psi".into(), estimate: &qg, rhs: k4 }];
    Ok(relation_report("dem_implies_qg", space, &rels, constants))
}

fn bits_key(x: &CoefVector) -> Vec<(usize, u64)> {
    x.iter().map(|(i, v)| (i, v.to_bits())).collect()
}

/// Constants shared by the window checks, computed once per family.
pub struct ChainConstants {
    pub vpqg: ConstantEstimate,
    pub psi_quarter: ConstantEstimate,
    pub alpha1_alpha2: f64,
    family: Vec<Vec<(usize, u64)>>,
}

impl ChainConstants {
    pub fn compute<E: Executor>(est: &Estimator<'_, E>) -> Result<Self> {
        let mut family: Vec<Vec<(usize, u64)>> =
            search::candidates(est.config(), est.space().cap())?.iter().map(bits_key).collect();
        family.sort_unstable();
        let a = est.space().alpha_constants();
        Ok(ChainConstants {
            vpqg: est.vpqg()?,
            psi_quarter: est.psi(1.0, 0.25)?,
            alpha1_alpha2: a.alpha1 * a.alpha2,
            family,
        })
    }

    pub fn exact(&self) -> bool {
        self.vpqg.is_exact() && self.psi_quarter.is_exact()
    }

    /// Whether `x` belongs to the family the constants were taken over.
    pub fn contains(&self, x: &CoefVector) -> bool {
        self.family.binary_search(&bits_key(x)).is_ok()
    }

    /// `a1 a2 + K + 2 Psi(1, 1/4)`.
    pub fn log_window_factor(&self) -> f64 {
        self.alpha1_alpha2 + self.vpqg.value + 2.0 * self.psi_quarter.value
    }
}

/// A strictly increasing sequence of positive integers, optionally with a
/// bound `l` on the quotients `n_{i+1} / n_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSequence {
    terms: Vec<usize>,
    bounded_gap_witness: Option<u64>,
}

impl GapSequence {
    pub fn new(terms: Vec<usize>, bounded_gap_witness: Option<u64>) -> Result<Self> {
        if terms.first() == Some(&0) {
            return Err(Error::ZeroIndex);
        }
        if terms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(input("gap sequence terms must be strictly increasing"));
        }
        if let Some(l) = bounded_gap_witness {
            if l < 2 {
                return Err(input("a bounded-gap witness must be at least 2"));
            }
            if let Some(w) = terms.windows(2).find(|w| w[1] as u128 > l as u128 * w[0] as u128) {
                return Err(input(format!("quotient {} / {} exceeds the witness {l}", w[1], w[0])));
            }
        }
        Ok(GapSequence { terms, bounded_gap_witness })
    }

    /// `1, 2, 4, ..., 2^(count - 1)` with witness 2.
    pub fn dyadic(count: usize) -> Self {
        GapSequence { terms: (0..count).map(|i| 1usize << i).collect(), bounded_gap_witness: Some(2) }
    }

    pub fn terms(&self) -> &[usize] {
        &self.terms
    }

    pub fn bounded_gap_witness(&self) -> Option<u64> {
        self.bounded_gap_witness
    }
}

fn positions(o: &GreedyOrdering, from: usize, to: usize) -> &[usize] {
    &o.indices()[from..to]
}

/// Oscillation of `x` over positions `from+1 ..= to` of the ordering; `None`
/// when the window meets zero coefficients and nonzero ones (infinite), 1 when
/// all of them are zero.
fn window_osc(x: &CoefVector, o: &GreedyOrdering, from: usize, to: usize) -> Option<f64> {
    let w = positions(o, from, to);
    let nz: Vec<usize> = w.iter().copied().filter(|&i| x.contains(i)).collect();
    if nz.is_empty() {
        return Some(1.0);
    }
    if nz.len() < w.len() {
        return None;
    }
    greedy::osc(x, &nz).ok()
}

/// Greedy sums on the windows `E = {n_l + j : 0 <= j <= n_l}`:
/// `||G_n(x)|| <= (K + 2 Psi(1, 1/M)) ||x||` with `M` the largest
/// oscillation over `{k_{n_l+1}, ..., k_{2 n_l}}`.
pub fn check_gap_window<E: Executor>(
    est: &Estimator<'_, E>,
    consts: &ChainConstants,
    x: &CoefVector,
    ordering: &GreedyOrdering,
    gaps: &GapSequence,
) -> Result<CheckReport> {
    ordering.validate(x)?;
    let space = est.space();
    let mut big_m: f64 = 1.0;
    for &n in gaps.terms() {
        if 2 * n > ordering.len() {
            return Err(domain(format!("window up to 2n = {} exceeds the ordering length {}", 2 * n, ordering.len())));
        }
        let w = positions(ordering, n, 2 * n);
        let o = greedy::osc(x, w).map_err(|_| domain(format!("window after n = {n} leaves supp(x); M is unbounded")))?;
        big_m = big_m.max(o);
    }
    let psi = est.psi(1.0, 1.0 / big_m)?;
    let factor = consts.vpqg.value + 2.0 * psi.value;
    let nx = space.norm(x)?;
    let mut r = CheckReport::new("gap_window", Some(space));
    r.constants = vec![ConstantUse::of("vpqg", &consts.vpqg), ConstantUse::of("psi(1,1/M)", &psi)];
    r.notes.push(VALIDATION_NOTE.into());
    r.notes.push(format!("M = {big_m}, factor = {factor}"));
    let mut violated = false;
    for &nl in gaps.terms() {
        for n in nl..=2 * nl {
            let ratio = space.norm(&greedy::greedy_sum(x, ordering, n)?)? / nx;
            r.instances += 1;
            let slack = factor - ratio;
            violated |= ratio > factor * (1.0 + RELATION_TOL) + RELATION_TOL;
            if slack < r.worst_slack {
                r.worst_slack = slack;
                r.payload = Some(Payload::GreedySumBound {
                    space: space.spec().clone(),
                    x: x.clone(),
                    ordering: ordering.clone(),
                    n,
                    factor,
                    ratio,
                });
            }
        }
    }
    let refutable = r.all_exact() && consts.contains(x);
    r.settle(violated, refutable);
    Ok(r)
}

fn floor_log2(n: usize) -> usize {
    (usize::BITS - 1 - n.leading_zeros()) as usize
}

/// Ordering length the log-window scan needs: `2^(floor(log2 n) + 3) n`.
pub fn log_window_length(n: usize) -> usize {
    (1usize << (floor_log2(n) + 3)) * n
}

/// The smallest `||G_{2^i n}(x)|| / ||x||` over `0 <= i <= floor(log2 n) + 3`.
fn log_window_best(space: &Space, x: &CoefVector, o: &GreedyOrdering, n: usize) -> Result<(usize, f64)> {
    if n == 0 {
        return Err(domain("n must be positive"));
    }
    if o.len() < log_window_length(n) {
        return Err(domain(format!("ordering length {} is below 2^(floor(log2 n)+3) n = {}", o.len(), log_window_length(n))));
    }
    let nx = space.norm(x)?;
    let mut best = (0, f64::INFINITY);
    for i in 0..=floor_log2(n) + 3 {
        let r = space.norm(&greedy::greedy_sum(x, o, n << i)?)? / nx;
        if r < best.1 {
            best = (i, r);
        }
    }
    Ok(best)
}

/// Some `0 <= i <= log2 n + 3` has `||G_{2^i n}(x)|| <= (a1 a2 + K + 2 Psi(1, 1/4)) ||x||`.
pub fn check_log_window(
    space: &Space,
    consts: &ChainConstants,
    x: &CoefVector,
    ordering: &GreedyOrdering,
    n: usize,
) -> Result<CheckReport> {
    ordering.validate(x)?;
    let factor = consts.log_window_factor();
    let (i, ratio) = log_window_best(space, x, ordering, n)?;
    let mut r = CheckReport::new("log_window", Some(space));
    r.instances = 1;
    r.constants = vec![ConstantUse::of("vpqg", &consts.vpqg), ConstantUse::of("psi(1,1/4)", &consts.psi_quarter)];
    r.notes.push(VALIDATION_NOTE.into());
    r.notes.push(format!("best i = {i}"));
    r.worst_slack = factor - ratio;
    r.payload = Some(Payload::LogWindow {
        space: space.spec().clone(),
        x: x.clone(),
        ordering: ordering.clone(),
        n,
        factor,
        best_ratio: ratio,
    });
    let violated = ratio > factor * (1.0 + RELATION_TOL) + RELATION_TOL;
    r.settle(violated, consts.exact() && consts.contains(x));
    Ok(r)
}

/// [`check_log_window`] on `samples` random vectors from `cfg` (random
/// mode), with `n` drawn from `ns` and random tie-breaking.
pub fn check_log_window_batch<E: Executor>(
    space: &Space,
    consts: &ChainConstants,
    cfg: &SearchConfig,
    samples: usize,
    ns: &[usize],
    exec: &E,
) -> Result<CheckReport> {
    if ns.is_empty() {
        return Err(Error::EmptyBudget("no n values".into()));
    }
    let results = exec.map_indexed(samples, |k| -> Result<CheckReport> {
        let x = search::random_candidate(cfg, k as u64)?;
        let mut rng = search::sample_rng(search::sub_seed(cfg.seed, 0x109), k as u64);
        let n = ns[rng.random_range(0..ns.len())];
        let o = random_greedy_ordering(&x, log_window_length(n), &mut rng)?;
        check_log_window(space, consts, &x, &o, n)
    });
    let reports: Vec<CheckReport> = results.into_iter().collect::<Result<_>>()?;
    let mut r = CheckReport::new("log_window_batch", Some(space));
    r.constants = vec![ConstantUse::of("vpqg", &consts.vpqg), ConstantUse::of("psi(1,1/4)", &consts.psi_quarter)];
    r.notes.push(VALIDATION_NOTE.into());
    let failures = reports.iter().filter(|x| x.status != CheckStatus::ConsistentWithinBudget).count();
    r.notes.push(format!("{} of {} instances found a qualifying i", reports.len() - failures, reports.len()));
    r.instances = reports.len() as u64;
    let mut status = CheckStatus::ConsistentWithinBudget;
    for rep in reports {
        if rep.worst_slack < r.worst_slack {
            r.worst_slack = rep.worst_slack;
            r.payload = rep.payload;
        }
        if rep.status == CheckStatus::CounterexampleFound
            || (rep.status == CheckStatus::Inconclusive && status == CheckStatus::ConsistentWithinBudget)
        {
            status = rep.status;
        }
    }
    r.status = status;
    if r.worst_slack == f64::INFINITY {
        r.worst_slack = 0.0;
    }
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayVariant {
    /// `osc` over `{k_{n_i+1}, ..., k_{n_{i+1}}}` at least `l + eps`.
    I,
    /// `osc` over `{k_{n_i+1}, ..., k_{2 n_i}}` at least `2l + eps`.
    Ii,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayWindow {
    /// Position in the sequence the windows are built on.
    pub index: usize,
    pub start: usize,
    pub end: usize,
    /// Oscillation of the hypothesis window (`None` when infinite).
    pub osc: Option<f64>,
    /// `sum |x*_{k_m}(x)|` over positions `start+1 ..= end`.
    pub mass: f64,
    /// `|x*_{k_{start+1}}(x)| * end`.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ell1DecayReport {
    pub report: CheckReport,
    pub variant: DecayVariant,
    /// Sequence the windows are built on (`n`, or the sparser `d` for variant ii).
    pub sequence: Vec<usize>,
    pub effective_l: u64,
    pub windows: Vec<DecayWindow>,
    /// First window from which the oscillation hypothesis holds.
    pub first_index: Option<usize>,
    /// `exp` of the least-squares slope of `ln(mass)` over windows from `first_index`.
    pub fitted_ratio: Option<f64>,
    /// `l / (l + eps)` (with `2l` for variant ii).
    pub predicted_ratio: f64,
}

/// Window-mass decay behind the `ell_1` criterion: once the oscillation
/// hypothesis holds from window `i0`, the masses satisfy
/// `mass_{i0+j} <= (l / (l + eps))^j b_{i0}` with `b_i = |x*_{k_{n_i+1}}| n_{i+1}`.
pub fn check_ell1_decay(
    x: &CoefVector,
    ordering: &GreedyOrdering,
    gaps: &GapSequence,
    l: u64,
    eps: f64,
    variant: DecayVariant,
) -> Result<Ell1DecayReport> {
    ordering.validate(x)?;
    let w = gaps.bounded_gap_witness().ok_or_else(|| domain("the gap sequence needs a bounded-gap witness"))?;
    if w > l || l < 2 {
        return Err(domain(format!("gaps are only known to be {w}-bounded, not {l}-bounded")));
    }
    if !(eps > 0.0) {
        return Err(domain("epsilon must be positive"));
    }
    let horizon = ordering.len().min(x.len());
    let n: Vec<usize> = gaps.terms().iter().copied().filter(|&t| t <= horizon).collect();
    let coef = |p: usize| x.get(ordering.indices()[p]).abs();
    let hyp_osc = |seq: &[usize], i: usize| -> Option<f64> {
        match variant {
            DecayVariant::I => window_osc(x, ordering, seq[i], seq[i + 1]),
            DecayVariant::Ii => window_osc(x, ordering, seq[i], 2 * seq[i]),
        }
    };
    let (seq, l_eff) = match variant {
        DecayVariant::I => (n.clone(), l),
        DecayVariant::Ii => {
            // d_{j+1} = first term >= 2 d_j, so 2 d_j <= d_{j+1} < 2 l d_j.
            let mut d = Vec::new();
            let mut i = 0;
            while i < n.len() && 2 * n[i] <= horizon {
                d.push(n[i]);
                match (i + 1..n.len()).find(|&k| n[k] >= 2 * n[i]) {
                    Some(k) => i = k,
                    None => break,
                }
            }
            if d.last().is_some_and(|&t| n.last() != Some(&t)) {
                if let Some(k) = n.iter().position(|&t| t >= 2 * d[d.len() - 1]) {
                    d.push(n[k]);
                }
            }
            (d, 2 * l)
        }
    };
    let threshold = l_eff as f64 + eps;
    let r = l_eff as f64 / threshold;
    let mut windows = Vec::new();
    for i in 0..seq.len().saturating_sub(1) {
        if variant == DecayVariant::Ii && 2 * seq[i] > horizon {
            break;
        }
        let (start, end) = (seq[i], seq[i + 1]);
        let mass: f64 = (start..end).map(coef).sum();
        windows.push(DecayWindow { index: i, start, end, osc: hyp_osc(&seq, i), mass, bound: coef(start) * end as f64 });
    }
    let holds = |wd: &DecayWindow| wd.osc.is_none_or(|o| o >= threshold);
    let first_index = match windows.iter().rposition(|wd| !holds(wd)) {
        None if !windows.is_empty() => Some(0),
        Some(p) if p + 1 < windows.len() => Some(p + 1),
        _ => None,
    };
    let mut report = CheckReport::new("ell1_decay", None);
    report.notes.push(format!("predicted ratio {r}"));
    let payload = Payload::Ell1Decay {
        x: x.clone(),
        ordering: ordering.clone(),
        gaps: gaps.clone(),
        l,
        eps,
        variant,
    };
    report.payload = Some(payload);
    let tail: Vec<&DecayWindow> = match first_index {
        Some(i0) => windows[i0..].iter().collect(),
        None => Vec::new(),
    };
    if tail.len() < 2 {
        report.status = CheckStatus::PreconditionFailed;
        report.worst_slack = 0.0;
        report.notes.push("the oscillation hypothesis fails on the available windows".into());
        return Ok(Ell1DecayReport {
            report,
            variant,
            sequence: seq,
            effective_l: l_eff,
            windows,
            first_index,
            fitted_ratio: None,
            predicted_ratio: r,
        });
    }
    let b0 = tail[0].bound;
    let mut violated = false;
    for (j, wd) in tail.iter().enumerate() {
        let cap = r.powi(j as i32) * b0;
        let slack = (cap - wd.mass) / b0;
        violated |= wd.mass > cap * (1.0 + RELATION_TOL);
        report.worst_slack = report.worst_slack.min(slack);
        if j + 1 < tail.len() {
            let next = tail[j + 1].bound;
            violated |= next > r * wd.bound * (1.0 + RELATION_TOL);
            report.worst_slack = report.worst_slack.min((r * wd.bound - next) / b0);
        }
        report.instances += 1;
    }
    let pts: Vec<(f64, f64)> = tail.iter().filter(|w| w.mass > 0.0).map(|w| (w.index as f64, libm::log(w.mass))).collect();
    let fitted = least_squares_slope(&pts).map(libm::exp);
    report.settle(violated, true);
    Ok(Ell1DecayReport {
        report,
        variant,
        sequence: seq,
        effective_l: l_eff,
        windows,
        first_index,
        fitted_ratio: fitted,
        predicted_ratio: r,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsequenceRoute {
    /// `d` runs along the low-oscillation set `D`.
    LowOscillation,
    /// `D` is empty or dies out early; the `ell_1` case applies and `d = n`.
    Ell1Fallback,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceHit {
    pub tol: f64,
    /// First position in `d` from which every residual is at most `tol`.
    pub from: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsequenceReport {
    pub route: SubsequenceRoute,
    /// Indices `i` in `D`.
    pub low_oscillation: Vec<usize>,
    pub d: Vec<usize>,
    /// `||x - G_{d_k}(x)||`.
    pub residuals: Vec<f64>,
    pub monotone: bool,
    pub tolerance_hits: Vec<ToleranceHit>,
    /// Some tolerance was not reached within the horizon.
    pub truncation_limited: bool,
    pub ell1_norm: f64,
    /// `||G_{d_k}(x)|| <= factor ||x||` along `D`, when a factor was given.
    pub bound_check: Option<CheckReport>,
}

/// Selects `d` from `n` through `D = {i : osc(x, {k_{n_i+1}, ..., k_{2 n_i}}) <= 2l + eps}`
/// and records the residuals along it. `D` counts as finite (and the `ell_1`
/// route is taken) when it is empty or lies in the first half of the windows
/// available within the ordering.
pub fn find_convergent_subsequence(
    space: &Space,
    x: &CoefVector,
    ordering: &GreedyOrdering,
    gaps: &GapSequence,
    tol_grid: &[f64],
    eps: f64,
    bound_factor: Option<f64>,
) -> Result<SubsequenceReport> {
    ordering.validate(x)?;
    let l = gaps.bounded_gap_witness().ok_or_else(|| domain("the gap sequence needs a bounded-gap witness"))?;
    if !(eps > 0.0) {
        return Err(domain("epsilon must be positive"));
    }
    let avail: Vec<usize> = gaps.terms().iter().copied().filter(|&t| 2 * t <= ordering.len()).collect();
    let threshold = 2.0 * l as f64 + eps;
    let low: Vec<usize> = (0..avail.len())
        .filter(|&i| window_osc(x, ordering, avail[i], 2 * avail[i]).is_some_and(|o| o <= threshold))
        .collect();
    let finite = low.last().is_none_or(|&last| 2 * last + 2 <= avail.len());
    let (route, d): (SubsequenceRoute, Vec<usize>) = if finite {
        (SubsequenceRoute::Ell1Fallback, avail.clone())
    } else {
        (SubsequenceRoute::LowOscillation, low.iter().map(|&i| avail[i]).collect())
    };
    let nx = space.norm(x)?;
    let mut residuals = Vec::with_capacity(d.len());
    let mut bound = bound_factor.map(|_| {
        let mut r = CheckReport::new("subsequence_gap_bound", Some(space));
        r.notes.push(VALIDATION_NOTE.into());
        r
    });
    let mut violated = false;
    for &dk in &d {
        let g = greedy::greedy_sum(x, ordering, dk)?;
        residuals.push(space.norm(&x.sub(&g))?);
        if let (Some(rep), Some(f), SubsequenceRoute::LowOscillation) = (bound.as_mut(), bound_factor, route) {
            let ratio = space.norm(&g)? / nx;
            rep.instances += 1;
            violated |= ratio > f * (1.0 + RELATION_TOL) + RELATION_TOL;
            if f - ratio < rep.worst_slack {
                rep.worst_slack = f - ratio;
                rep.payload = Some(Payload::GreedySumBound {
                    space: space.spec().clone(),
                    x: x.clone(),
                    ordering: ordering.clone(),
                    n: dk,
                    factor: f,
                    ratio,
                });
            }
        }
    }
    if let Some(rep) = bound.as_mut() {
        // Estimated factors cannot refute.
        rep.settle(violated, false);
    }
    let monotone = residuals.windows(2).all(|w| w[1] <= w[0]);
    let tolerance_hits: Vec<ToleranceHit> = tol_grid
        .iter()
        .map(|&tol| {
            let from = match residuals.iter().rposition(|&r| r > tol) {
                None if !residuals.is_empty() => Some(0),
                Some(p) if p + 1 < residuals.len() => Some(p + 1),
                _ => None,
            };
            ToleranceHit { tol, from }
        })
        .collect();
    let truncation_limited = tolerance_hits.iter().any(|h| h.from.is_none());
    Ok(SubsequenceReport {
        route,
        low_oscillation: low,
        d,
        residuals,
        monotone,
        tolerance_hits,
        truncation_limited,
        ell1_norm: x.l1_norm(),
        bound_check: bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadingReport {
    pub report: CheckReport,
    /// A set `A > m1` with `|A| = m2` and `||1_{eps, A}|| <= M` for every `eps`.
    pub found: Option<Vec<usize>>,
    /// `max_eps ||1_{eps, A}||` for the found set, or the smallest such maximum seen.
    pub max_norm: f64,
    /// Every sign pattern was checked.
    pub exact_in_signs: bool,
}

/// Looks for `A` inside `(m1, m1 + m2 + 8]` with `|A| = m2` and
/// `||1_{eps, A}|| <= M` for all signs; the finite form of the `c_0`
/// spreading-model hypothesis.
pub fn check_spreading_condition(space: &Space, big_m: f64, m1: usize, m2: usize, cfg: &SearchConfig) -> Result<SpreadingReport> {
    if m2 == 0 || m1 + m2 > space.cap() {
        return Err(domain(format!("need 1 <= m2 and m1 + m2 <= {}", space.cap())));
    }
    let span = (m2 + 8).min(space.cap() - m1);
    let exact_in_signs = m2 <= 14;
    let mut best = (f64::INFINITY, Vec::new());
    let mut found = None;
    let mut r = CheckReport::new("spreading_condition", Some(space));
    r.notes.push("uses the finite consequence ||1_{eps,A}|| <= M of the spreading-model hypothesis".into());
    for (k, set) in search::Combinations::new(span, m2).take(cfg.enumeration_cap).enumerate() {
        let a: Vec<usize> = set.iter().map(|&j| j + m1).collect();
        let mut hi: f64 = 0.0;
        if exact_in_signs {
            for mask in 0..(1u64 << (m2 - 1)) {
                hi = hi.max(space.norm(&SignPattern::from_mask(&a, mask << 1)?.indicator())?);
                r.instances += 1;
            }
        } else {
            let mut rng = search::sample_rng(cfg.seed, k as u64);
            for _ in 0..cfg.enumeration_cap.min(4096) {
                let mask: u64 = rng.random();
                hi = hi.max(space.norm(&SignPattern::from_mask(&a, mask)?.indicator())?);
                r.instances += 1;
            }
        }
        if hi < best.0 {
            best = (hi, a.clone());
        }
        if hi <= big_m * (1.0 + RELATION_TOL) {
            found = Some(a);
            break;
        }
    }
    r.worst_slack = big_m - best.0;
    r.status = if found.is_some() { CheckStatus::ConsistentWithinBudget } else { CheckStatus::PreconditionFailed };
    r.notes.push(format!("smallest max-sign indicator norm {} on {:?}", best.0, best.1));
    Ok(SpreadingReport { report: r, found, max_norm: best.0, exact_in_signs })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub n: usize,
    pub greedy: f64,
    pub cesaro: f64,
    pub vp: f64,
}

/// `||x - G_n||`, `||x - C_n||`, `||x - (2 C_{2n} - C_n)||` for `1 <= n <= horizon`
/// (the ordering is zero-padded as needed).
pub fn residual_curve(space: &Space, x: &CoefVector, ordering: &GreedyOrdering, horizon: usize) -> Result<Vec<ResidualRow>> {
    ordering.validate(x)?;
    let o = ordering.padded(x, (2 * horizon).max(ordering.len()))?;
    (1..=horizon)
        .map(|n| {
            Ok(ResidualRow {
                n,
                greedy: space.norm(&x.sub(&greedy::greedy_sum(x, &o, n)?))?,
                cesaro: space.norm(&x.sub(&greedy::cesaro_sum(x, &o, n)?))?,
                vp: space.norm(&x.sub(&greedy::vp_sum(x, &o, n)?))?,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Qg,
    SuppressionQg,
    Cqg,
    Vpqg,
    Tqg,
    Succ,
    Ucc,
    Qglc,
    AlmostGreedy,
    Democracy,
    Superdemocracy,
}

pub const ALL_PROPERTIES: [Property; 11] = [
    Property::Qg,
    Property::SuppressionQg,
    Property::Cqg,
    Property::Vpqg,
    Property::Tqg,
    Property::Succ,
    Property::Ucc,
    Property::Qglc,
    Property::AlmostGreedy,
    Property::Democracy,
    Property::Superdemocracy,
];

/// `(premise, conclusion, rule)`: the premise property implies the conclusion,
/// so a failing conclusion makes the premise fail.
const IMPLICATIONS: [(Property, Property, &str); 8] = [
    (Property::Vpqg, Property::Ucc, "vpqg implies ucc with constant 2 (a1 a2 + 4K/3)"),
    (Property::Vpqg, Property::Qglc, "vpqg implies qglc with constant 4K/3 + a1 a2"),
    (Property::Cqg, Property::Vpqg, "2 C_2n - C_n is bounded by 3 sup ||C_n||"),
    (Property::Qg, Property::Cqg, "C_n is an average of greedy sums"),
    (Property::Qg, Property::SuppressionQg, "x - P_A x = x - (P_A x)"),
    (Property::SuppressionQg, Property::Qg, "P_A x = x - (x - P_A x)"),
    (Property::Succ, Property::Ucc, "ucc <= 2 succ"),
    (Property::AlmostGreedy, Property::Qg, "almost greedy implies quasi-greedy"),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    LikelyHolds { bound: f64 },
    /// The estimate grew by `growth` across the nested windows.
    FailsWithWitness { growth: f64 },
    FailsByImplication { via: Property, rule: String },
    Inconclusive,
}

impl Verdict {
    pub fn fails(&self) -> bool {
        matches!(self, Verdict::FailsWithWitness { .. } | Verdict::FailsByImplication { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowValue {
    pub window: usize,
    pub value: f64,
    pub mode: EstimateMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Implication {
    pub via: Property,
    pub rule: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyRow {
    pub property: Property,
    pub estimates: Vec<WindowValue>,
    /// Witness at the largest window.
    pub witness: Option<Witness>,
    pub direct: Verdict,
    pub implied_failure: Option<Implication>,
    pub verdict: Verdict,
}

/// Almost greedy, cqg + democratic and vpqg + democratic side by side;
/// the three are equivalent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalencePanel {
    pub almost_greedy: f64,
    pub cqg: f64,
    pub vpqg: f64,
    pub democracy: f64,
    pub almost_greedy_verdict: Verdict,
    pub cqg_and_democratic: Verdict,
    pub vpqg_and_democratic: Verdict,
    /// No column holds while another fails.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub space: String,
    pub windows: Vec<usize>,
    pub rows: Vec<PropertyRow>,
    pub panel: EquivalencePanel,
}

impl ClassificationReport {
    pub fn row(&self, p: Property) -> &PropertyRow {
        self.rows.iter().find(|r| r.property == p).expect("every property has a row")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyBudget {
    /// Nested search windows, increasing.
    pub windows: Vec<usize>,
    /// Search settings; the window is replaced per run.
    pub search: SearchConfig,
    /// Growth factor across windows that counts as divergence.
    pub growth_ratio: f64,
    /// Relative change across windows that still counts as stable.
    pub stable_tol: f64,
}

impl Default for ClassifyBudget {
    fn default() -> Self {
        ClassifyBudget { windows: vec![4, 6, 8], search: SearchConfig::default(), growth_ratio: 1.5, stable_tol: 1e-9 }
    }
}

fn direct_verdict(values: &[f64], budget: &ClassifyBudget) -> Verdict {
    let (first, last) = (values[0], values[values.len() - 1]);
    let increasing = values.windows(2).all(|w| w[1] >= w[0]);
    if values.len() >= 2 && increasing && last >= budget.growth_ratio * first {
        Verdict::FailsWithWitness { growth: last / first }
    } else if values.iter().all(|&v| v <= first * (1.0 + budget.stable_tol)) {
        Verdict::LikelyHolds { bound: last }
    } else {
        Verdict::Inconclusive
    }
}

fn combine(a: &Verdict, b: &Verdict) -> Verdict {
    match (a, b) {
        (v, _) if v.fails() => v.clone(),
        (_, v) if v.fails() => v.clone(),
        (Verdict::LikelyHolds { bound: x }, Verdict::LikelyHolds { bound: y }) => Verdict::LikelyHolds { bound: x.max(*y) },
        _ => Verdict::Inconclusive,
    }
}

/// Runs the estimators on nested windows and turns growth into verdicts,
/// then propagates failures backwards along known implications.
pub fn classify_basis<E: Executor>(space: &Space, budget: &ClassifyBudget, exec: &E) -> Result<ClassificationReport> {
    if budget.windows.is_empty() || budget.windows.windows(2).any(|w| w[0] >= w[1]) {
        return Err(input("classification windows must be increasing and nonempty"));
    }
    let mut series: BTreeMap<Property, (Vec<WindowValue>, Option<Witness>)> = BTreeMap::new();
    for &w in &budget.windows {
        let mut cfg = budget.search.clone();
        cfg.window = w;
        let est = Estimator::with_executor(space, &cfg, exec);
        let mut put = |p: Property, value: f64, mode: EstimateMode, witness: Option<Witness>| {
            let e = series.entry(p).or_default();
            e.0.push(WindowValue { window: w, value, mode });
            e.1 = witness;
        };
        for (p, e) in [
            (Property::Qg, est.qg()?),
            (Property::SuppressionQg, est.suppression_qg()?),
            (Property::Cqg, est.cqg()?),
            (Property::Vpqg, est.vpqg()?),
            (Property::Tqg, est.tqg()?),
            (Property::Succ, est.succ()?),
            (Property::Ucc, est.ucc()?),
            (Property::Qglc, est.qglc()?),
            (Property::AlmostGreedy, est.almost_greedy()?),
        ] {
            put(p, e.value, e.mode, Some(e.witness));
        }
        let ms: Vec<usize> = (1..=w).collect();
        for (p, mode) in [(Property::Democracy, SignMode::ConstantSigns), (Property::Superdemocracy, SignMode::AllSigns)] {
            let d = est.democracy_functions(&ms, mode)?;
            let (v, num, den) = d.constant();
            let m = if d.exact() { EstimateMode::ExactOverFamily } else { EstimateMode::RandomSearch };
            put(p, v, m, Some(Witness::IndicatorPair { numerator: num, denominator: den }));
        }
    }
    let mut rows: Vec<PropertyRow> = ALL_PROPERTIES
        .iter()
        .map(|&p| {
            let (estimates, witness) = series.remove(&p).expect("estimated");
            let values: Vec<f64> = estimates.iter().map(|e| e.value).collect();
            let direct = direct_verdict(&values, budget);
            PropertyRow { property: p, estimates, witness, verdict: direct.clone(), direct, implied_failure: None }
        })
        .collect();
    let idx = |p: Property| ALL_PROPERTIES.iter().position(|&q| q == p).expect("listed");
    loop {
        let mut changed = false;
        for (premise, conclusion, rule) in IMPLICATIONS {
            let (pi, ci) = (idx(premise), idx(conclusion));
            if rows[ci].verdict.fails() && rows[pi].implied_failure.is_none() {
                rows[pi].implied_failure = Some(Implication { via: conclusion, rule: rule.to_string() });
                if !rows[pi].verdict.fails() {
                    rows[pi].verdict = Verdict::FailsByImplication { via: conclusion, rule: rule.to_string() };
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let last = |p: Property| rows[idx(p)].estimates.last().expect("nonempty").value;
    let verdict = |p: Property| rows[idx(p)].verdict.clone();
    let ag = verdict(Property::AlmostGreedy);
    let cd = combine(&verdict(Property::Cqg), &verdict(Property::Democracy));
    let vd = combine(&verdict(Property::Vpqg), &verdict(Property::Democracy));
    let cols = [&ag, &cd, &vd];
    let consistent = !(cols.iter().any(|v| v.fails()) && cols.iter().any(|v| matches!(v, Verdict::LikelyHolds { .. })));
    let panel = EquivalencePanel {
        almost_greedy: last(Property::AlmostGreedy),
        cqg: last(Property::Cqg),
        vpqg: last(Property::Vpqg),
        democracy: last(Property::Democracy),
        almost_greedy_verdict: ag.clone(),
        cqg_and_democratic: cd.clone(),
        vpqg_and_democratic: vd.clone(),
        consistent,
    };
    Ok(ClassificationReport { space: space.label(), windows: budget.windows.clone(), rows, panel })
}

/// Constant kinds backing a classification property, if any.
pub fn property_constant(p: Property) -> Option<ConstantKind> {
    Some(match p {
        Property::Qg => ConstantKind::Qg,
        Property::SuppressionQg => ConstantKind::SuppressionQg,
        Property::Cqg => ConstantKind::Cqg,
        Property::Vpqg => ConstantKind::Vpqg,
        Property::Tqg => ConstantKind::Tqg,
        Property::Succ => ConstantKind::Succ,
        Property::Ucc => ConstantKind::Ucc,
        Property::Qglc => ConstantKind::Qglc,
        Property::AlmostGreedy => ConstantKind::AlmostGreedy,
        Property::Democracy | Property::Superdemocracy => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::Sign;

    #[test]
    fn coefficients() {
        assert_eq!(permutation_average_coefficient(1).unwrap(), 2);
        assert_eq!(permutation_average_coefficient(2).unwrap(), 21);
        assert_eq!(permutation_average_coefficient(3).unwrap(), 600);
    }

    #[test]
    fn permutation_average_small() {
        let eps = SignPattern::new([(1, Sign::Plus), (2, Sign::Plus)]).unwrap();
        let r = check_permutation_average(1, &eps, &CoefVector::zero()).unwrap();
        assert_eq!(r.status, CheckStatus::ExactPass);
        assert!(check_permutation_average(4, &eps, &CoefVector::zero()).is_err());
    }

    #[test]
    fn vp_identity_example() {
        let x = CoefVector::from_pairs([(1, 3.0), (2, 2.0), (3, 1.0)]).unwrap();
        let o = GreedyOrdering::lowest_index(&x, 3).unwrap();
        assert!(vp_discrepancy(&x, &o, 1).unwrap() <= IDENTITY_TOL);
        let expected = CoefVector::from_pairs([(1, 3.0), (2, 2.0)]).unwrap();
        assert_eq!(greedy::vp_sum(&x, &o, 1).unwrap(), expected);
    }

    #[test]
    fn gap_sequence_validation() {
        assert!(GapSequence::new(vec![1, 3, 2], None).is_err());
        assert!(GapSequence::new(vec![1, 3], Some(2)).is_err());
        assert!(GapSequence::new(vec![1, 2, 4], Some(2)).is_ok());
    }

    #[test]
    fn log_window_lengths() {
        assert_eq!(log_window_length(1), 8);
        assert_eq!(log_window_length(3), 48);
        assert_eq!(log_window_length(4), 128);
    }

    #[test]
    fn permutations_enumerate_all() {
        let mut p = vec![1, 2, 3, 4];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 24);
    }
}
