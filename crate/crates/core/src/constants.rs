//! Lower-bound estimators for the greedy-type constants, each returned with
//! a witness whose defining ratio reproduces the value.
//!
//! An estimate is the maximum of the defining ratio over a finite search
//! family. It equals the supremum over that family when the family was
//! enumerated completely ([`EstimateMode::ExactOverFamily`]); it is only a
//! lower bound for the constant of the space.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, input, Error, Result};
use crate::greedy::{
    self, greedy_set_count, greedy_sets, is_greedy_set, ordering_count, GreedyOrdering, Orderings,
    TiePolicy,
};
use crate::search::{self, argmax, Combinations, Executor, SearchConfig, SearchMode, Sequential};
use crate::spaces::Space;
use crate::vector::{normalize_set, CoefVector, Sign, SignPattern};

pub const DEFAULT_T_GRID: [f64; 5] = [1.0, 0.5, 0.25, 0.125, 0.0625];
pub const DEFAULT_PSI_T_GRID: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 4.0];
pub const DEFAULT_PSI_S_GRID: [f64; 3] = [1.0, 0.5, 0.25];

/// Largest window for the exact indicator-norm tables.
pub const MAX_EXACT_INDICATOR_WINDOW: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantKind {
    Qg,
    SuppressionQg,
    Cqg,
    Vpqg,
    Succ,
    Ucc,
    Qglc,
    Tqg,
    Phi,
    Theta,
    PhiU,
    Psi,
    AlmostGreedy,
}

impl ConstantKind {
    pub fn name(self) -> &'static str {
        match self {
            ConstantKind::Qg => "qg",
            ConstantKind::SuppressionQg => "suppression_qg",
            ConstantKind::Cqg => "cqg",
            ConstantKind::Vpqg => "vpqg",
            ConstantKind::Succ => "succ",
            ConstantKind::Ucc => "ucc",
            ConstantKind::Qglc => "qglc",
            ConstantKind::Tqg => "tqg",
            ConstantKind::Phi => "phi",
            ConstantKind::Theta => "theta",
            ConstantKind::PhiU => "phi_u",
            ConstantKind::Psi => "psi",
            ConstantKind::AlmostGreedy => "almost_greedy",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMode {
    /// Every member of a finite family was evaluated.
    ExactOverFamily,
    /// Exhaustive over candidates, but some tie or multiplier enumeration was cut at a cap.
    TruncatedEnumeration,
    RandomSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetRecord {
    pub seed: u64,
    pub mode: SearchMode,
    pub window: usize,
    /// Candidate vectors (or index sets) visited.
    pub candidates: u64,
    /// Ratios evaluated.
    pub instances: u64,
    /// Candidates whose tie or multiplier enumeration hit a cap.
    pub truncated: u64,
    /// Inadmissible configurations skipped.
    pub skipped: u64,
}

/// Inputs realizing an estimate. [`Witness::ratio`] recomputes the value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `||P_A x|| / ||x||` with `A` a greedy set.
    Projection { x: CoefVector, set: Vec<usize> },
    /// `||x - P_A x|| / ||x||` with `A` a greedy set.
    Suppression { x: CoefVector, set: Vec<usize> },
    /// `min_A |x_n| ||1_{eps(x), A}|| / ||x||` with `A` a greedy set.
    Truncation { x: CoefVector, set: Vec<usize> },
    /// `||C_n(x)|| / ||x||`.
    Cesaro { x: CoefVector, ordering: GreedyOrdering, n: usize },
    /// `||2 C_{2n}(x) - C_n(x)|| / ||x||`.
    Vp { x: CoefVector, ordering: GreedyOrdering, n: usize },
    /// `||1_{numerator}|| / ||1_{denominator}||`.
    IndicatorPair { numerator: SignPattern, denominator: SignPattern },
    /// `||1_{eps, A}|| / ||1_{eps, A} + tail||` with `tail` in `Q` off `A`.
    Qglc { signs: SignPattern, tail: CoefVector },
    /// `||P_set x|| / ||x||` with `x` in `Q`, `level >= t` and `set` inside `A(x, level)`.
    Threshold { x: CoefVector, t: f64, level: f64, set: Vec<usize> },
    /// `||sum a_n x_n e_n|| / ||x||` with `|a_n| <= 1` and
    /// `min |x_n| >= t ||x||_inf` over the multiplier support.
    Multiplier { x: CoefVector, t: f64, multipliers: CoefVector },
    /// `||sum_{supp y} a_j y_j e_j|| / ||head + middle + tail||`.
    Psi { head: CoefVector, middle: CoefVector, tail: CoefVector, multipliers: CoefVector },
    /// `||x - P_A x|| / ||x - P_B x||` with `A` greedy and `|B| <= |A|`.
    AlmostGreedy { x: CoefVector, greedy_set: Vec<usize>, other_set: Vec<usize> },
}

fn ratio_of(num: f64, den: f64) -> Result<f64> {
    if den > 0.0 {
        Ok(num / den)
    } else {
        Err(domain("zero denominator in a witness ratio"))
    }
}

fn apply_multipliers(x: &CoefVector, a: &CoefVector) -> CoefVector {
    CoefVector::from_sorted_unchecked(a.iter().map(|(i, m)| (i, m * x.get(i))).collect())
}

impl Witness {
    /// Recomputes the defining ratio.
    pub fn ratio(&self, space: &Space) -> Result<f64> {
        let n = |v: &CoefVector| space.norm(v);
        match self {
            Witness::Projection { x, set } => ratio_of(n(&greedy::projection(x, set))?, n(x)?),
            Witness::Suppression { x, set } => {
                ratio_of(n(&x.sub(&greedy::projection(x, set)))?, n(x)?)
            }
            Witness::Truncation { x, set } => {
                let level = set.iter().map(|&i| x.get(i).abs()).fold(f64::INFINITY, f64::min);
                ratio_of(level * n(&greedy::sign_indicator(x, set))?, n(x)?)
            }
            Witness::Cesaro { x, ordering, n: k } => {
                ratio_of(n(&greedy::cesaro_sum(x, ordering, *k)?)?, n(x)?)
            }
            Witness::Vp { x, ordering, n: k } => ratio_of(n(&greedy::vp_sum(x, ordering, *k)?)?, n(x)?),
            Witness::IndicatorPair { numerator, denominator } => {
                ratio_of(n(&numerator.indicator())?, n(&denominator.indicator())?)
            }
            Witness::Qglc { signs, tail } => {
                let block = signs.indicator();
                ratio_of(n(&block)?, n(&block.add(tail))?)
            }
            Witness::Threshold { x, set, .. } => ratio_of(n(&greedy::projection(x, set))?, n(x)?),
            Witness::Multiplier { x, multipliers, .. } => {
                ratio_of(n(&apply_multipliers(x, multipliers))?, n(x)?)
            }
            Witness::Psi { head, middle, tail, multipliers } => {
                let total = head.add(middle).add(tail);
                ratio_of(n(&apply_multipliers(middle, multipliers))?, n(&total)?)
            }
            Witness::AlmostGreedy { x, greedy_set, other_set } => ratio_of(
                n(&x.sub(&greedy::projection(x, greedy_set)))?,
                n(&x.sub(&greedy::projection(x, other_set)))?,
            ),
        }
    }

    /// Checks the side conditions of the defining inequality.
    pub fn validate(&self) -> Result<()> {
        let greedy_ok = |x: &CoefVector, set: &[usize]| {
            if set.iter().all(|&i| x.contains(i)) && is_greedy_set(x, set) {
                Ok(())
            } else {
                Err(input("witness set is not a greedy set inside the support"))
            }
        };
        match self {
            Witness::Projection { x, set }
            | Witness::Suppression { x, set }
            | Witness::Truncation { x, set } => greedy_ok(x, set),
            Witness::Cesaro { x, ordering, .. } | Witness::Vp { x, ordering, .. } => ordering.validate(x),
            Witness::IndicatorPair { numerator, denominator } => {
                // Either a sub-block with the same signs, or the same block with other signs.
                let num = numerator.domain();
                let den = denominator.domain();
                let sub = num.iter().all(|&i| numerator.get(i) == denominator.get(i));
                if sub || num == den {
                    Ok(())
                } else {
                    Err(input("indicator pair is neither a sub-block nor a sign change"))
                }
            }
            Witness::Qglc { signs, tail } => {
                if !tail.in_q() {
                    return Err(input("QGLC tail is not in Q"));
                }
                if signs.domain().iter().any(|&i| tail.contains(i)) {
                    return Err(input("QGLC tail meets the indicator block"));
                }
                if signs.is_empty() {
                    return Err(input("empty QGLC block"));
                }
                Ok(())
            }
            Witness::Threshold { x, t, level, set } => {
                if !x.in_q() || !(*level >= *t && *t > 0.0) {
                    return Err(input("threshold witness needs x in Q and level >= t > 0"));
                }
                if set.iter().all(|&i| x.get(i).abs() >= *level) {
                    Ok(())
                } else {
                    Err(input("threshold witness set leaves A(x, level)"))
                }
            }
            Witness::Multiplier { x, t, multipliers } => {
                let floor = t * x.sup_norm();
                if multipliers.iter().all(|(i, a)| a.abs() <= 1.0 && x.get(i).abs() >= floor && x.contains(i)) {
                    Ok(())
                } else {
                    Err(input("multiplier witness violates |a_n| <= 1 or the level condition"))
                }
            }
            Witness::Psi { head, middle, tail, multipliers } => {
                let disjoint = head.iter().all(|(i, _)| !middle.contains(i) && !tail.contains(i))
                    && middle.iter().all(|(i, _)| !tail.contains(i));
                let chain = greedy::dominates(head, middle) && greedy::dominates(middle, tail);
                let mult = multipliers.iter().all(|(i, a)| a.abs() <= 1.0 && middle.contains(i));
                if disjoint && chain && mult && !middle.is_empty() {
                    Ok(())
                } else {
                    Err(input("Psi witness breaks disjointness, domination or |a_j| <= 1"))
                }
            }
            Witness::AlmostGreedy { x, greedy_set, other_set } => {
                greedy_ok(x, greedy_set)?;
                if normalize_set(other_set).len() <= normalize_set(greedy_set).len() {
                    Ok(())
                } else {
                    Err(input("comparison set is larger than the greedy set"))
                }
            }
        }
    }

    /// The same witness with every vector multiplied by `c` (the ratio is unchanged).
    pub fn scaled(&self, c: f64) -> Witness {
        let mut w = self.clone();
        match &mut w {
            Witness::Projection { x, .. }
            | Witness::Suppression { x, .. }
            | Witness::Truncation { x, .. }
            | Witness::Cesaro { x, .. }
            | Witness::Vp { x, .. }
            | Witness::Threshold { x, .. }
            | Witness::Multiplier { x, .. }
            | Witness::AlmostGreedy { x, .. } => *x = x.scaled(c),
            Witness::Psi { head, middle, tail, .. } => {
                *head = head.scaled(c);
                *middle = middle.scaled(c);
                *tail = tail.scaled(c);
            }
            Witness::IndicatorPair { .. } | Witness::Qglc { .. } => {}
        }
        w
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub constant: ConstantKind,
    pub value: f64,
    pub witness: Witness,
    pub budget: BudgetRecord,
    pub mode: EstimateMode,
}

impl ConstantEstimate {
    /// Whether the witness reproduces the value to `tol` (relative).
    pub fn reproduces(&self, space: &Space, tol: f64) -> Result<bool> {
        Ok(crate::approx_eq(self.witness.ratio(space)?, self.value, tol))
    }

    pub fn is_exact(&self) -> bool {
        self.mode == EstimateMode::ExactOverFamily
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPoint {
    pub t: f64,
    pub estimate: ConstantEstimate,
}

/// Per-threshold lower bounds, sorted by decreasing `t`; the values are
/// non-increasing in `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFunctionEstimate {
    pub function: ConstantKind,
    pub points: Vec<ThresholdPoint>,
}

impl ThresholdFunctionEstimate {
    pub fn at(&self, t: f64) -> Option<&ConstantEstimate> {
        self.points.iter().find(|p| p.t == t).map(|p| &p.estimate)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignMode {
    /// `eps = +1` throughout (democracy).
    ConstantSigns,
    /// All sign patterns (superdemocracy).
    AllSigns,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemocracyRow {
    pub m: usize,
    pub sup: f64,
    pub inf: f64,
    pub sup_witness: SignPattern,
    pub inf_witness: SignPattern,
    pub exact: bool,
}

impl DemocracyRow {
    pub fn ratio(&self) -> f64 {
        self.sup / self.inf
    }
}

/// Extremes of `||1_{eps, A}||` over `|A| = m`, `A` inside the window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemocracyFunctions {
    pub sign_mode: SignMode,
    pub window: usize,
    pub rows: Vec<DemocracyRow>,
}

impl DemocracyFunctions {
    /// `max_{m <= m'} sup_m / inf_{m'}` with the realizing pair; this is the
    /// democracy constant (constant signs) or the superdemocracy constant
    /// (all signs) of the window.
    pub fn constant(&self) -> (f64, SignPattern, SignPattern) {
        let mut best = (0.0, SignPattern::default(), SignPattern::default());
        for (i, a) in self.rows.iter().enumerate() {
            for b in &self.rows[i..] {
                let r = a.sup / b.inf;
                if r > best.0 {
                    best = (r, a.sup_witness.clone(), b.inf_witness.clone());
                }
            }
        }
        best
    }

    pub fn exact(&self) -> bool {
        self.rows.iter().all(|r| r.exact)
    }
}

/// Running best for one candidate.
#[derive(Default)]
struct Local {
    best: Option<(f64, Witness)>,
    instances: u64,
    truncated: bool,
    skipped: u64,
}

impl Local {
    fn offer(&mut self, v: f64, w: impl FnOnce() -> Witness) {
        self.instances += 1;
        if self.best.as_ref().is_none_or(|(b, _)| v > *b) {
            self.best = Some((v, w()));
        }
    }
}

/// Estimators for one space and one search budget.
pub struct Estimator<'a, E: Executor = Sequential> {
    space: &'a Space,
    cfg: &'a SearchConfig,
    exec: &'a E,
}

impl<'a> Estimator<'a, Sequential> {
    pub fn new(space: &'a Space, cfg: &'a SearchConfig) -> Self {
        Estimator { space, cfg, exec: &Sequential }
    }
}

impl<'a, E: Executor> Estimator<'a, E> {
    pub fn with_executor(space: &'a Space, cfg: &'a SearchConfig, exec: &'a E) -> Self {
        Estimator { space, cfg, exec }
    }

    pub fn space(&self) -> &Space {
        self.space
    }

    pub fn config(&self) -> &SearchConfig {
        self.cfg
    }

    fn norm(&self, x: &CoefVector) -> f64 {
        self.space.norm_raw(x)
    }

    fn budget(&self, candidates: u64, locals: &[Local]) -> BudgetRecord {
        BudgetRecord {
            seed: self.cfg.seed,
            mode: self.cfg.mode,
            window: self.cfg.window,
            candidates,
            instances: locals.iter().map(|l| l.instances).sum(),
            truncated: locals.iter().filter(|l| l.truncated).count() as u64,
            skipped: locals.iter().map(|l| l.skipped).sum(),
        }
    }

    fn mode(&self, truncated: u64) -> EstimateMode {
        match (self.cfg.is_exhaustive(), truncated) {
            (false, _) => EstimateMode::RandomSearch,
            (true, 0) => EstimateMode::ExactOverFamily,
            (true, _) => EstimateMode::TruncatedEnumeration,
        }
    }

    fn finish(&self, kind: ConstantKind, candidates: u64, results: Vec<Result<Local>>) -> Result<ConstantEstimate> {
        let locals: Vec<Local> = results.into_iter().collect::<Result<_>>()?;
        let budget = self.budget(candidates, &locals);
        let picks: Vec<Option<(f64, Witness)>> = locals.into_iter().map(|l| l.best).collect();
        let (_, value, witness) = argmax(picks)
            .ok_or_else(|| Error::EmptyBudget(format!("no admissible instance for {}", kind.name())))?;
        let mode = self.mode(budget.truncated);
        Ok(ConstantEstimate { constant: kind, value, witness, budget, mode })
    }

    fn over_candidates<F>(&self, kind: ConstantKind, eval: F) -> Result<ConstantEstimate>
    where
        F: Fn(&CoefVector) -> Result<Local> + Sync + Send,
    {
        let cands = search::candidates(self.cfg, self.space.cap())?;
        let results = self.exec.map_indexed(cands.len(), |k| eval(&cands[k]));
        self.finish(kind, cands.len() as u64, results)
    }

    /// Greedy sets of size `m`, all of them when affordable.
    fn sets(&self, x: &CoefVector, m: usize) -> Result<(Vec<Vec<usize>>, bool)> {
        let count = greedy_set_count(x, m)?;
        if x.len() <= self.cfg.tie_enumeration_max_support && count <= self.cfg.enumeration_cap as u128 {
            Ok((greedy_sets(x, m, TiePolicy::Enumerate, self.cfg.enumeration_cap)?, false))
        } else {
            Ok((greedy_sets(x, m, TiePolicy::LowestIndexFirst, 1)?, count > 1))
        }
    }

    /// Orderings of the support, truncated at the enumeration cap.
    fn orderings(&self, x: &CoefVector) -> Result<(Vec<GreedyOrdering>, bool)> {
        let count = ordering_count(x);
        let limit = if x.len() <= self.cfg.tie_enumeration_max_support {
            self.cfg.enumeration_cap.max(1)
        } else {
            1
        };
        let list: Vec<GreedyOrdering> = Orderings::new(x, x.len())?.take(limit).collect();
        Ok((list, count > limit as u128))
    }

    fn greedy_set_family<F>(&self, kind: ConstantKind, ratio: F) -> Result<ConstantEstimate>
    where
        F: Fn(&CoefVector, f64, &[usize]) -> f64 + Sync + Send,
    {
        self.over_candidates(kind, |x| {
            let mut local = Local::default();
            let nx = self.norm(x);
            // G(x, 0) = {empty set}; only the suppression ratio is nonzero there.
            let first = if kind == ConstantKind::SuppressionQg { 0 } else { 1 };
            for m in first..=x.len() {
                let (sets, truncated) = self.sets(x, m)?;
                local.truncated |= truncated;
                for set in sets {
                    let r = ratio(x, nx, &set);
                    local.offer(r, || {
                        let (x, set) = (x.clone(), set.clone());
                        match kind {
                            ConstantKind::Qg => Witness::Projection { x, set },
                            ConstantKind::SuppressionQg => Witness::Suppression { x, set },
                            _ => Witness::Truncation { x, set },
                        }
                    });
                }
            }
            Ok(local)
        })
    }

    /// `sup ||P_A x|| / ||x||` over greedy sets.
    pub fn qg(&self) -> Result<ConstantEstimate> {
        self.greedy_set_family(ConstantKind::Qg, |x, nx, set| {
            self.norm(&greedy::projection(x, set)) / nx
        })
    }

    /// `sup ||x - P_A x|| / ||x||` over greedy sets.
    pub fn suppression_qg(&self) -> Result<ConstantEstimate> {
        self.greedy_set_family(ConstantKind::SuppressionQg, |x, nx, set| {
            self.norm(&x.sub(&greedy::projection(x, set))) / nx
        })
    }

    /// `sup min_A |x_n| ||1_{eps(x), A}|| / ||x||` over greedy sets.
    pub fn tqg(&self) -> Result<ConstantEstimate> {
        self.greedy_set_family(ConstantKind::Tqg, |x, nx, set| {
            let level = set.iter().map(|&i| x.get(i).abs()).fold(f64::INFINITY, f64::min);
            level * self.norm(&greedy::sign_indicator(x, set)) / nx
        })
    }

    /// `sup ||C_n(x)|| / ||x||` over orderings and `1 <= n <= |supp x|`.
    /// Larger `n` adds nothing: `||C_n(x)||` is convex in `1/n` and tends to `||x||`.
    pub fn cqg(&self) -> Result<ConstantEstimate> {
        self.over_candidates(ConstantKind::Cqg, |x| {
            let mut local = Local::default();
            let nx = self.norm(x);
            let (orders, truncated) = self.orderings(x)?;
            local.truncated = truncated;
            for o in &orders {
                for n in 1..=x.len() {
                    let c = greedy::cesaro_sum(x, o, n)?;
                    local.offer(self.norm(&c) / nx, || Witness::Cesaro { x: x.clone(), ordering: o.clone(), n });
                }
            }
            Ok(local)
        })
    }

    /// `sup ||2 C_{2n}(x) - C_n(x)|| / ||x||` over orderings (zero-padded to
    /// length `2n`) and `1 <= n <= |supp x|`; beyond that the sum is `x`.
    pub fn vpqg(&self) -> Result<ConstantEstimate> {
        self.over_candidates(ConstantKind::Vpqg, |x| {
            let mut local = Local::default();
            let nx = self.norm(x);
            let (orders, truncated) = self.orderings(x)?;
            local.truncated = truncated;
            for o in &orders {
                for n in 1..=x.len() {
                    let v = greedy::vp_sum_direct(x, o, n);
                    local.offer(self.norm(&v) / nx, || Witness::Vp {
                        x: x.clone(),
                        ordering: o.padded(x, (2 * n).max(x.len())).expect("padding past the support"),
                        n,
                    });
                }
            }
            Ok(local)
        })
    }

    /// Norms of every `{-1, 0, 1}` vector on the window, base-3 indexed
    /// (digit 1 is `+1`, digit 2 is `-1`, lowest digit at index 1).
    fn ternary_table(&self, w: usize) -> Vec<f64> {
        let total = 3usize.pow(w as u32);
        self.exec.map_indexed(total, |code| self.norm(&ternary_vector(code, w)))
    }

    fn indicator_window(&self) -> Result<usize> {
        self.cfg.validate(self.space.cap())?;
        Ok(self.cfg.window)
    }

    /// `sup ||1_{eps, B}|| / ||1_{eps, A}||` over `B` inside `A` inside the window.
    pub fn succ(&self) -> Result<ConstantEstimate> {
        let w = self.indicator_window()?;
        if !self.cfg.is_exhaustive() || w > MAX_EXACT_INDICATOR_WINDOW {
            return self.random_indicator(ConstantKind::Succ);
        }
        let table = self.ternary_table(w);
        let total = table.len();
        // best[v]: largest norm over sub-vectors of v, with its code.
        let mut best: Vec<(f64, usize)> = vec![(0.0, 0); total];
        let pow3: Vec<usize> = (0..w).map(|j| 3usize.pow(j as u32)).collect();
        for code in 1..total {
            let mut b = (table[code], code);
            for &p in &pow3 {
                let d = (code / p) % 3;
                if d != 0 {
                    let sub = best[code - d * p];
                    if sub.0 > b.0 {
                        b = sub;
                    }
                }
            }
            best[code] = b;
        }
        let mut top: Option<(f64, usize, usize)> = None;
        for code in 1..total {
            let r = best[code].0 / table[code];
            if top.is_none_or(|t| r > t.0) {
                top = Some((r, best[code].1, code));
            }
        }
        let (value, num, den) = top.ok_or_else(|| Error::EmptyBudget("empty window".into()))?;
        let witness = Witness::IndicatorPair { numerator: ternary_signs(num, w), denominator: ternary_signs(den, w) };
        Ok(self.indicator_estimate(ConstantKind::Succ, value, witness, total as u64 - 1))
    }

    /// `sup ||1_{eps, A}|| / ||1_{eps', A}||` over `A` inside the window.
    pub fn ucc(&self) -> Result<ConstantEstimate> {
        let w = self.indicator_window()?;
        if !self.cfg.is_exhaustive() || w > MAX_EXACT_INDICATOR_WINDOW {
            return self.random_indicator(ConstantKind::Ucc);
        }
        let table = self.ternary_table(w);
        let pow3: Vec<usize> = (0..w).map(|j| 3usize.pow(j as u32)).collect();
        let mut top: Option<(f64, usize, usize)> = None;
        for mask in 1u64..(1 << w) {
            let pos: Vec<usize> = (0..w).filter(|&j| (mask >> j) & 1 == 1).collect();
            let (mut hi, mut lo) = ((f64::NEG_INFINITY, 0), (f64::INFINITY, 0));
            for signs in 0u64..(1 << pos.len()) {
                let code: usize = pos
                    .iter()
                    .enumerate()
                    .map(|(b, &j)| pow3[j] * if (signs >> b) & 1 == 1 { 2 } else { 1 })
                    .sum();
                let v = table[code];
                if v > hi.0 {
                    hi = (v, code);
                }
                if v < lo.0 {
                    lo = (v, code);
                }
            }
            let r = hi.0 / lo.0;
            if top.is_none_or(|t| r > t.0) {
                top = Some((r, hi.1, lo.1));
            }
        }
        let (value, num, den) = top.ok_or_else(|| Error::EmptyBudget("empty window".into()))?;
        let witness = Witness::IndicatorPair { numerator: ternary_signs(num, w), denominator: ternary_signs(den, w) };
        let evaluated = 3u64.pow(w as u32) - 1;
        Ok(self.indicator_estimate(ConstantKind::Ucc, value, witness, evaluated))
    }

    fn indicator_estimate(&self, kind: ConstantKind, value: f64, witness: Witness, instances: u64) -> ConstantEstimate {
        ConstantEstimate {
            constant: kind,
            value,
            witness,
            budget: BudgetRecord {
                seed: self.cfg.seed,
                mode: self.cfg.mode,
                window: self.cfg.window,
                candidates: instances,
                instances,
                truncated: 0,
                skipped: 0,
            },
            mode: EstimateMode::ExactOverFamily,
        }
    }

    fn samples(&self) -> usize {
        match self.cfg.mode {
            SearchMode::Random { samples } => samples,
            SearchMode::Exhaustive => self.cfg.enumeration_cap,
        }
    }

    fn random_indicator(&self, kind: ConstantKind) -> Result<ConstantEstimate> {
        let samples = self.samples();
        let sizes = self.cfg.sizes();
        let w = self.cfg.window;
        let results = self.exec.map_indexed(samples, |k| -> Result<Local> {
            let mut rng = search::sample_rng(self.cfg.seed, k as u64);
            let s = sizes[rng.random_range(0..sizes.len())];
            let set = search::random_subset(&mut rng, w, s);
            let eps = random_signs(&mut rng, &set)?;
            let mut local = Local::default();
            let (num, den) = match kind {
                ConstantKind::Succ => {
                    let sub: Vec<usize> = set.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
                    let num = SignPattern::new(sub.iter().map(|&i| (i, eps.get(i).expect("in domain"))))?;
                    (num, eps)
                }
                _ => (random_signs(&mut rng, &set)?, eps),
            };
            let r = self.norm(&num.indicator()) / self.norm(&den.indicator());
            local.offer(r, || Witness::IndicatorPair { numerator: num.clone(), denominator: den.clone() });
            Ok(local)
        });
        let mut est = self.finish(kind, samples as u64, results)?;
        est.mode = EstimateMode::RandomSearch;
        Ok(est)
    }

    /// `sup ||1_{eps, A}|| / ||1_{eps, A} + x||` over blocks `A` in the
    /// window and tails `x` in `Q` supported off `A`. Exhaustive mode takes
    /// the tail coefficients from the QGLC grid.
    pub fn qglc(&self) -> Result<ConstantEstimate> {
        let w = self.indicator_window()?;
        if !self.cfg.is_exhaustive() {
            return self.random_qglc();
        }
        if w > 20 {
            return Err(Error::Budget { what: "exhaustive QGLC window".into(), count: w as u128, cap: 20 });
        }
        let grid = &self.cfg.qglc_grid;
        let masks = (1usize << w) - 1;
        let results = self.exec.map_indexed(masks, |k| -> Result<Local> {
            let mask = k + 1;
            let block: Vec<usize> = (0..w).filter(|&j| (mask >> j) & 1 == 1).map(|j| j + 1).collect();
            let rest: Vec<usize> = (0..w).filter(|&j| (mask >> j) & 1 == 0).map(|j| j + 1).collect();
            let mut local = Local::default();
            let tails = grid_vectors(&rest, grid);
            for signs in 0u64..(1 << block.len()) {
                let eps = SignPattern::from_mask(&block, signs)?;
                let ind = eps.indicator();
                let top = self.norm(&ind);
                for tail in &tails {
                    let r = top / self.norm(&ind.add(tail));
                    local.offer(r, || Witness::Qglc { signs: eps.clone(), tail: tail.clone() });
                }
            }
            Ok(local)
        });
        self.finish(ConstantKind::Qglc, masks as u64, results)
    }

    fn random_qglc(&self) -> Result<ConstantEstimate> {
        let samples = self.samples();
        let sizes = self.cfg.sizes();
        let w = self.cfg.window;
        let results = self.exec.map_indexed(samples, |k| -> Result<Local> {
            let mut rng = search::sample_rng(self.cfg.seed, k as u64);
            let s = sizes[rng.random_range(0..sizes.len())];
            let block = search::random_subset(&mut rng, w, s);
            let eps = random_signs(&mut rng, &block)?;
            let mut tail = Vec::new();
            for i in 1..=w {
                if block.binary_search(&i).is_err() && rng.random_bool(0.5) {
                    tail.push((i, 2.0 * rng.random::<f64>() - 1.0));
                }
            }
            let tail = CoefVector::from_sorted_unchecked(tail);
            let ind = eps.indicator();
            let mut local = Local::default();
            let r = self.norm(&ind) / self.norm(&ind.add(&tail));
            local.offer(r, || Witness::Qglc { signs: eps.clone(), tail: tail.clone() });
            Ok(local)
        });
        self.finish(ConstantKind::Qglc, samples as u64, results)
    }

    fn threshold_family<F>(&self, kind: ConstantKind, grid: &[f64], per_t: F) -> Result<ThresholdFunctionEstimate>
    where
        F: Fn(&CoefVector, f64, &mut Local) -> Result<()> + Sync + Send,
    {
        let mut ts: Vec<f64> = grid.to_vec();
        if ts.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
            return Err(domain("threshold grid values must lie in (0, 1]"));
        }
        ts.sort_by(|a, b| b.total_cmp(a));
        ts.dedup();
        let cands = search::candidates(self.cfg, self.space.cap())?;
        let results = self.exec.map_indexed(cands.len(), |k| -> Result<Vec<Local>> {
            // Candidates are scaled into Q; every ratio here is scale invariant.
            let y = cands[k].scaled(1.0 / cands[k].sup_norm());
            ts.iter()
                .map(|&t| {
                    let mut local = Local::default();
                    per_t(&y, t, &mut local)?;
                    Ok(local)
                })
                .collect()
        });
        let per_candidate: Vec<Vec<Local>> = results.into_iter().collect::<Result<_>>()?;
        let mut columns: Vec<Vec<Local>> = ts.iter().map(|_| Vec::with_capacity(cands.len())).collect();
        for row in per_candidate {
            for (j, l) in row.into_iter().enumerate() {
                columns[j].push(l);
            }
        }
        let mut points: Vec<ThresholdPoint> = Vec::new();
        for (t, col) in ts.iter().zip(columns) {
            let mut est = self.finish(kind, cands.len() as u64, col.into_iter().map(Ok).collect())?;
            // A witness for t is admissible for every smaller t.
            if let Some(prev) = points.last() {
                if prev.estimate.value > est.value {
                    est.value = prev.estimate.value;
                    est.witness = prev.estimate.witness.clone();
                }
            }
            points.push(ThresholdPoint { t: *t, estimate: est });
        }
        Ok(ThresholdFunctionEstimate { function: kind, points })
    }

    /// `phi(t)`: `sup ||P_A x|| / ||x||` over `x` in `Q` and `A` inside `A(x, t)`.
    pub fn phi(&self, grid: &[f64]) -> Result<ThresholdFunctionEstimate> {
        let max = self.cfg.multiplier_enumeration_max;
        self.threshold_family(ConstantKind::Phi, grid, |y, t, local| {
            let a = greedy::threshold_set(y, t)?;
            let ny = self.norm(y);
            if a.len() > max {
                local.truncated = true;
                let r = self.norm(&y.restrict(&a)) / ny;
                local.offer(r, || Witness::Threshold { x: y.clone(), t, level: t, set: a.clone() });
                return Ok(());
            }
            for mask in 1u64..(1 << a.len()) {
                let set: Vec<usize> = a.iter().enumerate().filter(|(j, _)| (mask >> j) & 1 == 1).map(|(_, &i)| i).collect();
                let r = self.norm(&y.restrict(&set)) / ny;
                local.offer(r, || Witness::Threshold { x: y.clone(), t, level: t, set: set.clone() });
            }
            Ok(())
        })
    }

    /// `theta(t)`: `sup ||P_{A(x, t)} x|| / ||x||` over `x` in `Q`. A level
    /// `tau >= t` of `x` stands for the rescaled vector `(t / tau) x`, which
    /// lies in `Q` and has `A((t / tau) x, t) = A(x, tau)`.
    pub fn theta(&self, grid: &[f64]) -> Result<ThresholdFunctionEstimate> {
        self.threshold_family(ConstantKind::Theta, grid, |y, t, local| {
            let ny = self.norm(y);
            let mut levels: Vec<f64> = y.iter().map(|(_, v)| v.abs()).filter(|&v| v >= t).collect();
            levels.sort_by(|a, b| b.total_cmp(a));
            levels.dedup();
            for level in levels {
                let set = greedy::threshold_set(y, level)?;
                let r = self.norm(&y.restrict(&set)) / ny;
                local.offer(r, || Witness::Threshold { x: y.clone(), t, level, set: set.clone() });
            }
            Ok(())
        })
    }

    /// `phi_u(t)`: `sup ||sum_A a_n x_n e_n|| / ||x||` over `|a_n| <= 1` and
    /// `min_A |x_n| >= t ||x||_inf`. The map `a -> ||sum a_n x_n e_n||` is
    /// convex, so the supremum is attained at a sign vector on the full level set.
    pub fn phi_u(&self, grid: &[f64]) -> Result<ThresholdFunctionEstimate> {
        let max = self.cfg.multiplier_enumeration_max;
        self.threshold_family(ConstantKind::PhiU, grid, |y, t, local| {
            let a = greedy::threshold_set(y, t)?;
            let ny = self.norm(y);
            self.sign_multipliers(y, &a, max, local, |m| Witness::Multiplier { x: y.clone(), t, multipliers: m }, ny);
            Ok(())
        })
    }

    /// Offers `||sum_{set} eps_n v_n e_n|| / denom` for sign vectors `eps`
    /// (first sign fixed, since the norm is even).
    fn sign_multipliers(
        &self,
        v: &CoefVector,
        set: &[usize],
        max: usize,
        local: &mut Local,
        witness: impl Fn(CoefVector) -> Witness,
        denom: f64,
    ) {
        if set.is_empty() {
            return;
        }
        let patterns: u64 = if set.len() > max {
            local.truncated = true;
            1
        } else {
            1 << (set.len() - 1)
        };
        for mask in 0..patterns {
            let mult = CoefVector::from_sorted_unchecked(
                set.iter()
                    .enumerate()
                    .map(|(j, &i)| (i, if j > 0 && (mask >> (j - 1)) & 1 == 1 { -1.0 } else { 1.0 }))
                    .collect(),
            );
            let r = self.norm(&apply_multipliers(v, &mult)) / denom;
            local.offer(r, || witness(mult.clone()));
        }
    }

    /// `Psi(t, s)`: `sup ||sum_{supp y} a_j y_j e_j|| / ||x + y + z||` over
    /// disjoint `x |> y |> z` with `|supp x| <= t |supp y|`,
    /// `osc(y) <= 1/s` and `|a_j| <= 1`. Each candidate `w` is split into a
    /// greedy head, a greedy middle block of the remainder and the tail.
    pub fn psi(&self, t: f64, s: f64) -> Result<ConstantEstimate> {
        if !(t >= 0.0 && t.is_finite()) || !(s > 0.0 && s <= 1.0) {
            return Err(domain(format!("Psi needs t >= 0 and 0 < s <= 1, got ({t}, {s})")));
        }
        let max = self.cfg.multiplier_enumeration_max;
        self.over_candidates(ConstantKind::Psi, |w| {
            let mut local = Local::default();
            let nw = self.norm(w);
            let len = w.len();
            for a in 0..len {
                let (heads, tr) = self.sets(w, a)?;
                local.truncated |= tr;
                for head_set in heads {
                    let head = w.restrict(&head_set);
                    let rest = w.sub(&head);
                    for b in 1..=len - a {
                        if (a as f64) > t * b as f64 {
                            local.skipped += 1;
                            continue;
                        }
                        let (mids, tr) = self.sets(&rest, b)?;
                        local.truncated |= tr;
                        for mid_set in mids {
                            let middle = rest.restrict(&mid_set);
                            if greedy::osc(&middle, &mid_set)? > 1.0 / s {
                                local.skipped += 1;
                                continue;
                            }
                            let tail = rest.sub(&middle);
                            self.sign_multipliers(
                                &middle,
                                &mid_set,
                                max,
                                &mut local,
                                |m| Witness::Psi {
                                    head: head.clone(),
                                    middle: middle.clone(),
                                    tail: tail.clone(),
                                    multipliers: m,
                                },
                                nw,
                            );
                        }
                    }
                }
            }
            Ok(local)
        })
    }

    /// `sup ||x - P_A x|| / ||x - P_B x||` over greedy `A` of size
    /// `m < |supp x|` and `B` inside `supp x` with `|B| <= m`.
    pub fn almost_greedy(&self) -> Result<ConstantEstimate> {
        let max = self.cfg.tie_enumeration_max_support.min(20);
        self.over_candidates(ConstantKind::AlmostGreedy, |x| {
            let mut local = Local::default();
            let supp = x.support();
            let l = supp.len();
            if l < 2 {
                return Ok(local);
            }
            if l > max {
                // Comparison sets limited to the lowest-index prefixes.
                local.truncated = true;
                for m in 1..l {
                    let a = greedy_sets(x, m, TiePolicy::LowestIndexFirst, 1)?.remove(0);
                    let num = self.norm(&x.sub(&x.restrict(&a)));
                    for b in Combinations::new(l, m).take(self.cfg.enumeration_cap) {
                        let bset: Vec<usize> = b.iter().map(|&j| supp[j - 1]).collect();
                        let r = num / self.norm(&x.sub(&x.restrict(&bset)));
                        local.offer(r, || Witness::AlmostGreedy { x: x.clone(), greedy_set: a.clone(), other_set: bset.clone() });
                    }
                }
                return Ok(local);
            }
            // residual norms ||x - P_B x|| for every B inside the support, by bit mask
            let residual: Vec<f64> = (0u64..(1 << l))
                .map(|mask| {
                    let keep: Vec<usize> = (0..l).filter(|&j| (mask >> j) & 1 == 0).map(|j| supp[j]).collect();
                    self.norm(&x.restrict(&keep))
                })
                .collect();
            let to_mask = |set: &[usize]| -> u64 {
                set.iter().map(|i| 1u64 << supp.binary_search(i).expect("in support")).sum()
            };
            for m in 1..l {
                // smallest denominator among |B| <= m
                let (den_mask, den) = (0u64..(1 << l))
                    .filter(|b| b.count_ones() as usize <= m)
                    .map(|b| (b, residual[b as usize]))
                    .fold((0u64, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc });
                let (sets, truncated) = self.sets(x, m)?;
                local.truncated |= truncated;
                for a in sets {
                    let r = residual[to_mask(&a) as usize] / den;
                    local.offer(r, || Witness::AlmostGreedy {
                        x: x.clone(),
                        greedy_set: a.clone(),
                        other_set: (0..l).filter(|&j| (den_mask >> j) & 1 == 1).map(|j| supp[j]).collect(),
                    });
                }
            }
            Ok(local)
        })
    }

    /// `sup` and `inf` of `||1_{eps, A}||` over `|A| = m` inside the window,
    /// for each `m` in `ms`. Exact when `C(window, m)` times the sign count
    /// fits the enumeration cap, sampled otherwise.
    pub fn democracy_functions(&self, ms: &[usize], sign_mode: SignMode) -> Result<DemocracyFunctions> {
        let w = self.indicator_window()?;
        let mut rows = Vec::new();
        for &m in ms {
            if m == 0 || m > w {
                return Err(domain(format!("m = {m} is outside 1..={w}")));
            }
            let signs_per_set: u128 = match sign_mode {
                SignMode::ConstantSigns => 1,
                SignMode::AllSigns => 1u128 << (m - 1),
            };
            let total = binomial(w, m).saturating_mul(signs_per_set);
            let exact = total <= self.cfg.enumeration_cap as u128;
            let patterns: Vec<SignPattern> = if exact {
                let mut out = Vec::new();
                for set in Combinations::new(w, m) {
                    for mask in 0..signs_per_set as u64 {
                        out.push(SignPattern::from_mask(&set, mask << 1)?);
                    }
                }
                out
            } else {
                (0..self.cfg.enumeration_cap)
                    .map(|k| {
                        let mut rng = search::sample_rng(self.cfg.seed ^ (m as u64) << 32, k as u64);
                        let set = search::random_subset(&mut rng, w, m);
                        match sign_mode {
                            SignMode::ConstantSigns => SignPattern::constant(&set),
                            SignMode::AllSigns => random_signs(&mut rng, &set),
                        }
                    })
                    .collect::<Result<_>>()?
            };
            let norms = self.exec.map_indexed(patterns.len(), |k| self.norm(&patterns[k].indicator()));
            let (mut hi, mut lo) = ((f64::NEG_INFINITY, 0), (f64::INFINITY, 0));
            for (k, &v) in norms.iter().enumerate() {
                if v > hi.0 {
                    hi = (v, k);
                }
                if v < lo.0 {
                    lo = (v, k);
                }
            }
            rows.push(DemocracyRow {
                m,
                sup: hi.0,
                inf: lo.0,
                sup_witness: patterns[hi.1].clone(),
                inf_witness: patterns[lo.1].clone(),
                exact,
            });
        }
        Ok(DemocracyFunctions { sign_mode, window: w, rows })
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    r
}

fn random_signs<R: Rng>(rng: &mut R, set: &[usize]) -> Result<SignPattern> {
    SignPattern::new(set.iter().map(|&i| (i, if rng.random_bool(0.5) { Sign::Minus } else { Sign::Plus })))
}

fn ternary_vector(mut code: usize, w: usize) -> CoefVector {
    let mut entries = Vec::new();
    for j in 0..w {
        match code % 3 {
            1 => entries.push((j + 1, 1.0)),
            2 => entries.push((j + 1, -1.0)),
            _ => {}
        }
        code /= 3;
    }
    CoefVector::from_sorted_unchecked(entries)
}

fn ternary_signs(code: usize, w: usize) -> SignPattern {
    let v = ternary_vector(code, w);
    SignPattern::new(v.iter().map(|(i, s)| (i, Sign::of(s)))).expect("distinct indices")
}

/// All vectors on `positions` with coefficients from `grid` (zeros dropped).
fn grid_vectors(positions: &[usize], grid: &[f64]) -> Vec<CoefVector> {
    let mut out = vec![CoefVector::zero()];
    for &p in positions {
        let mut next = Vec::with_capacity(out.len() * grid.len());
        for v in &out {
            let mut seen_zero = false;
            for &g in grid {
                if g == 0.0 {
                    if seen_zero {
                        continue;
                    }
                    seen_zero = true;
                    next.push(v.clone());
                } else {
                    next.push(v.add(&CoefVector::from_sorted_unchecked(vec![(p, g)])));
                }
            }
        }
        out = next;
    }
    out
}

/// Default `t` grid as a vector.
pub fn default_t_grid() -> Vec<f64> {
    DEFAULT_T_GRID.to_vec()
}

/// Labels an estimate for reports, e.g. `qg = 1.0 (exact_over_family)`.
pub fn describe(e: &ConstantEstimate) -> String {
    format!("{} = {} ({:?})", e.constant.name(), e.value, e.mode)
}
