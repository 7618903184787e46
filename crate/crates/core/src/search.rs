//! Search families for the constant estimators: exhaustive enumeration over
//! an index window, or seeded random sampling, plus the executor hook used
//! to spread candidate batches over workers.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::greedy::DEFAULT_ENUMERATION_CAP;
use crate::vector::CoefVector;

/// Runs `f(0), ..., f(n - 1)` and returns the results in index order.
pub trait Executor: Sync {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Single-threaded executor.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    Random { samples: usize },
}

/// Magnitude profile placed on a support, largest first.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Profile {
    /// `r^0, r^1, ...`
    Geometric(f64),
    /// `1, 1/2, 1/3, ...`
    Harmonic,
    Flat,
    /// First half at 1, second half at the given level.
    TwoBlock(f64),
    /// Independent uniform magnitudes in `(0, 1]`; random mode only.
    Uniform,
}

impl Profile {
    pub fn magnitudes<R: Rng>(&self, s: usize, rng: Option<&mut R>) -> Vec<f64> {
        match *self {
            Profile::Geometric(r) => (0..s).map(|j| libm::pow(r, j as f64)).collect(),
            Profile::Harmonic => (0..s).map(|j| 1.0 / (j + 1) as f64).collect(),
            Profile::Flat => vec![1.0; s],
            Profile::TwoBlock(h) => (0..s).map(|j| if j < s.div_ceil(2) { 1.0 } else { h }).collect(),
            Profile::Uniform => match rng {
                Some(rng) => (0..s).map(|_| 1.0 - rng.random::<f64>()).collect(),
                None => vec![1.0; s],
            },
        }
    }

    fn is_symmetric(&self) -> bool {
        matches!(self, Profile::Flat | Profile::Uniform)
    }
}

impl TryFrom<String> for Profile {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        let s = s.trim();
        let arg = |prefix: &str| -> Option<Result<f64>> {
            s.strip_prefix(prefix).and_then(|t| t.strip_suffix(')')).map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| input(format!("bad profile parameter in {s:?}")))
            })
        };
        match s {
            "harmonic" => return Ok(Profile::Harmonic),
            "flat" => return Ok(Profile::Flat),
            "uniform" => return Ok(Profile::Uniform),
            _ => {}
        }
        if let Some(r) = arg("geometric(") {
            let r = r?;
            if !(r > 0.0 && r <= 1.0) {
                return Err(input(format!("geometric ratio {r} must lie in (0, 1]")));
            }
            return Ok(Profile::Geometric(r));
        }
        if let Some(h) = arg("two_block(") {
            let h = h?;
            if !(h > 0.0 && h <= 1.0) {
                return Err(input(format!("two-block level {h} must lie in (0, 1]")));
            }
            return Ok(Profile::TwoBlock(h));
        }
        Err(input(format!("unknown profile {s:?}")))
    }
}

impl From<Profile> for String {
    fn from(p: Profile) -> String {
        match p {
            Profile::Geometric(r) => format!("geometric({r})"),
            Profile::Harmonic => "harmonic".to_string(),
            Profile::Flat => "flat".to_string(),
            Profile::TwoBlock(h) => format!("two_block({h})"),
            Profile::Uniform => "uniform".to_string(),
        }
    }
}

pub fn default_profiles() -> Vec<Profile> {
    vec![
        Profile::Geometric(0.5),
        Profile::Geometric(0.9),
        Profile::Geometric(0.99),
        Profile::Harmonic,
        Profile::Flat,
        Profile::TwoBlock(0.5),
    ]
}

fn default_seed() -> u64 {
    0
}
fn default_mode() -> SearchMode {
    SearchMode::Exhaustive
}
fn default_window() -> usize {
    6
}
fn default_cap() -> usize {
    DEFAULT_ENUMERATION_CAP
}
fn default_tie_max() -> usize {
    12
}
fn default_qglc_grid() -> Vec<f64> {
    vec![-1.0, -0.5, 0.0, 0.5, 1.0]
}
fn default_multiplier_max() -> usize {
    12
}

/// Declarative search budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_mode")]
    pub mode: SearchMode,
    /// Candidates are supported in `[1, window]`.
    #[serde(default = "default_window")]
    pub window: usize,
    /// Support sizes; all of `1..=window` when absent.
    #[serde(default)]
    pub support_sizes: Option<Vec<usize>>,
    #[serde(default = "default_profiles")]
    pub profiles: Vec<Profile>,
    /// Exhaustive mode also adds every vector with coefficients from this grid.
    #[serde(default)]
    pub value_grid: Option<Vec<f64>>,
    #[serde(default = "default_cap")]
    pub enumeration_cap: usize,
    /// Ties are enumerated only for supports up to this size.
    #[serde(default = "default_tie_max")]
    pub tie_enumeration_max_support: usize,
    /// Largest set on which sign multipliers or subsets are enumerated.
    #[serde(default = "default_multiplier_max")]
    pub multiplier_enumeration_max: usize,
    /// Coefficients allowed off the indicator block in exhaustive QGLC searches.
    #[serde(default = "default_qglc_grid")]
    pub qglc_grid: Vec<f64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seed: default_seed(),
            mode: default_mode(),
            window: default_window(),
            support_sizes: None,
            profiles: default_profiles(),
            value_grid: None,
            enumeration_cap: default_cap(),
            tie_enumeration_max_support: default_tie_max(),
            multiplier_enumeration_max: default_multiplier_max(),
            qglc_grid: default_qglc_grid(),
        }
    }
}

impl SearchConfig {
    pub fn exhaustive(window: usize) -> Self {
        Self { window, ..Self::default() }
    }

    pub fn random(window: usize, samples: usize, seed: u64) -> Self {
        let mut profiles = default_profiles();
        profiles.push(Profile::Uniform);
        Self { window, seed, mode: SearchMode::Random { samples }, profiles, ..Self::default() }
    }

    /// Exhaustive window search that also covers the QGLC value grid, so the
    /// vectors behind every indicator-plus-tail instance appear in the
    /// ordering-based searches too.
    pub fn exhaustive_with_grid(window: usize) -> Self {
        let mut cfg = Self::exhaustive(window);
        cfg.value_grid = Some(cfg.qglc_grid.clone());
        cfg
    }

    pub fn is_exhaustive(&self) -> bool {
        self.mode == SearchMode::Exhaustive
    }

    pub fn sizes(&self) -> Vec<usize> {
        match &self.support_sizes {
            Some(s) => {
                let mut s: Vec<usize> = s.iter().copied().filter(|&k| k >= 1 && k <= self.window).collect();
                s.sort_unstable();
                s.dedup();
                s
            }
            None => (1..=self.window).collect(),
        }
    }

    pub fn validate(&self, cap: usize) -> Result<()> {
        if self.window == 0 {
            return Err(input("search window must be positive"));
        }
        if self.window > cap {
            return Err(Error::IndexOutOfRange { index: self.window, cap });
        }
        if self.sizes().is_empty() {
            return Err(Error::EmptyBudget("no admissible support size".into()));
        }
        if self.profiles.is_empty() && self.value_grid.is_none() {
            return Err(Error::EmptyBudget("no coefficient profile".into()));
        }
        if let SearchMode::Random { samples: 0 } = self.mode {
            return Err(Error::EmptyBudget("zero random samples".into()));
        }
        if self.qglc_grid.iter().any(|v| !(v.abs() <= 1.0)) {
            return Err(input("QGLC grid values must lie in [-1, 1]"));
        }
        Ok(())
    }
}

/// Seed for sample `k` under master seed `seed`.
pub fn sub_seed(seed: u64, k: u64) -> u64 {
    splitmix64(seed ^ splitmix64(k.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn sample_rng(seed: u64, k: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sub_seed(seed, k))
}

/// Lexicographic `k`-subsets of `{1, ..., n}`.
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let current = if k <= n { Some((1..=k).collect()) } else { None };
        Self { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let c = self.current.as_mut().expect("present");
        let k = c.len();
        let mut i = k;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if c[i] < self.n - k + i + 1 {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.current = None;
        }
        Some(out)
    }
}

/// Random `k`-subset of `{1, ..., n}`, sorted.
pub fn random_subset<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (1..=n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    let mut s = pool[..k].to_vec();
    s.sort_unstable();
    s
}

/// The candidate vectors of a search, in a deterministic order. In random
/// mode candidate `k` depends only on `(seed, k)`, so a smaller sample count
/// yields a prefix of a larger one.
pub fn candidates(cfg: &SearchConfig, cap: usize) -> Result<Vec<CoefVector>> {
    cfg.validate(cap)?;
    match cfg.mode {
        SearchMode::Exhaustive => exhaustive_candidates(cfg),
        SearchMode::Random { samples } => (0..samples).map(|k| random_candidate(cfg, k as u64)).collect(),
    }
}

fn exhaustive_candidates(cfg: &SearchConfig) -> Result<Vec<CoefVector>> {
    let mut out = Vec::new();
    let mut seen: BTreeSet<Vec<(usize, u64)>> = BTreeSet::new();
    let mut push = |x: CoefVector, out: &mut Vec<CoefVector>| {
        let key: Vec<(usize, u64)> = x.iter().map(|(i, v)| (i, v.to_bits())).collect();
        if !x.is_empty() && seen.insert(key) {
            out.push(x);
        }
    };
    let profiles: Vec<Profile> = cfg.profiles.iter().copied().filter(|p| *p != Profile::Uniform).collect();
    for s in cfg.sizes() {
        if s > 63 {
            return Err(input("exhaustive sign enumeration supports at most 63 indices"));
        }
        for support in Combinations::new(cfg.window, s) {
            for p in &profiles {
                let mags = p.magnitudes::<ChaCha8Rng>(s, None);
                let reversed: Vec<f64> = mags.iter().rev().copied().collect();
                let mut dirs = vec![mags];
                if !p.is_symmetric() && reversed != dirs[0] {
                    dirs.push(reversed);
                }
                for m in &dirs {
                    for mask in 0..(1u64 << s) {
                        let x = CoefVector::from_sorted_unchecked(
                            support
                                .iter()
                                .enumerate()
                                .map(|(j, &i)| (i, if (mask >> j) & 1 == 1 { -m[j] } else { m[j] }))
                                .collect(),
                        );
                        push(x, &mut out);
                    }
                }
            }
        }
    }
    if let Some(grid) = &cfg.value_grid {
        let g = grid.len();
        let w = cfg.window;
        let total = (g as u128).checked_pow(w as u32).unwrap_or(u128::MAX);
        if total > 50_000_000 {
            return Err(Error::Budget { what: "value-grid vectors".into(), count: total, cap: 50_000_000 });
        }
        let mut digits = vec![0usize; w];
        loop {
            let x = CoefVector::from_sorted_unchecked(
                digits.iter().enumerate().map(|(j, &d)| (j + 1, grid[d])).collect(),
            );
            push(x, &mut out);
            let mut j = w;
            loop {
                if j == 0 {
                    return Ok(out);
                }
                j -= 1;
                digits[j] += 1;
                if digits[j] < g {
                    break;
                }
                digits[j] = 0;
            }
        }
    }
    Ok(out)
}

/// Candidate `k` of a random search.
pub fn random_candidate(cfg: &SearchConfig, k: u64) -> Result<CoefVector> {
    let mut rng = sample_rng(cfg.seed, k);
    let sizes = cfg.sizes();
    let s = sizes[rng.random_range(0..sizes.len())];
    let support = random_subset(&mut rng, cfg.window, s);
    if cfg.profiles.is_empty() {
        return Err(Error::EmptyBudget("no coefficient profile".into()));
    }
    let p = cfg.profiles[rng.random_range(0..cfg.profiles.len())];
    let mut mags = p.magnitudes(s, Some(&mut rng));
    if rng.random_bool(0.5) {
        mags.reverse();
    }
    let entries: Vec<(usize, f64)> = support
        .iter()
        .zip(mags)
        .map(|(&i, m)| (i, if rng.random_bool(0.5) { -m } else { m }))
        .collect();
    Ok(CoefVector::from_sorted_unchecked(entries))
}

/// The winner of a per-candidate search: maximal value, ties to the lowest
/// candidate index. `results[k]` is `(value, payload)` for candidate `k`.
pub fn argmax<W>(results: Vec<Option<(f64, W)>>) -> Option<(usize, f64, W)> {
    let mut best: Option<(usize, f64, W)> = None;
    for (k, r) in results.into_iter().enumerate() {
        if let Some((v, w)) = r {
            let better = match &best {
                None => true,
                Some((_, bv, _)) => v > *bv,
            };
            if better {
                best = Some((k, v, w));
            }
        }
    }
    best
}
