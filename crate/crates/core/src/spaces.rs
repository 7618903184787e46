//! Norm oracles for a catalog of Banach sequence spaces.
//!
//! A [`SpaceSpec`] is the declarative description (what a config file holds);
//! [`Space`] is the compiled oracle with materialized weights and the exact
//! basis/dual-basis norms for every index up to the dimension cap.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp;
use crate::vector::CoefVector;

pub const DEFAULT_DIMENSION_CAP: usize = 512;

fn default_cap() -> usize {
    DEFAULT_DIMENSION_CAP
}

/// Declarative description of a norm oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    #[serde(flatten)]
    pub family: Family,
    /// Largest index the oracle accepts.
    #[serde(default = "default_cap")]
    pub dimension_cap: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Lp { p: Exponent },
    /// Coefficients with respect to the summing basis `s_n = e_1 + ... + e_n` of `c_0`.
    SummingC0,
    /// Lorentz sequence space `d(w, 1)`.
    Lorentz { weights: Weights },
    WeightedL1 { weights: Weights },
    /// `max(max_f |<f, x>|, max_n |a_n|)` for a finite list of functionals.
    MaxFunctionals { functionals: Vec<CoefVector> },
    /// `max(||x|| / alpha_1, ||x||_inf)`, which normalizes basis and dual basis.
    CircRenorm { inner: Box<SpaceSpec> },
}

impl SpaceSpec {
    pub fn new(family: Family, dimension_cap: usize) -> Self {
        Self { family, dimension_cap }
    }

    pub fn lp(p: f64, dimension_cap: usize) -> Self {
        let p = if p.is_infinite() { Exponent::Infinite } else { Exponent::Finite(p) };
        Self::new(Family::Lp { p }, dimension_cap)
    }

    pub fn l_inf(dimension_cap: usize) -> Self {
        Self::new(Family::Lp { p: Exponent::Infinite }, dimension_cap)
    }

    pub fn summing(dimension_cap: usize) -> Self {
        Self::new(Family::SummingC0, dimension_cap)
    }

    pub fn lorentz(weights: Weights, dimension_cap: usize) -> Self {
        Self::new(Family::Lorentz { weights }, dimension_cap)
    }

    pub fn weighted_l1(weights: Weights, dimension_cap: usize) -> Self {
        Self::new(Family::WeightedL1 { weights }, dimension_cap)
    }

    pub fn max_functionals(functionals: Vec<CoefVector>, dimension_cap: usize) -> Self {
        Self::new(Family::MaxFunctionals { functionals }, dimension_cap)
    }

    pub fn circ(inner: SpaceSpec) -> Self {
        let cap = inner.dimension_cap;
        Self::new(Family::CircRenorm { inner: Box::new(inner) }, cap)
    }

    /// Same family with a different dimension cap (applied recursively).
    pub fn with_cap(&self, dimension_cap: usize) -> Self {
        let family = match &self.family {
            Family::CircRenorm { inner } => Family::CircRenorm {
                inner: Box::new(inner.with_cap(dimension_cap)),
            },
            f => f.clone(),
        };
        Self { family, dimension_cap }
    }

    /// Short human-readable label, e.g. `lp(2)` or `circ(lorentz(harmonic))`.
    pub fn label(&self) -> String {
        match &self.family {
            Family::Lp { p } => format!("lp({})", p.label()),
            Family::SummingC0 => "summing_c0".to_string(),
            Family::Lorentz { weights } => format!("lorentz({})", weights.label()),
            Family::WeightedL1 { weights } => format!("weighted_l1({})", weights.label()),
            Family::MaxFunctionals { functionals } => {
                format!("max_functionals({})", functionals.len())
            }
            Family::CircRenorm { inner } => format!("circ({})", inner.label()),
        }
    }
}

/// Exponent `p` of an `l_p` norm: a real `p >= 1` or infinity (`"inf"` on the wire).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExponentRepr", into = "ExponentRepr")]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    fn label(&self) -> String {
        match self {
            Exponent::Finite(p) => format!("{p}"),
            Exponent::Infinite => "inf".to_string(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExponentRepr {
    Number(f64),
    Tag(String),
}

impl TryFrom<ExponentRepr> for Exponent {
    type Error = Error;

    fn try_from(r: ExponentRepr) -> Result<Self> {
        match r {
            ExponentRepr::Number(p) if p.is_infinite() && p > 0.0 => Ok(Exponent::Infinite),
            ExponentRepr::Number(p) => Ok(Exponent::Finite(p)),
            ExponentRepr::Tag(s) if s == "inf" || s == "infinity" => Ok(Exponent::Infinite),
            ExponentRepr::Tag(s) => s
                .parse::<f64>()
                .map(Exponent::Finite)
                .map_err(|_| Error::InvalidSpace(format!("bad exponent {s:?}"))),
        }
    }
}

impl From<Exponent> for ExponentRepr {
    fn from(e: Exponent) -> Self {
        match e {
            Exponent::Finite(p) => ExponentRepr::Number(p),
            Exponent::Infinite => ExponentRepr::Tag("inf".to_string()),
        }
    }
}

/// Weight sequence `(w_n)_{n >= 1}`. On the wire: `"harmonic"`,
/// `"geometric(r)"` or an explicit array `[w_1, w_2, ...]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightsRepr", into = "WeightsRepr")]
pub enum Weights {
    /// `w_n = 1/n`.
    Harmonic,
    /// `w_n = r^n`.
    Geometric(f64),
    Explicit(Vec<f64>),
}

impl Weights {
    fn label(&self) -> String {
        match self {
            Weights::Harmonic => "harmonic".to_string(),
            Weights::Geometric(r) => format!("geometric({r})"),
            Weights::Explicit(w) => format!("explicit[{}]", w.len()),
        }
    }

    /// `w_1, ..., w_cap`.
    pub fn materialize(&self, cap: usize) -> Result<Vec<f64>> {
        let w: Vec<f64> = match self {
            Weights::Harmonic => (1..=cap).map(|n| 1.0 / n as f64).collect(),
            Weights::Geometric(r) => (1..=cap).map(|n| libm::pow(*r, n as f64)).collect(),
            Weights::Explicit(v) => {
                if v.len() < cap {
                    return Err(Error::InvalidSpace(format!(
                        "explicit weights have {} entries, dimension cap is {cap}",
                        v.len()
                    )));
                }
                v[..cap].to_vec()
            }
        };
        if let Some(n) = w.iter().position(|&v| !(v.is_finite() && v > 0.0 && (1.0 / v).is_finite())) {
            return Err(Error::InvalidSpace(format!(
                "weight w_{} = {} is not a positive finite number",
                n + 1,
                w[n]
            )));
        }
        Ok(w)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WeightsRepr {
    Tag(String),
    Explicit(Vec<f64>),
}

impl TryFrom<WeightsRepr> for Weights {
    type Error = Error;

    fn try_from(r: WeightsRepr) -> Result<Self> {
        match r {
            WeightsRepr::Explicit(v) => Ok(Weights::Explicit(v)),
            WeightsRepr::Tag(s) => {
                let s = s.trim();
                if s == "harmonic" {
                    return Ok(Weights::Harmonic);
                }
                if let Some(inner) = s.strip_prefix("geometric(").and_then(|t| t.strip_suffix(')')) {
                    return inner
                        .trim()
                        .parse::<f64>()
                        .map(Weights::Geometric)
                        .map_err(|_| Error::InvalidSpace(format!("bad geometric ratio in {s:?}")));
                }
                Err(Error::InvalidSpace(format!("unknown weight tag {s:?}")))
            }
        }
    }
}

impl From<Weights> for WeightsRepr {
    fn from(w: Weights) -> Self {
        match w {
            Weights::Harmonic => WeightsRepr::Tag("harmonic".to_string()),
            Weights::Geometric(r) => WeightsRepr::Tag(format!("geometric({r})")),
            Weights::Explicit(v) => WeightsRepr::Explicit(v),
        }
    }
}

/// How a dual-basis norm was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualNormMethod {
    ClosedForm,
    /// Simplex on the polyhedral unit ball; the value is the ratio achieved
    /// by the optimal point, hence a certified lower bound equal to the optimum.
    LinearProgram,
}

/// `alpha_1 = max ||x_n||`, `alpha_2 = max ||x_n^*||`, `alpha_3 = max ||x_n|| ||x_n^*||`
/// over `1..=dimension_cap`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaConstants {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub dual_norm_method: DualNormMethod,
}

#[derive(Clone, Debug)]
enum Oracle {
    Lp(f64),
    LInf,
    SummingC0,
    Lorentz(Vec<f64>),
    WeightedL1(Vec<f64>),
    MaxFunctionals(Vec<CoefVector>),
    Circ { inner: Box<Space>, alpha1: f64 },
}

/// A compiled norm oracle.
#[derive(Clone, Debug)]
pub struct Space {
    spec: SpaceSpec,
    oracle: Oracle,
    basis_norms: Vec<f64>,
    dual_norms: Vec<f64>,
    dual_methods: Vec<DualNormMethod>,
    alpha: AlphaConstants,
}

impl Space {
    pub fn new(spec: &SpaceSpec) -> Result<Self> {
        let cap = spec.dimension_cap;
        if cap == 0 {
            return Err(Error::InvalidSpace("dimension cap must be positive".into()));
        }
        let oracle = match &spec.family {
            Family::Lp { p: Exponent::Infinite } => Oracle::LInf,
            Family::Lp { p: Exponent::Finite(p) } => {
                if !(p.is_finite() && *p >= 1.0) {
                    return Err(Error::InvalidSpace(format!("l_p needs p >= 1, got {p}")));
                }
                Oracle::Lp(*p)
            }
            Family::SummingC0 => Oracle::SummingC0,
            Family::Lorentz { weights } => {
                let w = weights.materialize(cap)?;
                if w.windows(2).any(|p| p[1] > p[0]) {
                    return Err(Error::InvalidSpace("Lorentz weights must be non-increasing".into()));
                }
                Oracle::Lorentz(w)
            }
            Family::WeightedL1 { weights } => Oracle::WeightedL1(weights.materialize(cap)?),
            Family::MaxFunctionals { functionals } => {
                if functionals.is_empty() {
                    return Err(Error::InvalidSpace("functional list is empty".into()));
                }
                Oracle::MaxFunctionals(functionals.clone())
            }
            Family::CircRenorm { inner } => {
                let inner = Space::new(&inner.with_cap(cap))?;
                let alpha1 = inner.alpha.alpha1;
                Oracle::Circ { inner: Box::new(inner), alpha1 }
            }
        };
        let mut space = Space {
            spec: spec.clone(),
            oracle,
            basis_norms: Vec::new(),
            dual_norms: Vec::new(),
            dual_methods: Vec::new(),
            alpha: AlphaConstants {
                alpha1: 0.0,
                alpha2: 0.0,
                alpha3: 0.0,
                dual_norm_method: DualNormMethod::ClosedForm,
            },
        };
        space.tabulate()?;
        Ok(space)
    }

    fn tabulate(&mut self) -> Result<()> {
        let cap = self.cap();
        let mut basis = Vec::with_capacity(cap);
        let mut dual = Vec::with_capacity(cap);
        let mut methods = Vec::with_capacity(cap);
        for n in 1..=cap {
            let e = CoefVector::from_sorted_unchecked(vec![(n, 1.0)]);
            basis.push(self.norm_raw(&e));
            let (d, m) = self.compute_dual_norm(n)?;
            dual.push(d);
            methods.push(m);
        }
        let alpha1 = basis.iter().copied().fold(0.0, f64::max);
        let alpha2 = dual.iter().copied().fold(0.0, f64::max);
        let alpha3 = basis.iter().zip(&dual).map(|(a, b)| a * b).fold(0.0, f64::max);
        let method = if methods.contains(&DualNormMethod::LinearProgram) {
            DualNormMethod::LinearProgram
        } else {
            DualNormMethod::ClosedForm
        };
        self.basis_norms = basis;
        self.dual_norms = dual;
        self.dual_methods = methods;
        self.alpha = AlphaConstants { alpha1, alpha2, alpha3, dual_norm_method: method };
        Ok(())
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn cap(&self) -> usize {
        self.spec.dimension_cap
    }

    pub fn label(&self) -> String {
        self.spec.label()
    }

    /// Whether the norm is a lattice norm (1-unconditional basis).
    pub fn is_lattice(&self) -> bool {
        matches!(
            self.oracle,
            Oracle::Lp(_) | Oracle::LInf | Oracle::Lorentz(_) | Oracle::WeightedL1(_)
        )
    }

    pub fn check_support(&self, x: &CoefVector) -> Result<()> {
        match x.max_index() {
            Some(i) if i > self.cap() => Err(Error::IndexOutOfRange { index: i, cap: self.cap() }),
            _ => Ok(()),
        }
    }

    /// `||x||`.
    pub fn norm(&self, x: &CoefVector) -> Result<f64> {
        self.check_support(x)?;
        Ok(self.norm_raw(x))
    }

    pub(crate) fn norm_raw(&self, x: &CoefVector) -> f64 {
        let e = x.entries();
        if e.is_empty() {
            return 0.0;
        }
        match &self.oracle {
            Oracle::LInf => x.sup_norm(),
            Oracle::Lp(p) => lp_norm(e, *p),
            Oracle::SummingC0 => {
                // c_0 norm of sum a_n s_n: the k-th coordinate is the tail sum from k.
                let mut tail = 0.0_f64;
                let mut best = 0.0_f64;
                for &(_, v) in e.iter().rev() {
                    tail += v;
                    best = best.max(tail.abs());
                }
                best
            }
            Oracle::Lorentz(w) => {
                let mut mags: Vec<f64> = e.iter().map(|&(_, v)| v.abs()).collect();
                mags.sort_by(|a, b| b.total_cmp(a));
                mags.iter().zip(w).map(|(a, w)| a * w).sum()
            }
            Oracle::WeightedL1(w) => e.iter().map(|&(i, v)| w[i - 1] * v.abs()).sum(),
            Oracle::MaxFunctionals(fs) => {
                let mut best = x.sup_norm();
                for f in fs {
                    best = best.max(pairing(f, x).abs());
                }
                best
            }
            Oracle::Circ { inner, alpha1 } => (inner.norm_raw(x) / alpha1).max(x.sup_norm()),
        }
    }

    /// `||x_n^*|| = sup { |a_n| : ||x|| <= 1 }`.
    pub fn dual_norm(&self, n: usize) -> Result<f64> {
        self.index_ok(n)?;
        Ok(self.dual_norms[n - 1])
    }

    pub fn dual_norm_method(&self, n: usize) -> Result<DualNormMethod> {
        self.index_ok(n)?;
        Ok(self.dual_methods[n - 1])
    }

    /// `||x_n||`.
    pub fn basis_norm(&self, n: usize) -> Result<f64> {
        self.index_ok(n)?;
        Ok(self.basis_norms[n - 1])
    }

    pub fn alpha_constants(&self) -> AlphaConstants {
        self.alpha
    }

    fn index_ok(&self, n: usize) -> Result<()> {
        if n == 0 {
            Err(Error::ZeroIndex)
        } else if n > self.cap() {
            Err(Error::IndexOutOfRange { index: n, cap: self.cap() })
        } else {
            Ok(())
        }
    }

    fn compute_dual_norm(&self, n: usize) -> Result<(f64, DualNormMethod)> {
        let cap = self.cap();
        let closed = |v: f64| Ok((v, DualNormMethod::ClosedForm));
        match &self.oracle {
            Oracle::Lp(_) | Oracle::LInf => closed(1.0),
            // a_n = T_n - T_{n+1} with |T_k| <= 1; T_{cap+1} = 0 in the truncation.
            Oracle::SummingC0 => closed(if n < cap { 2.0 } else { 1.0 }),
            Oracle::Lorentz(w) => closed(1.0 / w[0]),
            Oracle::WeightedL1(w) => closed(1.0 / w[n - 1]),
            // ||x||_circ >= |a_n| and ||e_n||_circ = 1.
            Oracle::Circ { .. } => closed(1.0),
            Oracle::MaxFunctionals(fs) => {
                if fs.iter().all(|f| f.get(n) == 0.0) {
                    return closed(1.0);
                }
                Ok((self.max_functionals_dual(fs, n)?, DualNormMethod::LinearProgram))
            }
        }
    }

    /// Maximizes `a_n` over the polyhedral unit ball `{|a_j| <= 1, |<f, a>| <= 1}`.
    /// Coordinates outside the functionals' supports only meet box constraints and
    /// can be set to zero, so the program lives on the union of the supports.
    fn max_functionals_dual(&self, fs: &[CoefVector], n: usize) -> Result<f64> {
        let mut coords: Vec<usize> = fs.iter().flat_map(|f| f.support()).collect();
        coords.push(n);
        coords.retain(|&i| i <= self.cap());
        coords.sort_unstable();
        coords.dedup();
        let d = coords.len();
        let pos = coords.binary_search(&n).expect("n is in coords");
        // a = u - v, u, v >= 0
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut rhs: Vec<f64> = Vec::new();
        for j in 0..d {
            let mut r = vec![0.0; 2 * d];
            r[j] = 1.0;
            r[d + j] = -1.0;
            rows.push(r.clone());
            rows.push(r.iter().map(|v| -v).collect());
            rhs.extend([1.0, 1.0]);
        }
        for f in fs {
            let mut r = vec![0.0; 2 * d];
            for (j, &c) in coords.iter().enumerate() {
                let fv = f.get(c);
                r[j] = fv;
                r[d + j] = -fv;
            }
            rows.push(r.clone());
            rows.push(r.iter().map(|v| -v).collect());
            rhs.extend([1.0, 1.0]);
        }
        let mut obj = vec![0.0; 2 * d];
        obj[pos] = 1.0;
        obj[d + pos] = -1.0;
        let sol = lp::maximize(&obj, &rows, &rhs)
            .ok_or_else(|| Error::InvalidSpace(format!("dual-norm program for index {n} failed")))?;
        let a = CoefVector::from_pairs(
            coords.iter().enumerate().map(|(j, &c)| (c, sol.point[j] - sol.point[d + j])),
        )?;
        let norm = self.norm_raw(&a);
        let an = a.get(n);
        if !(norm > 0.0 && an > 0.0) {
            return Err(Error::InvalidSpace(format!("degenerate dual-norm optimum at index {n}")));
        }
        // The achieved ratio certifies the value from below.
        Ok(an / norm)
    }
}

/// `<f, x> = sum f_n a_n`.
pub fn pairing(f: &CoefVector, x: &CoefVector) -> f64 {
    let (a, b) = (f.entries(), x.entries());
    let (mut i, mut j, mut s) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                s += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    s
}

fn lp_norm(e: &[(usize, f64)], p: f64) -> f64 {
    let m = e.iter().fold(0.0_f64, |m, &(_, v)| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return e.iter().map(|&(_, v)| v.abs()).sum();
    }
    if p == 2.0 {
        let s: f64 = e.iter().map(|&(_, v)| (v / m) * (v / m)).sum();
        return m * libm::sqrt(s);
    }
    let s: f64 = e.iter().map(|&(_, v)| libm::pow(v.abs() / m, p)).sum();
    m * libm::pow(s, 1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(pairs: &[(usize, f64)]) -> CoefVector {
        CoefVector::from_pairs(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn norm_examples() {
        let l2 = Space::new(&SpaceSpec::lp(2.0, 512)).unwrap();
        assert_eq!(l2.norm(&v(&[(1, 3.0), (2, -4.0)])).unwrap(), 5.0);

        let s = Space::new(&SpaceSpec::summing(512)).unwrap();
        assert_eq!(s.norm(&v(&[(1, 1.0), (2, -1.0), (3, 1.0), (4, -1.0)])).unwrap(), 1.0);
        assert_eq!(s.norm(&v(&[(1, 1.0), (2, 1.0), (3, 1.0), (4, 1.0)])).unwrap(), 4.0);

        let lor = Space::new(&SpaceSpec::lorentz(Weights::Harmonic, 512)).unwrap();
        assert_eq!(lor.norm(&v(&[(5, 2.0), (9, 1.0)])).unwrap(), 2.5);
    }

    #[test]
    fn norm_rejects_out_of_range() {
        let l2 = Space::new(&SpaceSpec::lp(2.0, 4)).unwrap();
        assert_eq!(
            l2.norm(&v(&[(5, 1.0)])),
            Err(Error::IndexOutOfRange { index: 5, cap: 4 })
        );
    }

    #[test]
    fn dual_norm_examples() {
        let l2 = Space::new(&SpaceSpec::lp(2.0, 512)).unwrap();
        assert_eq!(l2.dual_norm(7).unwrap(), 1.0);
        let s = Space::new(&SpaceSpec::summing(512)).unwrap();
        assert_eq!(s.dual_norm(3).unwrap(), 2.0);
        assert_eq!(s.dual_norm(512).unwrap(), 1.0);
        let w = Space::new(&SpaceSpec::weighted_l1(Weights::Geometric(0.5), 512)).unwrap();
        assert_eq!(w.dual_norm(3).unwrap(), 8.0);
        assert!(matches!(w.dual_norm(513), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn alpha_examples() {
        let a = Space::new(&SpaceSpec::lp(2.0, 64)).unwrap().alpha_constants();
        assert_eq!((a.alpha1, a.alpha2, a.alpha3), (1.0, 1.0, 1.0));
        let a = Space::new(&SpaceSpec::summing(64)).unwrap().alpha_constants();
        assert_eq!((a.alpha1, a.alpha2, a.alpha3), (1.0, 2.0, 2.0));
        let a = Space::new(&SpaceSpec::circ(SpaceSpec::lorentz(Weights::Harmonic, 64)))
            .unwrap()
            .alpha_constants();
        assert_eq!((a.alpha1, a.alpha2, a.alpha3), (1.0, 1.0, 1.0));
    }

    #[test]
    fn circ_normalizes_a_badly_scaled_basis() {
        let inner = SpaceSpec::weighted_l1(Weights::Geometric(2.0), 10);
        let circ = Space::new(&SpaceSpec::circ(inner.clone())).unwrap();
        let inner = Space::new(&inner).unwrap();
        assert_eq!(inner.alpha_constants().alpha1, 1024.0);
        for n in 1..=10 {
            assert_eq!(circ.basis_norm(n).unwrap(), 1.0);
            assert_eq!(circ.dual_norm(n).unwrap(), 1.0);
        }
    }

    #[test]
    fn max_functionals_dual_uses_the_program() {
        // f = e_1 + e_2: a_1 can reach 1 with a_2 = 0, so the dual norm is 1.
        // g = 2 e_1 forces |a_1| <= 1/2.
        let fs = vec![v(&[(1, 1.0), (2, 1.0)]), v(&[(1, 2.0)])];
        let s = Space::new(&SpaceSpec::max_functionals(fs, 4)).unwrap();
        assert!((s.dual_norm(1).unwrap() - 0.5).abs() < 1e-12);
        assert!((s.dual_norm(2).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(s.dual_norm_method(2).unwrap(), DualNormMethod::LinearProgram);
        assert_eq!(s.dual_norm(3).unwrap(), 1.0);
        assert_eq!(s.dual_norm_method(3).unwrap(), DualNormMethod::ClosedForm);
    }

    #[test]
    fn invalid_specs() {
        assert!(Space::new(&SpaceSpec::lp(0.5, 4)).is_err());
        let increasing = Weights::Explicit(vec![1.0, 2.0, 3.0]);
        assert!(Space::new(&SpaceSpec::lorentz(increasing, 3)).is_err());
        let short = Weights::Explicit(vec![1.0]);
        assert!(Space::new(&SpaceSpec::weighted_l1(short, 3)).is_err());
        assert!(Space::new(&SpaceSpec::max_functionals(vec![], 3)).is_err());
    }

    #[test]
    fn spec_wire_format() {
        let spec = SpaceSpec::lorentz(Weights::Geometric(0.5), 8);
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(s, r#"{"family":"lorentz","weights":"geometric(0.5)","dimension_cap":8}"#);
        let back: SpaceSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
        let linf: SpaceSpec = serde_json::from_str(r#"{"family":"lp","p":"inf"}"#).unwrap();
        assert_eq!(linf, SpaceSpec::l_inf(DEFAULT_DIMENSION_CAP));
        let explicit: SpaceSpec =
            serde_json::from_str(r#"{"family":"weighted_l1","weights":[1,0.5],"dimension_cap":2}"#)
                .unwrap();
        assert_eq!(explicit.family, Family::WeightedL1 { weights: Weights::Explicit(vec![1.0, 0.5]) });
    }
}
