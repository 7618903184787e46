//! Finitely supported coefficient vectors and sign patterns.
//!
//! A [`CoefVector`] stores the dual coefficients `x*_n(x)` of an element `x`
//! as a sorted list of `(index, coefficient)` pairs. Indices are 1-based and
//! every stored coefficient is finite and nonzero, so the stored key set is
//! exactly `supp(x)`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, f64)>", into = "Vec<(usize, f64)>")]
pub struct CoefVector {
    entries: Vec<(usize, f64)>,
}

impl CoefVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a vector from `(index, coefficient)` pairs in any order.
    /// Zero coefficients are dropped.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for (index, value) in pairs {
            if index == 0 {
                return Err(Error::ZeroIndex);
            }
            if !value.is_finite() {
                return Err(Error::NonFinite { index });
            }
            entries.push((index, value));
        }
        entries.sort_by_key(|&(i, _)| i);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateIndex { index: w[0].0 });
            }
        }
        entries.retain(|&(_, v)| v != 0.0);
        Ok(Self { entries })
    }

    /// Dense constructor: `values[j]` is the coefficient at index `j + 1`.
    pub fn from_dense(values: &[f64]) -> Result<Self> {
        Self::from_pairs(values.iter().enumerate().map(|(j, &v)| (j + 1, v)))
    }

    /// Caller guarantees sorted, distinct, nonzero-index entries with finite values.
    pub(crate) fn from_sorted_unchecked(mut entries: Vec<(usize, f64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(i, v)| i > 0 && v.is_finite()));
        entries.retain(|&(_, v)| v != 0.0);
        Self { entries }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    /// `|supp(x)|`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().map(|&(i, _)| i).collect()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|&(i, _)| i)
    }

    /// `x*_n(x)`, zero off the support.
    pub fn get(&self, index: usize) -> f64 {
        match self.entries.binary_search_by_key(&index, |&(i, _)| i) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn contains(&self, index: usize) -> bool {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .is_ok()
    }

    pub fn sup_norm(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, &(_, v)| m.max(v.abs()))
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v.abs()).sum()
    }

    /// Membership in `Q`: every coefficient has modulus at most 1.
    pub fn in_q(&self) -> bool {
        self.sup_norm() <= 1.0
    }

    /// Membership in `Q_0`: in `Q` with pairwise distinct moduli on the support.
    pub fn in_q0(&self) -> bool {
        if !self.in_q() {
            return false;
        }
        let mut mags: Vec<f64> = self.entries.iter().map(|&(_, v)| v.abs()).collect();
        mags.sort_by(f64::total_cmp);
        mags.windows(2).all(|w| w[0] != w[1])
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_sorted_unchecked(self.entries.iter().map(|&(i, v)| (i, c * v)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.merge(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.merge(other, |a, b| a - b)
    }

    /// Applies `f(self_n, other_n)` over the union of the supports.
    pub fn merge(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push((a[i].0, f(a[i].1, 0.0)));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0, f(0.0, b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, f(a[i].1, b[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        Self::from_sorted_unchecked(out)
    }

    /// Restriction to the indices in `set` (`P_A`).
    pub fn restrict(&self, set: &[usize]) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .copied()
                .filter(|(i, _)| set.contains(i))
                .collect(),
        }
    }

    /// Largest coefficientwise discrepancy `max_n |x_n - y_n|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.merge(other, |a, b| a - b).sup_norm()
    }
}

impl TryFrom<Vec<(usize, f64)>> for CoefVector {
    type Error = Error;

    fn try_from(pairs: Vec<(usize, f64)>) -> Result<Self> {
        Self::from_pairs(pairs)
    }
}

impl From<CoefVector> for Vec<(usize, f64)> {
    fn from(x: CoefVector) -> Self {
        x.entries
    }
}

/// An element of `E = {-1, +1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `sgn` with the convention `sgn(0) = 1`.
    pub fn of(value: f64) -> Self {
        if value < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = Error;

    fn try_from(v: i8) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::Input(alloc::format!("sign must be +1 or -1, got {v}"))),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> Self {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// A sign pattern `eps` in `E^A` for a finite index set `A`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, Sign)>", into = "Vec<(usize, Sign)>")]
pub struct SignPattern {
    signs: Vec<(usize, Sign)>,
}

impl SignPattern {
    pub fn new<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Sign)>,
    {
        let mut signs: Vec<(usize, Sign)> = pairs.into_iter().collect();
        signs.sort_by_key(|&(i, _)| i);
        if signs.iter().any(|&(i, _)| i == 0) {
            return Err(Error::ZeroIndex);
        }
        for w in signs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateIndex { index: w[0].0 });
            }
        }
        Ok(Self { signs })
    }

    /// Constant `+1` signs on `set`.
    pub fn constant(set: &[usize]) -> Result<Self> {
        Self::new(set.iter().map(|&i| (i, Sign::Plus)))
    }

    /// Signs on `set` read from the low bits of `mask`: bit `j` set means the
    /// `j`-th smallest index of `set` carries `-1`.
    pub fn from_mask(set: &[usize], mask: u64) -> Result<Self> {
        Self::new(set.iter().enumerate().map(|(j, &i)| {
            let s = if (mask >> j) & 1 == 1 { Sign::Minus } else { Sign::Plus };
            (i, s)
        }))
    }

    /// `eps(x)` restricted to `set`, with `sgn(0) = 1`.
    pub fn of_vector(x: &CoefVector, set: &[usize]) -> Result<Self> {
        Self::new(set.iter().map(|&i| (i, Sign::of(x.get(i)))))
    }

    pub fn domain(&self) -> Vec<usize> {
        self.signs.iter().map(|&(i, _)| i).collect()
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<Sign> {
        self.signs
            .binary_search_by_key(&index, |&(i, _)| i)
            .ok()
            .map(|p| self.signs[p].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Sign)> + '_ {
        self.signs.iter().copied()
    }

    /// The full indicator sum `1_{eps, A}` over the whole domain.
    pub fn indicator(&self) -> CoefVector {
        CoefVector::from_sorted_unchecked(self.signs.iter().map(|&(i, s)| (i, s.value())).collect())
    }
}

impl TryFrom<Vec<(usize, Sign)>> for SignPattern {
    type Error = Error;

    fn try_from(v: Vec<(usize, Sign)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SignPattern> for Vec<(usize, Sign)> {
    fn from(p: SignPattern) -> Self {
        p.signs
    }
}

/// Sorts and deduplicates an index set given as a slice.
pub fn normalize_set(set: &[usize]) -> Vec<usize> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeros_are_dropped_and_support_matches() {
        let x = CoefVector::from_pairs([(3, 0.0), (1, 2.0), (2, -1.0)]).unwrap();
        assert_eq!(x.support(), [1, 2]);
        assert_eq!(x.get(3), 0.0);
        assert_eq!(x.get(2), -1.0);
    }

    #[test]
    fn rejects_bad_entries() {
        assert_eq!(CoefVector::from_pairs([(0, 1.0)]), Err(Error::ZeroIndex));
        assert_eq!(
            CoefVector::from_pairs([(4, f64::NAN)]),
            Err(Error::NonFinite { index: 4 })
        );
        assert_eq!(
            CoefVector::from_pairs([(4, 1.0), (4, 2.0)]),
            Err(Error::DuplicateIndex { index: 4 })
        );
    }

    #[test]
    fn q_and_q0_membership() {
        let x = CoefVector::from_pairs([(1, 1.0), (2, -0.5)]).unwrap();
        assert!(x.in_q() && x.in_q0());
        let tied = CoefVector::from_pairs([(1, 0.5), (2, -0.5)]).unwrap();
        assert!(tied.in_q() && !tied.in_q0());
        assert!(!CoefVector::from_pairs([(1, 1.5)]).unwrap().in_q());
    }

    #[test]
    fn merge_cancels_to_zero() {
        let x = CoefVector::from_pairs([(1, 1.0), (5, 2.0)]).unwrap();
        let d = x.sub(&x);
        assert!(d.is_empty());
        let y = CoefVector::from_pairs([(2, 1.0)]).unwrap();
        assert_eq!(x.add(&y).support(), [1, 2, 5]);
    }

    #[test]
    fn sign_conventions() {
        assert_eq!(Sign::of(0.0), Sign::Plus);
        assert_eq!(Sign::of(-3.0), Sign::Minus);
        let p = SignPattern::from_mask(&[2, 4, 7], 0b101).unwrap();
        assert_eq!(p.indicator().entries(), &[(2, -1.0), (4, 1.0), (7, -1.0)]);
    }

    #[test]
    fn wire_format_is_sorted_pairs() {
        let x = CoefVector::from_pairs([(2, -4.0), (1, 3.0)]).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, "[[1,3.0],[2,-4.0]]");
        let back: CoefVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<CoefVector>("[[0,1.0]]").is_err());
    }
}
