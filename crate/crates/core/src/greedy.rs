//! Greedy sets, greedy orderings and the greedy, Cesàro and de la
//! Vallée-Poussin sums built from them.
//!
//! Magnitudes are compared exactly: two coefficients are tied only when their
//! absolute values are bit-equal.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{domain, input, Error, Result};
use crate::vector::{normalize_set, CoefVector, Sign, SignPattern};

/// Default cap on enumerated orderings or greedy sets.
pub const DEFAULT_ENUMERATION_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TiePolicy {
    /// Among tied magnitudes, smaller index first.
    LowestIndexFirst,
    /// Every arrangement of every tie group.
    Enumerate,
}

/// A finite greedy ordering `(k_1, ..., k_L)` for some vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct GreedyOrdering {
    indices: Vec<usize>,
}

impl TryFrom<Vec<usize>> for GreedyOrdering {
    type Error = Error;

    fn try_from(indices: Vec<usize>) -> Result<Self> {
        if indices.contains(&0) {
            return Err(Error::ZeroIndex);
        }
        let mut seen = indices.clone();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateIndex { index: w[0] });
        }
        Ok(Self { indices })
    }
}

impl From<GreedyOrdering> for Vec<usize> {
    fn from(o: GreedyOrdering) -> Self {
        o.indices
    }
}

impl GreedyOrdering {
    /// Checks that `indices` is a greedy ordering for `x`: distinct, covering
    /// `supp(x)`, with non-increasing magnitudes along the sequence.
    pub fn new(x: &CoefVector, indices: Vec<usize>) -> Result<Self> {
        let o = Self::try_from(indices)?;
        o.validate(x)?;
        Ok(o)
    }

    pub fn validate(&self, x: &CoefVector) -> Result<()> {
        if self.indices.len() < x.len() {
            return Err(input(format!(
                "ordering of length {} is shorter than the support ({})",
                self.indices.len(),
                x.len()
            )));
        }
        for w in self.indices.windows(2) {
            if x.get(w[0]).abs() < x.get(w[1]).abs() {
                return Err(input(format!(
                    "|x_{}| < |x_{}| breaks the greedy order",
                    w[0], w[1]
                )));
            }
        }
        // Non-increasing magnitudes plus length >= |supp| forces the support first.
        if self.indices[..x.len()].iter().any(|&k| !x.contains(k)) {
            return Err(input("ordering does not start with the support"));
        }
        Ok(())
    }

    /// The stable ordering: magnitudes descending, ties by index, then
    /// zero-coefficient padding by the lowest unused indices.
    pub fn lowest_index(x: &CoefVector, len: usize) -> Result<Self> {
        let groups = tie_groups(x);
        let mut indices: Vec<usize> = groups.into_iter().flatten().collect();
        pad(x, &mut indices, len)?;
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Extends with zero-coefficient padding (lowest unused indices) up to `len`.
    pub fn padded(&self, x: &CoefVector, len: usize) -> Result<Self> {
        let mut indices = self.indices.clone();
        pad(x, &mut indices, len)?;
        Ok(Self { indices })
    }
}

fn pad(x: &CoefVector, indices: &mut Vec<usize>, len: usize) -> Result<()> {
    if len < x.len() {
        return Err(input(format!(
            "requested length {len} is shorter than the support ({})",
            x.len()
        )));
    }
    if indices.len() >= len {
        indices.truncate(len.max(x.len()));
        return Ok(());
    }
    let mut used = indices.clone();
    used.sort_unstable();
    let mut candidate = 1;
    while indices.len() < len {
        if used.binary_search(&candidate).is_err() {
            indices.push(candidate);
        }
        candidate += 1;
    }
    Ok(())
}

/// Support indices grouped by bit-equal magnitude, groups in decreasing
/// magnitude, indices ascending inside a group.
pub fn tie_groups(x: &CoefVector) -> Vec<Vec<usize>> {
    let mut items: Vec<(u64, usize)> = x.iter().map(|(i, v)| (v.abs().to_bits(), i)).collect();
    // For non-negative finite floats the bit pattern orders like the value.
    items.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut last: Option<u64> = None;
    for (bits, i) in items {
        if last == Some(bits) {
            groups.last_mut().expect("group exists").push(i);
        } else {
            groups.push(vec![i]);
            last = Some(bits);
        }
    }
    groups
}

fn factorial_sat(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, |a, b| a.saturating_mul(b))
}

fn binomial_sat(n: usize, k: usize) -> u128 {
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

/// Number of greedy orderings of `x` over its support (saturating).
pub fn ordering_count(x: &CoefVector) -> u128 {
    tie_groups(x)
        .iter()
        .fold(1u128, |acc, g| acc.saturating_mul(factorial_sat(g.len())))
}

/// Lazy iterator over all greedy orderings of `x`. The first item is the
/// lowest-index ordering; later items permute tie groups lexicographically,
/// the last group varying fastest. Padding is never permuted.
pub struct Orderings {
    groups: Vec<Vec<usize>>,
    padding: Vec<usize>,
    done: bool,
}

impl Orderings {
    pub fn new(x: &CoefVector, len: usize) -> Result<Self> {
        let base = GreedyOrdering::lowest_index(x, len)?;
        let padding = base.indices[x.len()..].to_vec();
        Ok(Self { groups: tie_groups(x), padding, done: false })
    }
}

impl Iterator for Orderings {
    type Item = GreedyOrdering;

    fn next(&mut self) -> Option<GreedyOrdering> {
        if self.done {
            return None;
        }
        let mut indices: Vec<usize> = self.groups.iter().flatten().copied().collect();
        indices.extend_from_slice(&self.padding);
        let mut advanced = false;
        for g in self.groups.iter_mut().rev() {
            if next_permutation(g) {
                advanced = true;
                break;
            }
            // wrapped back to ascending order; carry to the previous group
        }
        if !advanced {
            self.done = true;
        }
        Some(GreedyOrdering { indices })
    }
}

/// Rearranges into the next lexicographic permutation; on the last one,
/// resets to ascending order and returns `false`.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Greedy orderings of length `len`. `Enumerate` errors with the full count
/// when it exceeds `cap`.
pub fn greedy_orderings(
    x: &CoefVector,
    len: usize,
    policy: TiePolicy,
    cap: usize,
) -> Result<Vec<GreedyOrdering>> {
    match policy {
        TiePolicy::LowestIndexFirst => Ok(vec![GreedyOrdering::lowest_index(x, len)?]),
        TiePolicy::Enumerate => {
            let count = ordering_count(x);
            if count > cap as u128 {
                return Err(Error::Budget { what: "greedy orderings".into(), count, cap });
            }
            Ok(Orderings::new(x, len)?.collect())
        }
    }
}

/// Greedy sets of cardinality `m <= |supp(x)|`: everything strictly above the
/// level of the `m`-th largest magnitude plus a choice from the tie group at
/// that level.
pub fn greedy_sets(x: &CoefVector, m: usize, policy: TiePolicy, cap: usize) -> Result<Vec<Vec<usize>>> {
    let (above, tied, need) = greedy_set_parts(x, m)?;
    let mut out = Vec::new();
    let count = binomial_sat(tied.len(), need);
    if policy == TiePolicy::Enumerate && count > cap as u128 {
        return Err(Error::Budget { what: "greedy sets".into(), count, cap });
    }
    let mut comb: Vec<usize> = (0..need).collect();
    loop {
        let mut set = above.clone();
        set.extend(comb.iter().map(|&c| tied[c]));
        set.sort_unstable();
        out.push(set);
        if policy == TiePolicy::LowestIndexFirst || !next_combination(&mut comb, tied.len()) {
            break;
        }
    }
    Ok(out)
}

/// Number of greedy sets of cardinality `m <= |supp(x)|` (saturating).
pub fn greedy_set_count(x: &CoefVector, m: usize) -> Result<u128> {
    let (_, tied, need) = greedy_set_parts(x, m)?;
    Ok(binomial_sat(tied.len(), need))
}

fn greedy_set_parts(x: &CoefVector, m: usize) -> Result<(Vec<usize>, Vec<usize>, usize)> {
    if m > x.len() {
        return Err(domain(format!(
            "greedy sets of size {m} exceed the support size {}",
            x.len()
        )));
    }
    let mut above = Vec::new();
    for g in tie_groups(x) {
        if above.len() + g.len() <= m {
            above.extend_from_slice(&g);
            if above.len() == m {
                return Ok((above, Vec::new(), 0));
            }
        } else {
            let need = m - above.len();
            return Ok((above, g, need));
        }
    }
    Ok((above, Vec::new(), 0))
}

fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Whether `set` (of any size up to `|supp|`) is a greedy set for `x`.
pub fn is_greedy_set(x: &CoefVector, set: &[usize]) -> bool {
    let set = normalize_set(set);
    let min_in = set.iter().map(|&i| x.get(i).abs()).fold(f64::INFINITY, f64::min);
    let max_out = x
        .iter()
        .filter(|(i, _)| set.binary_search(i).is_err())
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max);
    set.is_empty() || min_in >= max_out
}

fn check_prefix(o: &GreedyOrdering, n: usize) -> Result<()> {
    if n > o.len() {
        return Err(domain(format!("n = {n} exceeds the ordering length {}", o.len())));
    }
    Ok(())
}

/// `G_n(x) = sum_{j <= n} x*_{k_j}(x) x_{k_j}`.
pub fn greedy_sum(x: &CoefVector, o: &GreedyOrdering, n: usize) -> Result<CoefVector> {
    check_prefix(o, n)?;
    Ok(weighted_prefix(x, &o.indices[..n], |_| 1.0))
}

/// `C_n(x) = sum_{j <= n} ((n + 1 - j) / n) x*_{k_j}(x) x_{k_j}`.
pub fn cesaro_sum(x: &CoefVector, o: &GreedyOrdering, n: usize) -> Result<CoefVector> {
    if n == 0 {
        return Err(domain("the Cesàro sum needs n >= 1"));
    }
    check_prefix(o, n)?;
    let nf = n as f64;
    Ok(weighted_prefix(x, &o.indices[..n], |j| (nf - j as f64) / nf))
}

/// `2 C_{2n}(x) - C_n(x)`. Debug builds also check it against
/// `G_n(x) + sum_{j <= n} ((n + 1 - j) / n) x*_{k_{n+j}}(x) x_{k_{n+j}}`.
pub fn vp_sum(x: &CoefVector, o: &GreedyOrdering, n: usize) -> Result<CoefVector> {
    if n == 0 {
        return Err(domain("the de la Vallée-Poussin sum needs n >= 1"));
    }
    if 2 * n > o.len() {
        return Err(domain(format!(
            "2n = {} exceeds the ordering length {}",
            2 * n,
            o.len()
        )));
    }
    let c2 = cesaro_sum(x, o, 2 * n)?;
    let c1 = cesaro_sum(x, o, n)?;
    let vp = c2.merge(&c1, |a, b| 2.0 * a - b);
    debug_assert!({
        let direct = vp_sum_direct(x, o, n);
        vp.max_abs_diff(&direct) <= 1e-12 * x.sup_norm().max(f64::MIN_POSITIVE)
    });
    Ok(vp)
}

/// The right-hand side of the decomposition of `2 C_{2n} - C_n`.
pub fn vp_sum_direct(x: &CoefVector, o: &GreedyOrdering, n: usize) -> CoefVector {
    let nf = n as f64;
    let end = (2 * n).min(o.len());
    weighted_prefix(x, &o.indices[..end], |j| {
        if j < n {
            1.0
        } else {
            (nf - (j - n) as f64) / nf
        }
    })
}

/// `sum_j w(j) x*_{k_j}(x) x_{k_j}` over the given prefix (0-based `j`).
fn weighted_prefix(x: &CoefVector, prefix: &[usize], w: impl Fn(usize) -> f64) -> CoefVector {
    let mut entries: Vec<(usize, f64)> = prefix
        .iter()
        .enumerate()
        .map(|(j, &k)| (k, w(j) * x.get(k)))
        .collect();
    entries.sort_unstable_by_key(|&(k, _)| k);
    CoefVector::from_sorted_unchecked(entries)
}

/// `O_m`: the ordering `(k_{j+m})_j`, paired with the residual `x - G_m(x)`
/// it is a greedy ordering for.
pub fn shifted_ordering(x: &CoefVector, o: &GreedyOrdering, m: usize) -> Result<(CoefVector, GreedyOrdering)> {
    if m >= o.len() {
        return Err(domain(format!("shift {m} must be below the ordering length {}", o.len())));
    }
    let residual = x.sub(&greedy_sum(x, o, m)?);
    Ok((residual, GreedyOrdering { indices: o.indices[m..].to_vec() }))
}

/// `osc(x, A) = max_A |x_n| / min_A |x_n|`, with `osc(x, {}) = 1`.
pub fn osc(x: &CoefVector, set: &[usize]) -> Result<f64> {
    if set.is_empty() {
        return Ok(1.0);
    }
    let mut hi = 0.0_f64;
    let mut lo = f64::INFINITY;
    for &i in set {
        let v = x.get(i).abs();
        if v == 0.0 {
            return Err(domain(format!("index {i} of the set lies outside supp(x)")));
        }
        hi = hi.max(v);
        lo = lo.min(v);
    }
    Ok(hi / lo)
}

/// `1_{eps, B} = sum_{n in B} eps_n x_n`.
pub fn indicator_sum(eps: &SignPattern, set: &[usize]) -> Result<CoefVector> {
    let set = normalize_set(set);
    let mut entries = Vec::with_capacity(set.len());
    for &i in &set {
        let s = eps
            .get(i)
            .ok_or_else(|| domain(format!("index {i} is outside the sign pattern's domain")))?;
        entries.push((i, s.value()));
    }
    if set.first() == Some(&0) {
        return Err(Error::ZeroIndex);
    }
    Ok(CoefVector::from_sorted_unchecked(entries))
}

/// `1_{eps(x), A}`: signs of `x` on `A` with `sgn(0) = 1`.
pub fn sign_indicator(x: &CoefVector, set: &[usize]) -> CoefVector {
    let set = normalize_set(set);
    CoefVector::from_sorted_unchecked(set.iter().map(|&i| (i, Sign::of(x.get(i)).value())).collect())
}

/// `A(x, t) = {n : |x_n| >= t}` for `x` in `Q` and `0 < t <= 1`.
pub fn threshold_set(x: &CoefVector, t: f64) -> Result<Vec<usize>> {
    if !x.in_q() {
        return Err(domain("threshold sets are defined for vectors in Q"));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(domain(format!("threshold t = {t} is outside (0, 1]")));
    }
    Ok(x.iter().filter(|&(_, v)| v.abs() >= t).map(|(i, _)| i).collect())
}

/// `x |> y`: every coefficient of `x` on its support dominates every
/// coefficient of `y`.
pub fn dominates(x: &CoefVector, y: &CoefVector) -> bool {
    let min_x = x.iter().map(|(_, v)| v.abs()).fold(f64::INFINITY, f64::min);
    x.is_empty() || min_x >= y.sup_norm()
}

/// `P_A(x)`.
pub fn projection(x: &CoefVector, set: &[usize]) -> CoefVector {
    x.restrict(&normalize_set(set))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(pairs: &[(usize, f64)]) -> CoefVector {
        CoefVector::from_pairs(pairs.iter().copied()).unwrap()
    }

    fn o(ix: &[usize]) -> GreedyOrdering {
        GreedyOrdering { indices: ix.to_vec() }
    }

    #[test]
    fn ordering_examples() {
        let x = v(&[(1, 3.0), (2, -2.0), (3, 1.0)]);
        let lo = greedy_orderings(&x, 3, TiePolicy::LowestIndexFirst, 10).unwrap();
        assert_eq!(lo[0].indices(), &[1, 2, 3]);

        let tie = v(&[(1, 1.0), (2, -1.0)]);
        let all = greedy_orderings(&tie, 2, TiePolicy::Enumerate, 10).unwrap();
        let got: Vec<&[usize]> = all.iter().map(|o| o.indices()).collect();
        assert_eq!(got, [&[1, 2][..], &[2, 1][..]]);

        let single = v(&[(4, 5.0)]);
        let p = GreedyOrdering::lowest_index(&single, 3).unwrap();
        assert_eq!(p.indices(), &[4, 1, 2]);
    }

    #[test]
    fn enumeration_cap_reports_full_count() {
        let flat = CoefVector::from_dense(&[1.0; 8]).unwrap();
        let err = greedy_orderings(&flat, 8, TiePolicy::Enumerate, 10_000).unwrap_err();
        assert_eq!(err, Error::Budget { what: "greedy orderings".into(), count: 40_320, cap: 10_000 });
    }

    #[test]
    fn enumerated_orderings_are_greedy_and_distinct() {
        let x = v(&[(1, 2.0), (2, -1.0), (3, 2.0), (4, 1.0), (5, 0.5)]);
        let all = greedy_orderings(&x, 7, TiePolicy::Enumerate, 100).unwrap();
        assert_eq!(all.len(), 4);
        for ord in &all {
            ord.validate(&x).unwrap();
            assert_eq!(&ord.indices()[5..], &[6, 7]);
            for m in 0..=5 {
                assert!(is_greedy_set(&x, &ord.indices()[..m]));
            }
        }
        let mut seen: Vec<Vec<usize>> = all.iter().map(|o| o.indices().to_vec()).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn greedy_set_enumeration() {
        let x = v(&[(1, 2.0), (2, 1.0), (3, 1.0), (4, 1.0)]);
        let sets = greedy_sets(&x, 2, TiePolicy::Enumerate, 100).unwrap();
        assert_eq!(sets, vec![vec![1, 2], vec![1, 3], vec![1, 4]]);
        let one = greedy_sets(&x, 2, TiePolicy::LowestIndexFirst, 100).unwrap();
        assert_eq!(one, vec![vec![1, 2]]);
        assert_eq!(greedy_sets(&x, 0, TiePolicy::Enumerate, 100).unwrap(), vec![Vec::<usize>::new()]);
        assert!(greedy_sets(&x, 5, TiePolicy::Enumerate, 100).is_err());
    }

    #[test]
    fn sum_examples() {
        let x = v(&[(1, 3.0), (2, -2.0), (3, 1.0)]);
        let ord = o(&[1, 2, 3]);
        assert_eq!(greedy_sum(&x, &ord, 2).unwrap(), v(&[(1, 3.0), (2, -2.0)]));
        assert!(greedy_sum(&x, &ord, 0).unwrap().is_empty());
        assert_eq!(greedy_sum(&x, &ord, 3).unwrap(), x);
        assert!(greedy_sum(&x, &ord, 4).is_err());

        let y = v(&[(1, 4.0), (2, 2.0), (3, 1.0)]);
        let c = cesaro_sum(&y, &ord, 3).unwrap();
        assert_eq!(c.get(1), 4.0);
        assert!((c.get(2) - 4.0 / 3.0).abs() < 1e-15);
        assert!((c.get(3) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(cesaro_sum(&v(&[(1, 3.0), (2, 2.0)]), &o(&[1, 2]), 2).unwrap(), v(&[(1, 3.0), (2, 1.0)]));
        assert!(cesaro_sum(&y, &ord, 0).is_err());
    }

    #[test]
    fn vp_examples() {
        let x = v(&[(1, 3.0), (2, 2.0), (3, 1.0)]);
        assert_eq!(vp_sum(&x, &o(&[1, 2, 3]), 1).unwrap(), v(&[(1, 3.0), (2, 2.0)]));
        assert!(vp_sum(&x, &o(&[1, 2, 3]), 2).is_err());

        let y = v(&[(1, 4.0), (2, 2.0), (3, 1.0), (4, 0.5)]);
        let got = vp_sum(&y, &o(&[1, 2, 3, 4]), 2).unwrap();
        // G_2 = (4, 2); tail weights 1, 1/2 on (1, 0.5)
        let expected = v(&[(1, 4.0), (2, 2.0), (3, 1.0), (4, 0.25)]);
        assert!(got.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn shift_examples() {
        let x = v(&[(1, 3.0), (2, 2.0), (3, 1.0)]);
        let (r, s) = shifted_ordering(&x, &o(&[1, 2, 3]), 1).unwrap();
        assert_eq!(s.indices(), &[2, 3]);
        assert_eq!(r, v(&[(2, 2.0), (3, 1.0)]));
        let (r0, s0) = shifted_ordering(&x, &o(&[1, 2, 3]), 0).unwrap();
        assert_eq!((r0, s0.indices().to_vec()), (x.clone(), vec![1, 2, 3]));

        let t = v(&[(1, 1.0), (2, 1.0), (3, 0.5)]);
        let (r, s) = shifted_ordering(&t, &o(&[2, 1, 3]), 2).unwrap();
        assert_eq!((r, s.indices().to_vec()), (v(&[(3, 0.5)]), vec![3]));
        assert!(shifted_ordering(&t, &o(&[2, 1, 3]), 3).is_err());
    }

    #[test]
    fn osc_examples() {
        let x = v(&[(1, 4.0), (2, 2.0)]);
        assert_eq!(osc(&x, &[1, 2]).unwrap(), 2.0);
        assert_eq!(osc(&x, &[]).unwrap(), 1.0);
        assert_eq!(osc(&v(&[(1, 5.0), (2, 5.0), (3, 5.0)]), &[1, 3]).unwrap(), 1.0);
        assert!(osc(&x, &[1, 3]).is_err());
    }

    #[test]
    fn indicator_examples() {
        let eps = SignPattern::new([(1, Sign::Plus), (2, Sign::Minus)]).unwrap();
        assert_eq!(indicator_sum(&eps, &[1, 2]).unwrap(), v(&[(1, 1.0), (2, -1.0)]));
        assert!(indicator_sum(&eps, &[]).unwrap().is_empty());
        let plus = SignPattern::constant(&[3, 5]).unwrap();
        assert_eq!(indicator_sum(&plus, &[3, 5]).unwrap(), v(&[(3, 1.0), (5, 1.0)]));
        assert!(indicator_sum(&plus, &[4]).is_err());
    }

    #[test]
    fn threshold_and_domination() {
        let x = v(&[(1, 1.0), (2, 0.5), (3, 0.2)]);
        assert_eq!(threshold_set(&x, 0.5).unwrap(), vec![1, 2]);
        assert_eq!(threshold_set(&x, 1.0).unwrap(), vec![1]);
        assert!(threshold_set(&CoefVector::zero(), 0.3).unwrap().is_empty());
        assert!(threshold_set(&v(&[(1, 2.0)]), 0.5).is_err());
        assert!(threshold_set(&x, 0.0).is_err());

        assert!(dominates(&v(&[(1, 3.0)]), &v(&[(2, 2.0)])));
        assert!(!dominates(&v(&[(1, 1.0)]), &v(&[(2, 2.0)])));
        assert!(dominates(&CoefVector::zero(), &v(&[(2, 7.0)])));
    }

    #[test]
    fn projection_examples() {
        let x = v(&[(1, 3.0), (2, 2.0)]);
        assert_eq!(projection(&x, &[1]), v(&[(1, 3.0)]));
        assert!(projection(&x, &[]).is_empty());
        assert_eq!(projection(&x, &[1, 2, 9]), x);
    }

    #[test]
    fn validation_rejects_non_greedy() {
        let x = v(&[(1, 1.0), (2, 2.0)]);
        assert!(GreedyOrdering::new(&x, vec![1, 2]).is_err());
        assert!(GreedyOrdering::new(&x, vec![2]).is_err());
        assert!(GreedyOrdering::new(&x, vec![2, 1, 5]).is_ok());
        assert!(GreedyOrdering::new(&x, vec![2, 5, 1]).is_err());
    }
}
