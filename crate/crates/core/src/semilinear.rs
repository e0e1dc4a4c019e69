//! Ultimately periodic subsets of ℕ written as unions of arithmetic progressions.
//!
//! Every [`SemilinearSet`] is stored in canonical form: the descriptor is
//! recomputed from the minimal (threshold, period) normal form, so structural
//! equality coincides with set equality.

use std::collections::BTreeSet;
use std::fmt;

use num::integer::lcm;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper limit on `threshold + period` of a normal form; keeps set algebra desk-sized.
const MAX_NORMAL_FORM: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawSemilinear", into = "RawSemilinear")]
pub struct SemilinearSet {
    progressions: Vec<(u64, u64)>,
    added: BTreeSet<u64>,
    removed: BTreeSet<u64>,
}

#[derive(Serialize, Deserialize)]
struct RawSemilinear {
    #[serde(default)]
    progressions: Vec<(u64, u64)>,
    #[serde(default)]
    added: BTreeSet<u64>,
    #[serde(default)]
    removed: BTreeSet<u64>,
}

impl TryFrom<RawSemilinear> for SemilinearSet {
    type Error = Error;
    fn try_from(r: RawSemilinear) -> Result<Self> {
        SemilinearSet::new(r.progressions, r.added, r.removed)
    }
}

impl From<SemilinearSet> for RawSemilinear {
    fn from(s: SemilinearSet) -> Self {
        RawSemilinear {
            progressions: s.progressions,
            added: s.added,
            removed: s.removed,
        }
    }
}

/// `n ∈ S` iff `n ∈ below` for `n < threshold`, and `residues[n % period]` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub threshold: u64,
    pub period: u64,
    pub residues: Vec<bool>,
    pub below: BTreeSet<u64>,
}

impl NormalForm {
    pub fn contains(&self, n: u64) -> bool {
        if n < self.threshold {
            self.below.contains(&n)
        } else {
            self.residues[(n % self.period) as usize]
        }
    }

    pub fn is_finite(&self) -> bool {
        !self.residues.iter().any(|&b| b)
    }

    /// Re-expresses the same set with a larger threshold and a multiple period.
    fn widen(&self, threshold: u64, period: u64) -> NormalForm {
        debug_assert!(threshold >= self.threshold && period % self.period == 0);
        let residues = (0..period)
            .map(|c| self.residues[(c % self.period) as usize])
            .collect();
        let below = (0..threshold).filter(|&n| self.contains(n)).collect();
        NormalForm {
            threshold,
            period,
            residues,
            below,
        }
    }

    fn minimize(mut self) -> NormalForm {
        let p = self.period;
        let mut best = p;
        for d in 1..p {
            if p % d == 0 && (0..p).all(|c| self.residues[c as usize] == self.residues[(c % d) as usize]) {
                best = d;
                break;
            }
        }
        if best != p {
            self.residues.truncate(best as usize);
            self.period = best;
        }
        while self.threshold > 0 {
            let n = self.threshold - 1;
            if self.below.contains(&n) == self.residues[(n % self.period) as usize] {
                self.below.remove(&n);
                self.threshold = n;
            } else {
                break;
            }
        }
        self
    }

    fn to_set(&self) -> SemilinearSet {
        let mut progressions = Vec::new();
        if self.period == 1 {
            if self.residues[0] {
                progressions.push((self.threshold, 1));
            }
        } else {
            for c in 0..self.period {
                if self.residues[c as usize] {
                    let t = self.threshold;
                    let offset = t + (c + self.period - t % self.period) % self.period;
                    progressions.push((offset, self.period));
                }
            }
            progressions.sort_unstable();
        }
        SemilinearSet {
            progressions,
            added: self.below.clone(),
            removed: BTreeSet::new(),
        }
    }
}

impl SemilinearSet {
    /// `(⋃ {a + n·b} ∪ added) \ removed`; every stride must be ≥ 1.
    pub fn new(
        progressions: Vec<(u64, u64)>,
        added: BTreeSet<u64>,
        removed: BTreeSet<u64>,
    ) -> Result<Self> {
        if let Some(&(a, b)) = progressions.iter().find(|(_, b)| *b == 0) {
            return Err(Error::InvalidInput(format!(
                "progression ({a}, {b}) has stride 0"
            )));
        }
        let raw = SemilinearSet {
            progressions,
            added,
            removed,
        };
        Ok(raw.raw_normal_form()?.minimize().to_set())
    }

    pub fn empty() -> Self {
        SemilinearSet {
            progressions: Vec::new(),
            added: BTreeSet::new(),
            removed: BTreeSet::new(),
        }
    }

    /// `{a, a+1, a+2, …}`.
    pub fn at_least(a: u64) -> Self {
        SemilinearSet {
            progressions: vec![(a, 1)],
            added: BTreeSet::new(),
            removed: BTreeSet::new(),
        }
    }

    pub fn progression(a: u64, b: u64) -> Result<Self> {
        Self::new(vec![(a, b)], BTreeSet::new(), BTreeSet::new())
    }

    pub fn finite(elems: impl IntoIterator<Item = u64>) -> Self {
        SemilinearSet {
            progressions: Vec::new(),
            added: elems.into_iter().collect(),
            removed: BTreeSet::new(),
        }
    }

    pub fn progressions(&self) -> &[(u64, u64)] {
        &self.progressions
    }

    pub fn added(&self) -> &BTreeSet<u64> {
        &self.added
    }

    pub fn removed(&self) -> &BTreeSet<u64> {
        &self.removed
    }

    fn raw_contains(&self, n: u64) -> bool {
        if self.removed.contains(&n) {
            return false;
        }
        self.added.contains(&n)
            || self
                .progressions
                .iter()
                .any(|&(a, b)| n >= a && (n - a) % b == 0)
    }

    pub fn contains(&self, n: u64) -> bool {
        self.raw_contains(n)
    }

    fn raw_normal_form(&self) -> Result<NormalForm> {
        let period = self.progressions.iter().fold(1u64, |p, &(_, b)| lcm(p, b));
        let threshold = self
            .progressions
            .iter()
            .map(|&(a, _)| a)
            .chain(self.added.iter().map(|&x| x + 1))
            .chain(self.removed.iter().map(|&x| x + 1))
            .max()
            .unwrap_or(0);
        if threshold.saturating_add(period) > MAX_NORMAL_FORM {
            return Err(Error::UndecidableAtBound(format!(
                "semilinear normal form too large (threshold {threshold}, period {period})"
            )));
        }
        let residues = (0..period)
            .map(|c| {
                let n = threshold + (c + period - threshold % period) % period;
                self.raw_contains(n)
            })
            .collect();
        let below = (0..threshold).filter(|&n| self.raw_contains(n)).collect();
        Ok(NormalForm {
            threshold,
            period,
            residues,
            below,
        })
    }

    /// Normal form of a canonical set; cannot fail once construction succeeded.
    pub fn normal_form(&self) -> NormalForm {
        self.raw_normal_form()
            .expect("canonical semilinear sets have bounded normal forms")
    }

    pub fn is_finite(&self) -> bool {
        self.progressions.is_empty()
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    /// Elements of a finite set; `None` for infinite sets.
    pub fn finite_elements(&self) -> Option<&BTreeSet<u64>> {
        self.is_finite().then_some(&self.added)
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Result<Self> {
        let a = self.normal_form();
        let b = other.normal_form();
        let t = a.threshold.max(b.threshold);
        let p = lcm(a.period, b.period);
        if t.saturating_add(p) > MAX_NORMAL_FORM {
            return Err(Error::UndecidableAtBound(format!(
                "combined normal form too large (threshold {t}, period {p})"
            )));
        }
        let a = a.widen(t, p);
        let b = b.widen(t, p);
        let residues = (0..p as usize)
            .map(|c| op(a.residues[c], b.residues[c]))
            .collect();
        let below = (0..t)
            .filter(|&n| op(a.below.contains(&n), b.below.contains(&n)))
            .collect();
        Ok(NormalForm {
            threshold: t,
            period: p,
            residues,
            below,
        }
        .minimize()
        .to_set())
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.combine(other, |x, y| x && y)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.combine(other, |x, y| x || y)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.combine(other, |x, y| x && !y)
    }

    /// Complement within ℕ.
    pub fn complement(&self) -> Self {
        let nf = self.normal_form();
        NormalForm {
            threshold: nf.threshold,
            period: nf.period,
            residues: nf.residues.iter().map(|b| !b).collect(),
            below: (0..nf.threshold).filter(|n| !nf.below.contains(n)).collect(),
        }
        .minimize()
        .to_set()
    }

    /// `self \ other` is finite.
    pub fn difference_is_finite(&self, other: &Self) -> Result<bool> {
        Ok(self.difference(other)?.is_finite())
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        let d = self.difference(other)?;
        Ok(d.is_finite() && d.added.is_empty())
    }

    pub fn without(&self, s: &BTreeSet<u64>) -> Self {
        self.difference(&SemilinearSet::finite(s.iter().copied()))
            .expect("removing a finite set keeps the normal form bounded")
    }

    /// Ascending iterator over the elements, starting at `from`.
    pub fn iter_from(&self, from: u64) -> impl Iterator<Item = u64> + '_ {
        let nf = self.normal_form();
        let finite = nf.is_finite();
        let last_below = nf.below.iter().next_back().copied();
        let mut n = from;
        std::iter::from_fn(move || loop {
            if finite && last_below.is_none_or(|l| n > l) {
                return None;
            }
            let cur = n;
            n = n.checked_add(1)?;
            if nf.contains(cur) {
                return Some(cur);
            }
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.iter_from(0)
    }

    pub fn min_element(&self) -> Option<u64> {
        self.iter().next()
    }
}

impl fmt::Display for SemilinearSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .progressions
            .iter()
            .map(|(a, b)| {
                if *b == 1 {
                    format!("[{a},∞)")
                } else {
                    format!("{a}+{b}ℕ")
                }
            })
            .collect();
        if !self.added.is_empty() {
            let xs: Vec<String> = self.added.iter().map(|x| x.to_string()).collect();
            parts.push(format!("{{{}}}", xs.join(",")));
        }
        if parts.is_empty() {
            f.write_str("∅")
        } else {
            f.write_str(&parts.join(" ∪ "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(progs: &[(u64, u64)], added: &[u64], removed: &[u64]) -> SemilinearSet {
        SemilinearSet::new(
            progs.to_vec(),
            added.iter().copied().collect(),
            removed.iter().copied().collect(),
        )
        .unwrap()
    }

    #[test]
    fn canonical_forms_coincide() {
        // evens ∪ odds = ℕ
        assert_eq!(s(&[(0, 2), (1, 2)], &[], &[]), SemilinearSet::at_least(0));
        // {3,6,9,…} ∪ {0} = 0 + 3ℕ
        assert_eq!(s(&[(3, 3)], &[0], &[]), s(&[(0, 3)], &[], &[]));
        assert_eq!(s(&[(2, 1)], &[], &[2, 3]), SemilinearSet::at_least(4));
    }

    #[test]
    fn zero_stride_rejected() {
        assert!(SemilinearSet::new(vec![(1, 0)], BTreeSet::new(), BTreeSet::new()).is_err());
    }

    #[test]
    fn evens_and_multiples_of_four_overlap_infinitely() {
        let ev = s(&[(0, 2)], &[], &[]);
        let m4 = s(&[(0, 4)], &[], &[]);
        assert!(ev.intersection(&m4).unwrap().is_infinite());
        let odd = s(&[(1, 2)], &[], &[]);
        assert!(ev.intersection(&odd).unwrap().is_finite());
    }

    #[test]
    fn iteration_and_complement() {
        let x = s(&[(5, 3)], &[1], &[8]);
        let got: Vec<u64> = x.iter().take(4).collect();
        assert_eq!(got, vec![1, 5, 11, 14]);
        let c = x.complement();
        assert!(c.contains(8) && c.contains(0) && !c.contains(5));
        assert!(x.union(&c).unwrap() == SemilinearSet::at_least(0));
        let fin = SemilinearSet::finite([4, 2]);
        assert_eq!(fin.iter().collect::<Vec<_>>(), vec![2, 4]);
    }

    #[test]
    fn cofinite_containment() {
        let ge2 = SemilinearSet::at_least(2);
        let all = SemilinearSet::at_least(1);
        assert!(all.difference_is_finite(&ge2).unwrap());
        assert!(!all.difference_is_finite(&s(&[(0, 2)], &[], &[])).unwrap());
    }
}
