//! Consecutive-integer class layouts `ℤ₊ = Z_1 ⊔ Z_2 ⊔ …` and class-structured symbol sets.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semilinear::SemilinearSet;

/// `Z_1 = {1}`, `|Z_k| = 2 + slope·(k−2)` for `k ≥ 2`, classes laid out consecutively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassLayout {
    slope: u64,
}

impl ClassLayout {
    pub fn new(slope: u64) -> Result<Self> {
        if slope == 0 {
            return Err(Error::InvalidClassRule(
                "class sizes must be strictly increasing (slope ≥ 1)".into(),
            ));
        }
        Ok(ClassLayout { slope })
    }

    /// The rule `|Z_k| = k`.
    pub fn identity() -> Self {
        ClassLayout { slope: 1 }
    }

    pub fn slope(&self) -> u64 {
        self.slope
    }

    pub fn size(&self, k: u64) -> u64 {
        assert!(k >= 1, "classes are indexed from 1");
        if k == 1 {
            1
        } else {
            2 + self.slope * (k - 2)
        }
    }

    pub fn first(&self, k: u64) -> u64 {
        assert!(k >= 1, "classes are indexed from 1");
        if k == 1 {
            return 1;
        }
        let j = k - 2;
        2 + 2 * j + self.slope * j * j.saturating_sub(1) / 2
    }

    pub fn last(&self, k: u64) -> u64 {
        self.first(k) + self.size(k) - 1
    }

    pub fn class_of(&self, x: u64) -> Option<u64> {
        if x == 0 {
            return None;
        }
        if x == 1 {
            return Some(1);
        }
        // largest k with min(k) ≤ x
        let (mut lo, mut hi) = (2u64, 3u64);
        while self.first(hi) <= x {
            lo = hi;
            hi = hi.checked_mul(2).expect("class index overflow");
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.first(mid) <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }

    pub fn is_min(&self, x: u64) -> bool {
        self.class_of(x).is_some_and(|k| k >= 2 && self.first(k) == x)
    }

    pub fn is_max(&self, x: u64) -> bool {
        self.class_of(x).is_some_and(|k| k >= 2 && self.last(k) == x)
    }

    pub fn position(&self, x: u64) -> Option<(u64, Position)> {
        let k = self.class_of(x)?;
        if k == 1 {
            return None;
        }
        let p = if x == self.first(k) {
            Position::Min
        } else if x == self.last(k) {
            Position::Max
        } else {
            Position::Interior
        };
        Some((k, p))
    }

    pub fn class_members(&self, k: u64) -> std::ops::RangeInclusive<u64> {
        self.first(k)..=self.last(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Position {
    Min,
    Interior,
    Max,
}

/// `extra ∪ { x ∈ Z_k : k ≥ from_class, position(x) ∈ positions, x ∈ filter }`.
///
/// The structural part is unbounded in `k`; finite pieces live in `extra`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassPositionSet {
    pub layout: ClassLayout,
    pub from_class: u64,
    pub positions: BTreeSet<Position>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter: Option<SemilinearSet>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub extra: BTreeSet<u64>,
}

impl ClassPositionSet {
    pub fn new(layout: ClassLayout, from_class: u64, positions: &[Position]) -> Self {
        ClassPositionSet {
            layout,
            from_class: from_class.max(2),
            positions: positions.iter().copied().collect(),
            filter: None,
            extra: BTreeSet::new(),
        }
    }

    pub fn with_filter(mut self, filter: SemilinearSet) -> Self {
        self.filter = Some(filter);
        self
    }

    pub fn with_extra(mut self, extra: impl IntoIterator<Item = u64>) -> Self {
        self.extra.extend(extra);
        self
    }

    fn structural_contains(&self, x: u64) -> bool {
        match self.layout.position(x) {
            Some((k, p)) => {
                k >= self.from_class
                    && self.positions.contains(&p)
                    && self.filter.as_ref().is_none_or(|f| f.contains(x))
            }
            None => false,
        }
    }

    pub fn contains(&self, x: u64) -> bool {
        self.extra.contains(&x) || self.structural_contains(x)
    }

    /// First class index `k ≥ from_class` beyond which the filter's periodic regime applies.
    fn periodic_start(&self, threshold: u64) -> u64 {
        let mut k = self.from_class;
        while self.layout.first(k) < threshold {
            k += 1;
        }
        k
    }

    /// Exact infinitude: `min Z_k mod P` and `max Z_k mod P` are periodic in `k` with period `2P`,
    /// and interiors eventually cover every residue.
    pub fn is_infinite(&self) -> bool {
        if self.positions.is_empty() {
            return false;
        }
        let Some(filter) = &self.filter else {
            return true;
        };
        let nf = filter.normal_form();
        if nf.is_finite() {
            return false;
        }
        if self.positions.contains(&Position::Interior) {
            return true;
        }
        let k0 = self.periodic_start(nf.threshold);
        (k0..k0 + 2 * nf.period).any(|k| {
            (self.positions.contains(&Position::Min) && nf.contains(self.layout.first(k)))
                || (self.positions.contains(&Position::Max) && nf.contains(self.layout.last(k)))
        })
    }

    /// Exclusive bound on the elements of a set that is not infinite.
    fn finite_bound(&self) -> u64 {
        let extra_bound = self.extra.iter().next_back().map_or(0, |x| x + 1);
        let structural = match &self.filter {
            _ if self.positions.is_empty() => 0,
            None => unreachable!("unfiltered non-empty class sets are infinite"),
            Some(f) => {
                let nf = f.normal_form();
                if nf.is_finite() {
                    nf.below.iter().next_back().map_or(0, |x| x + 1)
                } else {
                    let k0 = self.periodic_start(nf.threshold);
                    self.layout.last(k0 + 2 * nf.period) + 1
                }
            }
        };
        extra_bound.max(structural)
    }

    /// Elements `< bound`, ascending.
    pub fn elements_below(&self, bound: u64) -> BTreeSet<u64> {
        let mut out: BTreeSet<u64> = self.extra.range(..bound).copied().collect();
        let mut k = self.from_class;
        while self.layout.first(k) < bound {
            for x in self.layout.class_members(k) {
                if x >= bound {
                    break;
                }
                if self.structural_contains(x) {
                    out.insert(x);
                }
            }
            k += 1;
        }
        out
    }

    /// All elements of a set that is not infinite.
    pub fn finite_elements(&self) -> Option<BTreeSet<u64>> {
        if self.is_infinite() {
            return None;
        }
        Some(self.elements_below(self.finite_bound()))
    }

    pub fn intersect_semilinear(&self, s: &SemilinearSet) -> Result<Self> {
        let filter = match &self.filter {
            Some(f) => f.intersection(s)?,
            None => s.clone(),
        };
        Ok(ClassPositionSet {
            filter: Some(filter),
            extra: self.extra.iter().copied().filter(|&x| s.contains(x)).collect(),
            ..self.clone()
        })
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if self.layout != other.layout {
            return Err(Error::UndecidableAtBound(
                "intersection of class sets over different layouts".into(),
            ));
        }
        let filter = match (&self.filter, &other.filter) {
            (None, None) => None,
            (Some(f), None) | (None, Some(f)) => Some(f.clone()),
            (Some(f), Some(g)) => Some(f.intersection(g)?),
        };
        let extra = self
            .extra
            .iter()
            .filter(|&&x| other.contains(x))
            .chain(other.extra.iter().filter(|&&x| self.contains(x)))
            .copied()
            .collect();
        Ok(ClassPositionSet {
            layout: self.layout,
            from_class: self.from_class.max(other.from_class),
            positions: self.positions.intersection(&other.positions).copied().collect(),
            filter,
            extra,
        })
    }

    /// Union when both structural parts differ only in their position flags.
    pub fn union(&self, other: &Self) -> Option<Self> {
        if self.layout != other.layout
            || self.from_class != other.from_class
            || self.filter != other.filter
        {
            return None;
        }
        Some(ClassPositionSet {
            layout: self.layout,
            from_class: self.from_class,
            positions: self.positions.union(&other.positions).copied().collect(),
            filter: self.filter.clone(),
            extra: self.extra.union(&other.extra).copied().collect(),
        })
    }

    /// Whether every structural `pos`-element of classes `≥ from` lies in `cover`, up to finitely many.
    pub fn kind_covered_cofinitely(
        layout: ClassLayout,
        from: u64,
        pos: Position,
        cover: &SemilinearSet,
    ) -> bool {
        let nf = cover.normal_form();
        if pos == Position::Interior {
            return nf.residues.iter().all(|&b| b);
        }
        let probe = ClassPositionSet::new(layout, from, &[pos]);
        let k0 = probe.periodic_start(nf.threshold);
        (k0..k0 + 2 * nf.period).all(|k| {
            let x = if pos == Position::Min {
                layout.first(k)
            } else {
                layout.last(k)
            };
            nf.contains(x)
        })
    }

    pub fn describe(&self) -> String {
        let pos: Vec<&str> = self
            .positions
            .iter()
            .map(|p| match p {
                Position::Min => "min",
                Position::Interior => "interior",
                Position::Max => "max",
            })
            .collect();
        let mut s = format!("{{{} Z_k : k ≥ {}}}", pos.join("|"), self.from_class);
        if let Some(f) = &self.filter {
            s.push_str(&format!(" ∩ ({f})"));
        }
        if !self.extra.is_empty() {
            let xs: Vec<String> = self.extra.iter().map(|x| x.to_string()).collect();
            s.push_str(&format!(" ∪ {{{}}}", xs.join(",")));
        }
        s
    }
}
