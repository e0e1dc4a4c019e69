//! Words over ℕ and exact (possibly infinite) symbol sets.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classes::{ClassPositionSet, Position};
use crate::error::{Error, Result};
use crate::semilinear::SemilinearSet;

pub type Symbol = u64;

/// A finite word; `Word::default()` is the empty word ε.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn push(&self, b: Symbol) -> Word {
        let mut v = self.0.clone();
        v.push(b);
        Word(v)
    }

    pub fn prepend(&self, a: Symbol) -> Word {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(a);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn tail(&self) -> Word {
        Word(self.0.get(1..).unwrap_or(&[]).to_vec())
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.len())].to_vec())
    }

    pub fn first(&self) -> Option<Symbol> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Symbol> {
        self.0.last().copied()
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl From<&[Symbol]> for Word {
    fn from(v: &[Symbol]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("ε");
        }
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// An exact set of symbols. Infinite variants are always provably infinite.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolSet {
    Finite(BTreeSet<Symbol>),
    Semilinear(SemilinearSet),
    Classes(ClassPositionSet),
}

impl SymbolSet {
    pub fn empty() -> Self {
        SymbolSet::Finite(BTreeSet::new())
    }

    pub fn finite(xs: impl IntoIterator<Item = Symbol>) -> Self {
        SymbolSet::Finite(xs.into_iter().collect())
    }

    pub fn from_semilinear(s: SemilinearSet) -> Self {
        match s.finite_elements() {
            Some(xs) => SymbolSet::Finite(xs.clone()),
            None => SymbolSet::Semilinear(s),
        }
    }

    pub fn from_classes(c: ClassPositionSet) -> Self {
        match c.finite_elements() {
            Some(xs) => SymbolSet::Finite(xs),
            None => SymbolSet::Classes(c),
        }
    }

    pub fn contains(&self, x: Symbol) -> bool {
        match self {
            SymbolSet::Finite(s) => s.contains(&x),
            SymbolSet::Semilinear(s) => s.contains(x),
            SymbolSet::Classes(c) => c.contains(x),
        }
    }

    pub fn is_infinite(&self) -> bool {
        !matches!(self, SymbolSet::Finite(_))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, SymbolSet::Finite(s) if s.is_empty())
    }

    pub fn as_finite(&self) -> Option<&BTreeSet<Symbol>> {
        match self {
            SymbolSet::Finite(s) => Some(s),
            _ => None,
        }
    }

    pub fn elements_below(&self, bound: Symbol) -> BTreeSet<Symbol> {
        match self {
            SymbolSet::Finite(s) => s.range(..bound).copied().collect(),
            SymbolSet::Semilinear(s) => s.iter().take_while(|&x| x < bound).collect(),
            SymbolSet::Classes(c) => c.elements_below(bound),
        }
    }

    /// The `n` smallest elements (fewer if the set is finite and small).
    pub fn first_n(&self, n: usize) -> Vec<Symbol> {
        match self {
            SymbolSet::Finite(s) => s.iter().take(n).copied().collect(),
            SymbolSet::Semilinear(s) => s.iter().take(n).collect(),
            SymbolSet::Classes(c) if !c.is_infinite() => {
                c.finite_elements().unwrap_or_default().into_iter().take(n).collect()
            }
            SymbolSet::Classes(c) => {
                let mut bound = 64u64;
                loop {
                    let xs = c.elements_below(bound);
                    if xs.len() >= n {
                        return xs.into_iter().take(n).collect();
                    }
                    bound *= 4;
                }
            }
        }
    }

    /// Smallest element `≥ from`, if any.
    pub fn next_at_least(&self, from: Symbol) -> Option<Symbol> {
        match self {
            SymbolSet::Finite(s) => s.range(from..).next().copied(),
            SymbolSet::Semilinear(s) => s.iter_from(from).next(),
            SymbolSet::Classes(c) if !c.is_infinite() => {
                c.finite_elements().unwrap_or_default().range(from..).next().copied()
            }
            SymbolSet::Classes(c) => {
                let mut bound = from.saturating_mul(2).max(64);
                loop {
                    if let Some(x) = c.elements_below(bound).range(from..).next() {
                        return Some(*x);
                    }
                    bound = bound.saturating_mul(4);
                }
            }
        }
    }

    pub fn intersect(&self, other: &SymbolSet) -> Result<SymbolSet> {
        use SymbolSet::*;
        Ok(match (self, other) {
            (Finite(a), b) | (b, Finite(a)) => {
                Finite(a.iter().copied().filter(|&x| b.contains(x)).collect())
            }
            (Semilinear(a), Semilinear(b)) => SymbolSet::from_semilinear(a.intersection(b)?),
            (Classes(c), Semilinear(s)) | (Semilinear(s), Classes(c)) => {
                SymbolSet::from_classes(c.intersect_semilinear(s)?)
            }
            (Classes(a), Classes(b)) => SymbolSet::from_classes(a.intersect(b)?),
        })
    }

    pub fn union(&self, other: &SymbolSet) -> Result<SymbolSet> {
        use SymbolSet::*;
        Ok(match (self, other) {
            (Finite(a), Finite(b)) => Finite(a.union(b).copied().collect()),
            (Finite(a), Semilinear(s)) | (Semilinear(s), Finite(a)) => {
                SymbolSet::from_semilinear(s.union(&SemilinearSet::finite(a.iter().copied()))?)
            }
            (Semilinear(a), Semilinear(b)) => SymbolSet::from_semilinear(a.union(b)?),
            (Finite(a), Classes(c)) | (Classes(c), Finite(a)) => {
                Classes(c.clone().with_extra(a.iter().copied()))
            }
            (Classes(a), Classes(b)) => match a.union(b) {
                Some(c) => Classes(c),
                None => {
                    return Err(Error::UndecidableAtBound(format!(
                        "union of {} and {} has no class-set representation",
                        a.describe(),
                        b.describe()
                    )))
                }
            },
            (Classes(c), Semilinear(s)) | (Semilinear(s), Classes(c)) => {
                return Err(Error::UndecidableAtBound(format!(
                    "union of {} and {s} has no shipped representation",
                    c.describe()
                )))
            }
        })
    }

    /// `self \ S` for a finite `S`.
    pub fn remove_finite(&self, s: &BTreeSet<Symbol>) -> SymbolSet {
        match self {
            SymbolSet::Finite(a) => SymbolSet::Finite(a.difference(s).copied().collect()),
            SymbolSet::Semilinear(a) => SymbolSet::from_semilinear(a.without(s)),
            SymbolSet::Classes(c) => {
                let mut c = c.clone();
                c.extra.retain(|x| !s.contains(x));
                let keep = SemilinearSet::finite(s.iter().copied()).complement();
                SymbolSet::from_classes(
                    c.intersect_semilinear(&keep)
                        .expect("removing a finite set keeps the normal form bounded"),
                )
            }
        }
    }

    /// `{x + d : x ∈ self}`. The flag is false when only a superset could be represented.
    pub fn translate(&self, d: u64) -> Result<(SymbolSet, bool)> {
        if d == 0 {
            return Ok((self.clone(), true));
        }
        match self {
            SymbolSet::Finite(s) => Ok((SymbolSet::Finite(s.iter().map(|x| x + d).collect()), true)),
            SymbolSet::Semilinear(s) => {
                let progs: Vec<(u64, u64)> = s.progressions().iter().map(|&(a, b)| (a + d, b)).collect();
                let shifted = SemilinearSet::new(
                    progs,
                    s.added().iter().map(|x| x + d).collect(),
                    s.removed().iter().map(|x| x + d).collect(),
                )?;
                Ok((SymbolSet::from_semilinear(shifted), true))
            }
            SymbolSet::Classes(c) if c.filter.is_none() && c.positions.len() == 1 => {
                let layout = c.layout;
                match c.positions.iter().next() {
                    // max Z_k + 1 = min Z_{k+1}
                    Some(Position::Max) => {
                        let mins = ClassPositionSet::new(layout, c.from_class + 1, &[Position::Min]);
                        SymbolSet::Classes(mins).translate(d - 1)
                    }
                    Some(Position::Min) => {
                        let mut k0 = c.from_class;
                        while layout.size(k0) < d + 2 {
                            k0 += 1;
                        }
                        let interior = ClassPositionSet::new(layout, k0, &[Position::Interior]);
                        Ok((SymbolSet::Classes(interior), false))
                    }
                    _ => Err(Error::UndecidableAtBound(format!("translate {} by {d}", self.describe()))),
                }
            }
            _ => Err(Error::UndecidableAtBound(format!("translate {} by {d}", self.describe()))),
        }
    }

    /// `self \ other` is finite.
    pub fn difference_is_finite(&self, other: &SymbolSet) -> Result<bool> {
        use SymbolSet::*;
        Ok(match (self, other) {
            (Finite(_), _) => true,
            (_, Finite(_)) => false,
            (d, Semilinear(b)) => !d.intersect(&Semilinear(b.complement()))?.is_infinite(),
            (Semilinear(d), Classes(_)) => covers_cofinitely(d, std::slice::from_ref(other))?,
            (Classes(d), Classes(b)) => {
                if d.layout != b.layout {
                    return Err(Error::UndecidableAtBound(
                        "class sets over different layouts".into(),
                    ));
                }
                let all = SemilinearSet::at_least(0);
                let d_filter = d.filter.clone().unwrap_or_else(|| all.clone());
                let mut finite = true;
                for &pos in &d.positions {
                    let leftover = if b.positions.contains(&pos) {
                        let b_filter = b.filter.clone().unwrap_or_else(|| all.clone());
                        d_filter.difference(&b_filter)?
                    } else {
                        d_filter.clone()
                    };
                    let probe = ClassPositionSet::new(d.layout, d.from_class, &[pos])
                        .with_filter(leftover);
                    finite &= !probe.is_infinite();
                }
                finite
            }
        })
    }

    pub fn describe(&self) -> String {
        match self {
            SymbolSet::Finite(s) => {
                let xs: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                format!("{{{}}}", xs.join(","))
            }
            SymbolSet::Semilinear(s) => s.to_string(),
            SymbolSet::Classes(c) => c.describe(),
        }
    }
}

impl fmt::Display for SymbolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Decides whether `universe \ ⋃ sets` is finite.
pub fn covers_cofinitely(universe: &SemilinearSet, sets: &[SymbolSet]) -> Result<bool> {
    let mut semi = SemilinearSet::empty();
    let mut class_sets = Vec::new();
    for s in sets {
        match s {
            SymbolSet::Finite(_) => {}
            SymbolSet::Semilinear(x) => semi = semi.union(x)?,
            SymbolSet::Classes(c) => class_sets.push(c),
        }
    }
    let rest = universe.difference(&semi)?;
    if rest.is_finite() {
        return Ok(true);
    }
    let Some(first) = class_sets.first() else {
        return Ok(false);
    };
    let layout = first.layout;
    if class_sets.iter().any(|c| c.layout != layout) {
        return Err(Error::UndecidableAtBound(
            "class sets over different layouts".into(),
        ));
    }
    let from = class_sets.iter().map(|c| c.from_class).max().unwrap_or(2);
    // Every residual symbol of large classes has a position; each position kind must be covered.
    for pos in [Position::Min, Position::Interior, Position::Max] {
        let mut cover = semi.union(&rest.complement())?;
        for c in &class_sets {
            if c.positions.contains(&pos) {
                let f = c.filter.clone().unwrap_or_else(|| SemilinearSet::at_least(0));
                cover = cover.union(&f)?;
            }
        }
        if !ClassPositionSet::kind_covered_cofinitely(layout, from, pos, &cover) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::ClassLayout;

    #[test]
    fn word_display() {
        assert_eq!(Word::empty().to_string(), "ε");
        assert_eq!(Word(vec![5, 0, 7]).to_string(), "(5,0,7)");
    }

    #[test]
    fn class_and_semilinear_mix() {
        let l = ClassLayout::identity();
        let mins = SymbolSet::Classes(ClassPositionSet::new(l, 2, &[Position::Min]));
        let ge2 = SymbolSet::from_semilinear(SemilinearSet::at_least(2));
        assert!(mins.intersect(&ge2).unwrap().is_infinite());
        let maxs = SymbolSet::Classes(ClassPositionSet::new(l, 2, &[Position::Max]));
        assert!(!mins.intersect(&maxs).unwrap().is_infinite());
        let fin = SymbolSet::finite([2, 3, 5]);
        assert_eq!(fin.intersect(&mins).unwrap(), SymbolSet::finite([2]));
    }

    #[test]
    fn cofinite_cover_by_position_kinds() {
        let l = ClassLayout::identity();
        let ge1 = SemilinearSet::at_least(1);
        let mins = SymbolSet::Classes(ClassPositionSet::new(l, 2, &[Position::Min]));
        let rest = SymbolSet::Classes(ClassPositionSet::new(
            l,
            2,
            &[Position::Interior, Position::Max],
        ));
        assert!(covers_cofinitely(&ge1, &[mins.clone(), rest]).unwrap());
        assert!(!covers_cofinitely(&ge1, &[mins.clone()]).unwrap());
        let evens = SymbolSet::from_semilinear(SemilinearSet::progression(0, 2).unwrap());
        let odds = SymbolSet::from_semilinear(SemilinearSet::progression(1, 2).unwrap());
        assert!(covers_cofinitely(&ge1, &[evens.clone(), odds]).unwrap());
        assert!(!covers_cofinitely(&ge1, &[evens, mins]).unwrap());
    }

    #[test]
    fn remove_finite_from_class_set() {
        let l = ClassLayout::identity();
        let mins = SymbolSet::Classes(ClassPositionSet::new(l, 2, &[Position::Min]));
        let cut = mins.remove_finite(&[2, 4].into_iter().collect());
        assert_eq!(cut.first_n(2), vec![7, 11]);
    }
}
