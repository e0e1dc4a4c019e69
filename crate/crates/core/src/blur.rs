//! The blur shift `Σ̂ = Σ ⊔ ∂Σ` over a finite resolution.
//!
//! Points of `Σ` are represented by eventually periodic sequences; boundary points
//! `(w, B_r, B_r, …)` by their stem and blurred-set index (1-based, as printed).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, ResolutionClause, Result};
use crate::shift::{Shift, ShiftSpec};
use crate::symbols::{covers_cofinitely, Symbol, SymbolSet, Word};

const MAX_ALLOWED_CHECK: usize = 100_000;

// ------------------------------------------------------------------ points

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SequencePoint {
    pre: Vec<Symbol>,
    period: Vec<Symbol>,
}

fn canonicalize(mut pre: Vec<Symbol>, mut period: Vec<Symbol>) -> (Vec<Symbol>, Vec<Symbol>) {
    let p = period.len();
    if let Some(d) = (1..=p).find(|&d| p % d == 0 && (0..p).all(|i| period[i] == period[i % d])) {
        period.truncate(d);
    }
    while let (Some(&a), Some(&b)) = (pre.last(), period.last()) {
        if a != b {
            break;
        }
        pre.pop();
        period.rotate_right(1);
    }
    (pre, period)
}

impl SequencePoint {
    /// Canonical `pre · period^∞`, checked against the language of `spec`.
    ///
    /// The check is exact: reading whole periods, the automaton context eventually repeats.
    pub fn new(spec: &dyn ShiftSpec, pre: impl Into<Word>, period: impl Into<Word>) -> Result<Self> {
        let p = SequencePoint::unchecked(pre.into().0, period.into().0)?;
        p.check(spec)?;
        Ok(p)
    }

    /// Canonical form without a language check; the period must be non-empty.
    pub fn unchecked(pre: Vec<Symbol>, period: Vec<Symbol>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidInput("a sequence point needs a non-empty period".into()));
        }
        let (pre, period) = canonicalize(pre, period);
        Ok(SequencePoint { pre, period })
    }

    pub fn periodic(period: impl Into<Word>) -> Result<Self> {
        SequencePoint::unchecked(Vec::new(), period.into().0)
    }

    fn check(&self, spec: &dyn ShiftSpec) -> Result<()> {
        let mut ctx = spec
            .context(&self.pre)
            .ok_or_else(|| Error::WordNotAllowed(Word(self.pre.clone())))?;
        let mut seen = BTreeSet::new();
        let mut read = self.pre.clone();
        while seen.insert(ctx.clone()) {
            for &b in &self.period {
                read.push(b);
                ctx = spec.step(&ctx, b).ok_or_else(|| Error::WordNotAllowed(Word(read.clone())))?;
            }
            if read.len() > MAX_ALLOWED_CHECK {
                return Err(Error::UndecidableAtBound(format!(
                    "context of {self} did not repeat within {MAX_ALLOWED_CHECK} symbols"
                )));
            }
        }
        Ok(())
    }

    pub fn preperiod(&self) -> &[Symbol] {
        &self.pre
    }

    pub fn period(&self) -> &[Symbol] {
        &self.period
    }

    pub fn is_periodic(&self) -> bool {
        self.pre.is_empty()
    }

    pub fn coord(&self, i: usize) -> Symbol {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word((0..n).map(|i| self.coord(i)).collect())
    }

    pub fn shift(&self) -> SequencePoint {
        if let Some((_, rest)) = self.pre.split_first() {
            SequencePoint {
                pre: rest.to_vec(),
                period: self.period.clone(),
            }
        } else {
            let mut period = self.period.clone();
            period.rotate_left(1);
            SequencePoint { pre: Vec::new(), period }
        }
    }

    /// The distinct points `σ^i(x)` of a periodic point, starting at `x`.
    pub fn orbit(&self) -> Vec<SequencePoint> {
        let mut out = vec![self.clone()];
        let mut cur = self.shift();
        while cur != *self && out.len() <= self.pre.len() + self.period.len() {
            out.push(cur.clone());
            cur = cur.shift();
        }
        out
    }
}

impl fmt::Display for SequencePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.pre.is_empty() {
            write!(f, "{} ", Word(self.pre.clone()))?;
        }
        write!(f, "{}^∞", Word(self.period.clone()))
    }
}

#[derive(Serialize, Deserialize)]
struct RawSequencePoint {
    #[serde(default)]
    preperiod: Vec<Symbol>,
    period: Vec<Symbol>,
}

impl Serialize for SequencePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawSequencePoint {
            preperiod: self.pre.clone(),
            period: self.period.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SequencePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSequencePoint::deserialize(d)?;
        SequencePoint::unchecked(raw.preperiod, raw.period).map_err(serde::de::Error::custom)
    }
}

/// `(w, B_r, B_r, …)`; level `ℓ(w)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlurPoint {
    pub stem: Word,
    pub r: usize,
}

impl BlurPoint {
    pub fn new(stem: impl Into<Word>, r: usize) -> Self {
        BlurPoint { stem: stem.into(), r }
    }

    pub fn fixed(r: usize) -> Self {
        BlurPoint::new(Word::empty(), r)
    }

    pub fn level(&self) -> usize {
        self.stem.len()
    }
}

impl fmt::Display for BlurPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} | B_{}", self.stem, self.r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PointHat {
    Seq(SequencePoint),
    Blur(BlurPoint),
}

/// A coordinate of a point of `Σ̂`: a symbol or a blurred symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coord {
    Sym(Symbol),
    Blurred(usize),
}

impl PointHat {
    pub fn coord(&self, i: usize) -> Coord {
        match self {
            PointHat::Seq(x) => Coord::Sym(x.coord(i)),
            PointHat::Blur(b) => match b.stem.symbols().get(i) {
                Some(&a) => Coord::Sym(a),
                None => Coord::Blurred(b.r),
            },
        }
    }

    /// `None` on `Σ`, the level otherwise.
    pub fn level(&self) -> Option<usize> {
        match self {
            PointHat::Seq(_) => None,
            PointHat::Blur(b) => Some(b.level()),
        }
    }

    pub fn shift_hat(&self) -> PointHat {
        match self {
            PointHat::Seq(x) => PointHat::Seq(x.shift()),
            PointHat::Blur(b) if b.stem.is_empty() => self.clone(),
            PointHat::Blur(b) => PointHat::Blur(BlurPoint::new(b.stem.tail(), b.r)),
        }
    }
}

impl fmt::Display for PointHat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointHat::Seq(x) => x.fmt(f),
            PointHat::Blur(b) => b.fmt(f),
        }
    }
}

impl From<SequencePoint> for PointHat {
    fn from(x: SequencePoint) -> Self {
        PointHat::Seq(x)
    }
}

impl From<BlurPoint> for PointHat {
    fn from(b: BlurPoint) -> Self {
        PointHat::Blur(b)
    }
}

// -------------------------------------------------------------- resolution

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Resolution {
    pub sets: Vec<SymbolSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolutionReport {
    pub size: usize,
    pub pairwise_finite: bool,
    pub cofinite_union: bool,
    /// `exact` for semilinear carriers, `structural` when a class-structured set is involved.
    pub certificate: &'static str,
}

fn invalid(clause: ResolutionClause, detail: String) -> Error {
    Error::InvalidResolution { clause, detail }
}

pub fn validate_resolution(spec: &dyn ShiftSpec, v: &Resolution) -> Result<ResolutionReport> {
    if v.sets.is_empty() {
        return Err(invalid(ResolutionClause::EmptyResolution, "no sets".into()));
    }
    let alphabet = spec.alphabet();
    let letters = SymbolSet::from_semilinear(alphabet.clone());
    for (i, b) in v.sets.iter().enumerate() {
        if !b.intersect(&letters)?.is_infinite() {
            return Err(invalid(
                ResolutionClause::FiniteBlurredSet,
                format!("B_{} = {b} meets the alphabet in a finite set", i + 1),
            ));
        }
    }
    for i in 0..v.sets.len() {
        for j in i + 1..v.sets.len() {
            if v.sets[i].intersect(&v.sets[j])?.is_infinite() {
                return Err(invalid(
                    ResolutionClause::InfiniteIntersection,
                    format!("B_{} ∩ B_{} is infinite", i + 1, j + 1),
                ));
            }
        }
    }
    if !covers_cofinitely(&alphabet, &v.sets)? {
        return Err(invalid(
            ResolutionClause::UnionNotCofinite,
            "L_1 \\ ⋃ B_r is infinite".into(),
        ));
    }
    let structural = v.sets.iter().any(|b| matches!(b, SymbolSet::Classes(_)));
    Ok(ResolutionReport {
        size: v.sets.len(),
        pairwise_finite: true,
        cofinite_union: true,
        certificate: if structural { "structural" } else { "exact" },
    })
}

// --------------------------------------------------------------- cylinders

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneralizedCylinder {
    /// `Z[w]`
    Plain { w: Word },
    /// `Z[w B_r; S]`
    Blur {
        w: Word,
        r: usize,
        #[serde(default)]
        exclude: BTreeSet<Symbol>,
    },
}

impl GeneralizedCylinder {
    pub fn plain(w: impl Into<Word>) -> Self {
        GeneralizedCylinder::Plain { w: w.into() }
    }

    pub fn blur(w: impl Into<Word>, r: usize, exclude: impl IntoIterator<Item = Symbol>) -> Self {
        GeneralizedCylinder::Blur {
            w: w.into(),
            r,
            exclude: exclude.into_iter().collect(),
        }
    }

    pub fn stem(&self) -> &Word {
        match self {
            GeneralizedCylinder::Plain { w } | GeneralizedCylinder::Blur { w, .. } => w,
        }
    }

    pub fn prepend(&self, a: Symbol) -> Self {
        match self {
            GeneralizedCylinder::Plain { w } => GeneralizedCylinder::Plain { w: w.prepend(a) },
            GeneralizedCylinder::Blur { w, r, exclude } => GeneralizedCylinder::Blur {
                w: w.prepend(a),
                r: *r,
                exclude: exclude.clone(),
            },
        }
    }
}

impl fmt::Display for GeneralizedCylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneralizedCylinder::Plain { w } => write!(f, "Z[{w}]"),
            GeneralizedCylinder::Blur { w, r, exclude } => {
                let stem = if w.is_empty() { String::new() } else { format!("{w} ") };
                let s: Vec<String> = exclude.iter().map(|x| x.to_string()).collect();
                write!(f, "Z[{stem}B_{r}; {{{}}}]", s.join(","))
            }
        }
    }
}

/// `⊔_{i ∈ heads} Z[i · tail]`, kept symbolic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreimageFamily {
    pub heads: SymbolSet,
    pub tail: GeneralizedCylinder,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Preimage {
    pub whole: bool,
    pub atoms: Vec<BlurPoint>,
    pub families: Vec<PreimageFamily>,
}

// ------------------------------------------------------------------ Σ̂ proper

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlurShift {
    pub shift: Shift,
    pub resolution: Resolution,
    pub report: ResolutionReport,
}

impl BlurShift {
    pub fn new(shift: Shift, resolution: Resolution) -> Result<Self> {
        let report = validate_resolution(&shift, &resolution)?;
        Ok(BlurShift {
            shift,
            resolution,
            report,
        })
    }

    pub fn spec(&self) -> &dyn ShiftSpec {
        &self.shift
    }

    pub fn size(&self) -> usize {
        self.resolution.sets.len()
    }

    /// `B_r`, 1-based.
    pub fn blurred(&self, r: usize) -> Result<&SymbolSet> {
        r.checked_sub(1)
            .and_then(|i| self.resolution.sets.get(i))
            .ok_or_else(|| Error::InvalidInput(format!("no blurred set B_{r} (s = {})", self.size())))
    }

    /// `F_1(w) ∩ B_r` is infinite.
    pub fn in_boundary(&self, w: &Word, r: usize) -> Result<bool> {
        let b = self.blurred(r)?;
        if !self.shift.allowed(w.symbols()) {
            return Err(Error::WordNotAllowed(w.clone()));
        }
        if w.is_empty() {
            return Ok(true);
        }
        Ok(self.shift.followers1(w)?.intersect(b)?.is_infinite())
    }

    pub fn blur_point(&self, stem: impl Into<Word>, r: usize) -> Result<BlurPoint> {
        let p = BlurPoint::new(stem, r);
        if !self.in_boundary(&p.stem, r)? {
            return Err(Error::InvalidInput(format!("{p} is not a boundary point")));
        }
        Ok(p)
    }

    pub fn level0(&self) -> Vec<BlurPoint> {
        (1..=self.size()).map(BlurPoint::fixed).collect()
    }

    /// Boundary points of level at most `depth` whose stems use symbols below `bound`.
    pub fn boundary_points(&self, depth: usize, bound: Symbol) -> Result<Vec<BlurPoint>> {
        let mut out = Vec::new();
        let mut words = vec![(Word::empty(), self.shift.start())];
        for level in 0..=depth {
            for (w, _) in &words {
                for r in 1..=self.size() {
                    if self.in_boundary(w, r)? {
                        out.push(BlurPoint::new(w.clone(), r));
                    }
                }
            }
            if level == depth {
                break;
            }
            let mut next = Vec::new();
            for (w, ctx) in &words {
                let (succ, _) = self.shift.successors(ctx, bound);
                for b in succ {
                    if let Some(c) = self.shift.step(ctx, b) {
                        next.push((w.push(b), c));
                    }
                }
            }
            words = next;
        }
        Ok(out)
    }

    pub fn cylinder_contains(&self, c: &GeneralizedCylinder, p: &PointHat) -> bool {
        let w = c.stem();
        let prefix_ok = w
            .symbols()
            .iter()
            .enumerate()
            .all(|(i, &a)| p.coord(i) == Coord::Sym(a));
        if !prefix_ok {
            return false;
        }
        match c {
            GeneralizedCylinder::Plain { .. } => true,
            GeneralizedCylinder::Blur { r, exclude, .. } => match p.coord(w.len()) {
                Coord::Blurred(q) => q == *r,
                Coord::Sym(a) => {
                    !exclude.contains(&a) && self.blurred(*r).is_ok_and(|b| b.contains(a))
                }
            },
        }
    }

    /// The four preimage formulas, with infinite unions kept as `(heads, tail)` pairs.
    pub fn preimage_cylinder(&self, c: &GeneralizedCylinder) -> Result<Preimage> {
        let w = c.stem();
        if let GeneralizedCylinder::Plain { w } = c {
            if w.is_empty() {
                return Ok(Preimage {
                    whole: true,
                    atoms: Vec::new(),
                    families: Vec::new(),
                });
            }
        }
        let mut atoms = Vec::new();
        let heads = if w.is_empty() {
            // c = Z[B_r; S]
            if let GeneralizedCylinder::Blur { r, .. } = c {
                atoms.push(BlurPoint::fixed(*r));
            }
            SymbolSet::from_semilinear(self.shift.alphabet())
        } else {
            self.shift.predecessors(w)?
        };
        Ok(Preimage {
            whole: false,
            atoms,
            families: vec![PreimageFamily {
                heads,
                tail: c.clone(),
            }],
        })
    }

    pub fn preimage_contains(&self, pre: &Preimage, p: &PointHat) -> bool {
        if pre.whole {
            return true;
        }
        if let PointHat::Blur(b) = p {
            if pre.atoms.contains(b) {
                return true;
            }
        }
        let Coord::Sym(i) = p.coord(0) else {
            return false;
        };
        pre.families
            .iter()
            .any(|f| f.heads.contains(i) && self.cylinder_contains(&f.tail.prepend(i), p))
    }

    /// The unique `r` with `{k + d : k ∈ domain} ⊆* B_r`, if any.
    fn landing_set(&self, domain: &SymbolSet, d: u64) -> Result<Option<usize>> {
        let (moved, exact) = domain.translate(d)?;
        for r in 1..=self.size() {
            let b = self.blurred(r)?;
            if moved.difference_is_finite(b)? {
                return Ok(Some(r));
            }
            if !exact && moved.intersect(b)?.is_infinite() {
                return Err(Error::UndecidableAtBound(format!(
                    "cannot place {} + {d} inside B_{r}",
                    domain.describe()
                )));
            }
        }
        Ok(None)
    }

    /// The Σ̂-limit of a family as its parameter runs to infinity.
    pub fn limit_of_family(&self, f: &PointFamily) -> Result<PointHat> {
        let Some((p, d)) = f.first_slot() else {
            return Ok(PointHat::Seq(f.instantiate(&self.shift, 0)?));
        };
        let domain = f.domain(self)?;
        if !domain.is_infinite() {
            return Err(Error::FamilyNotConvergent(format!(
                "parameter set {} is finite",
                domain.describe()
            )));
        }
        for k in domain.first_n(6) {
            f.instantiate(&self.shift, k)?;
        }
        let Some(r) = self.landing_set(&domain, d)? else {
            return Err(Error::FamilyNotConvergent(format!(
                "coordinate {p} does not settle inside a single blurred set"
            )));
        };
        let stem = f.fixed_prefix(p);
        if !self.in_boundary(&stem, r)? {
            return Err(Error::FamilyNotConvergent(format!("({stem}, B_{r}) is not a boundary point")));
        }
        Ok(PointHat::Blur(BlurPoint::new(stem, r)))
    }

    /// A family through the level-0 point `(B_r, …)` along which `σ̂` fails to commute with limits.
    pub fn discontinuity_witness(&self, p: &BlurPoint) -> Result<DiscontinuityWitness> {
        if p.level() > 0 {
            return Err(Error::NoWitnessFound(format!(
                "σ̂ is continuous at the level-{} point {p}",
                p.level()
            )));
        }
        let r = p.r;
        let b = self.blurred(r)?.clone();
        let mut candidates: Vec<PointFamily> = Vec::new();
        // (k, t) with a fixed tail t
        for t in self.small_points(12)? {
            let head = t.prefix(t.preperiod().len() + t.period().len());
            let dom = self.shift.predecessors(&head)?.intersect(&b)?;
            if dom.is_infinite() {
                let mut pre = vec![Slot::Var(0)];
                pre.extend(t.preperiod().iter().map(|&a| Slot::Fixed(a)));
                candidates.push(PointFamily {
                    pre,
                    period: t.period().iter().map(|&a| Slot::Fixed(a)).collect(),
                    r,
                    domain: Some(dom),
                });
            }
        }
        // (k, (k + d)^∞)
        for d in 1..=3 {
            candidates.push(PointFamily {
                pre: vec![Slot::Var(0)],
                period: vec![Slot::Var(d)],
                r,
                domain: None,
            });
        }
        for family in candidates {
            let Ok(limit) = self.limit_of_family(&family) else {
                continue;
            };
            let shifted = family.shifted();
            let Ok(limit_after_shift) = self.limit_of_family(&shifted) else {
                continue;
            };
            let shift_of_limit = limit.shift_hat();
            if shift_of_limit != limit_after_shift {
                return Ok(DiscontinuityWitness {
                    family,
                    limit_of_family: limit,
                    family_after_shift: shifted,
                    limit_after_shift,
                    shift_of_limit,
                });
            }
        }
        Err(Error::NoWitnessFound(format!("no family of the searched shapes converges to {p}")))
    }

    /// Eventually periodic points with small preperiod/period over the first `n` letters.
    fn small_points(&self, n: usize) -> Result<Vec<SequencePoint>> {
        let letters: Vec<Symbol> = self.shift.alphabet().iter().take(n).collect();
        let mut out = BTreeSet::new();
        let words = |len: usize| -> Vec<Vec<Symbol>> {
            let mut ws = vec![Vec::new()];
            for _ in 0..len {
                ws = ws
                    .into_iter()
                    .flat_map(|w: Vec<Symbol>| {
                        letters.iter().map(move |&a| {
                            let mut v = w.clone();
                            v.push(a);
                            v
                        })
                    })
                    .collect();
            }
            ws
        };
        for plen in 1..=2 {
            for prelen in 0..=1 {
                for period in words(plen) {
                    for pre in words(prelen) {
                        if let Ok(x) = SequencePoint::new(&self.shift, pre, period.clone()) {
                            out.insert(x);
                        }
                    }
                }
            }
        }
        // shortest first, then lexicographic
        let mut v: Vec<SequencePoint> = out.into_iter().collect();
        v.sort_by_key(|x| (x.preperiod().len() + x.period().len(), x.clone()));
        Ok(v)
    }

    /// A point of `Σ` inside `Z[w B_r; S]`.
    pub fn density_witness(&self, p: &BlurPoint, exclude: &BTreeSet<Symbol>) -> Result<SequencePoint> {
        let b = self.blurred(p.r)?;
        let options = if p.stem.is_empty() {
            b.intersect(&SymbolSet::from_semilinear(self.shift.alphabet()))?
        } else {
            self.shift.followers1(&p.stem)?.intersect(b)?
        };
        let mut from = 0;
        let a = loop {
            let Some(a) = options.next_at_least(from) else {
                return Err(Error::NoWitnessFound(format!("{p} is not a boundary point")));
            };
            if !exclude.contains(&a) {
                break a;
            }
            from = a + 1;
        };
        extend_to_point(&self.shift, &p.stem.push(a))
    }
}

/// Greedy extension of an allowed word to an eventually periodic point.
pub fn extend_to_point(spec: &dyn ShiftSpec, w: &Word) -> Result<SequencePoint> {
    let mut ctx = spec.context(w.symbols()).ok_or_else(|| Error::WordNotAllowed(w.clone()))?;
    let mut word = w.symbols().to_vec();
    let mut seen: BTreeMap<Vec<Symbol>, usize> = BTreeMap::new();
    let base = w.symbols().iter().copied().max().unwrap_or(0) + 64;
    for _ in 0..10_000 {
        if let Some(&at) = seen.get(&ctx) {
            let (pre, period) = word.split_at(at);
            return SequencePoint::new(spec, pre.to_vec(), period.to_vec());
        }
        seen.insert(ctx.clone(), word.len());
        let mut bound = base;
        let b = loop {
            let (succ, complete) = spec.successors(&ctx, bound);
            if let Some(&b) = succ.first() {
                break b;
            }
            if complete || bound > 1 << 24 {
                return Err(Error::NoWitnessFound(format!("{} has no continuation", Word(word))));
            }
            bound *= 2;
        };
        word.push(b);
        ctx = spec.step(&ctx, b).expect("successor is allowed");
    }
    Err(Error::NoWitnessFound(format!("no periodic continuation of {w} found")))
}

// ---------------------------------------------------------------- families

/// A pattern symbol: fixed, or the family parameter `k` plus an offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Fixed(Symbol),
    Var(u64),
}

impl Serialize for Slot {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Slot::Fixed(a) => s.serialize_u64(*a),
            Slot::Var(0) => s.serialize_str("k"),
            Slot::Var(d) => s.serialize_str(&format!("k+{d}")),
        }
    }
}

impl<'de> Deserialize<'de> for Slot {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(a) => Ok(Slot::Fixed(a)),
            Raw::S(s) => {
                let s = s.replace(' ', "");
                if s == "k" {
                    return Ok(Slot::Var(0));
                }
                s.strip_prefix("k+")
                    .and_then(|t| t.parse().ok())
                    .map(Slot::Var)
                    .ok_or_else(|| serde::de::Error::custom(format!("bad slot `{s}` (expected k or k+d)")))
            }
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Fixed(a) => write!(f, "{a}"),
            Slot::Var(0) => f.write_str("k"),
            Slot::Var(d) => write!(f, "k+{d}"),
        }
    }
}

/// `x^k = pre(k) · period(k)^∞` for `k` in `domain` (default `B_r`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointFamily {
    pub pre: Vec<Slot>,
    pub period: Vec<Slot>,
    pub r: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<SymbolSet>,
}

impl PointFamily {
    pub fn constant(x: &SequencePoint, r: usize) -> Self {
        PointFamily {
            pre: x.preperiod().iter().map(|&a| Slot::Fixed(a)).collect(),
            period: x.period().iter().map(|&a| Slot::Fixed(a)).collect(),
            r,
            domain: None,
        }
    }

    pub fn domain(&self, bs: &BlurShift) -> Result<SymbolSet> {
        match &self.domain {
            Some(d) => Ok(d.clone()),
            None => bs.blurred(self.r).cloned(),
        }
    }

    /// Position and offset of the first parameter occurrence in the expansion.
    pub fn first_slot(&self) -> Option<(usize, u64)> {
        let var = |s: &Slot| match s {
            Slot::Var(d) => Some(*d),
            Slot::Fixed(_) => None,
        };
        if let Some((i, d)) = self.pre.iter().enumerate().find_map(|(i, s)| var(s).map(|d| (i, d))) {
            return Some((i, d));
        }
        self.period
            .iter()
            .enumerate()
            .find_map(|(i, s)| var(s).map(|d| (self.pre.len() + i, d)))
    }

    fn fixed_prefix(&self, p: usize) -> Word {
        let n = self.period.len();
        Word(
            (0..p)
                .map(|i| {
                    let s = if i < self.pre.len() { self.pre[i] } else { self.period[(i - self.pre.len()) % n] };
                    match s {
                        Slot::Fixed(a) => a,
                        Slot::Var(_) => unreachable!("before the first slot"),
                    }
                })
                .collect(),
        )
    }

    pub fn instantiate(&self, spec: &dyn ShiftSpec, k: Symbol) -> Result<SequencePoint> {
        let sub = |s: &Slot| match s {
            Slot::Fixed(a) => *a,
            Slot::Var(d) => k + d,
        };
        SequencePoint::new(
            spec,
            self.pre.iter().map(sub).collect::<Vec<_>>(),
            self.period.iter().map(sub).collect::<Vec<_>>(),
        )
    }

    /// The family `σ(x^k)`.
    pub fn shifted(&self) -> PointFamily {
        let mut f = self.clone();
        if f.pre.is_empty() {
            f.period.rotate_left(1);
        } else {
            f.pre.remove(0);
        }
        f
    }

    /// The first `n` parameter values with their points.
    pub fn sample(&self, bs: &BlurShift, n: usize) -> Result<Vec<(Symbol, SequencePoint)>> {
        if self.first_slot().is_none() {
            return Ok(vec![(0, self.instantiate(&bs.shift, 0)?)]);
        }
        self.domain(bs)?
            .first_n(n)
            .into_iter()
            .map(|k| Ok((k, self.instantiate(&bs.shift, k)?)))
            .collect()
    }
}

impl fmt::Display for PointFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Slot]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
        if !self.pre.is_empty() {
            write!(f, "({}) ", join(&self.pre))?;
        }
        write!(f, "({})^∞", join(&self.period))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscontinuityWitness {
    pub family: PointFamily,
    pub limit_of_family: PointHat,
    pub family_after_shift: PointFamily,
    pub limit_after_shift: PointHat,
    pub shift_of_limit: PointHat,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::Position;
    use crate::semilinear::SemilinearSet;
    use crate::shift::{EvenShift, LambdaShift};

    fn evens_odds() -> Resolution {
        Resolution {
            sets: vec![
                SymbolSet::from_semilinear(SemilinearSet::progression(0, 2).unwrap()),
                SymbolSet::from_semilinear(SemilinearSet::progression(1, 2).unwrap()),
            ],
        }
    }

    fn full_blur() -> BlurShift {
        BlurShift::new(Shift::full(), evens_odds()).unwrap()
    }

    fn lambda_blur() -> BlurShift {
        let l = LambdaShift::standard();
        let v = Resolution {
            sets: vec![l.class_set(2, &[Position::Min]), l.class_set(2, &[Position::Interior, Position::Max])],
        };
        BlurShift::new(Shift::Lambda(l), v).unwrap()
    }

    #[test]
    fn canonical_points() {
        let x = SequencePoint::unchecked(vec![0, 1, 0, 1], vec![0, 1, 0, 1]).unwrap();
        assert_eq!(x, SequencePoint::periodic(vec![0, 1]).unwrap());
        assert_eq!(x.to_string(), "(0,1)^∞");
        let y = SequencePoint::unchecked(vec![5, 2], vec![3, 2]).unwrap();
        assert_eq!(y.preperiod(), &[5]);
        assert_eq!(y.period(), &[2, 3]);
        assert_eq!(x.shift(), SequencePoint::periodic(vec![1, 0]).unwrap());
        assert_eq!(x.orbit().len(), 2);
    }

    #[test]
    fn allowedness_of_points() {
        assert!(SequencePoint::new(&EvenShift, vec![2], vec![3, 3, 2]).is_ok());
        assert!(SequencePoint::new(&EvenShift, vec![2, 3], vec![2]).is_err());
        let l = LambdaShift::standard();
        assert!(SequencePoint::new(&l, vec![], vec![4, 5, 6, 1]).is_ok());
        assert!(SequencePoint::new(&l, vec![], vec![4, 6, 1]).is_err());
    }

    #[test]
    fn resolution_clauses() {
        let full = Shift::full();
        assert!(validate_resolution(&full, &evens_odds()).is_ok());
        let bad = Resolution {
            sets: vec![
                SymbolSet::from_semilinear(SemilinearSet::progression(0, 2).unwrap()),
                SymbolSet::from_semilinear(SemilinearSet::progression(0, 4).unwrap()),
            ],
        };
        match validate_resolution(&full, &bad) {
            Err(Error::InvalidResolution { clause, .. }) => {
                assert_eq!(clause, ResolutionClause::InfiniteIntersection)
            }
            other => panic!("{other:?}"),
        }
        let lam = Shift::Lambda(LambdaShift::standard());
        let ge2 = Resolution {
            sets: vec![SymbolSet::from_semilinear(SemilinearSet::at_least(2))],
        };
        assert!(validate_resolution(&lam, &ge2).is_ok());
    }

    #[test]
    fn cylinder_membership() {
        let bs = full_blur();
        let z = GeneralizedCylinder::blur(vec![0], 1, [4]);
        assert!(bs.cylinder_contains(&z, &BlurPoint::new(vec![0], 1).into()));
        assert!(!bs.cylinder_contains(&z, &BlurPoint::new(vec![0], 2).into()));
        let x = |j| PointHat::Seq(SequencePoint::unchecked(vec![0, j], vec![0]).unwrap());
        assert!(bs.cylinder_contains(&z, &x(2)));
        assert!(!bs.cylinder_contains(&z, &x(4)));
        assert!(!bs.cylinder_contains(&z, &x(3)));
        assert!(bs.cylinder_contains(&GeneralizedCylinder::plain(vec![5]), &BlurPoint::new(vec![5, 7], 1).into()));
        assert!(!bs.cylinder_contains(&GeneralizedCylinder::plain(vec![5, 7]), &BlurPoint::new(vec![5], 1).into()));
    }

    #[test]
    fn level0_absorbs() {
        let p = PointHat::Blur(BlurPoint::new(vec![3, 1, 4], 2));
        let q = p.shift_hat().shift_hat().shift_hat();
        assert_eq!(q, PointHat::Blur(BlurPoint::fixed(2)));
        assert_eq!(q.shift_hat(), q);
    }

    #[test]
    fn lambda_preimage_routes_through_maxima() {
        let bs = lambda_blur();
        let c = GeneralizedCylinder::blur(vec![1], 1, []);
        let pre = bs.preimage_cylinder(&c).unwrap();
        assert!(pre.atoms.is_empty());
        let heads = &pre.families[0].heads;
        assert!(heads.contains(3) && heads.contains(6) && heads.contains(10));
        assert!(!heads.contains(4) && !heads.contains(1));
    }

    #[test]
    fn full_shift_discontinuity() {
        let bs = full_blur();
        let w = bs.discontinuity_witness(&BlurPoint::fixed(1)).unwrap();
        assert_eq!(w.family.to_string(), "(k) (0)^∞");
        assert_eq!(w.limit_of_family, PointHat::Blur(BlurPoint::fixed(1)));
        assert_eq!(w.limit_after_shift, PointHat::Seq(SequencePoint::periodic(vec![0]).unwrap()));
        assert!(bs.discontinuity_witness(&BlurPoint::new(vec![0], 1)).is_err());
    }

    #[test]
    fn lambda_discontinuity_through_minima() {
        let bs = lambda_blur();
        let w = bs.discontinuity_witness(&BlurPoint::fixed(1)).unwrap();
        assert_eq!(w.limit_of_family, PointHat::Blur(BlurPoint::fixed(1)));
        assert_ne!(w.limit_after_shift, w.shift_of_limit);
    }

    #[test]
    fn family_limits() {
        let bs = full_blur();
        let f = PointFamily {
            pre: vec![],
            period: vec![Slot::Fixed(0), Slot::Var(0)],
            r: 1,
            domain: None,
        };
        assert_eq!(bs.limit_of_family(&f).unwrap(), PointHat::Blur(BlurPoint::new(vec![0], 1)));
        let spread = PointFamily {
            domain: Some(SymbolSet::from_semilinear(SemilinearSet::at_least(0))),
            ..f
        };
        assert!(matches!(bs.limit_of_family(&spread), Err(Error::FamilyNotConvergent(_))));
    }

    #[test]
    fn density() {
        let bs = lambda_blur();
        let p = bs.blur_point(vec![1], 1).unwrap();
        let s: BTreeSet<Symbol> = [2, 4].into();
        let x = bs.density_witness(&p, &s).unwrap();
        let c = GeneralizedCylinder::blur(vec![1], 1, s);
        assert!(bs.cylinder_contains(&c, &PointHat::Seq(x)));
    }
}
