//! Countable-alphabet shift spaces presented by decidable language oracles.
//!
//! Every family is driven by a finite-state "context": `step(ctx, b)` decides whether
//! appending `b` keeps the word in the language and returns the new context. Two words
//! with equal contexts have identical futures, which is what makes follower sets and
//! word graphs finite objects.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::classes::{ClassLayout, ClassPositionSet, Position};
use crate::error::{Error, Result};
use crate::semilinear::SemilinearSet;
use crate::symbols::{Symbol, SymbolSet, Word};

pub type Ctx = Vec<u64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Full,
    Markov,
    Even,
    Lambda,
    WindowSft,
}

/// Result of a follower-set computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Followers {
    pub set: SymbolSet,
    /// Only symbols below `bound` were explored; the set may be incomplete.
    pub truncated: bool,
    pub bound: Option<Symbol>,
}

pub trait ShiftSpec {
    fn family(&self) -> Family;

    /// `L_1`.
    fn alphabet(&self) -> SemilinearSet;

    /// Context of the empty word.
    fn start(&self) -> Ctx;

    fn step(&self, ctx: &Ctx, b: Symbol) -> Option<Ctx>;

    /// Exact `F_1(w)` for an allowed `w`.
    fn followers1_exact(&self, w: &Word, ctx: &Ctx) -> SymbolSet;

    /// Exact `P(w)` for an allowed non-empty `w`.
    fn predecessors_exact(&self, w: &Word) -> SymbolSet;

    /// Symbols `b < bound` with `step(ctx, b)` defined, and whether nothing was cut off.
    fn successors(&self, ctx: &Ctx, bound: Symbol) -> (Vec<Symbol>, bool) {
        let alpha = self.alphabet();
        let out = alpha
            .iter()
            .take_while(|&b| b < bound)
            .filter(|&b| self.step(ctx, b).is_some())
            .collect();
        let complete = alpha.iter_from(bound).next().is_none();
        (out, complete)
    }

    /// Family-specific exact `F_m(w)`, when available.
    fn followers_exact(&self, _w: &Word, _m: usize) -> Option<Result<SymbolSet>> {
        None
    }

    /// Symbols of the truncation at level `k` (first `k` symbols, or classes `≤ k` for Λ).
    fn truncated_alphabet(&self, k: u64) -> Vec<Symbol> {
        self.alphabet().iter().take(k as usize).collect()
    }

    fn lambda(&self) -> Option<&LambdaShift> {
        None
    }

    /// The hub of a star shift.
    fn star_hub(&self) -> Option<Symbol> {
        None
    }

    fn context(&self, w: &[Symbol]) -> Option<Ctx> {
        let mut ctx = self.start();
        for &b in w {
            ctx = self.step(&ctx, b)?;
        }
        Some(ctx)
    }

    fn allowed(&self, w: &[Symbol]) -> bool {
        self.context(w).is_some()
    }

    fn followers1(&self, w: &Word) -> Result<SymbolSet> {
        let ctx = self
            .context(w.symbols())
            .ok_or_else(|| Error::WordNotAllowed(w.clone()))?;
        Ok(self.followers1_exact(w, &ctx))
    }

    fn predecessors(&self, w: &Word) -> Result<SymbolSet> {
        if !self.allowed(w.symbols()) {
            return Err(Error::WordNotAllowed(w.clone()));
        }
        if w.is_empty() {
            return Ok(SymbolSet::from_semilinear(self.alphabet()));
        }
        Ok(self.predecessors_exact(w))
    }

    /// `F_m(w)`: exact when the family supports it, otherwise explored below `bound`.
    fn followers(&self, w: &Word, m: usize, bound: Symbol) -> Result<Followers> {
        if m == 0 {
            return Err(Error::InvalidInput("follower depth m must be ≥ 1".into()));
        }
        let ctx = self
            .context(w.symbols())
            .ok_or_else(|| Error::WordNotAllowed(w.clone()))?;
        if m == 1 {
            return Ok(Followers {
                set: self.followers1_exact(w, &ctx),
                truncated: false,
                bound: None,
            });
        }
        if let Some(exact) = self.followers_exact(w, m) {
            return Ok(Followers {
                set: exact?,
                truncated: false,
                bound: None,
            });
        }
        let mut frontier: HashSet<Ctx> = HashSet::from([ctx]);
        let mut complete = true;
        let mut last = BTreeSet::new();
        for step in 1..=m {
            let mut next = HashSet::new();
            for c in &frontier {
                let (succ, done) = self.successors(c, bound);
                complete &= done;
                for b in succ {
                    if step == m {
                        last.insert(b);
                    } else if let Some(n) = self.step(c, b) {
                        next.insert(n);
                    }
                }
            }
            frontier = next;
        }
        Ok(Followers {
            set: SymbolSet::Finite(last),
            truncated: !complete,
            bound: (!complete).then_some(bound),
        })
    }

    fn finite_alphabet(&self) -> bool {
        self.alphabet().is_finite()
    }
}

// ---------------------------------------------------------------- full shift

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullShift {
    #[serde(default = "natural_numbers")]
    pub alphabet: SemilinearSet,
}

fn natural_numbers() -> SemilinearSet {
    SemilinearSet::at_least(0)
}

impl Default for FullShift {
    fn default() -> Self {
        FullShift {
            alphabet: natural_numbers(),
        }
    }
}

impl ShiftSpec for FullShift {
    fn family(&self) -> Family {
        Family::Full
    }
    fn alphabet(&self) -> SemilinearSet {
        self.alphabet.clone()
    }
    fn start(&self) -> Ctx {
        Vec::new()
    }
    fn step(&self, ctx: &Ctx, b: Symbol) -> Option<Ctx> {
        self.alphabet.contains(b).then(|| ctx.clone())
    }
    fn followers1_exact(&self, _w: &Word, _ctx: &Ctx) -> SymbolSet {
        SymbolSet::from_semilinear(self.alphabet.clone())
    }
    fn predecessors_exact(&self, _w: &Word) -> SymbolSet {
        SymbolSet::from_semilinear(self.alphabet.clone())
    }
    fn followers_exact(&self, _w: &Word, _m: usize) -> Option<Result<SymbolSet>> {
        Some(Ok(SymbolSet::from_semilinear(self.alphabet.clone())))
    }
}

// ---------------------------------------------------------------- Markov shifts

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarkovRows {
    /// `i → j` allowed iff `|i − j| ≤ width`, over ℕ.
    Banded { width: u64 },
    /// Finite alphabet `rows.keys()`; row `i` is the follower set of `i`.
    Explicit { rows: BTreeMap<Symbol, SemilinearSet> },
    /// Over ℕ: `hub → b` for every `b ≠ hub`, and `b → hub`.
    Star { hub: Symbol },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MarkovRows", into = "MarkovRows")]
pub struct MarkovShift {
    rows: MarkovRows,
}

impl TryFrom<MarkovRows> for MarkovShift {
    type Error = Error;
    fn try_from(rows: MarkovRows) -> Result<Self> {
        MarkovShift::new(rows)
    }
}

impl From<MarkovShift> for MarkovRows {
    fn from(m: MarkovShift) -> Self {
        m.rows
    }
}

impl MarkovShift {
    pub fn new(rows: MarkovRows) -> Result<Self> {
        if let MarkovRows::Explicit { rows } = &rows {
            if rows.is_empty() {
                return Err(Error::InvalidInput("Markov shift with no rows".into()));
            }
            let keys = SemilinearSet::finite(rows.keys().copied());
            for (i, row) in rows {
                let inside = row.intersection(&keys)?;
                if inside.finite_elements().is_none_or(|s| s.is_empty()) {
                    return Err(Error::InvalidInput(format!(
                        "row {i} must be a non-empty subset of the alphabet"
                    )));
                }
                if !row.is_subset(&keys)? {
                    return Err(Error::InvalidInput(format!(
                        "row {i} leaves the alphabet {keys}"
                    )));
                }
            }
        }
        Ok(MarkovShift { rows })
    }

    pub fn banded(width: u64) -> Self {
        MarkovShift {
            rows: MarkovRows::Banded { width },
        }
    }

    pub fn rows(&self) -> &MarkovRows {
        &self.rows
    }

    fn edge(&self, a: Symbol, b: Symbol) -> bool {
        match &self.rows {
            MarkovRows::Banded { width } => a.abs_diff(b) <= *width,
            MarkovRows::Explicit { rows } => rows.get(&a).is_some_and(|r| r.contains(b)),
            MarkovRows::Star { hub } => (a == *hub) != (b == *hub),
        }
    }

    fn spokes(hub: Symbol) -> SymbolSet {
        SymbolSet::from_semilinear(natural_numbers().difference(&SemilinearSet::finite([hub])).expect("cofinite"))
    }

    fn row(&self, a: Symbol) -> SymbolSet {
        match &self.rows {
            MarkovRows::Banded { width } => {
                SymbolSet::finite(a.saturating_sub(*width)..=a + width)
            }
            MarkovRows::Explicit { rows } => SymbolSet::from_semilinear(rows[&a].clone()),
            MarkovRows::Star { hub } if a == *hub => MarkovShift::spokes(*hub),
            MarkovRows::Star { hub } => SymbolSet::finite([*hub]),
        }
    }

    pub fn hub(&self) -> Option<Symbol> {
        match self.rows {
            MarkovRows::Star { hub } => Some(hub),
            _ => None,
        }
    }
}

impl ShiftSpec for MarkovShift {
    fn family(&self) -> Family {
        Family::Markov
    }
    fn alphabet(&self) -> SemilinearSet {
        match &self.rows {
            MarkovRows::Banded { .. } | MarkovRows::Star { .. } => natural_numbers(),
            MarkovRows::Explicit { rows } => SemilinearSet::finite(rows.keys().copied()),
        }
    }
    fn start(&self) -> Ctx {
        Vec::new()
    }
    fn step(&self, ctx: &Ctx, b: Symbol) -> Option<Ctx> {
        let ok = match ctx.first() {
            None => self.alphabet().contains(b),
            Some(&a) => self.edge(a, b),
        };
        ok.then(|| vec![b])
    }
    fn successors(&self, ctx: &Ctx, bound: Symbol) -> (Vec<Symbol>, bool) {
        match (ctx.first(), &self.rows) {
            (Some(&a), MarkovRows::Banded { width }) => {
                let hi = a + width;
                let out = (a.saturating_sub(*width)..=hi.min(bound.saturating_sub(1))).collect();
                (out, hi < bound)
            }
            _ => {
                let alpha = self.alphabet();
                let out = alpha
                    .iter()
                    .take_while(|&b| b < bound)
                    .filter(|&b| self.step(ctx, b).is_some())
                    .collect();
                let complete = alpha.iter_from(bound).next().is_none();
                (out, complete)
            }
        }
    }
    fn followers1_exact(&self, w: &Word, _ctx: &Ctx) -> SymbolSet {
        match w.last() {
            None => SymbolSet::from_semilinear(self.alphabet()),
            Some(a) => self.row(a),
        }
    }
    fn predecessors_exact(&self, w: &Word) -> SymbolSet {
        let b = w.first().expect("non-empty word");
        match &self.rows {
            MarkovRows::Banded { width } => SymbolSet::finite(b.saturating_sub(*width)..=b + width),
            MarkovRows::Explicit { rows } => {
                SymbolSet::finite(rows.iter().filter(|(_, r)| r.contains(b)).map(|(a, _)| *a))
            }
            MarkovRows::Star { .. } => self.row(b),
        }
    }
    fn followers_exact(&self, w: &Word, m: usize) -> Option<Result<SymbolSet>> {
        match &self.rows {
            MarkovRows::Banded { width } => {
                let reach = width * m as u64;
                Some(Ok(match w.last() {
                    None => SymbolSet::from_semilinear(natural_numbers()),
                    Some(a) => SymbolSet::finite(a.saturating_sub(reach)..=a + reach),
                }))
            }
            MarkovRows::Star { hub } => Some(Ok(match w.last() {
                None => SymbolSet::from_semilinear(natural_numbers()),
                Some(a) if (a == *hub) == (m % 2 == 1) => MarkovShift::spokes(*hub),
                Some(_) => SymbolSet::finite([*hub]),
            })),
            MarkovRows::Explicit { .. } => None,
        }
    }
    fn star_hub(&self) -> Option<Symbol> {
        self.hub()
    }
}

// ---------------------------------------------------------------- even shift

/// The even shift relabelled on `{2, 3}`: between two 2s, runs of 3 have even length.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvenShift;

/// Automaton states: no 2 seen yet, even run of 3s after a 2, odd run of 3s after a 2.
pub(crate) fn even_step(state: u64, b: Symbol) -> Option<u64> {
    match (state, b) {
        (0, 3) => Some(0),
        (0, 2) | (1, 2) => Some(1),
        (1, 3) => Some(2),
        (2, 3) => Some(1),
        _ => None,
    }
}

impl ShiftSpec for EvenShift {
    fn family(&self) -> Family {
        Family::Even
    }
    fn alphabet(&self) -> SemilinearSet {
        SemilinearSet::finite([2, 3])
    }
    fn start(&self) -> Ctx {
        vec![0]
    }
    fn step(&self, ctx: &Ctx, b: Symbol) -> Option<Ctx> {
        even_step(ctx[0], b).map(|s| vec![s])
    }
    fn followers1_exact(&self, _w: &Word, ctx: &Ctx) -> SymbolSet {
        SymbolSet::finite([2, 3].into_iter().filter(|&b| self.step(ctx, b).is_some()))
    }
    fn predecessors_exact(&self, w: &Word) -> SymbolSet {
        SymbolSet::finite([2, 3].into_iter().filter(|&a| self.allowed(w.prepend(a).symbols())))
    }
}

// ---------------------------------------------------------------- window SFTs

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftConfig {
    pub alphabet: BTreeSet<Symbol>,
    pub forbidden: Vec<Word>,
}

/// Finite-alphabet shift of finite type, pruned to words that extend to infinite points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SftConfig", into = "SftConfig")]
pub struct SftShift {
    config: SftConfig,
    window: usize,
    kept: BTreeSet<Vec<Symbol>>,
    prefixes: BTreeSet<Vec<Symbol>>,
}

const MAX_SFT_WINDOWS: usize = 200_000;

impl TryFrom<SftConfig> for SftShift {
    type Error = Error;
    fn try_from(c: SftConfig) -> Result<Self> {
        SftShift::new(c)
    }
}

impl From<SftShift> for SftConfig {
    fn from(s: SftShift) -> Self {
        s.config
    }
}

impl SftShift {
    pub fn new(config: SftConfig) -> Result<Self> {
        if config.alphabet.is_empty() {
            return Err(Error::InvalidInput("SFT alphabet is empty".into()));
        }
        if config.forbidden.iter().any(|f| f.is_empty()) {
            return Err(Error::InvalidInput("the empty word cannot be forbidden".into()));
        }
        let window = config
            .forbidden
            .iter()
            .map(|f| f.len())
            .max()
            .unwrap_or(1)
            .saturating_sub(1)
            .max(1);
        let n = config.alphabet.len();
        if (n as f64).powi(window as i32) > MAX_SFT_WINDOWS as f64 {
            return Err(Error::InvalidInput(format!(
                "SFT window space {n}^{window} exceeds {MAX_SFT_WINDOWS}"
            )));
        }
        let symbols: Vec<Symbol> = config.alphabet.iter().copied().collect();
        let has_forbidden_suffix = |v: &[Symbol]| {
            config
                .forbidden
                .iter()
                .any(|f| v.len() >= f.len() && v.ends_with(f.symbols()))
        };
        let mut words: Vec<Vec<Symbol>> = vec![Vec::new()];
        for _ in 0..window {
            let mut next = Vec::new();
            for w in &words {
                for &b in &symbols {
                    let mut v = w.clone();
                    v.push(b);
                    if !has_forbidden_suffix(&v) {
                        next.push(v);
                    }
                }
            }
            words = next;
        }
        let mut kept: BTreeSet<Vec<Symbol>> = words.into_iter().collect();
        loop {
            let before = kept.len();
            let snapshot = kept.clone();
            kept.retain(|w| {
                symbols.iter().any(|&b| {
                    let mut v = w.clone();
                    v.push(b);
                    !has_forbidden_suffix(&v) && snapshot.contains(&v[1..])
                })
            });
            if kept.len() == before {
                break;
            }
        }
        if kept.is_empty() {
            return Err(Error::EmptyTruncation);
        }
        let prefixes = kept
            .iter()
            .flat_map(|w| (0..=w.len()).map(move |i| w[..i].to_vec()))
            .collect();
        Ok(SftShift {
            config,
            window,
            kept,
            prefixes,
        })
    }

    fn forbidden_suffix(&self, v: &[Symbol]) -> bool {
        self.config
            .forbidden
            .iter()
            .any(|f| v.len() >= f.len() && v.ends_with(f.symbols()))
    }
}

impl ShiftSpec for SftShift {
    fn family(&self) -> Family {
        Family::WindowSft
    }
    fn alphabet(&self) -> SemilinearSet {
        SemilinearSet::finite(
            self.config
                .alphabet
                .iter()
                .copied()
                .filter(|&b| self.prefixes.contains(&vec![b])),
        )
    }
    fn start(&self) -> Ctx {
        Vec::new()
    }
    fn step(&self, ctx: &Ctx, b: Symbol) -> Option<Ctx> {
        let mut v = ctx.clone();
        v.push(b);
        if self.forbidden_suffix(&v) {
            return None;
        }
        if v.len() > self.window {
            v.remove(0);
        }
        let ok = if v.len() == self.window {
            self.kept.contains(&v)
        } else {
            self.prefixes.contains(&v)
        };
        ok.then_some(v)
    }
    fn followers1_exact(&self, _w: &Word, ctx: &Ctx) -> SymbolSet {
        SymbolSet::finite(
            self.config
                .alphabet
                .iter()
                .copied()
                .filter(|&b| self.step(ctx, b).is_some()),
        )
    }
    fn predecessors_exact(&self, w: &Word) -> SymbolSet {
        SymbolSet::finite(
            self.config
                .alphabet
                .iter()
                .copied()
                .filter(|&a| self.allowed(w.prepend(a).symbols())),
        )
    }
}

// ---------------------------------------------------------------- Λ

/// How class sizes grow; only affine rules `|Z_k| = 2 + a(k−2)` are shipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClassSizeRule {
    Named(String),
    Affine { slope: u64 },
}

impl ClassSizeRule {
    pub fn layout(&self) -> Result<ClassLayout> {
        match self {
            ClassSizeRule::Named(s) if s.trim() == "k" => Ok(ClassLayout::identity()),
            ClassSizeRule::Named(s) => Err(Error::InvalidClassRule(format!(
                "unknown class-size rule `{s}` (expected \"k\" or {{\"slope\": a}})"
            ))),
            ClassSizeRule::Affine { slope } => ClassLayout::new(*slope),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaConfig {
    pub class_sizes: ClassSizeRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_class: Option<u64>,
}

/// The non-Markovian shift Λ over `ℤ₊`, defined by its language:
/// `1 → min Z_k`, `max Z_k → 1`, otherwise transitions stay inside a class;
/// `Z_2` carries the even shift and, in `Z_k` for `k > 2`, a word from `min Z_k`
/// to `max Z_k` needs length at least `|Z_k|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LambdaConfig", into = "LambdaConfig")]
pub struct LambdaShift {
    rule: ClassSizeRule,
    layout: ClassLayout,
    max_class: Option<u64>,
}

impl TryFrom<LambdaConfig> for LambdaShift {
    type Error = Error;
    fn try_from(c: LambdaConfig) -> Result<Self> {
        let layout = c.class_sizes.layout()?;
        if c.max_class.is_some_and(|k| k < 2) {
            return Err(Error::InvalidClassRule("max_class must be ≥ 2".into()));
        }
        Ok(LambdaShift {
            rule: c.class_sizes,
            layout,
            max_class: c.max_class,
        })
    }
}

impl From<LambdaShift> for LambdaConfig {
    fn from(l: LambdaShift) -> Self {
        LambdaConfig {
            class_sizes: l.rule,
            max_class: l.max_class,
        }
    }
}

impl LambdaShift {
    pub fn new(layout: ClassLayout, max_class: Option<u64>) -> Self {
        let rule = if layout.slope() == 1 {
            ClassSizeRule::Named("k".into())
        } else {
            ClassSizeRule::Affine {
                slope: layout.slope(),
            }
        };
        LambdaShift {
            rule,
            layout,
            max_class,
        }
    }

    /// `|Z_k| = k`, all classes.
    pub fn standard() -> Self {
        LambdaShift::new(ClassLayout::identity(), None)
    }

    pub fn layout(&self) -> ClassLayout {
        self.layout
    }

    pub fn max_class(&self) -> Option<u64> {
        self.max_class
    }

    pub fn with_max_class(&self, k: u64) -> LambdaShift {
        LambdaShift {
            max_class: Some(k),
            ..self.clone()
        }
    }

    pub fn class_of(&self, x: Symbol) -> Option<u64> {
        self.layout.class_of(x)
    }

    pub fn in_alphabet(&self, x: Symbol) -> bool {
        match self.layout.class_of(x) {
            Some(k) => self.max_class.is_none_or(|m| k <= m),
            None => false,
        }
    }

    /// Class-structured set clipped to `max_class`.
    pub fn class_set(&self, from: u64, positions: &[Position]) -> SymbolSet {
        match self.max_class {
            None => SymbolSet::Classes(ClassPositionSet::new(self.layout, from, positions)),
            Some(kmax) => {
                let set = ClassPositionSet::new(self.layout, from, positions);
                SymbolSet::Finite(set.elements_below(self.layout.last(kmax) + 1))
            }
        }
    }

    /// Number of occurrences of 1; finite words always satisfy the finiteness condition,
    /// periodic points violate it whenever their period contains 1.
    pub fn ones(w: &[Symbol]) -> usize {
        w.iter().filter(|&&x| x == 1).count()
    }

    fn run_step(&self, k: u64, aux: u64, b: Symbol) -> Option<u64> {
        let size = self.layout.size(k);
        if k == 2 {
            return even_step(aux, b);
        }
        let is_min = b == self.layout.first(k);
        let is_max = b == self.layout.last(k);
        if is_min {
            return Some(1);
        }
        if aux == 0 {
            return Some(0);
        }
        let d = aux; // distance from the last min to b
        if is_max && d + 1 < size {
            return None;
        }
        Some(1 + d.min(size))
    }

    fn enter(&self, b: Symbol) -> Option<Ctx> {
        let k = self.class_of(b)?;
        if k == 1 {
            return Some(vec![1, 0]);
        }
        let aux = if k == 2 {
            even_step(0, b)?
        } else if b == self.layout.first(k) {
            1
        } else {
            0
        };
        Some(vec![b, aux])
    }
}

impl ShiftSpec for LambdaShift {
    fn family(&self) -> Family {
        Family::Lambda
    }

    fn alphabet(&self) -> SemilinearSet {
        match self.max_class {
            None => SemilinearSet::at_least(1),
            Some(k) => SemilinearSet::finite(1..=self.layout.last(k)),
        }
    }

    fn start(&self) -> Ctx {
        Vec::new()
    }

    fn step(&self, ctx: &Ctx, b: Symbol) -> Option<Ctx> {
        if !self.in_alphabet(b) {
            return None;
        }
        let Some(&last) = ctx.first() else {
            return self.enter(b);
        };
        if last == 1 {
            return if b != 1 && self.layout.is_min(b) {
                self.enter(b)
            } else {
                None
            };
        }
        if b == 1 {
            return self.layout.is_max(last).then(|| vec![1, 0]);
        }
        let k = self.class_of(last)?;
        if self.class_of(b)? != k {
            return None;
        }
        self.run_step(k, ctx[1], b).map(|aux| vec![b, aux])
    }

    fn successors(&self, ctx: &Ctx, bound: Symbol) -> (Vec<Symbol>, bool) {
        let candidates: Vec<Symbol> = match ctx.first() {
            None => {
                let alpha = self.alphabet();
                let out = alpha.iter().take_while(|&b| b < bound).collect();
                let complete = alpha.iter_from(bound).next().is_none();
                return (out, complete);
            }
            Some(&1) => {
                let mins = self.class_set(2, &[Position::Min]);
                let out = mins.elements_below(bound).into_iter().collect();
                let complete = mins.next_at_least(bound).is_none();
                return (out, complete);
            }
            Some(&last) => {
                let k = self.class_of(last).expect("context symbol is in the alphabet");
                self.layout.class_members(k).chain([1]).collect()
            }
        };
        let complete = candidates.iter().all(|&b| b < bound);
        let out = candidates
            .into_iter()
            .filter(|&b| b < bound && self.step(ctx, b).is_some())
            .collect();
        (out, complete)
    }

    fn followers1_exact(&self, _w: &Word, ctx: &Ctx) -> SymbolSet {
        match ctx.first() {
            None => SymbolSet::from_semilinear(self.alphabet()),
            Some(&1) => self.class_set(2, &[Position::Min]),
            Some(&last) => {
                let k = self.class_of(last).expect("context symbol is in the alphabet");
                SymbolSet::finite(
                    self.layout
                        .class_members(k)
                        .chain([1])
                        .filter(|&b| self.step(ctx, b).is_some()),
                )
            }
        }
    }

    fn predecessors_exact(&self, w: &Word) -> SymbolSet {
        let b = w.first().expect("non-empty word");
        if b == 1 {
            return self.class_set(2, &[Position::Max]);
        }
        let k = self.class_of(b).expect("allowed symbols have a class");
        SymbolSet::finite(
            self.layout
                .class_members(k)
                .chain([1])
                .filter(|&a| self.allowed(w.prepend(a).symbols())),
        )
    }

    /// Classes too large to be crossed within `m` steps are handled structurally:
    /// entered at their minimum, they can only reach non-maximal symbols.
    fn followers_exact(&self, w: &Word, m: usize) -> Option<Result<SymbolSet>> {
        let ctx = self.context(w.symbols())?;
        if w.is_empty() {
            return Some(Ok(SymbolSet::from_semilinear(self.alphabet())));
        }
        let last = ctx[0];
        let k_last = self.class_of(last).expect("alphabet symbol");
        let mut k_small = 2;
        while self.layout.size(k_small + 1) <= m as u64 + 1 {
            k_small += 1;
        }
        let mut kt = k_small.max(k_last);
        if let Some(kmax) = self.max_class {
            kt = kt.min(kmax);
        }
        let bound = self.layout.last(kt) + 1;
        let mut frontier: HashSet<Ctx> = HashSet::from([ctx]);
        let mut one_steps = BTreeSet::new();
        let mut last_symbols = BTreeSet::new();
        for step in 1..=m {
            let mut next = HashSet::new();
            for c in &frontier {
                let (succ, _) = self.successors(c, bound);
                for b in succ {
                    if step == m {
                        last_symbols.insert(b);
                    }
                    if b == 1 {
                        one_steps.insert(step);
                    }
                    if let Some(n) = self.step(c, b) {
                        next.insert(n);
                    }
                }
            }
            frontier = next;
        }
        let bigger_exist = self.max_class.is_none_or(|kmax| kmax > kt);
        let mut set = SymbolSet::Finite(last_symbols);
        if bigger_exist {
            let positions: &[Position] = if one_steps.iter().any(|&t| t + 2 <= m) {
                &[Position::Min, Position::Interior]
            } else if one_steps.contains(&(m - 1)) {
                &[Position::Min]
            } else {
                &[]
            };
            if !positions.is_empty() {
                let structural = match self.max_class {
                    None => SymbolSet::Classes(ClassPositionSet::new(self.layout, kt + 1, positions)),
                    Some(kmax) => SymbolSet::Finite(
                        ClassPositionSet::new(self.layout, kt + 1, positions)
                            .elements_below(self.layout.last(kmax) + 1),
                    ),
                };
                set = match set.union(&structural) {
                    Ok(s) => s,
                    Err(e) => return Some(Err(e)),
                };
            }
        }
        Some(Ok(set))
    }

    fn truncated_alphabet(&self, k: u64) -> Vec<Symbol> {
        let k = self.max_class.map_or(k, |m| m.min(k));
        (1..=self.layout.last(k.max(1))).collect()
    }

    fn lambda(&self) -> Option<&LambdaShift> {
        Some(self)
    }
}

// ---------------------------------------------------------------- dispatch

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Shift {
    Full(FullShift),
    Markov(MarkovShift),
    Even(EvenShift),
    #[serde(rename = "sft")]
    Sft(SftShift),
    Lambda(LambdaShift),
}

impl Shift {
    pub fn spec(&self) -> &dyn ShiftSpec {
        match self {
            Shift::Full(s) => s,
            Shift::Markov(s) => s,
            Shift::Even(s) => s,
            Shift::Sft(s) => s,
            Shift::Lambda(s) => s,
        }
    }

    pub fn full() -> Self {
        Shift::Full(FullShift::default())
    }
}

impl ShiftSpec for Shift {
    fn family(&self) -> Family {
        self.spec().family()
    }
    fn alphabet(&self) -> SemilinearSet {
        self.spec().alphabet()
    }
    fn start(&self) -> Ctx {
        self.spec().start()
    }
    fn step(&self, ctx: &Ctx, b: Symbol) -> Option<Ctx> {
        self.spec().step(ctx, b)
    }
    fn followers1_exact(&self, w: &Word, ctx: &Ctx) -> SymbolSet {
        self.spec().followers1_exact(w, ctx)
    }
    fn predecessors_exact(&self, w: &Word) -> SymbolSet {
        self.spec().predecessors_exact(w)
    }
    fn successors(&self, ctx: &Ctx, bound: Symbol) -> (Vec<Symbol>, bool) {
        self.spec().successors(ctx, bound)
    }
    fn followers_exact(&self, w: &Word, m: usize) -> Option<Result<SymbolSet>> {
        self.spec().followers_exact(w, m)
    }
    fn truncated_alphabet(&self, k: u64) -> Vec<Symbol> {
        self.spec().truncated_alphabet(k)
    }
    fn lambda(&self) -> Option<&LambdaShift> {
        self.spec().lambda()
    }
    fn star_hub(&self) -> Option<Symbol> {
        self.spec().star_hub()
    }
}

// ---------------------------------------------------------------- FCPA

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FcpaCertificate {
    /// Every set is finite because the alphabet is.
    FiniteAlphabet,
    /// `P(a)` itself is finite.
    FinitePredecessors,
    /// Λ with `a = 1`: reaching `max Z_k` from 1 in `m` steps forces `|Z_k| ≤ m`.
    ClassWindow,
    /// Finite for each checked `m` only.
    CheckedUpTo,
    /// Some `P(a) ∩ F_m(a)` is infinite.
    Fails,
}

#[derive(Debug, Clone, Serialize)]
pub struct FcpaReport {
    pub symbol: Symbol,
    pub per_m: Vec<(usize, SymbolSet)>,
    pub all_finite: bool,
    pub certificate: FcpaCertificate,
}

pub fn check_fcpa(spec: &dyn ShiftSpec, a: Symbol, m_max: usize, bound: Symbol) -> Result<FcpaReport> {
    let w = Word(vec![a]);
    let preds = spec.predecessors(&w)?;
    let mut per_m = Vec::new();
    let mut all_finite = true;
    for m in 1..=m_max {
        let f = spec.followers(&w, m, bound)?;
        if f.truncated && preds.is_infinite() {
            return Err(Error::TruncationInsufficient(format!(
                "F_{m}({a}) explored only below {bound}"
            )));
        }
        let inter = preds.intersect(&f.set)?;
        if f.truncated && !inter.is_infinite() {
            // A truncated follower set is a lower bound; finite predecessors keep the answer exact
            // only if every predecessor lies below the bound.
            let p = preds.as_finite().expect("finite predecessors");
            if p.iter().any(|&x| x >= bound) {
                return Err(Error::TruncationInsufficient(format!(
                    "predecessors of {a} exceed the exploration bound {bound}"
                )));
            }
        }
        all_finite &= !inter.is_infinite();
        per_m.push((m, inter));
    }
    let certificate = if !all_finite {
        FcpaCertificate::Fails
    } else if spec.finite_alphabet() {
        FcpaCertificate::FiniteAlphabet
    } else if !preds.is_infinite() {
        FcpaCertificate::FinitePredecessors
    } else if spec.lambda().is_some() && a == 1 {
        FcpaCertificate::ClassWindow
    } else {
        FcpaCertificate::CheckedUpTo
    };
    Ok(FcpaReport {
        symbol: a,
        per_m,
        all_finite,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_shift_allows_everything() {
        let s = Shift::full();
        assert!(s.allowed(&[5, 0, 7]));
        assert!(s.allowed(&[]));
    }

    #[test]
    fn even_shift_parity() {
        let e = EvenShift;
        assert!(!e.allowed(&[2, 3, 2]));
        assert!(e.allowed(&[2, 3, 3, 2]));
        assert!(e.allowed(&[3, 2]));
        assert_eq!(e.followers1(&Word(vec![3])).unwrap(), SymbolSet::finite([2, 3]));
        assert_eq!(e.followers1(&Word(vec![2, 3])).unwrap(), SymbolSet::finite([3]));
    }

    #[test]
    fn lambda_basic_words() {
        let l = LambdaShift::standard();
        assert!(!l.allowed(&[1, 4, 1]));
        assert!(l.allowed(&[2, 2, 3]));
        assert!(!l.allowed(&[4, 6]));
        assert!(l.allowed(&[4, 5, 6]));
        assert!(l.allowed(&[1, 4, 5, 6, 1, 2]));
        assert!(!l.allowed(&[1, 1]));
        assert!(!l.allowed(&[3, 4]));
        assert!(l.allowed(&[6, 1, 7]));
    }

    #[test]
    fn lambda_follower_and_predecessor_sets() {
        let l = LambdaShift::standard();
        let f = l.followers1(&Word(vec![1])).unwrap();
        assert_eq!(f.first_n(4), vec![2, 4, 7, 11]);
        let p = l.predecessors(&Word(vec![1])).unwrap();
        assert_eq!(p.first_n(4), vec![3, 6, 10, 15]);
        let p5 = l.predecessors(&Word(vec![5])).unwrap();
        assert_eq!(p5, SymbolSet::finite([4, 5, 6]));
        let p4 = l.predecessors(&Word(vec![4])).unwrap();
        assert_eq!(p4, SymbolSet::finite([1, 4, 5, 6]));
    }

    #[test]
    fn sft_prunes_dead_ends() {
        // 0 can only be followed by 1, and 1 cannot be followed by anything: both die.
        let s = SftShift::new(SftConfig {
            alphabet: [0, 1, 2].into_iter().collect(),
            forbidden: vec![Word(vec![0, 0]), Word(vec![0, 2]), Word(vec![1, 0]), Word(vec![1, 1]), Word(vec![1, 2])],
        })
        .unwrap();
        assert!(!s.allowed(&[0]));
        assert!(!s.allowed(&[1]));
        assert!(s.allowed(&[2, 2]));
        assert!(!s.allowed(&[2, 0]));
    }

    #[test]
    fn banded_fcpa() {
        let m = MarkovShift::banded(2);
        let r = check_fcpa(&m, 0, 4, 1000).unwrap();
        assert!(r.all_finite);
        for (_, s) in &r.per_m {
            assert!(s.as_finite().unwrap().iter().all(|&x| x <= 2));
        }
    }

    #[test]
    fn full_shift_fails_fcpa() {
        let r = check_fcpa(&FullShift::default(), 0, 1, 100).unwrap();
        assert!(!r.all_finite);
        assert_eq!(r.certificate, FcpaCertificate::Fails);
    }
}
