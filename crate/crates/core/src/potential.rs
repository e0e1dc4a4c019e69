//! Exact potentials, their cylinder suprema and the minimal u.s.c. extension `Â`.

use std::collections::{BTreeMap, BTreeSet};

use num::integer::lcm;
use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::blur::{BlurPoint, BlurShift, PointHat, SequencePoint};
use crate::error::{Error, Result};
use crate::semilinear::SemilinearSet;
use crate::shift::ShiftSpec;
use crate::symbols::{Symbol, SymbolSet, Word};
use crate::value::{dyadic, int, rational_map, rational_str, ExtendedValue, Rational};

// ------------------------------------------------------------------ tails

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailArg {
    #[default]
    Symbol,
    /// The Λ class index of the symbol.
    Class,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum TailShape {
    Constant {
        #[serde(with = "rational_str")]
        c: Rational,
    },
    /// `c − s·n`, `s ≥ 0`.
    Affine {
        #[serde(with = "rational_str")]
        c: Rational,
        #[serde(with = "rational_str")]
        s: Rational,
    },
    /// `c + s/(n + shift)`.
    Reciprocal {
        #[serde(with = "rational_str")]
        c: Rational,
        #[serde(with = "rational_str")]
        s: Rational,
        #[serde(default)]
        shift: u64,
    },
    /// `c − ⌊log₂(n+1)⌋`.
    Staircase {
        #[serde(with = "rational_str")]
        c: Rational,
    },
}

/// Values `shape(n)` with `n` the symbol or its class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailRule {
    #[serde(default)]
    pub arg: TailArg,
    #[serde(flatten)]
    pub shape: TailShape,
}

fn floor_log2(n: u64) -> u64 {
    63 - n.leading_zeros() as u64
}

impl TailRule {
    pub fn constant(c: Rational) -> Self {
        TailRule {
            arg: TailArg::Symbol,
            shape: TailShape::Constant { c },
        }
    }

    pub fn on_classes(shape: TailShape) -> Self {
        TailRule {
            arg: TailArg::Class,
            shape,
        }
    }

    pub fn on_symbols(shape: TailShape) -> Self {
        TailRule {
            arg: TailArg::Symbol,
            shape,
        }
    }

    pub fn arg_of(&self, spec: &dyn ShiftSpec, a: Symbol) -> Result<u64> {
        match self.arg {
            TailArg::Symbol => Ok(a),
            TailArg::Class => spec
                .lambda()
                .and_then(|l| l.class_of(a))
                .ok_or_else(|| Error::TailRuleMissing(format!("no class index for symbol {a}"))),
        }
    }

    pub fn shape_value(&self, n: u64) -> Rational {
        match &self.shape {
            TailShape::Constant { c } => c.clone(),
            TailShape::Affine { c, s } => c - s * int(n as i64),
            TailShape::Reciprocal { c, s, shift } => {
                c + s / Rational::from_integer(BigInt::from(n + shift))
            }
            TailShape::Staircase { c } => c - int(floor_log2(n + 1) as i64),
        }
    }

    pub fn value(&self, spec: &dyn ShiftSpec, a: Symbol) -> Result<Rational> {
        Ok(self.shape_value(self.arg_of(spec, a)?))
    }

    /// The limit of the shape as its argument tends to infinity.
    pub fn limit(&self) -> ExtendedValue {
        match &self.shape {
            TailShape::Constant { c } | TailShape::Reciprocal { c, .. } => c.clone().into(),
            TailShape::Affine { c, s } if s.is_zero() => c.clone().into(),
            TailShape::Affine { .. } | TailShape::Staircase { .. } => ExtendedValue::NegInf,
        }
    }

    pub fn nonincreasing(&self) -> bool {
        match &self.shape {
            TailShape::Reciprocal { s, .. } => !s.is_negative(),
            _ => true,
        }
    }

    fn validate(&self, spec: &dyn ShiftSpec, overridden: &BTreeSet<Symbol>) -> Result<()> {
        match &self.shape {
            TailShape::Affine { s, .. } if s.is_negative() => Err(Error::InvalidInput(
                "affine tail c − s·n needs s ≥ 0 to stay bounded above".into(),
            )),
            TailShape::Reciprocal { shift, .. } => {
                let smallest = match self.arg {
                    TailArg::Symbol => spec.alphabet().iter().find(|a| !overridden.contains(a)).unwrap_or(1),
                    TailArg::Class => 1,
                };
                if smallest + shift == 0 {
                    Err(Error::InvalidInput("reciprocal tail divides by zero at n = 0".into()))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// `sup { f(a) : a ∈ xs }` where `f` agrees with the tail rule from `settle` on.
fn sup_over(
    spec: &dyn ShiftSpec,
    rule: &TailRule,
    settle: Symbol,
    xs: &SymbolSet,
    head: &dyn Fn(Symbol) -> Result<ExtendedValue>,
) -> Result<ExtendedValue> {
    let mut best = ExtendedValue::NegInf;
    for a in xs.elements_below(settle) {
        best = best.max(head(a)?);
    }
    if let Some(first) = xs.next_at_least(settle) {
        if rule.nonincreasing() {
            best = best.max(rule.value(spec, first)?.into());
        } else if xs.is_infinite() {
            best = best.max(rule.limit());
        } else {
            for a in xs.first_n(usize::MAX).into_iter().filter(|&a| a >= settle) {
                best = best.max(rule.value(spec, a)?.into());
            }
        }
    }
    Ok(best)
}

// -------------------------------------------------------------- potentials

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weight {
    /// `1/(x_0 + 1)`
    #[default]
    Shifted,
    /// `1/x_0`, only on alphabets without 0.
    Raw,
}

impl Weight {
    fn at(&self, a: Symbol) -> Rational {
        let d = match self {
            Weight::Shifted => a + 1,
            Weight::Raw => a,
        };
        Rational::new(BigInt::one(), BigInt::from(d))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct TableEntry {
    word: Word,
    #[serde(with = "rational_str")]
    value: Rational,
}

mod table_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &BTreeMap<Word, Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(t.iter().map(|(w, v)| TableEntry {
            word: w.clone(),
            value: v.clone(),
        }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<Word, Rational>, D::Error> {
        let v = Vec::<TableEntry>::deserialize(d)?;
        let mut out = BTreeMap::new();
        for e in v {
            if out.insert(e.word.clone(), e.value).is_some() {
                return Err(serde::de::Error::custom(format!("duplicate table word {}", e.word)));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Potential {
    /// `A(x) = values[x_0]`, else `tail(x_0)`.
    PerSymbol {
        #[serde(default, with = "rational_map")]
        values: BTreeMap<Symbol, Rational>,
        tail: TailRule,
    },
    /// `A(x) = table[x_0 … x_{k−1}]`, else `tail(x_0)`.
    LocallyConstant {
        range: usize,
        #[serde(with = "table_serde")]
        table: BTreeMap<Word, Rational>,
        tail: TailRule,
    },
    /// `A(x) = −weight(x_0) · d(orb y, x)` with `d = 2^{−first disagreement}`.
    DistanceToOrbit {
        orbit: SequencePoint,
        #[serde(default)]
        weight: Weight,
    },
}

/// First index where `x` and the periodic `z` differ, `None` if equal.
fn first_disagreement(x: &SequencePoint, z: &SequencePoint) -> Option<usize> {
    let n = x.preperiod().len() + z.preperiod().len() + lcm(x.period().len(), z.period().len());
    (0..n).find(|&i| x.coord(i) != z.coord(i))
}

fn word_disagreement(w: &[Symbol], z: &SequencePoint) -> Option<usize> {
    (0..w.len()).find(|&i| w[i] != z.coord(i))
}

impl Potential {
    pub fn per_symbol(values: impl IntoIterator<Item = (Symbol, Rational)>, tail: TailRule) -> Self {
        Potential::PerSymbol {
            values: values.into_iter().collect(),
            tail,
        }
    }

    pub fn locally_constant(
        range: usize,
        table: impl IntoIterator<Item = (Vec<Symbol>, Rational)>,
        tail: TailRule,
    ) -> Self {
        Potential::LocallyConstant {
            range,
            table: table.into_iter().map(|(w, v)| (Word(w), v)).collect(),
            tail,
        }
    }

    pub fn distance(orbit: SequencePoint, weight: Weight) -> Self {
        Potential::DistanceToOrbit { orbit, weight }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Potential::PerSymbol { .. } => "per-symbol",
            Potential::LocallyConstant { .. } => "locally-constant",
            Potential::DistanceToOrbit { .. } => "distance-to-orbit",
        }
    }

    /// Window length for locally constant potentials.
    pub fn range(&self) -> Option<usize> {
        match self {
            Potential::PerSymbol { .. } => Some(1),
            Potential::LocallyConstant { range, .. } => Some(*range),
            Potential::DistanceToOrbit { .. } => None,
        }
    }

    pub fn tail(&self) -> Option<&TailRule> {
        match self {
            Potential::PerSymbol { tail, .. } | Potential::LocallyConstant { tail, .. } => Some(tail),
            Potential::DistanceToOrbit { .. } => None,
        }
    }

    pub fn validate(&self, spec: &dyn ShiftSpec) -> Result<()> {
        match self {
            Potential::PerSymbol { tail, values } => tail.validate(spec, &values.keys().copied().collect()),
            Potential::LocallyConstant { range, table, tail } => {
                if *range == 0 {
                    return Err(Error::InvalidInput("range must be ≥ 1".into()));
                }
                for w in table.keys() {
                    if w.len() != *range {
                        return Err(Error::InvalidInput(format!("table word {w} does not have length {range}")));
                    }
                    if !spec.allowed(w.symbols()) {
                        return Err(Error::WordNotAllowed(w.clone()));
                    }
                }
                tail.validate(spec, &BTreeSet::new())
            }
            Potential::DistanceToOrbit { orbit, weight } => {
                if !orbit.is_periodic() {
                    return Err(Error::InvalidInput(format!("orbit point {orbit} is not periodic")));
                }
                SequencePoint::new(spec, Vec::new(), orbit.period().to_vec())?;
                if *weight == Weight::Raw && spec.alphabet().contains(0) {
                    return Err(Error::InvalidInput(
                        "weight 1/x_0 is undefined on an alphabet containing 0".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// `A + c`; the critical cycles do not move.
    pub fn shifted_by(&self, c: &Rational) -> Result<Potential> {
        let shift_rule = |t: &TailRule| {
            let shape = match &t.shape {
                TailShape::Constant { c: c0 } => TailShape::Constant { c: c0 + c },
                TailShape::Affine { c: c0, s } => TailShape::Affine { c: c0 + c, s: s.clone() },
                TailShape::Reciprocal { c: c0, s, shift } => TailShape::Reciprocal {
                    c: c0 + c,
                    s: s.clone(),
                    shift: *shift,
                },
                TailShape::Staircase { c: c0 } => TailShape::Staircase { c: c0 + c },
            };
            TailRule { arg: t.arg, shape }
        };
        match self {
            Potential::PerSymbol { values, tail } => Ok(Potential::PerSymbol {
                values: values.iter().map(|(a, v)| (*a, v + c)).collect(),
                tail: shift_rule(tail),
            }),
            Potential::LocallyConstant { range, table, tail } => Ok(Potential::LocallyConstant {
                range: *range,
                table: table.iter().map(|(w, v)| (w.clone(), v + c)).collect(),
                tail: shift_rule(tail),
            }),
            Potential::DistanceToOrbit { .. } => Err(Error::NotLocallyConstant(
                "constant shifts are only supported on locally constant potentials".into(),
            )),
        }
    }

    /// `A` on a window of exactly `range` symbols.
    pub fn window_value(&self, spec: &dyn ShiftSpec, w: &[Symbol]) -> Result<Rational> {
        match self {
            Potential::PerSymbol { values, tail } => match values.get(&w[0]) {
                Some(v) => Ok(v.clone()),
                None => tail.value(spec, w[0]),
            },
            Potential::LocallyConstant { range, table, tail } => {
                match table.get(&Word(w[..*range].to_vec())) {
                    Some(v) => Ok(v.clone()),
                    None => tail.value(spec, w[0]),
                }
            }
            Potential::DistanceToOrbit { .. } => Err(Error::NotLocallyConstant(
                "distance-to-orbit depends on the whole sequence".into(),
            )),
        }
    }

    pub fn eval(&self, spec: &dyn ShiftSpec, x: &SequencePoint) -> Result<ExtendedValue> {
        match self {
            Potential::DistanceToOrbit { orbit, weight } => {
                let mut best: Option<usize> = Some(0);
                for z in orbit.orbit() {
                    match (first_disagreement(x, &z), best) {
                        (None, _) => return Ok(ExtendedValue::zero()),
                        (Some(j), Some(b)) => best = Some(b.max(j)),
                        (Some(j), None) => best = Some(j),
                    }
                }
                let j = best.unwrap_or(0) as u32;
                Ok((-(weight.at(x.coord(0)) * dyadic(j))).into())
            }
            _ => {
                let k = self.range().expect("locally constant");
                Ok(self.window_value(spec, x.prefix(k).symbols())?.into())
            }
        }
    }

    /// Largest symbol mentioned by the explicit part of the potential.
    fn settle(&self) -> Symbol {
        match self {
            Potential::PerSymbol { values, .. } => values.keys().next_back().map_or(0, |a| a + 1),
            Potential::LocallyConstant { table, .. } => table
                .keys()
                .flat_map(|w| w.symbols().iter().copied())
                .max()
                .map_or(0, |a| a + 1),
            Potential::DistanceToOrbit { orbit, .. } => orbit.period().iter().max().map_or(0, |a| a + 1),
        }
    }

    /// Some allowed extension of `w` to length `range` is missing from the table.
    fn uncovered(&self, spec: &dyn ShiftSpec, w: &Word) -> Result<bool> {
        let Potential::LocallyConstant { range, table, .. } = self else {
            return Ok(false);
        };
        let bound = self.settle().max(w.symbols().iter().max().map_or(0, |a| a + 1)) + 1;
        let ctx = spec.context(w.symbols()).ok_or_else(|| Error::WordNotAllowed(w.clone()))?;
        let mut stack = vec![(w.clone(), ctx)];
        while let Some((u, c)) = stack.pop() {
            if u.len() >= *range {
                if !table.contains_key(&u.prefix(*range)) {
                    return Ok(true);
                }
                continue;
            }
            let (succ, complete) = spec.successors(&c, bound);
            if !complete {
                return Ok(true);
            }
            for b in succ {
                if let Some(n) = spec.step(&c, b) {
                    stack.push((u.push(b), n));
                }
            }
        }
        Ok(false)
    }

    /// `sup A|[w]`, exact.
    pub fn sup_on_cylinder(&self, spec: &dyn ShiftSpec, w: &Word) -> Result<ExtendedValue> {
        if !spec.allowed(w.symbols()) {
            return Err(Error::EmptyCylinder(w.clone()));
        }
        match self {
            Potential::DistanceToOrbit { orbit, weight } => {
                let Some(a) = w.first() else {
                    return Ok(ExtendedValue::zero());
                };
                let mut worst = 0;
                for z in orbit.orbit() {
                    match word_disagreement(w.symbols(), &z) {
                        None => return Ok(ExtendedValue::zero()),
                        Some(j) => worst = worst.max(j),
                    }
                }
                Ok((-(weight.at(a) * dyadic(worst as u32))).into())
            }
            Potential::PerSymbol { .. } if !w.is_empty() => {
                Ok(self.window_value(spec, &w.symbols()[..1])?.into())
            }
            Potential::LocallyConstant { range, table, tail } if !w.is_empty() => {
                if w.len() >= *range {
                    return Ok(self.window_value(spec, w.symbols())?.into());
                }
                let mut best = ExtendedValue::NegInf;
                for (u, v) in table.range(w.clone()..) {
                    if !w.is_prefix_of(u) {
                        break;
                    }
                    if spec.allowed(u.symbols()) {
                        best = best.max(v.clone().into());
                    }
                }
                if self.uncovered(spec, w)? {
                    best = best.max(tail.value(spec, w.first().expect("non-empty"))?.into());
                }
                Ok(best)
            }
            _ => self.sup_over_heads(spec, &SymbolSet::from_semilinear(spec.alphabet())),
        }
    }

    /// `sup { sup A|[a] : a ∈ xs }`.
    pub fn sup_over_heads(&self, spec: &dyn ShiftSpec, xs: &SymbolSet) -> Result<ExtendedValue> {
        let head = |a: Symbol| self.sup_on_cylinder(spec, &Word(vec![a]));
        match self.tail() {
            Some(tail) => sup_over(spec, tail, self.settle() + 1, xs, &head),
            None if !xs.is_infinite() => {
                let mut best = ExtendedValue::NegInf;
                for a in xs.first_n(usize::MAX) {
                    best = best.max(head(a)?);
                }
                Ok(best)
            }
            // −weight(a) increases to 0 off the orbit symbols
            None => {
                let mut best = ExtendedValue::zero();
                for a in xs.elements_below(self.settle()) {
                    best = best.max(head(a)?);
                }
                Ok(best.min(ExtendedValue::zero()))
            }
        }
    }

    /// `limsup_{i ∈ xs, i → ∞} sup A|[v i]`; `xs` must be infinite.
    pub fn tail_limsup_over(&self, spec: &dyn ShiftSpec, v: &Word, xs: &SymbolSet) -> Result<ExtendedValue> {
        if !xs.is_infinite() {
            return Err(Error::InvalidInput(format!(
                "({v}, {}) is not a boundary point: finitely many continuations",
                xs.describe()
            )));
        }
        match self {
            Potential::DistanceToOrbit { orbit, weight } => {
                let Some(a) = v.first() else {
                    // −weight(i) → 0
                    return Ok(ExtendedValue::zero());
                };
                let worst = orbit
                    .orbit()
                    .iter()
                    .map(|z| word_disagreement(v.symbols(), z).unwrap_or(v.len()))
                    .max()
                    .unwrap_or(0);
                Ok((-(weight.at(a) * dyadic(worst as u32))).into())
            }
            _ => {
                let tail = self.tail().expect("locally constant");
                match v.first() {
                    None => Ok(tail.limit()),
                    Some(a) => {
                        let k = self.range().expect("locally constant");
                        if v.len() >= k {
                            Ok(self.window_value(spec, v.symbols())?.into())
                        } else {
                            Ok(tail.value(spec, a)?.into())
                        }
                    }
                }
            }
        }
    }

    /// `limsup_{i → ∞} sup A|[i]` over the alphabet; `−∞` on finite alphabets.
    pub fn tail_value(&self, spec: &dyn ShiftSpec) -> Result<ExtendedValue> {
        let letters = SymbolSet::from_semilinear(spec.alphabet());
        if !letters.is_infinite() {
            return Ok(ExtendedValue::NegInf);
        }
        self.tail_limsup_over(spec, &Word::empty(), &letters)
    }

    pub fn tail_condition(&self, spec: &dyn ShiftSpec, beta: &Rational) -> Result<TailCondition> {
        let tail_value = self.tail_value(spec)?;
        let beta_v = ExtendedValue::Finite(beta.clone());
        let holds = tail_value < beta_v;
        if !holds {
            return Ok(TailCondition {
                holds,
                tail_value,
                exceptions: None,
            });
        }
        let alpha = spec.alphabet();
        let settle = self.settle();
        let mut exceptions = BTreeSet::new();
        for (n, a) in alpha.iter().enumerate() {
            let s = self.sup_on_cylinder(spec, &Word(vec![a]))?;
            if s >= beta_v {
                exceptions.insert(a);
            } else if a >= settle {
                // past `settle` the heads are monotone: nonincreasing, or increasing to a limit below β
                break;
            }
            if n > 10_000_000 {
                return Err(Error::Internal("tail condition scan did not settle".into()));
            }
        }
        Ok(TailCondition {
            holds,
            tail_value,
            exceptions: Some(exceptions),
        })
    }

    /// `Â(p)`: `A` on `Σ`, the tail limsup on boundary points.
    pub fn extension_value(&self, bs: &BlurShift, p: &PointHat) -> Result<ExtendedValue> {
        match p {
            PointHat::Seq(x) => self.eval(&bs.shift, x),
            PointHat::Blur(b) => self.tail_limsup(bs, b),
        }
    }

    pub fn tail_limsup(&self, bs: &BlurShift, p: &BlurPoint) -> Result<ExtendedValue> {
        let blurred = bs.blurred(p.r)?;
        let xs = if p.stem.is_empty() {
            SymbolSet::from_semilinear(bs.shift.alphabet()).intersect(blurred)?
        } else {
            bs.shift.followers1(&p.stem)?.intersect(blurred)?
        };
        self.tail_limsup_over(&bs.shift, &p.stem, &xs)
    }

    /// The upper end of the sandwich, `Ā(v, B_r, …) = sup A|[v]`.
    pub fn sup_envelope(&self, bs: &BlurShift, p: &BlurPoint) -> Result<ExtendedValue> {
        self.sup_on_cylinder(&bs.shift, &p.stem)
    }

    /// `Â ≤ rival` at every sampled point, after checking that each rival value lies in the sandwich.
    pub fn minimality_check(&self, bs: &BlurShift, rivals: &[(BlurPoint, ExtendedValue)]) -> Result<bool> {
        let mut ok = true;
        for (p, v) in rivals {
            let lo = self.tail_limsup(bs, p)?;
            let hi = self.sup_envelope(bs, p)?;
            if *v < lo || *v > hi {
                return Err(Error::RivalNotInSandwich(format!("{v} at {p} is outside [{lo}, {hi}]")));
            }
            ok &= lo <= *v;
        }
        Ok(ok)
    }

    pub fn max_over_level0(&self, bs: &BlurShift) -> Result<ExtendedValue> {
        let mut best = ExtendedValue::NegInf;
        for p in bs.level0() {
            best = best.max(self.tail_limsup(bs, &p)?);
        }
        Ok(best)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TailCondition {
    pub holds: bool,
    pub tail_value: ExtendedValue,
    /// `{ i : sup A|[i] ≥ β }`, reported when the condition holds.
    pub exceptions: Option<BTreeSet<Symbol>>,
}

// ------------------------------------------------- dense-value oscillation

/// Locally constant values on `[u]`: `q_k` on the `k`-th infinite piece of `B_r`, `0` off `B_r`.
///
/// The pieces come from the Cantor pairing of positions in `B_r`; `q_k` enumerates
/// `ℚ ∩ (0, 1]` by denominator.
#[derive(Debug, Clone)]
pub struct DenseValueExample {
    blurred: SymbolSet,
}

/// `k ↦ q_k`: 1, 1/2, 1/3, 2/3, 1/4, 3/4, …
pub fn dense_rational(k: usize) -> Rational {
    let mut seen = 0;
    let mut q: u64 = 1;
    loop {
        for p in 1..=q {
            if num::integer::gcd(p, q) == 1 {
                if seen == k {
                    return Rational::new(BigInt::from(p), BigInt::from(q));
                }
                seen += 1;
            }
        }
        q += 1;
    }
}

fn unpair(j: u64) -> (u64, u64) {
    let mut w = 0;
    while (w + 1) * (w + 2) / 2 <= j {
        w += 1;
    }
    let t = w * (w + 1) / 2;
    let y = j - t;
    (w - y, y)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Oscillation {
    #[serde(with = "rational_str")]
    pub max: Rational,
    #[serde(with = "rational_str")]
    pub min_seen: Rational,
    /// Symbols `a ∈ B_r \ S` with `A(u a) ≤ 1/n` for `n = 1, 2, …`.
    pub small_values: Vec<(Symbol, String)>,
}

impl DenseValueExample {
    pub fn new(blurred: SymbolSet) -> Result<Self> {
        if !blurred.is_infinite() {
            return Err(Error::InvalidInput("the blurred set must be infinite".into()));
        }
        Ok(DenseValueExample { blurred })
    }

    /// Index of the piece `C_k` containing `a`.
    pub fn piece(&self, a: Symbol) -> Option<u64> {
        if !self.blurred.contains(a) {
            return None;
        }
        let j = self.blurred.elements_below(a).len() as u64;
        Some(unpair(j).0)
    }

    pub fn value(&self, a: Symbol) -> Rational {
        match self.piece(a) {
            Some(k) => dense_rational(k as usize),
            None => Rational::zero(),
        }
    }

    /// On `Z[u B_r; S] ∩ Σ` the values reach 1 and come within `1/n` of 0 for `n ≤ depth`.
    pub fn oscillation(&self, exclude: &BTreeSet<Symbol>, depth: usize) -> Oscillation {
        let mut max = Rational::zero();
        let mut min_seen = Rational::one();
        let mut small_values = Vec::new();
        let mut target = 1;
        let mut from = 0;
        while target <= depth {
            let a = self.blurred.next_at_least(from).expect("infinite");
            from = a + 1;
            if exclude.contains(&a) {
                continue;
            }
            let v = self.value(a);
            if v > max {
                max = v.clone();
            }
            if v < min_seen {
                min_seen = v.clone();
            }
            while target <= depth && v <= Rational::new(BigInt::one(), BigInt::from(target)) && max.is_one() {
                small_values.push((a, v.to_string()));
                target += 1;
            }
        }
        Oscillation {
            max,
            min_seen,
            small_values,
        }
    }
}

/// The coercive companion: `sup A|[i] = c − i`.
pub fn coercive(c: Rational) -> Potential {
    Potential::per_symbol([], TailRule::on_symbols(TailShape::Affine { c, s: int(1) }))
}

/// Semilinear helper used by demos: `{a, a+b, …}`.
pub fn progression(a: u64, b: u64) -> SymbolSet {
    SymbolSet::from_semilinear(SemilinearSet::progression(a, b).expect("stride ≥ 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blur::Resolution;
    use crate::shift::{EvenShift, LambdaShift, Shift};
    use crate::value::ratio;

    fn even_table() -> Potential {
        Potential::locally_constant(
            2,
            [
                (vec![2, 2], int(0)),
                (vec![2, 3], int(1)),
                (vec![3, 3], int(2)),
                (vec![3, 2], int(-1)),
            ],
            TailRule::constant(int(0)),
        )
    }

    fn full_blur() -> BlurShift {
        BlurShift::new(
            Shift::full(),
            Resolution {
                sets: vec![progression(0, 2), progression(1, 2)],
            },
        )
        .unwrap()
    }

    #[test]
    fn cylinder_suprema() {
        let a = Potential::per_symbol([(0, int(1))], TailRule::constant(int(0)));
        let full = Shift::full();
        assert_eq!(a.sup_on_cylinder(&full, &Word(vec![0])).unwrap(), int(1).into());
        assert_eq!(a.sup_on_cylinder(&full, &Word::empty()).unwrap(), int(1).into());
        assert_eq!(even_table().sup_on_cylinder(&EvenShift, &Word(vec![3])).unwrap(), int(2).into());
        let y = SequencePoint::periodic(vec![0, 1]).unwrap();
        let d = Potential::distance(y.clone(), Weight::Shifted);
        assert_eq!(d.sup_on_cylinder(&full, &Word(vec![0])).unwrap(), ExtendedValue::zero());
        assert_eq!(d.eval(&full, &y.shift()).unwrap(), ExtendedValue::zero());
        // (0,0) disagrees with (0,1)^∞ at 1 and with (1,0)^∞ at 0
        assert_eq!(d.sup_on_cylinder(&full, &Word(vec![0, 0])).unwrap(), ratio(-1, 2).into());
    }

    #[test]
    fn distance_by_brute_force() {
        let full = Shift::full();
        let y = SequencePoint::periodic(vec![0, 1]).unwrap();
        let d = Potential::distance(y.clone(), Weight::Shifted);
        let x = SequencePoint::unchecked(vec![0, 1, 0, 2], vec![5]).unwrap();
        let brute = y
            .orbit()
            .iter()
            .map(|z| (0..32).find(|&i| x.coord(i) != z.coord(i)).unwrap())
            .max()
            .unwrap();
        assert_eq!(brute, 3);
        assert_eq!(d.eval(&full, &x).unwrap(), (-dyadic(3)).into());
    }

    #[test]
    fn tails() {
        let bs = full_blur();
        let c = coercive(int(0));
        assert_eq!(c.tail_limsup(&bs, &BlurPoint::fixed(1)).unwrap(), ExtendedValue::NegInf);
        let d = Potential::distance(SequencePoint::periodic(vec![0]).unwrap(), Weight::Shifted);
        assert_eq!(d.tail_limsup(&bs, &BlurPoint::fixed(2)).unwrap(), ExtendedValue::zero());
        let t = d.tail_condition(&Shift::full(), &int(0)).unwrap();
        assert!(!t.holds);
        let p = Potential::per_symbol([(0, int(1))], TailRule::constant(ratio(1, 2)));
        let t = p.tail_condition(&Shift::full(), &int(1)).unwrap();
        assert!(t.holds);
        assert_eq!(t.exceptions, Some([0].into()));
    }

    #[test]
    fn class_tail_on_lambda() {
        let l = Shift::Lambda(LambdaShift::standard());
        let p = Potential::per_symbol(
            [(1, int(0))],
            TailRule::on_classes(TailShape::Reciprocal {
                c: int(0),
                s: int(2),
                shift: 0,
            }),
        );
        assert_eq!(p.sup_on_cylinder(&l, &Word(vec![5])).unwrap(), ratio(2, 3).into());
        assert_eq!(p.sup_on_cylinder(&l, &Word::empty()).unwrap(), int(1).into());
        let t = p.tail_condition(&l, &int(1)).unwrap();
        assert!(t.holds);
        assert_eq!(t.exceptions, Some([2, 3].into()));
        assert!(p.tail_condition(&Shift::full(), &int(1)).is_err());
    }

    #[test]
    fn minimality() {
        let bs = full_blur();
        let p = Potential::per_symbol([(0, int(1))], TailRule::constant(int(0)));
        let pts = [BlurPoint::fixed(1), BlurPoint::new(vec![0], 2)];
        let env: Vec<_> = pts.iter().map(|q| (q.clone(), p.sup_envelope(&bs, q).unwrap())).collect();
        assert!(p.minimality_check(&bs, &env).unwrap());
        let below = vec![(BlurPoint::fixed(1), int(-1).into())];
        assert!(matches!(p.minimality_check(&bs, &below), Err(Error::RivalNotInSandwich(_))));
    }

    #[test]
    fn dense_oscillation_is_one() {
        let ex = DenseValueExample::new(progression(0, 2)).unwrap();
        assert_eq!(dense_rational(0), int(1));
        assert_eq!(dense_rational(3), ratio(2, 3));
        let osc = ex.oscillation(&[0, 2, 4].into(), 6);
        assert_eq!(osc.max, int(1));
        assert_eq!(osc.small_values.len(), 6);
        assert!(osc.min_seen <= ratio(1, 6));
    }

    #[test]
    fn json_round_trip() {
        let p = even_table();
        let s = serde_json::to_string(&p).unwrap();
        let q: Potential = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        let r: Potential = serde_json::from_str(
            r#"{"kind":"per-symbol","values":{"1":"0"},"tail":{"arg":"class","shape":"reciprocal","c":"0","s":"2"}}"#,
        )
        .unwrap();
        assert_eq!(r.range(), Some(1));
    }
}
