//! Constructions on Λ: connecting words, transitivity and non-local-compactness
//! witnesses, class decomposition of invariant measures, periodic gluing.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num::{Integer, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::blur::{extend_to_point, BlurShift, PointFamily, PointHat, Resolution, SequencePoint, Slot};
use crate::classes::Position;
use crate::ergopt::PeriodicMeasure;
use crate::error::{Error, Result};
use crate::measures::AtomicMeasureHat;
use crate::shift::{Ctx, LambdaConfig, LambdaShift, Shift, ShiftSpec};
use crate::symbols::{Symbol, Word};
use crate::value::{rational_str, Rational};

pub fn build_lambda(config: LambdaConfig, k: u64) -> Result<Shift> {
    let l = LambdaShift::try_from(LambdaConfig {
        max_class: Some(k),
        ..config
    })?;
    Ok(Shift::Lambda(l))
}

pub fn require_lambda(spec: &dyn ShiftSpec) -> Result<&LambdaShift> {
    spec.lambda()
        .ok_or_else(|| Error::InvalidInput("this operation needs the Λ family".into()))
}

/// `{min Z_k : k ≥ 2}` and the remaining symbols of classes `≥ 2`.
pub fn standard_resolution(l: &LambdaShift) -> Resolution {
    Resolution {
        sets: vec![
            l.class_set(2, &[Position::Min]),
            l.class_set(2, &[Position::Interior, Position::Max]),
        ],
    }
}

/// A finite period containing 1 gives a point with infinitely many 1s.
pub fn c1_violation(x: &SequencePoint) -> bool {
    x.period().contains(&1)
}

// ------------------------------------------------------------ context graph

const ONE: [u64; 2] = [1, 0];

/// All contexts of the language restricted to classes `≤ K`, with their transitions.
struct ContextGraph {
    index: HashMap<Ctx, usize>,
    ctxs: Vec<Ctx>,
    out: Vec<Vec<(Symbol, usize)>>,
}

impl ContextGraph {
    fn new(l: &LambdaShift) -> Self {
        let bound = l.layout().last(l.max_class().expect("truncated")) + 1;
        let mut g = ContextGraph {
            index: HashMap::new(),
            ctxs: Vec::new(),
            out: Vec::new(),
        };
        let mut queue = VecDeque::new();
        let (first, _) = l.successors(&l.start(), bound);
        for b in first {
            let c = l.step(&l.start(), b).expect("successor");
            if g.add(c.clone()) {
                queue.push_back(c);
            }
        }
        while let Some(c) = queue.pop_front() {
            let i = g.index[&c];
            let (succ, _) = l.successors(&c, bound);
            for b in succ {
                let n = l.step(&c, b).expect("successor");
                if g.add(n.clone()) {
                    queue.push_back(n.clone());
                }
                let j = g.index[&n];
                g.out[i].push((b, j));
            }
        }
        g
    }

    fn add(&mut self, c: Ctx) -> bool {
        if self.index.contains_key(&c) {
            return false;
        }
        self.index.insert(c.clone(), self.ctxs.len());
        self.ctxs.push(c);
        self.out.push(Vec::new());
        true
    }

    fn dist_from(&self, s: usize) -> Vec<Option<usize>> {
        let mut d = vec![None; self.ctxs.len()];
        d[s] = Some(0);
        let mut q = VecDeque::from([s]);
        while let Some(i) = q.pop_front() {
            for &(_, j) in &self.out[i] {
                if d[j].is_none() {
                    d[j] = Some(d[i].unwrap() + 1);
                    q.push_back(j);
                }
            }
        }
        d
    }

    fn dist_to(&self, t: usize) -> Vec<Option<usize>> {
        let mut rev = vec![Vec::new(); self.ctxs.len()];
        for (i, es) in self.out.iter().enumerate() {
            for &(_, j) in es {
                rev[j].push(i);
            }
        }
        let mut d = vec![None; self.ctxs.len()];
        d[t] = Some(0);
        let mut q = VecDeque::from([t]);
        while let Some(j) = q.pop_front() {
            for &i in &rev[j] {
                if d[i].is_none() {
                    d[i] = Some(d[j].unwrap() + 1);
                    q.push_back(i);
                }
            }
        }
        d
    }
}

/// Per-class constants `N_i` and `N(K) = 2·max N_i + 6`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpecificationConstants {
    pub max_class: u64,
    /// `N_i` = longest exit to 1 from a class-`i` context + longest entry from 1.
    pub per_class: BTreeMap<u64, usize>,
    pub n: usize,
}

pub fn specification_constants(l: &LambdaShift, k: u64) -> Result<SpecificationConstants> {
    let l = l.with_max_class(k);
    let g = ContextGraph::new(&l);
    let one = *g
        .index
        .get(&ONE.to_vec())
        .ok_or_else(|| Error::Internal("context of 1 is missing".into()))?;
    let to_one = g.dist_to(one);
    let from_one = g.dist_from(one);
    let mut per_class: BTreeMap<u64, usize> = (1..=k).map(|i| (i, 0)).collect();
    let mut exit: BTreeMap<u64, usize> = BTreeMap::new();
    for (i, c) in g.ctxs.iter().enumerate() {
        let class = l.class_of(c[0]).expect("alphabet symbol");
        let d = to_one[i].ok_or_else(|| Error::Internal(format!("context {c:?} cannot reach 1")))?;
        let e = exit.entry(class).or_insert(0);
        *e = (*e).max(d);
    }
    for (i, c) in g.ctxs.iter().enumerate() {
        let class = l.class_of(c[0]).expect("alphabet symbol");
        if let Some(d) = from_one[i] {
            let n = per_class.get_mut(&class).expect("class ≤ K");
            *n = (*n).max(exit[&class] + d);
        }
    }
    let n = 2 * per_class.values().copied().max().unwrap_or(0) + 6;
    Ok(SpecificationConstants {
        max_class: k,
        per_class,
        n,
    })
}

/// Shortest `v` over `symbols` with `u·v·w` allowed, by breadth-first search on contexts.
fn shortest_connector(
    spec: &dyn ShiftSpec,
    u: &Word,
    w: &Word,
    symbols: &[Symbol],
    max_len: usize,
) -> Option<Word> {
    let start = spec.context(u.symbols())?;
    let accepts = |c: &Ctx| {
        let mut c = c.clone();
        for &b in w.symbols() {
            match spec.step(&c, b) {
                Some(n) => c = n,
                None => return false,
            }
        }
        true
    };
    let mut parent: HashMap<Ctx, Option<(Ctx, Symbol)>> = HashMap::from([(start.clone(), None)]);
    let mut q = VecDeque::from([(start, 0usize)]);
    while let Some((c, d)) = q.pop_front() {
        if accepts(&c) {
            let mut v = Vec::new();
            let mut cur = c;
            while let Some(Some((p, b))) = parent.get(&cur) {
                v.push(*b);
                cur = p.clone();
            }
            v.reverse();
            return Some(Word(v));
        }
        if d == max_len {
            continue;
        }
        for &b in symbols {
            if let Some(n) = spec.step(&c, b) {
                if !parent.contains_key(&n) {
                    parent.insert(n.clone(), Some((c.clone(), b)));
                    q.push_back((n, d + 1));
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectingResult {
    pub v: Word,
    pub bound: usize,
    pub verified: bool,
}

pub fn connect(spec: &dyn ShiftSpec, u: &Word, w: &Word, k: u64) -> Result<ConnectingResult> {
    let l = require_lambda(spec)?.with_max_class(k);
    for x in [u, w] {
        if !l.allowed(x.symbols()) {
            return Err(Error::WordNotAllowed(x.clone()));
        }
    }
    let bound = specification_constants(&l, k)?.n;
    let symbols = l.truncated_alphabet(k);
    let v = shortest_connector(&l, u, w, &symbols, bound).ok_or_else(|| Error::NoConnectionWithinBound {
        u: u.clone(),
        w: w.clone(),
        bound,
    })?;
    let verified = l.allowed(u.concat(&v).concat(w).symbols()) && v.len() <= bound;
    Ok(ConnectingResult { v, bound, verified })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitivityWitness {
    pub point: SequencePoint,
    pub n: usize,
    pub connector: Word,
}

/// `z ∈ [a]` with `σⁿ z ∈ [b]`.
pub fn transitivity_witness(spec: &dyn ShiftSpec, a: &Word, b: &Word, k: u64) -> Result<TransitivityWitness> {
    let l = require_lambda(spec)?.with_max_class(k);
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("cylinders must be non-empty".into()));
    }
    let (connector, n) = if b.is_prefix_of(a) {
        (Word::empty(), 0)
    } else {
        let c = connect(&l, a, b, k)?;
        let n = a.len() + c.v.len();
        (c.v, n)
    };
    let word = if n == 0 { a.clone() } else { a.concat(&connector).concat(b) };
    let point = extend_to_point(&l, &word)?;
    let shown = point.prefix((n + b.len()).max(a.len()));
    if !a.is_prefix_of(&shown) || shown.symbols()[n..n + b.len()] != *b.symbols() {
        return Err(Error::Internal(format!("transitivity witness {point} misses its cylinders")));
    }
    Ok(TransitivityWitness { point, n, connector })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonCompactnessWitness {
    pub family: PointFamily,
    pub limit: PointHat,
}

/// `y^k = (cyl, v, 1, min Z_k, min Z_k, …)`: a sequence in `[cyl]` with no limit in `Λ`.
pub fn non_local_compactness_witness(bs: &BlurShift, cyl: &Word) -> Result<NonCompactnessWitness> {
    let l = require_lambda(bs.spec())?;
    if cyl.is_empty() {
        return Err(Error::InvalidInput("the cylinder word must be non-empty".into()));
    }
    let used = cyl.symbols().iter().filter_map(|&a| l.class_of(a)).max().unwrap_or(2).max(2);
    let kmax = l.max_class().map_or(used, |m| m.min(used.max(2)));
    let to_one = connect(l, cyl, &Word(vec![1]), kmax)?;
    let prefix = cyl.concat(&to_one.v).push(1);
    let mins = l.class_set(2, &[Position::Min]);
    let mut target = None;
    for r in 1..=bs.size() {
        let d = bs.blurred(r)?.intersect(&mins)?;
        if d.is_infinite() {
            target = Some((r, d));
            break;
        }
    }
    let (r, domain) = target.ok_or_else(|| Error::NoWitnessFound("no blurred set meets the class minima infinitely".into()))?;
    let family = PointFamily {
        pre: prefix.symbols().iter().map(|&a| Slot::Fixed(a)).collect(),
        period: vec![Slot::Var(0)],
        r,
        domain: Some(domain),
    };
    let limit = escape_limit(bs, &family)?;
    Ok(NonCompactnessWitness { family, limit })
}

/// Limit of a family, required to lie on the boundary.
pub fn escape_limit(bs: &BlurShift, family: &PointFamily) -> Result<PointHat> {
    let limit = bs.limit_of_family(family)?;
    match limit {
        PointHat::Blur(_) => Ok(limit),
        PointHat::Seq(x) => Err(Error::NoWitnessFound(format!("family {family} converges inside Σ to {x}"))),
    }
}

// ------------------------------------------------------------ measures

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassMasses {
    /// `ν(Δ_k)`: periodic atoms whose period stays in `Z_k`.
    pub per_class: BTreeMap<u64, String>,
    /// Mass on periodic points whose period contains 1.
    #[serde(with = "rational_str")]
    pub through_one: Rational,
    #[serde(with = "rational_str")]
    pub boundary: Rational,
    /// Atoms whose period contains 1 (finitely-many-1s condition fails).
    pub flagged: Vec<SequencePoint>,
    pub verified: bool,
}

pub fn class_decomposition(l: &LambdaShift, mu: &AtomicMeasureHat) -> Result<ClassMasses> {
    if !mu.is_invariant() {
        return Err(Error::NotInvariant);
    }
    let mut per: BTreeMap<u64, Rational> = BTreeMap::new();
    let mut through_one = Rational::zero();
    let mut boundary = Rational::zero();
    let mut flagged = Vec::new();
    for (p, w) in mu.atoms() {
        match p {
            PointHat::Blur(_) => boundary += w,
            PointHat::Seq(x) if c1_violation(x) => {
                through_one += w;
                flagged.push(x.clone());
            }
            PointHat::Seq(x) => {
                let k = l
                    .class_of(x.period()[0])
                    .ok_or_else(|| Error::InvalidInput(format!("{x} is not a point of Λ")))?;
                *per.entry(k).or_insert_with(Rational::zero) += w;
            }
        }
    }
    let total: Rational = per.values().sum();
    Ok(ClassMasses {
        verified: through_one.is_zero() && boundary.is_zero() && total.is_one(),
        per_class: per.into_iter().map(|(k, w)| (k, w.to_string())).collect(),
        through_one,
        boundary,
        flagged,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GluedOrbit {
    pub measure: PeriodicMeasure,
    pub class: u64,
    pub repetitions: Vec<u64>,
    pub connectors: Vec<Word>,
    pub connector_symbols: usize,
    pub length: usize,
    pub frequencies: BTreeMap<Symbol, String>,
    pub targets: BTreeMap<Symbol, String>,
    #[serde(with = "rational_str")]
    pub max_error: Rational,
    /// `(connector symbols + rounding) / length`; rounding vanishes when every `w_i·M` is an integer.
    #[serde(with = "rational_str")]
    pub error_bound: Rational,
}

fn symbol_frequencies(w: &[Symbol]) -> BTreeMap<Symbol, Rational> {
    let mut m: BTreeMap<Symbol, Rational> = BTreeMap::new();
    let n = Rational::from_integer((w.len() as i64).into());
    for &a in w {
        *m.entry(a).or_insert_with(Rational::zero) += Rational::one() / &n;
    }
    m
}

fn orbit_class(l: &LambdaShift, x: &SequencePoint) -> Option<u64> {
    let classes: BTreeSet<Option<u64>> = x.period().iter().map(|&a| l.class_of(a)).collect();
    match classes.into_iter().collect::<Vec<_>>()[..] {
        [Some(k)] if k >= 2 => Some(k),
        _ => None,
    }
}

/// One periodic orbit approximating `Σ w_i μ_i`, all `μ_i` in a common class.
pub fn glue_periodic(
    spec: &dyn ShiftSpec,
    orbits: &[PeriodicMeasure],
    weights: &[Rational],
    m: u64,
) -> Result<GluedOrbit> {
    let l = require_lambda(spec)?;
    if orbits.is_empty() || orbits.len() != weights.len() {
        return Err(Error::InvalidInput("need one positive weight per orbit".into()));
    }
    if weights.iter().any(|w| !w.is_positive()) || !weights.iter().sum::<Rational>().is_one() {
        return Err(Error::InvalidInput("weights must be positive and sum to 1".into()));
    }
    if m == 0 {
        return Err(Error::InvalidInput("repetition scale M must be positive".into()));
    }
    let classes: BTreeSet<Option<u64>> = orbits.iter().map(|o| orbit_class(l, &o.orbit)).collect();
    let class = match classes.into_iter().collect::<Vec<_>>()[..] {
        [Some(k)] => k,
        _ => return Err(Error::OrbitsNotCoclass),
    };
    let lt = l.with_max_class(class);
    let symbols: Vec<Symbol> = lt.layout().class_members(class).collect();
    let lcm = orbits.iter().fold(1u64, |acc, o| acc.lcm(&(o.period() as u64)));
    let mf = Rational::from_integer(m.into());
    let units: Vec<u64> = weights
        .iter()
        .map(|w| (w * &mf).ceil().to_integer().to_u64().expect("small repetition count"))
        .collect();
    let blocks: Vec<Word> = orbits
        .iter()
        .zip(&units)
        .map(|(o, &u)| {
            let reps = u * lcm / o.period() as u64;
            Word(o.orbit.period().repeat(reps as usize))
        })
        .collect();
    let max_len = 4 * lt.layout().size(class) as usize + 8;
    let mut word = Word::empty();
    let mut connectors = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        word = word.concat(b);
        let next = if i + 1 < blocks.len() { blocks[i + 1].clone() } else { word.clone() };
        let c = shortest_connector(&lt, &word, &next, &symbols, max_len).ok_or_else(|| Error::NoConnectionWithinBound {
            u: word.clone(),
            w: next.clone(),
            bound: max_len,
        })?;
        word = word.concat(&c);
        connectors.push(c);
    }
    let measure = PeriodicMeasure::new(&lt, word.clone())
        .map_err(|e| Error::Internal(format!("glued word does not close up: {e}")))?;
    let length = word.len();
    let connector_symbols: usize = connectors.iter().map(Word::len).sum();
    let freq = symbol_frequencies(word.symbols());
    let mut target: BTreeMap<Symbol, Rational> = BTreeMap::new();
    for (o, w) in orbits.iter().zip(weights) {
        for (a, f) in symbol_frequencies(o.orbit.period()) {
            *target.entry(a).or_insert_with(Rational::zero) += w * f;
        }
    }
    let keys: BTreeSet<Symbol> = freq.keys().chain(target.keys()).copied().collect();
    let zero = Rational::zero();
    let max_error = keys
        .iter()
        .map(|a| (freq.get(a).unwrap_or(&zero) - target.get(a).unwrap_or(&zero)).abs())
        .max()
        .unwrap_or_default();
    let block_total: u64 = blocks.iter().map(|b| b.len() as u64).sum();
    let rounding: Rational = blocks
        .iter()
        .zip(weights)
        .map(|(b, w)| (Rational::from_integer((b.len() as i64).into()) - w * Rational::from_integer((block_total as i64).into())).abs())
        .sum();
    let error_bound = (Rational::from_integer((connector_symbols as i64).into()) + rounding)
        / Rational::from_integer((length as i64).into());
    let show = |m: BTreeMap<Symbol, Rational>| m.into_iter().map(|(a, q)| (a, q.to_string())).collect();
    Ok(GluedOrbit {
        measure,
        class,
        repetitions: units.iter().zip(orbits).map(|(&u, o)| u * lcm / o.period() as u64).collect(),
        connectors,
        connector_symbols,
        length,
        frequencies: show(freq),
        targets: show(target),
        max_error,
        error_bound,
    })
}
