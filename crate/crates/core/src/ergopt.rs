//! Exact ergodic maximizing constants: word graphs, maximum mean cycles and certificates.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num::{BigInt, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::blur::SequencePoint;
use crate::classes::Position;
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::shift::{Ctx, ShiftSpec};
use crate::symbols::{Symbol, SymbolSet, Word};
use crate::value::{int, rational_str, ExtendedValue, Rational};

// ------------------------------------------------------------------- graph

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct NodeLabel {
    /// The last `range − 1` symbols read.
    pub window: Word,
    pub ctx: Ctx,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub symbol: Symbol,
    #[serde(with = "rational_str")]
    pub weight: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordGraph {
    pub nodes: Vec<NodeLabel>,
    pub edges: Vec<Edge>,
    pub alphabet: Vec<Symbol>,
}

impl WordGraph {
    /// A bare weighted graph; edge `i` carries symbol `i`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, Rational)>) -> Self {
        let edges: Vec<Edge> = edges
            .into_iter()
            .enumerate()
            .map(|(i, (from, to, weight))| Edge {
                from,
                to,
                symbol: i as Symbol,
                weight,
            })
            .collect();
        WordGraph {
            nodes: (0..n)
                .map(|i| NodeLabel {
                    window: Word::empty(),
                    ctx: vec![i as u64],
                })
                .collect(),
            alphabet: (0..edges.len() as Symbol).collect(),
            edges,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.from].push(i);
        }
        out
    }
}

/// The graph of the subshift over `truncated_alphabet(k)`: nodes are automaton
/// contexts paired with the last `range − 1` symbols; edges append a symbol.
pub fn build_graph(spec: &dyn ShiftSpec, a: &Potential, k: u64) -> Result<WordGraph> {
    let alphabet = spec.truncated_alphabet(k);
    build_graph_over(spec, a, &alphabet)
}

pub fn build_graph_over(spec: &dyn ShiftSpec, a: &Potential, alphabet: &[Symbol]) -> Result<WordGraph> {
    let range = a.range().ok_or_else(|| {
        Error::NotLocallyConstant(format!("{} potentials have no word graph", a.kind()))
    })?;
    let keep = range - 1;
    let start = NodeLabel {
        window: Word::empty(),
        ctx: spec.start(),
    };
    let mut seen: BTreeSet<NodeLabel> = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut raw_edges = Vec::new();
    while let Some(node) = queue.pop_front() {
        for &b in alphabet {
            let Some(ctx) = spec.step(&node.ctx, b) else {
                continue;
            };
            let full = node.window.push(b);
            let window = Word(full.symbols()[full.len().saturating_sub(keep)..].to_vec());
            let next = NodeLabel { window, ctx };
            if node.window.len() == keep {
                let weight = a.window_value(spec, full.symbols())?;
                raw_edges.push((node.clone(), next.clone(), b, weight));
            }
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    let nodes: Vec<NodeLabel> = seen.into_iter().filter(|n| n.window.len() == keep).collect();
    if nodes.is_empty() {
        return Err(Error::EmptyTruncation);
    }
    let index: BTreeMap<&NodeLabel, usize> = nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut edges: Vec<Edge> = raw_edges
        .into_iter()
        .map(|(f, t, symbol, weight)| Edge {
            from: index[&f],
            to: index[&t],
            symbol,
            weight,
        })
        .collect();
    edges.sort_by(|x, y| (x.from, x.to, x.symbol).cmp(&(y.from, y.to, y.symbol)));
    Ok(WordGraph {
        nodes,
        edges,
        alphabet: alphabet.to_vec(),
    })
}

// ---------------------------------------------------------- max mean cycle

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaxMeanCycleResult {
    #[serde(with = "rational_str")]
    pub value: Rational,
    /// Node sequence of the critical cycle, starting at its smallest node.
    pub cycle: Vec<usize>,
    /// Symbols read along the cycle.
    pub symbols: Vec<Symbol>,
    pub length: usize,
}

/// Karp's recurrence on one strongly connected component.
fn karp_component(g: &WordGraph, comp: &[usize]) -> Option<Rational> {
    let n = comp.len();
    let pos: BTreeMap<usize, usize> = comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let local: Vec<(usize, usize, &Rational)> = g
        .edges
        .iter()
        .filter_map(|e| Some((*pos.get(&e.from)?, *pos.get(&e.to)?, &e.weight)))
        .collect();
    if local.is_empty() {
        return None;
    }
    let mut d: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n + 1];
    d[0][0] = Some(Rational::zero());
    for k in 1..=n {
        for &(u, v, w) in &local {
            if let Some(du) = &d[k - 1][u] {
                let cand = du + w;
                if d[k][v].as_ref().is_none_or(|cur| cand > *cur) {
                    d[k][v] = Some(cand);
                }
            }
        }
    }
    let mut best: Option<Rational> = None;
    for v in 0..n {
        let Some(dn) = &d[n][v] else { continue };
        let mut worst: Option<Rational> = None;
        for (k, row) in d.iter().enumerate().take(n) {
            if let Some(dk) = &row[v] {
                let m = (dn - dk) / Rational::from_integer(BigInt::from(n - k));
                if worst.as_ref().is_none_or(|w| m < *w) {
                    worst = Some(m);
                }
            }
        }
        if let Some(w) = worst {
            if best.as_ref().is_none_or(|b| w > *b) {
                best = Some(w);
            }
        }
    }
    best
}

fn components(g: &WordGraph, edge_ok: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
    let mut pg: DiGraph<(), ()> = DiGraph::new();
    let ids: Vec<_> = (0..g.nodes.len()).map(|_| pg.add_node(())).collect();
    for e in g.edges.iter().enumerate().filter(|(i, _)| edge_ok(*i)).map(|(_, e)| e) {
        pg.add_edge(ids[e.from], ids[e.to], ());
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&pg)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            v.sort_unstable();
            v
        })
        .collect();
    comps.sort();
    comps
}

pub fn karp_max_mean_cycle(g: &WordGraph) -> Result<MaxMeanCycleResult> {
    let mut value: Option<Rational> = None;
    for comp in components(g, |_| true) {
        if let Some(m) = karp_component(g, &comp) {
            if value.as_ref().is_none_or(|v| m > *v) {
                value = Some(m);
            }
        }
    }
    let value = value.ok_or(Error::AcyclicGraph)?;
    let (cycle, edges) = critical_cycle(g, &value);
    Ok(MaxMeanCycleResult {
        symbols: edges.iter().map(|&e| g.edges[e].symbol).collect(),
        length: cycle.len(),
        cycle,
        value,
    })
}

/// Lexicographically smallest cycle among those of mean `lambda`.
///
/// With `w' = w − λ` there is no positive cycle; longest-path potentials make every
/// maximizing cycle consist of tight edges, and every tight cycle is maximizing.
fn critical_cycle(g: &WordGraph, lambda: &Rational) -> (Vec<usize>, Vec<usize>) {
    let n = g.nodes.len();
    let reduced: Vec<Rational> = g.edges.iter().map(|e| &e.weight - lambda).collect();
    let mut pi = vec![Rational::zero(); n];
    for _ in 0..=n {
        let mut changed = false;
        for (i, e) in g.edges.iter().enumerate() {
            let cand = &pi[e.from] + &reduced[i];
            if cand > pi[e.to] {
                pi[e.to] = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let tight: Vec<bool> = g
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| &pi[e.from] + &reduced[i] == pi[e.to])
        .collect();
    let on_cycle = |comp: &Vec<usize>| {
        comp.len() > 1 || g.edges.iter().enumerate().any(|(i, e)| tight[i] && e.from == comp[0] && e.to == comp[0])
    };
    let tight_comps = components(g, |i| tight[i]);
    let comp = tight_comps
        .into_iter()
        .filter(on_cycle)
        .min_by_key(|c| c[0])
        .expect("a maximizing cycle exists");
    let v0 = comp[0];
    let in_comp: BTreeSet<usize> = comp.iter().copied().collect();
    let out = g.out_edges();
    let tight_out = |v: usize| -> Vec<usize> {
        let mut es: Vec<usize> = out[v]
            .iter()
            .copied()
            .filter(|&i| tight[i] && in_comp.contains(&g.edges[i].to))
            .collect();
        es.sort_by_key(|&i| (g.edges[i].to, g.edges[i].symbol));
        es
    };
    // can `from` reach v0 avoiding `blocked`?
    let reaches = |from: usize, blocked: &BTreeSet<usize>| -> bool {
        let mut stack = vec![from];
        let mut seen = BTreeSet::from([from]);
        while let Some(u) = stack.pop() {
            for i in tight_out(u) {
                let t = g.edges[i].to;
                if t == v0 {
                    return true;
                }
                if !blocked.contains(&t) && seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        false
    };
    let mut nodes = vec![v0];
    let mut edges = Vec::new();
    let mut blocked = BTreeSet::from([v0]);
    let mut cur = v0;
    loop {
        let choice = tight_out(cur)
            .into_iter()
            .find(|&i| {
                let t = g.edges[i].to;
                t == v0 || (!blocked.contains(&t) && reaches(t, &blocked))
            })
            .expect("tight component is strongly connected");
        edges.push(choice);
        let t = g.edges[choice].to;
        if t == v0 {
            return (nodes, edges);
        }
        nodes.push(t);
        blocked.insert(t);
        cur = t;
    }
}

/// Maximum mean over all simple cycles, by enumeration.
pub fn brute_force_max_mean(g: &WordGraph) -> Option<Rational> {
    let n = g.nodes.len();
    let mut best_edge: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for e in &g.edges {
        let w = best_edge.entry((e.from, e.to)).or_insert_with(|| e.weight.clone());
        if e.weight > *w {
            *w = e.weight.clone();
        }
    }
    let mut best: Option<Rational> = None;
    fn dfs(
        s: usize,
        v: usize,
        n: usize,
        sum: Rational,
        len: usize,
        on_path: &mut Vec<bool>,
        w: &BTreeMap<(usize, usize), Rational>,
        best: &mut Option<Rational>,
    ) {
        for u in s..n {
            let Some(wt) = w.get(&(v, u)) else { continue };
            if u == s {
                let m = (&sum + wt) / Rational::from_integer(BigInt::from(len + 1));
                if best.as_ref().is_none_or(|b| m > *b) {
                    *best = Some(m);
                }
            } else if !on_path[u] {
                on_path[u] = true;
                dfs(s, u, n, &sum + wt, len + 1, on_path, w, best);
                on_path[u] = false;
            }
        }
    }
    for s in 0..n {
        let mut on_path = vec![false; n];
        on_path[s] = true;
        dfs(s, s, n, Rational::zero(), 0, &mut on_path, &best_edge, &mut best);
    }
    best
}

pub fn beta_truncated(spec: &dyn ShiftSpec, a: &Potential, k: u64) -> Result<MaxMeanCycleResult> {
    karp_max_mean_cycle(&build_graph(spec, a, k)?)
}

// ------------------------------------------------------------ certificates

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleReading {
    /// Every cycle of the language-defined Λ counts, including those through 1.
    #[default]
    AllCycles,
    /// Only cycles avoiding 1, i.e. invariant measures with finitely many 1s.
    C1Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Argument {
    /// The whole alphabet was scanned.
    FiniteAlphabet,
    /// `β_K = sup A`, and `β ≤ sup A` always.
    SupAttained,
    /// Λ: classes beyond `K` and excursions into them stay below `β_K`.
    ClassDecomposition,
    /// Star shift, range 1: every cycle alternates the hub with a spoke.
    HubAlternation,
    /// No shipped argument applies; only the bracket `[lower, upper]` is claimed.
    Bracket,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BetaCertificate {
    #[serde(with = "rational_str")]
    pub lower: Rational,
    pub truncation: u64,
    /// Bound on everything the truncation does not see.
    pub tail_bound: ExtendedValue,
    pub upper: ExtendedValue,
    pub exact: bool,
    pub argument: Argument,
    pub reading: CycleReading,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes_used: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical: Option<MaxMeanCycleResult>,
    pub orbit: SequencePoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PeriodicMeasure {
    pub orbit: SequencePoint,
}

impl PeriodicMeasure {
    pub fn new(spec: &dyn ShiftSpec, period: impl Into<Word>) -> Result<Self> {
        Ok(PeriodicMeasure {
            orbit: SequencePoint::new(spec, Vec::new(), period)?,
        })
    }

    pub fn period(&self) -> usize {
        self.orbit.period().len()
    }
}

pub fn integral(spec: &dyn ShiftSpec, a: &Potential, mu: &PeriodicMeasure) -> Result<ExtendedValue> {
    let pts = mu.orbit.orbit();
    let mut sum = ExtendedValue::zero();
    for x in &pts {
        sum = sum + a.eval(spec, x)?;
    }
    Ok(sum.scale(&Rational::new(BigInt::from(1), BigInt::from(pts.len()))))
}

/// Classes `2..=K` without symbol 1.
fn strict_alphabet(spec: &dyn ShiftSpec, k: u64) -> Vec<Symbol> {
    spec.truncated_alphabet(k).into_iter().filter(|&a| a != 1).collect()
}

pub fn beta_certified(
    spec: &dyn ShiftSpec,
    a: &Potential,
    k: u64,
    reading: CycleReading,
) -> Result<BetaCertificate> {
    a.validate(spec)?;
    let sup_all = a.sup_on_cylinder(spec, &Word::empty())?;
    if let Potential::DistanceToOrbit { orbit, .. } = a {
        let mu = PeriodicMeasure { orbit: orbit.clone() };
        let v = integral(spec, a, &mu)?;
        let exact = v == sup_all;
        let lower = v.finite().cloned().ok_or_else(|| Error::Internal("integral is −∞".into()))?;
        return Ok(BetaCertificate {
            lower,
            truncation: 0,
            tail_bound: sup_all.clone(),
            upper: sup_all,
            exact,
            argument: if exact { Argument::SupAttained } else { Argument::Bracket },
            reading,
            classes_used: None,
            critical: None,
            orbit: orbit.clone(),
        });
    }
    let lambda = spec.lambda();
    let finite = spec.finite_alphabet();
    let (k, g) = if finite {
        let n = spec.alphabet().iter().count() as u64;
        (n, build_graph(spec, a, n)?)
    } else if lambda.is_some() && reading == CycleReading::C1Strict {
        (k, build_graph_over(spec, a, &strict_alphabet(spec, k))?)
    } else {
        (k, build_graph(spec, a, k)?)
    };
    let crit = karp_max_mean_cycle(&g)?;
    let orbit = SequencePoint::new(spec, Vec::new(), crit.symbols.clone())?;
    let lower = crit.value.clone();
    let lower_v = ExtendedValue::Finite(lower.clone());
    let classes_used = lambda.map(|_| (2..=k).collect::<Vec<u64>>());
    let mut cert = BetaCertificate {
        lower: lower.clone(),
        truncation: k,
        tail_bound: ExtendedValue::NegInf,
        upper: sup_all.clone(),
        exact: false,
        argument: Argument::Bracket,
        reading,
        classes_used,
        critical: Some(crit),
        orbit,
    };
    if finite {
        cert.exact = true;
        cert.upper = lower_v;
        cert.argument = Argument::FiniteAlphabet;
        return Ok(cert);
    }
    if sup_all == lower_v {
        cert.exact = true;
        cert.tail_bound = sup_all;
        cert.argument = Argument::SupAttained;
        return Ok(cert);
    }
    if let (Some(h), Some(1)) = (spec.star_hub(), a.range()) {
        // every cycle alternates the hub with one spoke
        let spokes = spec.followers1(&Word(vec![h]))?;
        let s = a.sup_over_heads(spec, &spokes)?;
        let bound = match &s {
            ExtendedValue::Finite(y) => ExtendedValue::Finite((a.window_value(spec, &[h])? + y) / int(2)),
            ExtendedValue::NegInf => ExtendedValue::NegInf,
        };
        cert.exact = bound == lower_v;
        cert.argument = if cert.exact { Argument::HubAlternation } else { Argument::Bracket };
        cert.upper = bound.clone().max(lower_v);
        cert.tail_bound = bound;
        return Ok(cert);
    }
    let Some(l) = lambda else {
        cert.tail_bound = sup_all;
        return Ok(cert);
    };
    // classes beyond K
    let beyond = l.class_set(k + 1, &[Position::Min, Position::Interior, Position::Max]);
    let s = a.sup_over_heads(spec, &beyond)?;
    let tail_bound = match reading {
        CycleReading::C1Strict => s,
        CycleReading::AllCycles if a.range() == Some(1) => {
            let a1 = a.sup_on_cylinder(spec, &Word(vec![1]))?;
            let size = int(l.layout().size(k + 1) as i64);
            let excursion = match (&a1, &s) {
                (ExtendedValue::Finite(x), ExtendedValue::Finite(y)) if x > y => {
                    ExtendedValue::Finite((x + &size * y) / (&size + int(1)))
                }
                _ => s.clone(),
            };
            s.max(excursion)
        }
        // windows longer than one symbol straddle excursions; no shipped bound
        CycleReading::AllCycles => sup_all.clone(),
    };
    cert.exact = tail_bound < lower_v;
    if cert.exact {
        cert.argument = Argument::ClassDecomposition;
        cert.upper = lower_v;
    } else {
        cert.upper = tail_bound.clone().max(lower_v);
    }
    cert.tail_bound = tail_bound;
    Ok(cert)
}

pub fn maximizing_measure(spec: &dyn ShiftSpec, a: &Potential, cert: &BetaCertificate) -> Result<PeriodicMeasure> {
    if !cert.exact {
        return Err(Error::CertificateNotExact);
    }
    let mu = PeriodicMeasure {
        orbit: cert.orbit.clone(),
    };
    let v = integral(spec, a, &mu)?;
    if v != ExtendedValue::Finite(cert.lower.clone()) {
        return Err(Error::Internal(format!("critical orbit integrates to {v}, not {}", cert.lower)));
    }
    Ok(mu)
}

/// `{ i : sup A|[i] ≥ β }` under `sup A ≤ β` and the strict tail condition.
pub fn finite_support_alphabet(spec: &dyn ShiftSpec, a: &Potential, beta: &Rational) -> Result<BTreeSet<Symbol>> {
    let sup = a.sup_on_cylinder(spec, &Word::empty())?;
    if sup > ExtendedValue::Finite(beta.clone()) {
        return Err(Error::HypothesisViolated(format!("sup A = {sup} exceeds β = {beta}")));
    }
    let t = a.tail_condition(spec, beta)?;
    match t.exceptions {
        Some(set) if t.holds => Ok(set),
        _ => Err(Error::HypothesisViolated(format!(
            "tail limsup {} is not below β = {beta}",
            t.tail_value
        ))),
    }
}

/// Symbols a maximizing orbit may use, as a set.
pub fn orbit_symbols(x: &SequencePoint) -> SymbolSet {
    SymbolSet::finite(x.period().iter().copied())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{coercive, TailRule, TailShape};
    use crate::shift::{EvenShift, LambdaShift, MarkovRows, MarkovShift, Shift};
    use crate::value::ratio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

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

    #[test]
    fn single_and_double_loops() {
        let g = WordGraph::from_edges(1, [(0, 0, int(3))]);
        assert_eq!(karp_max_mean_cycle(&g).unwrap().value, int(3));
        let g = WordGraph::from_edges(2, [(0, 0, int(1)), (1, 1, int(2)), (0, 1, int(0))]);
        let r = karp_max_mean_cycle(&g).unwrap();
        assert_eq!(r.value, int(2));
        assert_eq!(r.cycle, vec![1]);
        assert!(karp_max_mean_cycle(&WordGraph::from_edges(2, [(0, 1, int(1))])).is_err());
    }

    #[test]
    fn karp_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let n = rng.gen_range(1..=6);
            let m = rng.gen_range(1..=3 * n);
            let edges: Vec<_> = (0..m)
                .map(|_| {
                    (
                        rng.gen_range(0..n),
                        rng.gen_range(0..n),
                        ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4)),
                    )
                })
                .collect();
            let g = WordGraph::from_edges(n, edges);
            match brute_force_max_mean(&g) {
                None => assert!(karp_max_mean_cycle(&g).is_err()),
                Some(b) => {
                    let r = karp_max_mean_cycle(&g).unwrap();
                    assert_eq!(r.value, b);
                    let sum: Rational = r
                        .cycle
                        .iter()
                        .zip(r.cycle.iter().cycle().skip(1))
                        .map(|(&u, &v)| {
                            g.edges
                                .iter()
                                .filter(|e| e.from == u && e.to == v)
                                .map(|e| e.weight.clone())
                                .max()
                                .unwrap()
                        })
                        .sum();
                    assert_eq!(sum / int(r.length as i64), b);
                }
            }
        }
    }

    #[test]
    fn full_shift_range_one() {
        let full = Shift::full();
        let a = Potential::per_symbol([(0, int(1))], TailRule::constant(int(0)));
        let g = build_graph(&full, &a, 3).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 3));
        let cert = beta_certified(&full, &a, 3, CycleReading::AllCycles).unwrap();
        assert!(cert.exact);
        assert_eq!(cert.lower, int(1));
        assert_eq!(cert.orbit.to_string(), "(0)^∞");
    }

    #[test]
    fn even_shift_beta() {
        let a = even_table();
        let cert = beta_certified(&EvenShift, &a, 2, CycleReading::AllCycles).unwrap();
        assert_eq!(cert.lower, int(2));
        assert!(cert.exact);
        let mu = maximizing_measure(&EvenShift, &a, &cert).unwrap();
        assert_eq!(mu.orbit.to_string(), "(3)^∞");
        let alt = PeriodicMeasure::new(&EvenShift, vec![2, 3, 3]).unwrap();
        assert_eq!(integral(&EvenShift, &a, &alt).unwrap(), ratio(2, 3).into());
    }

    #[test]
    fn lambda_per_class_constants() {
        let l = LambdaShift::standard();
        let a = Potential::per_symbol(
            [(1, int(0))],
            TailRule::on_classes(TailShape::Reciprocal {
                c: int(0),
                s: int(2),
                shift: 0,
            }),
        );
        let cert = beta_certified(&l, &a, 4, CycleReading::AllCycles).unwrap();
        assert!(cert.exact, "{cert:?}");
        assert_eq!(cert.lower, int(1));
        let strict = beta_certified(&l, &a, 4, CycleReading::C1Strict).unwrap();
        assert!(strict.exact);
        assert_eq!(strict.lower, int(1));
    }

    #[test]
    fn lambda_non_decaying_tail_is_a_bracket() {
        let l = LambdaShift::standard();
        let a = Potential::per_symbol([(2, int(0)), (3, int(0))], TailRule::constant(int(1)));
        let cert = beta_certified(&l, &a, 3, CycleReading::AllCycles).unwrap();
        // sup A = 1 is attained at (4)^∞ inside class 3
        assert!(cert.exact);
        let b = Potential::per_symbol(
            [],
            TailRule::on_classes(TailShape::Reciprocal {
                c: int(1),
                s: int(-1),
                shift: 0,
            }),
        );
        let cert = beta_certified(&l, &b, 4, CycleReading::AllCycles).unwrap();
        assert!(!cert.exact);
        assert_eq!(cert.argument, Argument::Bracket);
        assert!(maximizing_measure(&l, &b, &cert).is_err());
    }

    #[test]
    fn star_hub_alternation() {
        let star = Shift::Markov(MarkovShift::new(MarkovRows::Star { hub: 0 }).unwrap());
        let a = Potential::per_symbol([(0, int(-3))], TailRule::constant(int(5)));
        let c = beta_certified(&star, &a, 4, CycleReading::AllCycles).unwrap();
        assert!(c.exact);
        assert_eq!(c.argument, Argument::HubAlternation);
        assert_eq!(c.lower, int(1));
        let decaying = Potential::per_symbol([(0, int(-3))], coercive(int(5)).tail().unwrap().clone());
        let c = beta_certified(&star, &decaying, 4, CycleReading::AllCycles).unwrap();
        assert!(c.exact);
        assert_eq!(c.lower, ratio(1, 2));
        assert_eq!(c.orbit.period(), &[1, 0]);
    }

    #[test]
    fn finite_support() {
        let full = Shift::full();
        let recip = |c: i64| {
            Potential::per_symbol(
                [(0, int(0))],
                TailRule::on_symbols(TailShape::Reciprocal {
                    c: int(c),
                    s: int(-1),
                    shift: 0,
                }),
            )
        };
        // a_i = −1/i creeps up to β = 0, so the strict tail hypothesis fails
        assert!(matches!(
            finite_support_alphabet(&full, &recip(0), &int(0)),
            Err(Error::HypothesisViolated(_))
        ));
        assert_eq!(finite_support_alphabet(&full, &recip(-1), &int(0)).unwrap(), [0].into());
        let c = Potential::per_symbol([], TailRule::constant(int(2)));
        assert!(finite_support_alphabet(&full, &c, &int(2)).is_err());
    }
}
