use std::time::Instant;

use blur_core::ergopt::{brute_force_max_mean, karp_max_mean_cycle, WordGraph};
use blur_core::value::Rational;
use num::{BigInt, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(rng: &mut ChaCha8Rng) -> WordGraph {
    let n = rng.gen_range(1..=8);
    let density = rng.gen_range(0.15..0.7);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if rng.gen_bool(density) {
                let w = Rational::new(BigInt::from(rng.gen_range(-20..=20)), BigInt::from(rng.gen_range(1..=6)));
                edges.push((u, v, w));
            }
        }
    }
    // a parallel edge now and then
    if !edges.is_empty() && rng.gen_bool(0.3) {
        let (u, v, _) = edges[0].clone();
        edges.push((u, v, Rational::from_integer(BigInt::from(rng.gen_range(-5..=5)))));
    }
    WordGraph::from_edges(n, edges)
}

/// max over k ≤ n of max_i (W^k)_ii / k in the (max, +) semiring.
fn closed_walk_oracle(g: &WordGraph) -> Option<Rational> {
    let n = g.node_count();
    let mut best: Option<Rational> = None;
    for s in 0..n {
        let mut reach: Vec<Option<Rational>> = vec![None; n];
        reach[s] = Some(Rational::zero());
        for k in 1..=n {
            let mut next: Vec<Option<Rational>> = vec![None; n];
            for e in &g.edges {
                if let Some(d) = &reach[e.from] {
                    let c = d + &e.weight;
                    if next[e.to].as_ref().is_none_or(|x| c > *x) {
                        next[e.to] = Some(c);
                    }
                }
            }
            if let Some(d) = &next[s] {
                let m = d / Rational::from_integer(BigInt::from(k));
                if best.as_ref().is_none_or(|b| m > *b) {
                    best = Some(m);
                }
            }
            reach = next;
        }
    }
    best
}

#[test]
fn karp_matches_enumeration_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let start = Instant::now();
    let mut cyclic = 0;
    for _ in 0..300 {
        let g = random_graph(&mut rng);
        let walk = closed_walk_oracle(&g);
        assert_eq!(walk, brute_force_max_mean(&g));
        match karp_max_mean_cycle(&g) {
            Ok(r) => {
                cyclic += 1;
                assert_eq!(Some(r.value.clone()), walk);
                // the reported cycle realizes the value
                let sum: Rational = r.symbols.iter().map(|&i| g.edges[i as usize].weight.clone()).sum();
                assert_eq!(sum / Rational::from_integer(BigInt::from(r.length)), r.value);
                for (j, &i) in r.symbols.iter().enumerate() {
                    let e = &g.edges[i as usize];
                    assert_eq!(e.from, r.cycle[j]);
                    assert_eq!(e.to, r.cycle[(j + 1) % r.cycle.len()]);
                }
            }
            Err(_) => assert_eq!(walk, None),
        }
    }
    assert!(cyclic >= 200, "only {cyclic} graphs had cycles");
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn acyclic_graph_is_an_error() {
    let g = WordGraph::from_edges(3, [(0, 1, Rational::zero()), (1, 2, Rational::zero())]);
    assert!(karp_max_mean_cycle(&g).is_err());
}
