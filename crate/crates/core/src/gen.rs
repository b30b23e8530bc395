//! Seeded instance generators for tests, suites and benches.

use std::collections::HashSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, RngExt};

use crate::chordal::ChordalGraph;
use crate::dijkstra::WeightedDigraph;
use crate::element::{elements, Elem, ElemSet};
use crate::error::Result;
use crate::mps::ExplicitMps;
use crate::repr::{Formula, FormulaSystem, RootedGraph, Token};

/// A random monotone system in which every element can eventually be
/// chosen. Each `p_x` is an OR of up to three AND-terms; the first term only
/// uses elements before `x` in a hidden random order, which keeps the
/// system full.
pub fn random_mps<R: Rng>(n: usize, rng: &mut R) -> ExplicitMps {
    let mut order: Vec<Elem> = elements(n).collect();
    order.shuffle(rng);
    let density = rng.random_range(0.15..0.6);
    let mut terms: Vec<Vec<ElemSet>> = vec![Vec::new(); n];
    for (i, &x) in order.iter().enumerate() {
        if rng.random_bool(0.2) {
            terms[x.index()].push(ElemSet::default());
            continue;
        }
        let first: ElemSet = order[..i].iter().copied().filter(|_| rng.random_bool(density)).collect();
        terms[x.index()].push(first);
        for _ in 0..rng.random_range(0..3) {
            let t: ElemSet = elements(n).filter(|&y| y != x && rng.random_bool(density)).collect();
            terms[x.index()].push(t);
        }
    }
    ExplicitMps::from_fn(n, |x, chosen| terms[x.index()].iter().any(|t| t.is_subset(chosen)))
        .expect("OR of AND-terms is monotone")
}

/// A random chordal graph built by adding vertices whose earlier
/// neighbourhood is a clique, then relabelled. With `connected` every new
/// vertex attaches to at least one earlier vertex.
pub fn random_chordal<R: Rng>(n: usize, connected: bool, rng: &mut R) -> ChordalGraph {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut edges: HashSet<(usize, usize)> = HashSet::new();
    let max_clique = rng.random_range(1..=6usize);
    for v in 1..n {
        if !connected && rng.random_bool(0.1) {
            continue;
        }
        let u = rng.random_range(0..v);
        let mut clique = vec![u];
        let mut candidates = adj[u].clone();
        candidates.shuffle(rng);
        for &w in candidates.iter().take(3 * max_clique) {
            if clique.len() >= max_clique {
                break;
            }
            if rng.random_bool(0.7) && clique.iter().all(|&c| edges.contains(&(c.min(w), c.max(w)))) {
                clique.push(w);
            }
        }
        for c in clique {
            adj[c].push(v);
            adj[v].push(c);
            edges.insert((c, v));
        }
    }
    let mut label: Vec<Elem> = elements(n).collect();
    label.shuffle(rng);
    let edges: Vec<(Elem, Elem)> = edges.into_iter().map(|(a, b)| (label[a], label[b])).collect();
    ChordalGraph::new(n, &edges).expect("construction keeps a perfect elimination order")
}

/// A random digraph reachable from its root: a random arborescence plus
/// about `extra · n` further arcs.
pub fn random_digraph<R: Rng>(n: usize, extra: f64, directed: bool, rng: &mut R) -> RootedGraph {
    let mut order: Vec<Elem> = elements(n).collect();
    order.shuffle(rng);
    let mut arcs: Vec<(Elem, Elem)> = (1..n).map(|i| (order[rng.random_range(0..i)], order[i])).collect();
    if n > 1 {
        for _ in 0..(extra * n as f64).round() as usize {
            arcs.push((Elem::new(rng.random_range(0..n)), Elem::new(rng.random_range(0..n))));
        }
    }
    let root = order.first().copied().unwrap_or(Elem(0));
    RootedGraph::new(n, &arcs, root, directed).expect("arborescence reaches every vertex")
}

/// Weights drawn uniformly from `[0.01, 10)`.
pub fn random_weighted_digraph<R: Rng>(n: usize, extra: f64, rng: &mut R) -> WeightedDigraph {
    let g = random_digraph(n, extra, true, rng);
    WeightedDigraph::from_graph(&g, |_, _| rng.random_range(0.01..10.0)).expect("weights are positive")
}

/// A random antimatroid given as formulas: a DNF of the generated system.
pub fn random_formulas<R: Rng>(n: usize, rng: &mut R) -> FormulaSystem {
    FormulaSystem::from_mps(&random_mps(n, rng))
}

/// Three free elements followed by a chain of `n − 3` that starts once all
/// three are chosen: `|P| = 6` for every `n ≥ 3`.
pub fn bottleneck_chain(n: usize) -> Result<FormulaSystem> {
    let free = n.min(3);
    let formulas = elements(n)
        .map(|x| {
            let i = x.index();
            if i < free {
                return Ok(Formula::constant(x, true));
            }
            let tokens = if i == free {
                // ((x0 & x1) & x2)
                let mut t = vec![Token::LParen; free - 1];
                t.push(Token::Var(Elem(0)));
                for j in 1..free {
                    t.extend([Token::And, Token::Var(Elem::new(j)), Token::RParen]);
                }
                t
            } else {
                vec![Token::Var(Elem::new(i - 1))]
            };
            Formula::new(x, tokens)
        })
        .collect::<Result<Vec<_>>>()?;
    FormulaSystem::new(formulas)
}

/// A uniformly random permutation of `items`.
pub fn shuffled<T: Clone, R: Rng>(items: &[T], rng: &mut R) -> Vec<T> {
    let mut v = items.to_vec();
    v.shuffle(rng);
    v
}

/// Picks one element of a nonempty slice.
pub fn pick<'a, T, R: Rng>(items: &'a [T], rng: &mut R) -> &'a T {
    items.choose(rng).expect("nonempty")
}
