//! Dijkstra's algorithm on the working-set heap.
//!
//! The heap has no decrease-key, so a shorter tentative distance pushes a
//! fresh entry and the old one is skipped when it surfaces. Transcripts
//! record logical contents: discovered vertices not yet settled.

use std::cell::Cell;

use rand::{Rng, RngExt};

use crate::element::{elements, Elem, Word};
use crate::error::{Error, Result};
use crate::oracle::{ComparisonOracle, Comparator};
use crate::repr::RootedGraph;
use crate::sorter::{cds_permutations, topological_heapsort, SortOptions, Transcript};
use crate::wsheap::WorkingSetHeap;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    graph: RootedGraph,
    out: Vec<Vec<(Elem, f64)>>,
}

impl WeightedDigraph {
    /// Repeated arcs keep their smallest weight; self-loops are dropped.
    pub fn new(n: usize, arcs: &[(Elem, Elem, f64)], root: Elem) -> Result<Self> {
        for &(u, v, w) in arcs {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Input(format!("arc {u} {v} has nonpositive weight {w}")));
            }
        }
        let pairs: Vec<(Elem, Elem)> = arcs.iter().map(|&(u, v, _)| (u, v)).collect();
        let graph = RootedGraph::new(n, &pairs, root, true)?;
        let mut out: Vec<Vec<(Elem, f64)>> = vec![Vec::new(); n];
        for &(u, v, w) in arcs {
            if u == v {
                continue;
            }
            match out[u.index()].iter_mut().find(|(t, _)| *t == v) {
                Some(slot) => slot.1 = slot.1.min(w),
                None => out[u.index()].push((v, w)),
            }
        }
        for list in &mut out {
            list.sort_by_key(|a| a.0);
        }
        Ok(WeightedDigraph { graph, out })
    }

    /// Weights every arc of `graph` with `weight(u, v)`.
    pub fn from_graph(graph: &RootedGraph, weight: impl FnMut(Elem, Elem) -> f64) -> Result<Self> {
        let mut weight = weight;
        let arcs: Vec<(Elem, Elem, f64)> = elements(graph.n())
            .flat_map(|u| graph.out_neighbors(u).iter().map(move |&v| (u, v)))
            .map(|(u, v)| (u, v, weight(u, v)))
            .collect();
        WeightedDigraph::new(graph.n(), &arcs, graph.root())
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn m(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn root(&self) -> Elem {
        self.graph.root()
    }

    pub fn graph(&self) -> &RootedGraph {
        &self.graph
    }

    pub fn out_arcs(&self, v: Elem) -> &[(Elem, f64)] {
        &self.out[v.index()]
    }

    pub fn arcs(&self) -> Vec<(Elem, Elem, f64)> {
        elements(self.n()).flat_map(|u| self.out[u.index()].iter().map(move |&(v, w)| (u, v, w))).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DijkstraRun {
    pub order: Word,
    pub dist: Vec<f64>,
    pub transcript: Transcript,
    pub comparisons: u64,
    pub decrease_keys: u64,
}

/// Heap entries compare by `(distance, vertex id)`.
struct EntryOrder<'a> {
    entries: &'a [(f64, Elem)],
    count: Cell<u64>,
}

impl Comparator for EntryOrder<'_> {
    fn less(&self, a: usize, b: usize) -> bool {
        self.count.set(self.count.get() + 1);
        let (da, va) = self.entries[a];
        let (db, vb) = self.entries[b];
        da < db || (da == db && va < vb)
    }
}

pub fn dijkstra_order(g: &WeightedDigraph) -> Result<DijkstraRun> {
    let n = g.n();
    let mut dist: Vec<Option<f64>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut entries: Vec<(f64, Elem)> = Vec::with_capacity(n + g.m());
    let mut heap = WorkingSetHeap::with_capacity(n);
    let mut comparisons = 0;
    let mut decrease_keys = 0;
    let mut order = Vec::with_capacity(n);
    let mut transcript = Transcript::default();

    let s = g.root();
    dist[s.index()] = Some(0.0);
    entries.push((0.0, s));
    let cmp = EntryOrder { entries: &entries, count: Cell::new(0) };
    heap.insert(0, &cmp)?;
    transcript.queues.push(vec![s]);

    while !heap.is_empty() {
        let cmp = EntryOrder { entries: &entries, count: Cell::new(0) };
        let top = heap.extract_min(&cmp)?;
        comparisons += cmp.count.get();
        let (d, u) = entries[top];
        if settled[u.index()] || dist[u.index()] != Some(d) {
            continue;
        }
        settled[u.index()] = true;
        order.push(u);
        for &(v, w) in g.out_arcs(u) {
            if settled[v.index()] {
                continue;
            }
            let candidate = d + w;
            let improves = match dist[v.index()] {
                None => true,
                Some(old) if candidate < old => {
                    decrease_keys += 1;
                    true
                }
                Some(_) => false,
            };
            if improves {
                dist[v.index()] = Some(candidate);
                entries.push((candidate, v));
                let cmp = EntryOrder { entries: &entries, count: Cell::new(0) };
                heap.insert(entries.len() - 1, &cmp)?;
                comparisons += cmp.count.get();
            }
        }
        transcript
            .queues
            .push(elements(n).filter(|v| dist[v.index()].is_some() && !settled[v.index()]).collect());
    }
    if order.len() < n {
        return Err(Error::Input("some vertex is unreachable from the root".into()));
    }
    Ok(DijkstraRun {
        order,
        dist: dist.into_iter().map(|d| d.unwrap_or(f64::INFINITY)).collect(),
        transcript,
        comparisons,
        decrease_keys,
    })
}

/// Every vertex after the root has an in-neighbour earlier in `order`.
pub fn is_vertex_search_order(graph: &RootedGraph, order: &[Elem]) -> bool {
    let n = graph.n();
    if order.len() != n || order.first() != Some(&graph.root()) {
        return false;
    }
    let mut reached = vec![false; n];
    let mut seen = vec![false; n];
    reached[graph.root().index()] = true;
    for &v in order {
        if v.index() >= n || seen[v.index()] || !reached[v.index()] {
            return false;
        }
        seen[v.index()] = true;
        graph.out_neighbors(v).iter().for_each(|u| reached[u.index()] = true);
    }
    true
}

/// Weights realising `pi` as the unique distance ordering: an arc from
/// position `i` to position `j` costs `j − i` when it points forward and
/// `n` otherwise.
pub fn constructed_weights(graph: &RootedGraph, pi: &[Elem]) -> Result<WeightedDigraph> {
    let n = graph.n();
    let mut pos = vec![0usize; n];
    pi.iter().enumerate().for_each(|(i, v)| pos[v.index()] = i);
    WeightedDigraph::from_graph(graph, |u, v| {
        let (i, j) = (pos[u.index()], pos[v.index()]);
        if j > i { (j - i) as f64 } else { n as f64 }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistanceMismatch {
    /// A vertex-search order that constructed weights failed to realise.
    NotRealised { order: Word, got: Word },
    /// A Dijkstra order that is not a vertex-search order.
    NotSearch { order: Word },
}

/// Both inclusions between distance orderings and vertex-search orders:
/// every enumerated search order is realised by constructed weights, and
/// `random_trials` random weightings only produce search orders.
pub fn check_distance_ordering_equivalence<R: Rng>(
    graph: &RootedGraph,
    random_trials: usize,
    rng: &mut R,
) -> Result<std::result::Result<(), DistanceMismatch>> {
    if graph.n() > 7 {
        return Err(Error::SizeLimit { n: graph.n(), limit: 7 });
    }
    for pi in cds_permutations(&mut graph.cds(), 7)? {
        let run = dijkstra_order(&constructed_weights(graph, &pi)?)?;
        if run.order != pi {
            return Ok(Err(DistanceMismatch::NotRealised { order: pi, got: run.order }));
        }
    }
    for _ in 0..random_trials {
        let g = WeightedDigraph::from_graph(graph, |_, _| rng.random_range(0.01..10.0))?;
        let run = dijkstra_order(&g)?;
        if !is_vertex_search_order(graph, &run.order) {
            return Ok(Err(DistanceMismatch::NotSearch { order: run.order }));
        }
    }
    Ok(Ok(()))
}

/// True when no two vertices share a distance.
pub fn has_unique_ordering(run: &DijkstraRun) -> bool {
    let mut d = run.dist.clone();
    d.sort_by(f64::total_cmp);
    d.windows(2).all(|p| p[0] < p[1])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptMismatch {
    pub dijkstra: Transcript,
    pub heapsort: Transcript,
}

/// Dijkstra and topological heapsort on the vertex-search structure, with
/// the distance ordering as hidden order, see the same queue contents.
pub fn check_transcript_equivalence(g: &WeightedDigraph) -> Result<std::result::Result<(), TranscriptMismatch>> {
    let run = dijkstra_order(g)?;
    let oracle = ComparisonOracle::new(run.order.clone())?;
    let sorted = topological_heapsort(&mut g.graph().cds(), &oracle, SortOptions { transcript: true, heap_log: false })?;
    let heapsort = sorted.transcript.unwrap_or_default();
    if heapsort == run.transcript && sorted.report.output == run.order {
        Ok(Ok(()))
    } else {
        Ok(Err(TranscriptMismatch { dijkstra: run.transcript, heapsort }))
    }
}
