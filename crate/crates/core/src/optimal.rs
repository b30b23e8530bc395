//! The comparison-optimal pipeline: bottlenecks, sorting the rest through a
//! trace structure, and a constraint-aware merge.

use std::collections::VecDeque;
use std::time::Instant;

use crate::element::{Elem, Word};
use crate::error::{Error, Result};
use crate::oracle::ComparisonOracle;
use crate::sorter::{topological_heapsort, CandidateStructure, SortOptions, SortReport};

/// The partition `L1..Lk` of `Σ`: `L1` is available initially and `L(i+1)`
/// is everything that becomes available once `L1 ∪ … ∪ Li` is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSequence {
    pub layers: Vec<Vec<Elem>>,
}

impl LayerSequence {
    pub fn k(&self) -> usize {
        self.layers.len()
    }

    pub fn n(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Singleton layers in layer order.
    pub fn bottlenecks(&self) -> BottleneckSequence {
        let elements = self.layers.iter().filter(|l| l.len() == 1).map(|l| l[0]).collect();
        BottleneckSequence { elements, n: self.n() }
    }

    /// `log2 |P| ≥ n − k`.
    pub fn layer_bound_bits(&self) -> f64 {
        (self.n() - self.k()) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BottleneckSequence {
    pub elements: Vec<Elem>,
    n: usize,
}

impl BottleneckSequence {
    pub fn t(&self) -> usize {
        self.elements.len()
    }

    /// `log2 |P| ≥ (n − t) / 2`.
    pub fn bound_bits(&self) -> f64 {
        (self.n - self.t()) as f64 / 2.0
    }
}

/// One full pass over the structure, layer by layer.
pub fn compute_layers<C: CandidateStructure + ?Sized>(cds: &mut C) -> Result<LayerSequence> {
    let n = cds.target_len();
    let mut current = Vec::new();
    cds.init(&mut current)?;
    let mut layers = Vec::new();
    let mut covered = 0;
    while !current.is_empty() {
        current.sort();
        let mut next = Vec::new();
        for &x in &current {
            cds.step(x, &mut next)?;
        }
        covered += current.len();
        layers.push(std::mem::replace(&mut current, next));
    }
    if covered < n {
        return Err(Error::NotFull { covered, n });
    }
    Ok(LayerSequence { layers })
}

pub fn bottleneck_sequence(layers: &LayerSequence) -> BottleneckSequence {
    layers.bottlenecks()
}

/// A structure for the trace `A|Γ`: elements outside `Γ` are chosen as soon
/// as they become available (first in, first out) and never reported.
#[derive(Debug)]
pub struct TraceCds<C> {
    inner: C,
    in_gamma: Vec<bool>,
    gamma_len: usize,
    pending: VecDeque<Elem>,
    buffer: Vec<Elem>,
}

impl<C: CandidateStructure> TraceCds<C> {
    pub fn new(inner: C, gamma: &[Elem]) -> Result<Self> {
        let n = inner.size();
        let mut in_gamma = vec![false; n];
        for &g in gamma {
            match in_gamma.get_mut(g.index()) {
                Some(slot) if !*slot => *slot = true,
                Some(_) => return Err(Error::Input(format!("{g} listed twice in the sub-alphabet"))),
                None => return Err(Error::Input(format!("{g} outside the alphabet"))),
            }
        }
        Ok(TraceCds { inner, in_gamma, gamma_len: gamma.len(), pending: VecDeque::new(), buffer: Vec::new() })
    }

    pub fn into_inner(self) -> C {
        self.inner
    }

    fn cleanup(&mut self, out: &mut Vec<Elem>) -> Result<()> {
        loop {
            for y in self.buffer.drain(..) {
                if self.in_gamma[y.index()] {
                    out.push(y);
                } else {
                    self.pending.push_back(y);
                }
            }
            match self.pending.pop_front() {
                Some(y) => self.inner.step(y, &mut self.buffer)?,
                None => return Ok(()),
            }
        }
    }
}

impl<C: CandidateStructure> CandidateStructure for TraceCds<C> {
    fn size(&self) -> usize {
        self.inner.size()
    }

    fn target_len(&self) -> usize {
        self.gamma_len
    }

    fn init(&mut self, out: &mut Vec<Elem>) -> Result<()> {
        self.pending.clear();
        self.buffer.clear();
        self.inner.init(&mut self.buffer)?;
        self.cleanup(out)
    }

    fn step(&mut self, x: Elem, out: &mut Vec<Elem>) -> Result<()> {
        self.inner.step(x, &mut self.buffer)?;
        self.cleanup(out)
    }

    fn work(&self) -> u64 {
        self.inner.work()
    }
}

/// Smallest `i` with `d ≺ g[i]`, or `g.len()` when `d` follows all of `g`.
/// Probes offsets 0, 1, 3, 7, … and then binary-searches the last gap.
pub fn exp_search(d: Elem, g: &[Elem], oracle: &ComparisonOracle) -> usize {
    let len = g.len();
    // invariant: g[..lo] ≺ d, and d ≺ g[hi] unless hi == len
    let mut lo = 0;
    let mut probe = 0;
    let mut hi = len;
    while probe < len {
        if oracle.less(d, g[probe]) {
            hi = probe;
            break;
        }
        lo = probe + 1;
        probe = if lo == len { len } else { (2 * probe + 1).min(len - 1) };
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if oracle.less(d, g[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// The per-call ceiling on exponential-search comparisons for a result
/// `gap` positions past the start.
pub fn exp_search_budget(gap: usize) -> u64 {
    2 * ((gap + 1) as f64).log2().ceil() as u64 + 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchStat {
    pub gap: usize,
    pub comparisons: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeReport {
    pub output: Word,
    pub comparisons: u64,
    pub searches: Vec<SearchStat>,
}

/// Merges two sorted sequences under the structure's constraints. An
/// element of `d` that is available is placed by exponential search in the
/// rest of `g`; while `d`'s head is unavailable, `g`'s head must come first
/// and is emitted without comparisons.
pub fn merge<C: CandidateStructure + ?Sized>(
    cds: &mut C,
    g: &[Elem],
    d: &[Elem],
    oracle: &ComparisonOracle,
) -> Result<MergeReport> {
    let n = cds.size();
    let mut seen = vec![false; n];
    for &x in g.iter().chain(d) {
        match seen.get_mut(x.index()) {
            Some(s) if !*s => *s = true,
            _ => return Err(Error::Input(format!("{x} repeated or outside the alphabet in merge input"))),
        }
    }
    if g.len() + d.len() != cds.target_len() {
        return Err(Error::Input("merge inputs do not partition the alphabet".into()));
    }
    let base = oracle.count();
    let mut available = vec![false; n];
    let mut fresh = Vec::new();
    cds.init(&mut fresh)?;
    mark(&mut available, &mut fresh);
    let mut output = Vec::with_capacity(g.len() + d.len());
    let mut searches = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < g.len() || j < d.len() {
        if j < d.len() && available[d[j].index()] {
            let before = oracle.count();
            let star = i + exp_search(d[j], &g[i..], oracle);
            searches.push(SearchStat { gap: star - i, comparisons: oracle.count() - before });
            for &x in &g[i..star] {
                advance(cds, x, &mut available, &mut fresh, &mut output)?;
            }
            advance(cds, d[j], &mut available, &mut fresh, &mut output)?;
            i = star;
            j += 1;
        } else if i < g.len() {
            advance(cds, g[i], &mut available, &mut fresh, &mut output)?;
            i += 1;
        } else {
            return Err(Error::Stall { output: output.len(), n: g.len() + d.len(), prefix: output });
        }
    }
    Ok(MergeReport { output, comparisons: oracle.count() - base, searches })
}

fn mark(available: &mut [bool], fresh: &mut Vec<Elem>) {
    for y in fresh.drain(..) {
        available[y.index()] = true;
    }
}

fn advance<C: CandidateStructure + ?Sized>(
    cds: &mut C,
    x: Elem,
    available: &mut [bool],
    fresh: &mut Vec<Elem>,
    output: &mut Word,
) -> Result<()> {
    if !available[x.index()] {
        return Err(Error::Mismatch(format!("{x} emitted before it became available; oracle and structure disagree")));
    }
    output.push(x);
    cds.step(x, fresh)?;
    mark(available, fresh);
    Ok(())
}

#[derive(Debug, Clone)]
pub struct OptimalRun {
    pub report: SortReport,
    pub layers: LayerSequence,
    pub bottlenecks: BottleneckSequence,
    /// `Γ` in sorted order.
    pub gamma_sorted: Word,
    pub sort_comparisons: u64,
    pub merge: MergeReport,
}

/// Three epochs of the same structure: layers, sorting `Γ = Σ \ β` through
/// the trace, and merging `β` with the sorted `Γ`. The merge searches with
/// the shorter, unconstrained side (`Γ`, at most `2·log2|P|` elements) so
/// its comparisons stay within the information-theoretic budget.
pub fn optimal_sort<C: CandidateStructure + ?Sized>(cds: &mut C, oracle: &ComparisonOracle) -> Result<OptimalRun> {
    let start = Instant::now();
    let base = oracle.count();
    let n = cds.size();
    if oracle.len() != n {
        return Err(Error::Input(format!("oracle orders {} elements, alphabet has {n}", oracle.len())));
    }
    let layers = compute_layers(cds)?;
    let bottlenecks = layers.bottlenecks();
    let mut in_beta = vec![false; n];
    bottlenecks.elements.iter().for_each(|b| in_beta[b.index()] = true);
    let gamma: Vec<Elem> = layers.layers.iter().flatten().copied().filter(|x| !in_beta[x.index()]).collect();

    let (gamma_sorted, sort_comparisons, cds_steps) = if gamma.is_empty() {
        (Vec::new(), 0, 0)
    } else {
        let mut trace = TraceCds::new(&mut *cds, &gamma)?;
        let run = topological_heapsort(&mut trace, oracle, SortOptions::default())?;
        (run.report.output, run.report.comparisons, run.report.cds_steps)
    };

    let merge = merge(cds, &bottlenecks.elements, &gamma_sorted, oracle)?;
    let report = SortReport {
        output: merge.output.clone(),
        comparisons: oracle.count() - base,
        cds_steps: cds_steps + 2 * n as u64,
        queue_events: 2 * gamma.len() as u64,
        cds_work: cds.work(),
        itb_bits: None,
        elapsed: start.elapsed(),
        cds_time: Default::default(),
    };
    Ok(OptimalRun { report, layers, bottlenecks, gamma_sorted, sort_comparisons, merge })
}
