//! Generalized topological heapsort over any candidate data structure.
//!
//! A candidate data structure (CDS) tracks a chosen set `X` and reports
//! elements as they become available: `init` resets `X` to the empty set and
//! reports every `x` with `p_x(∅) = 1`; `step(x)` reports every `y` that is
//! available for `X ∪ {x}` but was not for `X`, then adds `x` to `X`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, RngExt};

use crate::element::{elements, Alphabet, Elem, ElemSet, Word};
use crate::error::{Error, Result};
use crate::language::LanguageSet;
use crate::mps::{check_limit, ExplicitMps};
use crate::oracle::ComparisonOracle;
use crate::wsheap::{HeapMetrics, WorkingSetHeap};

/// The availability engine driven by topological heapsort.
pub trait CandidateStructure {
    /// Size of the alphabet.
    fn size(&self) -> usize;

    /// Number of elements a full run reports. Smaller than `size` only for
    /// structures over a sub-alphabet.
    fn target_len(&self) -> usize {
        self.size()
    }

    /// Starts a fresh epoch: clears the chosen set and pushes the initially
    /// available elements onto `out`.
    fn init(&mut self, out: &mut Vec<Elem>) -> Result<()>;

    /// Chooses `x` and pushes the elements that became available onto `out`.
    fn step(&mut self, x: Elem, out: &mut Vec<Elem>) -> Result<()>;

    /// Internal work units (token, edge or member touches) spent since the
    /// last `init`. Backends that do not meter return 0.
    fn work(&self) -> u64 {
        0
    }
}

impl<C: CandidateStructure + ?Sized> CandidateStructure for &mut C {
    fn size(&self) -> usize {
        (**self).size()
    }
    fn target_len(&self) -> usize {
        (**self).target_len()
    }
    fn init(&mut self, out: &mut Vec<Elem>) -> Result<()> {
        (**self).init(out)
    }
    fn step(&mut self, x: Elem, out: &mut Vec<Elem>) -> Result<()> {
        (**self).step(x, out)
    }
    fn work(&self) -> u64 {
        (**self).work()
    }
}

impl<C: CandidateStructure + ?Sized> CandidateStructure for Box<C> {
    fn size(&self) -> usize {
        (**self).size()
    }
    fn target_len(&self) -> usize {
        (**self).target_len()
    }
    fn init(&mut self, out: &mut Vec<Elem>) -> Result<()> {
        (**self).init(out)
    }
    fn step(&mut self, x: Elem, out: &mut Vec<Elem>) -> Result<()> {
        (**self).step(x, out)
    }
    fn work(&self) -> u64 {
        (**self).work()
    }
}

/// Wraps a CDS and enforces the contract: `step` only on available
/// elements, every element reported at most once per epoch, at most `|Σ|`
/// steps.
#[derive(Debug, Clone)]
pub struct Validated<C> {
    inner: C,
    reported: Vec<bool>,
    chosen: Vec<bool>,
    steps: usize,
    started: bool,
}

impl<C: CandidateStructure> Validated<C> {
    pub fn new(inner: C) -> Self {
        let n = inner.size();
        Validated { inner, reported: vec![false; n], chosen: vec![false; n], steps: 0, started: false }
    }

    pub fn into_inner(self) -> C {
        self.inner
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }

    fn absorb(&mut self, out: &[Elem], from: usize) -> Result<()> {
        for &y in &out[from..] {
            let i = y.index();
            if i >= self.reported.len() {
                return Err(Error::Contract(format!("reported element {y} outside alphabet")));
            }
            if self.chosen[i] {
                return Err(Error::Contract(format!("reported already chosen element {y}")));
            }
            if self.reported[i] {
                return Err(Error::Contract(format!("reported element {y} twice")));
            }
            self.reported[i] = true;
        }
        Ok(())
    }
}

impl<C: CandidateStructure> CandidateStructure for Validated<C> {
    fn size(&self) -> usize {
        self.inner.size()
    }

    fn target_len(&self) -> usize {
        self.inner.target_len()
    }

    fn init(&mut self, out: &mut Vec<Elem>) -> Result<()> {
        self.reported.iter_mut().for_each(|r| *r = false);
        self.chosen.iter_mut().for_each(|c| *c = false);
        self.steps = 0;
        self.started = true;
        let from = out.len();
        self.inner.init(out)?;
        self.absorb(out, from)
    }

    fn step(&mut self, x: Elem, out: &mut Vec<Elem>) -> Result<()> {
        if !self.started {
            return Err(Error::Contract("step before init".into()));
        }
        let i = x.index();
        if i >= self.chosen.len() {
            return Err(Error::Contract(format!("step on element {x} outside alphabet")));
        }
        if self.chosen[i] {
            return Err(Error::Contract(format!("step on already chosen element {x}")));
        }
        if !self.reported[i] {
            return Err(Error::Contract(format!("step on unavailable element {x}")));
        }
        if self.steps == self.chosen.len() {
            return Err(Error::Contract("more steps than elements".into()));
        }
        self.steps += 1;
        let from = out.len();
        self.inner.step(x, out)?;
        self.chosen[i] = true;
        self.absorb(out, from)
    }

    fn work(&self) -> u64 {
        self.inner.work()
    }
}

/// Naive CDS over an explicit truth table: every step rescans all elements.
/// Intended as ground truth for small alphabets.
#[derive(Debug, Clone)]
pub struct TableCds<'a> {
    mps: &'a ExplicitMps,
    chosen: ElemSet,
    seen: ElemSet,
}

impl<'a> TableCds<'a> {
    pub fn new(mps: &'a ExplicitMps) -> Self {
        assert!(mps.n() <= 64);
        TableCds { mps, chosen: ElemSet::EMPTY, seen: ElemSet::EMPTY }
    }
}

impl CandidateStructure for TableCds<'_> {
    fn size(&self) -> usize {
        self.mps.n()
    }

    fn init(&mut self, out: &mut Vec<Elem>) -> Result<()> {
        self.chosen = ElemSet::EMPTY;
        self.seen = self.mps.continuations(ElemSet::EMPTY);
        out.extend(self.seen.iter());
        Ok(())
    }

    fn step(&mut self, x: Elem, out: &mut Vec<Elem>) -> Result<()> {
        self.chosen.insert(x);
        let now = self.mps.continuations(self.chosen);
        let fresh = now.difference(self.seen);
        self.seen = self.seen.union(now);
        out.extend(fresh.iter());
        Ok(())
    }
}

/// Queue contents `Q0..Qn`: `Q0` after init, `Qi` after the i-th extraction
/// and the insertions that followed it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Transcript {
    pub queues: Vec<Vec<Elem>>,
}

impl Transcript {
    /// `x_i ∈ Q_(i-1)` and `x_i ∉ Q_j` for `j ≥ i`.
    pub fn consistent_with(&self, output: &[Elem]) -> bool {
        if self.queues.len() != output.len() + 1 {
            return false;
        }
        output.iter().enumerate().all(|(i, x)| {
            self.queues[i].binary_search(x).is_ok()
                && self.queues[i + 1..].iter().all(|q| q.binary_search(x).is_err())
        })
    }

    pub fn render(&self, alphabet: &Alphabet) -> Vec<String> {
        self.queues
            .iter()
            .map(|q| format!("{{{}}}", q.iter().map(|&x| alphabet.name(x)).collect::<Vec<_>>().join(",")))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SortReport {
    pub output: Word,
    /// Oracle queries issued during the run.
    pub comparisons: u64,
    pub cds_steps: u64,
    /// Heap inserts plus extracts.
    pub queue_events: u64,
    /// Work units reported by the CDS.
    pub cds_work: u64,
    pub itb_bits: Option<f64>,
    pub elapsed: Duration,
    pub cds_time: Duration,
}

impl SortReport {
    pub(crate) fn empty() -> Self {
        SortReport {
            output: Vec::new(),
            comparisons: 0,
            cds_steps: 0,
            queue_events: 0,
            cds_work: 0,
            itb_bits: None,
            elapsed: Duration::ZERO,
            cds_time: Duration::ZERO,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SortOptions {
    pub transcript: bool,
    pub heap_log: bool,
}

#[derive(Debug, Clone)]
pub struct SortRun {
    pub report: SortReport,
    pub transcript: Option<Transcript>,
    pub heap: Option<HeapMetrics>,
}

/// Topological heapsort: repeatedly extract the minimum of the queue of
/// available elements and insert whatever the CDS reports next.
pub fn topological_heapsort<C: CandidateStructure + ?Sized>(
    cds: &mut C,
    oracle: &ComparisonOracle,
    options: SortOptions,
) -> Result<SortRun> {
    let n = cds.size();
    if oracle.len() != n {
        return Err(Error::Input(format!("oracle orders {} elements, alphabet has {n}", oracle.len())));
    }
    let start = Instant::now();
    let base = oracle.count();
    let mut queued = vec![false; n];
    let mut heap = WorkingSetHeap::with_capacity(n);
    if options.heap_log {
        heap = heap.with_log();
    }
    let mut mirror = options.transcript.then(BTreeSet::new);
    let mut transcript = options.transcript.then(Transcript::default);
    let mut report = SortReport::empty();
    let mut fresh = Vec::new();
    let mut cds_time = Duration::ZERO;

    let t = Instant::now();
    cds.init(&mut fresh)?;
    cds_time += t.elapsed();
    enqueue(&mut heap, &mut queued, &mut mirror, &mut fresh, oracle, &mut report)?;
    record(&mirror, &mut transcript);

    while !heap.is_empty() {
        let x = Elem::new(heap.extract_min(oracle)?);
        report.queue_events += 1;
        if let Some(m) = &mut mirror {
            m.remove(&x);
        }
        report.output.push(x);
        let t = Instant::now();
        cds.step(x, &mut fresh)?;
        cds_time += t.elapsed();
        report.cds_steps += 1;
        enqueue(&mut heap, &mut queued, &mut mirror, &mut fresh, oracle, &mut report)?;
        record(&mirror, &mut transcript);
    }
    let target = cds.target_len();
    if report.output.len() < target {
        return Err(Error::Stall { output: report.output.len(), n: target, prefix: report.output });
    }
    report.comparisons = oracle.count() - base;
    report.cds_work = cds.work();
    report.cds_time = cds_time;
    report.elapsed = start.elapsed();
    let heap_metrics = if options.heap_log { Some(heap.metrics()?) } else { None };
    Ok(SortRun { report, transcript, heap: heap_metrics })
}

fn enqueue(
    heap: &mut WorkingSetHeap,
    queued: &mut [bool],
    mirror: &mut Option<BTreeSet<Elem>>,
    fresh: &mut Vec<Elem>,
    oracle: &ComparisonOracle,
    report: &mut SortReport,
) -> Result<()> {
    for y in fresh.drain(..) {
        match queued.get_mut(y.index()) {
            Some(q) if !*q => *q = true,
            Some(_) => return Err(Error::Contract(format!("element {y} reported twice"))),
            None => return Err(Error::Contract(format!("element {y} outside alphabet"))),
        }
        heap.insert(y.index(), oracle)?;
        report.queue_events += 1;
        if let Some(m) = mirror {
            m.insert(y);
        }
    }
    Ok(())
}

fn record(mirror: &Option<BTreeSet<Elem>>, transcript: &mut Option<Transcript>) {
    if let (Some(m), Some(t)) = (mirror, transcript) {
        t.queues.push(m.iter().copied().collect());
    }
}

/// The first prefix at which a CDS disagrees with the ground truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdsMismatch {
    pub prefix: Word,
    pub expected: Vec<Elem>,
    pub actual: Vec<Elem>,
    pub error: Option<String>,
}

/// Replays every maximal word of `L(S)` into `cds` and checks that the
/// reported-but-unchosen set equals `{x ∉ α̃ : p_x(α̃) = 1}` after every
/// prefix `α`.
pub fn validate_cds<C: CandidateStructure + ?Sized>(
    cds: &mut C,
    mps: &ExplicitMps,
    limit: usize,
) -> Result<Result<(), CdsMismatch>> {
    check_limit(mps.n(), limit)?;
    if cds.size() != mps.n() {
        return Err(Error::Input("alphabet sizes differ".into()));
    }
    let mut maximal = Vec::new();
    collect_maximal(mps, &mut Vec::new(), ElemSet::EMPTY, &mut maximal);
    for word in maximal {
        if let Err(m) = replay(cds, mps, &word) {
            return Ok(Err(m));
        }
    }
    Ok(Ok(()))
}

/// Like [`validate_cds`] but on `samples` random maximal walks, for
/// alphabets too large to enumerate.
pub fn validate_cds_sampled<C: CandidateStructure + ?Sized, R: Rng>(
    cds: &mut C,
    mps: &ExplicitMps,
    samples: usize,
    rng: &mut R,
) -> Result<(), CdsMismatch> {
    for _ in 0..samples {
        let mut chosen = ElemSet::EMPTY;
        let mut word = Vec::new();
        loop {
            let cont: Vec<Elem> = mps.continuations(chosen).iter().collect();
            if cont.is_empty() {
                break;
            }
            let x = cont[rng.random_range(0..cont.len())];
            word.push(x);
            chosen.insert(x);
        }
        replay(cds, mps, &word)?;
    }
    Ok(())
}

fn collect_maximal(mps: &ExplicitMps, prefix: &mut Word, support: ElemSet, out: &mut Vec<Word>) {
    let cont = mps.continuations(support);
    if cont.is_empty() {
        out.push(prefix.clone());
        return;
    }
    for x in cont.iter() {
        prefix.push(x);
        collect_maximal(mps, prefix, support.with(x), out);
        prefix.pop();
    }
}

fn replay<C: CandidateStructure + ?Sized>(cds: &mut C, mps: &ExplicitMps, word: &[Elem]) -> Result<(), CdsMismatch> {
    let mut reported = ElemSet::EMPTY;
    let mut chosen = ElemSet::EMPTY;
    let mut out = Vec::new();
    let mismatch = |prefix: &[Elem], reported: ElemSet, chosen: ElemSet, error: Option<String>| CdsMismatch {
        prefix: prefix.to_vec(),
        expected: mps.continuations(chosen).iter().collect(),
        actual: reported.difference(chosen).iter().collect(),
        error,
    };
    if let Err(e) = cds.init(&mut out) {
        return Err(mismatch(&[], reported, chosen, Some(e.to_string())));
    }
    for k in 0..=word.len() {
        for y in out.drain(..) {
            reported.insert(y);
        }
        if reported.difference(chosen) != mps.continuations(chosen) {
            return Err(mismatch(&word[..k], reported, chosen, None));
        }
        if k < word.len() {
            if let Err(e) = cds.step(word[k], &mut out) {
                return Err(mismatch(&word[..k], reported, chosen, Some(e.to_string())));
            }
            chosen.insert(word[k]);
        }
    }
    Ok(())
}

/// The set `Av(C, α)` reached by replaying `word` from a fresh epoch.
pub fn available_after<C: CandidateStructure + ?Sized>(cds: &mut C, word: &[Elem]) -> Result<Vec<Elem>> {
    let n = cds.size();
    let mut reported = vec![false; n];
    let mut out = Vec::new();
    cds.init(&mut out)?;
    for &x in word {
        for y in out.drain(..) {
            reported[y.index()] = true;
        }
        cds.step(x, &mut out)?;
    }
    for y in out.drain(..) {
        reported[y.index()] = true;
    }
    for &x in word {
        reported[x.index()] = false;
    }
    Ok(elements(n).filter(|x| reported[x.index()]).collect())
}

/// The language a CDS generates, by depth-first replay. Every node of the
/// search re-initializes the CDS, so this is for small alphabets only.
pub fn cds_language<C: CandidateStructure + ?Sized>(cds: &mut C, limit: usize) -> Result<LanguageSet> {
    let n = cds.size();
    check_limit(n, limit)?;
    let mut words = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    cds_walk(cds, &mut prefix, &mut |w| words.push(w.to_vec()))?;
    LanguageSet::new(n, words)
}

/// The permutations a CDS generates.
pub fn cds_permutations<C: CandidateStructure + ?Sized>(cds: &mut C, limit: usize) -> Result<Vec<Word>> {
    check_limit(cds.size(), limit)?;
    let target = cds.target_len();
    let mut perms = Vec::new();
    let mut prefix = Vec::with_capacity(target);
    cds_walk(cds, &mut prefix, &mut |w| {
        if w.len() == target {
            perms.push(w.to_vec())
        }
    })?;
    perms.sort();
    Ok(perms)
}

fn cds_walk<C: CandidateStructure + ?Sized>(
    cds: &mut C,
    prefix: &mut Word,
    visit: &mut dyn FnMut(&[Elem]),
) -> Result<()> {
    visit(prefix);
    let available = available_after(cds, prefix)?;
    for x in available {
        prefix.push(x);
        cds_walk(cds, prefix, visit)?;
        prefix.pop();
    }
    Ok(())
}

/// A member of `P(A)` drawn by choosing uniformly among the available
/// elements at every step. Not uniform over `P(A)`.
pub fn sample_order<C: CandidateStructure + ?Sized, R: Rng>(cds: &mut C, rng: &mut R) -> Result<Word> {
    let n = cds.target_len();
    let mut available = Vec::new();
    let mut word = Vec::with_capacity(n);
    cds.init(&mut available)?;
    while !available.is_empty() {
        let i = rng.random_range(0..available.len());
        let x = available.swap_remove(i);
        word.push(x);
        cds.step(x, &mut available)?;
    }
    if word.len() < n {
        return Err(Error::Stall { output: word.len(), n, prefix: word });
    }
    Ok(word)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mps::DEFAULT_BF_LIMIT;

    fn w(s: &str) -> Word {
        s.bytes().map(|b| Elem((b - b'a') as u32)).collect()
    }

    fn sort_table(mps: &ExplicitMps, order: Word, transcript: bool) -> Result<SortRun> {
        let oracle = ComparisonOracle::new(order)?;
        let mut cds = Validated::new(TableCds::new(mps));
        topological_heapsort(&mut cds, &oracle, SortOptions { transcript, heap_log: false })
    }

    #[test]
    fn one_of_two_bca() {
        let mps = ExplicitMps::one_of_two();
        let run = sort_table(&mps, w("bca"), true).unwrap();
        assert_eq!(run.report.output, w("bca"));
        let t = run.transcript.unwrap();
        // hand simulation: Q0 = {a,b}; extract b -> c arrives; extract c; extract a
        assert_eq!(t.queues, vec![w("ab"), w("ac"), w("a"), w("")]);
        assert!(t.consistent_with(&run.report.output));
    }

    #[test]
    fn chain_needs_no_comparisons() {
        let mps = ExplicitMps::from_partial_order(&[
            ElemSet::EMPTY,
            ElemSet::from_elems([Elem(0)]),
            ElemSet::from_elems([Elem(0), Elem(1)]),
        ])
        .unwrap();
        let run = sort_table(&mps, w("abc"), false).unwrap();
        assert_eq!(run.report.output, w("abc"));
        assert_eq!(run.report.comparisons, 0);
    }

    #[test]
    fn stall_when_order_outside_language() {
        // c is never available
        let mps = ExplicitMps::from_fn(3, |x, _| x.0 != 2).unwrap();
        let err = sort_table(&mps, w("abc"), false).unwrap_err();
        assert!(matches!(err, Error::Stall { output: 2, n: 3, .. }));
    }

    #[test]
    fn every_permutation_of_one_of_two_sorts() {
        let mps = ExplicitMps::one_of_two();
        for pi in mps.permutations(DEFAULT_BF_LIMIT).unwrap() {
            let run = sort_table(&mps, pi.clone(), true).unwrap();
            assert_eq!(run.report.output, pi);
            assert!(run.transcript.unwrap().consistent_with(&pi));
        }
    }

    struct Broken<'a>(TableCds<'a>, Elem);

    impl CandidateStructure for Broken<'_> {
        fn size(&self) -> usize {
            self.0.size()
        }
        fn init(&mut self, out: &mut Vec<Elem>) -> Result<()> {
            self.0.init(out)
        }
        fn step(&mut self, x: Elem, out: &mut Vec<Elem>) -> Result<()> {
            let from = out.len();
            self.0.step(x, out)?;
            let drop = self.1;
            let kept: Vec<Elem> = out.drain(from..).filter(|&y| y != drop).collect();
            out.extend(kept);
            Ok(())
        }
    }

    #[test]
    fn validate_finds_dropped_report() {
        let mps = ExplicitMps::one_of_two();
        assert_eq!(validate_cds(&mut TableCds::new(&mps), &mps, 10).unwrap(), Ok(()));
        let mut broken = Broken(TableCds::new(&mps), Elem(2));
        let m = validate_cds(&mut broken, &mps, 10).unwrap().unwrap_err();
        assert_eq!(m.prefix, w("a"));
        assert_eq!(m.expected, w("bc"));
        assert_eq!(m.actual, w("b"));
    }

    #[test]
    fn validated_rejects_unavailable_step() {
        let mps = ExplicitMps::one_of_two();
        let mut cds = Validated::new(TableCds::new(&mps));
        let mut out = Vec::new();
        cds.init(&mut out).unwrap();
        assert!(matches!(cds.step(Elem(2), &mut out), Err(Error::Contract(_))));
        cds.step(Elem(0), &mut out).unwrap();
        assert!(matches!(cds.step(Elem(0), &mut out), Err(Error::Contract(_))));
    }

    #[test]
    fn cds_language_matches_enumeration() {
        let mps = ExplicitMps::one_of_two();
        let lang = cds_language(&mut TableCds::new(&mps), 10).unwrap();
        assert_eq!(lang, mps.enumerate_language(10).unwrap());
        assert_eq!(cds_permutations(&mut TableCds::new(&mps), 10).unwrap(), mps.permutations(10).unwrap());
    }

    #[test]
    fn sampled_orders_are_members() {
        use rand::SeedableRng;
        let mps = ExplicitMps::one_of_two();
        let perms = mps.permutations(10).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let pi = sample_order(&mut TableCds::new(&mps), &mut rng).unwrap();
            assert!(perms.contains(&pi));
        }
    }

    #[test]
    fn deterministic_runs() {
        let mps = ExplicitMps::one_of_two();
        let a = sort_table(&mps, w("acb"), true).unwrap();
        let b = sort_table(&mps, w("acb"), true).unwrap();
        assert_eq!(a.transcript, b.transcript);
        assert_eq!(a.report.comparisons, b.report.comparisons);
    }
}
