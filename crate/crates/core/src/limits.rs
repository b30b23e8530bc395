//! Families where topological heapsort is not comparison-optimal: the
//! rotation greedoid, the single-move language and the block family.
//!
//! None of them is an antimatroid, so they ship as language generators and
//! availability engines that drive the heap directly, never as a
//! [`CandidateStructure`](crate::sorter::CandidateStructure).

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::element::{elements, Elem, ElemSet, Word};
use crate::error::{Error, Result};
use crate::language::{nmps_from_greedoid, LanguageSet, Violation};
use crate::mps::{PrecedenceTable, MAX_TABLE_N};
use crate::oracle::ComparisonOracle;
use crate::wsheap::WorkingSetHeap;

/// Rotation of a word: its last letter moves to the front.
fn rotate(block: &[Elem]) -> impl Iterator<Item = Elem> + '_ {
    block.last().into_iter().copied().chain(block[..block.len().saturating_sub(1)].iter().copied())
}

/// The permutation for one set of cut positions: `cuts[i]` cuts between
/// positions `i` and `i + 1`.
pub fn rotation_word(n: usize, cuts: &[bool]) -> Word {
    let alpha: Word = elements(n).collect();
    let mut word = Vec::with_capacity(n);
    let mut start = 0;
    for end in 1..=n {
        if end == n || cuts.get(end - 1).copied().unwrap_or(false) {
            word.extend(rotate(&alpha[start..end]));
            start = end;
        }
    }
    word
}

/// Every permutation obtained by cutting `a1 … an` into blocks and rotating
/// each block, sorted and deduplicated.
pub fn rotation_permutations(n: usize) -> Result<Vec<Word>> {
    if n > 20 {
        return Err(Error::SizeLimit { n, limit: 20 });
    }
    let cut_sets = if n == 0 { 1 } else { 1u64 << (n - 1) };
    let mut words: Vec<Word> = (0..cut_sets)
        .map(|c| {
            let cuts: Vec<bool> = (0..n.saturating_sub(1)).map(|i| c >> i & 1 == 1).collect();
            rotation_word(n, &cuts)
        })
        .collect();
    words.sort();
    words.dedup();
    Ok(words)
}

/// The prefix closure of the rotation permutations.
pub fn enumerate_rotation(n: usize) -> Result<LanguageSet> {
    if n > 8 {
        return Err(Error::SizeLimit { n, limit: 8 });
    }
    LanguageSet::prefix_closure(n, rotation_permutations(n)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomVerdict {
    pub greedoid: Result<(), Violation>,
    pub antimatroid: Result<(), Violation>,
}

pub fn check_rotation_axioms(n: usize) -> Result<AxiomVerdict> {
    if n > 7 {
        return Err(Error::SizeLimit { n, limit: 7 });
    }
    let lang = enumerate_rotation(n)?;
    Ok(AxiomVerdict { greedoid: lang.check_greedoid_axioms(), antimatroid: lang.check_antimatroid_axioms() })
}

/// `α_i = a_i a_1 … a_(i-1) a_(i+1) … a_n` for every `i`.
pub fn single_move_permutations(n: usize) -> Vec<Word> {
    let mut words: Vec<Word> = elements(n)
        .map(|ai| std::iter::once(ai).chain(elements(n).filter(|&x| x != ai)).collect())
        .collect();
    words.sort();
    words
}

/// `p_(a_i)(X) = 1` iff `X = ∅` or `X ⊇ {a_1 … a_(i-1)}`.
pub fn single_move_nmps(n: usize) -> Result<PrecedenceTable> {
    PrecedenceTable::from_fn(n, |x, chosen| {
        chosen.is_empty() || ElemSet::from_elems(elements(x.index())).is_subset(chosen)
    })
}

/// Adversary answers consistently with `α = a1 … an`. Returns, for each
/// possible query `(a_p, a_q)` with `p < q`, how many of the `n`
/// candidates `α_i` the answer eliminates.
pub fn single_move_adversary(n: usize) -> Vec<((usize, usize), usize)> {
    let candidates = single_move_permutations(n);
    let positions: Vec<Vec<usize>> = candidates
        .iter()
        .map(|w| {
            let mut pos = vec![0; n];
            w.iter().enumerate().for_each(|(i, x)| pos[x.index()] = i);
            pos
        })
        .collect();
    let mut rows = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            // the adversary answers a_p ≺ a_q
            let killed = positions.iter().filter(|pos| pos[q] < pos[p]).count();
            rows.push(((p, q), killed));
        }
    }
    rows
}

/// Plays `queries` against the adversary and returns the number of live
/// candidates after each query.
pub fn single_move_game(n: usize, queries: &[(usize, usize)]) -> Vec<usize> {
    let mut live = vec![true; n];
    let candidates = single_move_permutations(n);
    queries
        .iter()
        .map(|&(x, y)| {
            let (p, q) = (x.min(y), x.max(y));
            for (c, w) in candidates.iter().enumerate() {
                let pp = w.iter().position(|e| e.index() == p);
                let pq = w.iter().position(|e| e.index() == q);
                if pq < pp {
                    live[c] = false;
                }
            }
            live.iter().filter(|&&l| l).count()
        })
        .collect()
}

/// The block family over `k` blocks of `k` elements: element `x_(i,j)` is
/// `Elem(i·k + j)`; one block is permuted freely, the rest stay in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockLanguage {
    pub k: usize,
}

impl BlockLanguage {
    pub fn n(&self) -> usize {
        self.k * self.k
    }

    /// One word per choice of block and block permutation, so `k·k!` words;
    /// the identity appears once per block.
    pub fn indexed_words(&self) -> Result<Vec<Word>> {
        let k = self.k;
        if k > 5 {
            return Err(Error::SizeLimit { n: self.n(), limit: 25 });
        }
        let mut words = Vec::new();
        for i in 0..k {
            let block: Word = (0..k).map(|j| Elem::new(i * k + j)).collect();
            for beta in crate::language::all_permutations(k) {
                let mut w: Word = (0..i * k).map(Elem::new).collect();
                w.extend(beta.iter().map(|b| block[b.index()]));
                w.extend((i * k + k..k * k).map(Elem::new));
                words.push(w);
            }
        }
        Ok(words)
    }

    /// The distinct permutations: `k·k! − k + 1` for `k ≥ 1`.
    pub fn permutations(&self) -> Result<Vec<Word>> {
        let mut words = self.indexed_words()?;
        words.sort();
        words.dedup();
        Ok(words)
    }

    pub fn distinct_count(&self) -> u128 {
        let k = self.k as u128;
        if k == 0 {
            return 1;
        }
        k * (1..=k).product::<u128>() - k + 1
    }

    /// Elements that extend `prefix` within some word of the family. Depends
    /// on the order of the prefix, not only on its support.
    pub fn available(&self, prefix: &[Elem]) -> Vec<Elem> {
        let k = self.k;
        let p = prefix.len();
        let mut out = Vec::new();
        let mut free_blocks = Vec::new();
        for i in 0..k {
            let (lo, hi) = (i * k, i * k + k);
            let consistent = prefix.iter().enumerate().all(|(pos, x)| {
                if pos >= lo && pos < hi {
                    (lo..hi).contains(&x.index())
                } else {
                    x.index() == pos
                }
            });
            if !consistent {
                continue;
            }
            if p >= lo && p < hi {
                free_blocks.push(i);
            } else if p < k * k {
                out.push(Elem::new(p));
            }
        }
        for i in free_blocks {
            let used: Vec<usize> = prefix[i * k..].iter().map(|x| x.index()).collect();
            out.extend((i * k..i * k + k).filter(|x| !used.contains(x)).map(Elem::new));
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Runs the heap the way topological heapsort would: whenever elements
/// become available they are inserted in id order, then the minimum is
/// extracted.
fn drive_heap(n: usize, oracle: &ComparisonOracle, mut available: impl FnMut(&[Elem]) -> Vec<Elem>) -> Result<Word> {
    let mut heap = WorkingSetHeap::with_capacity(n);
    let mut inserted = vec![false; n];
    let mut output = Vec::with_capacity(n);
    while output.len() < n {
        let mut fresh: Vec<Elem> = available(&output).into_iter().filter(|x| !inserted[x.index()]).collect();
        fresh.sort();
        for x in fresh {
            inserted[x.index()] = true;
            heap.insert(x.index(), oracle)?;
        }
        if heap.is_empty() {
            return Err(Error::Stall { output: output.len(), n, prefix: output });
        }
        output.push(Elem::new(heap.extract_min(oracle)?));
    }
    Ok(output)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoRow {
    pub family: &'static str,
    pub n: usize,
    pub itb_bits: f64,
    pub comparisons: f64,
    pub ratio: f64,
}

impl DemoRow {
    fn new(family: &'static str, n: usize, itb_bits: f64, comparisons: f64) -> Self {
        DemoRow { family, n, itb_bits, comparisons, ratio: comparisons / itb_bits }
    }

    pub const CSV_HEADER: &'static str = "family,n,itb_bits,comparisons,ratio";

    pub fn csv(&self) -> String {
        format!("{},{},{:.4},{:.2},{:.4}", self.family, self.n, self.itb_bits, self.comparisons, self.ratio)
    }
}

/// Element ids are a random relabelling of the family's letters, so the
/// heap's id-order inserts are not already sorted.
fn relabel(n: usize, rng: &mut ChaCha8Rng) -> Vec<Elem> {
    let mut label: Vec<Elem> = elements(n).collect();
    label.shuffle(rng);
    label
}

/// Mean comparisons of heap-driven sorting on the rotation family, with all
/// letters available up front and a random member of `T` as hidden order.
pub fn rotation_comparisons(n: usize, trials: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
    let mut total = 0u64;
    for _ in 0..trials {
        let label = relabel(n, &mut rng);
        let cuts: Vec<bool> = (0..n.saturating_sub(1)).map(|_| rng.random_bool(0.5)).collect();
        let order: Word = rotation_word(n, &cuts).iter().map(|x| label[x.index()]).collect();
        let oracle = ComparisonOracle::new(order.clone())?;
        let out = drive_heap(n, &oracle, |_| elements(n).collect())?;
        if out != order {
            return Err(Error::Mismatch("heap-driven rotation sort returned a different order".into()));
        }
        total += oracle.count();
    }
    Ok(total as f64 / trials as f64)
}

/// Mean comparisons of heap-driven sorting on the block family with hidden
/// order `α1 α2 … αk`.
pub fn block_comparisons(k: usize, trials: usize, seed: u64) -> Result<f64> {
    let family = BlockLanguage { k };
    let n = family.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64) << 32);
    let mut total = 0u64;
    for _ in 0..trials {
        let label = relabel(n, &mut rng);
        let mut unlabel = vec![0; n];
        label.iter().enumerate().for_each(|(i, l)| unlabel[l.index()] = i);
        let order: Word = label.clone();
        let oracle = ComparisonOracle::new(order.clone())?;
        let out = drive_heap(n, &oracle, |prefix| {
            let raw: Word = prefix.iter().map(|x| Elem::new(unlabel[x.index()])).collect();
            family.available(&raw).into_iter().map(|x| label[x.index()]).collect()
        })?;
        if out != order {
            return Err(Error::Mismatch("heap-driven block sort returned a different order".into()));
        }
        total += oracle.count();
    }
    Ok(total as f64 / trials as f64)
}

/// The suboptimality table: rotation and block families measured, the
/// single-move family certified by the adversary.
pub fn demonstrate_suboptimality(seed: u64) -> Result<Vec<DemoRow>> {
    const TRIALS: usize = 8;
    let mut rows = Vec::new();
    for n in [8usize, 16, 32, 64, 128] {
        rows.push(DemoRow::new("rotation", n, (n - 1) as f64, rotation_comparisons(n, TRIALS, seed)?));
    }
    for k in [2usize, 4, 8, 16] {
        let family = BlockLanguage { k };
        let itb = (family.distinct_count() as f64).log2();
        rows.push(DemoRow::new("block", family.n(), itb, block_comparisons(k, TRIALS, seed)?));
    }
    for n in [4usize, 8, 16, 32, 64] {
        let worst = single_move_adversary(n).iter().map(|r| r.1).max().unwrap_or(0);
        if worst > 1 {
            return Err(Error::Mismatch(format!("single-move query eliminated {worst} candidates")));
        }
        rows.push(DemoRow::new("single-move", n, (n as f64).log2(), (n - 1) as f64));
    }
    Ok(rows)
}

/// Prop-23 style round trip on a greedoid: the non-monotone system built
/// from `language` generates it again.
pub fn nmps_round_trip(language: &LanguageSet) -> Result<bool> {
    if language.n() > MAX_TABLE_N {
        return Err(Error::SizeLimit { n: language.n(), limit: MAX_TABLE_N });
    }
    let table = nmps_from_greedoid(language)?;
    Ok(&table.language(language.n().max(1))? == language)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.bytes().map(|b| Elem((b - b'a') as u32)).collect()
    }

    #[test]
    fn rotation_n3() {
        let mut expect = vec![w("abc"), w("bac"), w("acb"), w("cab")];
        expect.sort();
        assert_eq!(rotation_permutations(3).unwrap(), expect);
        assert_eq!(rotation_permutations(1).unwrap(), vec![w("a")]);
        assert_eq!(rotation_permutations(8).unwrap().len(), 128);
    }

    #[test]
    fn rotation_axioms() {
        let v = check_rotation_axioms(3).unwrap();
        assert_eq!(v.greedoid, Ok(()));
        assert!(v.antimatroid.is_err());
        let v = check_rotation_axioms(1).unwrap();
        assert_eq!((v.greedoid, v.antimatroid), (Ok(()), Ok(())));
        assert_eq!(check_rotation_axioms(4).unwrap().greedoid, Ok(()));
    }

    #[test]
    fn rotation_nmps_round_trip() {
        for n in 1..=5 {
            assert!(nmps_round_trip(&enumerate_rotation(n).unwrap()).unwrap());
        }
    }

    #[test]
    fn single_move_language() {
        assert_eq!(single_move_permutations(3), vec![w("abc"), w("bac"), w("cab")]);
        let table = single_move_nmps(4).unwrap();
        let expect = LanguageSet::prefix_closure(4, single_move_permutations(4)).unwrap();
        assert_eq!(table.language(10).unwrap(), expect);
    }

    #[test]
    fn single_move_adversary_kills_one() {
        let rows = single_move_adversary(3);
        assert!(rows.iter().all(|r| r.1 <= 1));
        // after n − 2 queries at least two candidates survive
        let n = 6;
        let queries: Vec<(usize, usize)> = (1..n - 1).map(|q| (0, q)).collect();
        assert!(*single_move_game(n, &queries).last().unwrap() >= 2);
    }

    #[test]
    fn block_counts() {
        for k in 1..=4 {
            let family = BlockLanguage { k };
            let fact: usize = (1..=k).product();
            assert_eq!(family.indexed_words().unwrap().len(), k * fact);
            assert_eq!(family.permutations().unwrap().len() as u128, family.distinct_count());
        }
        assert_eq!(BlockLanguage { k: 2 }.distinct_count(), 3);
    }

    #[test]
    fn block_engine_matches_language() {
        let family = BlockLanguage { k: 3 };
        let lang = LanguageSet::prefix_closure(9, family.permutations().unwrap()).unwrap();
        for word in lang.words() {
            let expect: Vec<Elem> = elements(9).filter(|&x| {
                let mut longer = word.clone();
                longer.push(x);
                lang.contains(&longer)
            }).collect();
            assert_eq!(family.available(word), expect, "{word:?}");
        }
    }

    #[test]
    fn demo_growth() {
        let rows = demonstrate_suboptimality(7).unwrap();
        for family in ["rotation", "block"] {
            let ratios: Vec<f64> = rows.iter().filter(|r| r.family == family).map(|r| r.ratio).collect();
            assert!(ratios.windows(2).all(|p| p[1] > p[0]), "{family}: {ratios:?}");
        }
    }
}
