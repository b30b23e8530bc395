//! Explicit precedence systems for small alphabets.
//!
//! A precedence function `p_x` is stored as a truth table over the subsets
//! of `Σ \ {x}`: entry `i` holds `p_x(X)` where `i` is the bitmask of `X` with
//! the bit of `x` squeezed out. [`PrecedenceTable`] accepts arbitrary tables
//! (non-monotone systems); [`ExplicitMps`] is a table that passed the
//! monotonicity check.

use crate::element::{elements, Elem, ElemSet, Word};
use crate::error::{Error, Result};
use crate::language::LanguageSet;

/// Largest alphabet a truth table may be built for.
pub const MAX_TABLE_N: usize = 20;

/// Default brute-force limit for enumerations.
pub const DEFAULT_BF_LIMIT: usize = 10;

#[inline]
pub(crate) fn squeeze(set: ElemSet, x: Elem) -> usize {
    let low = (1u64 << x.0) - 1;
    let bits = set.0;
    ((bits & low) | ((bits >> 1) & !low)) as usize
}

#[inline]
fn unsqueeze(index: usize, x: Elem) -> ElemSet {
    let low = (1u64 << x.0) - 1;
    let bits = index as u64;
    ElemSet((bits & low) | ((bits & !low) << 1))
}

pub(crate) fn check_limit(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::SizeLimit { n, limit })
    } else {
        Ok(())
    }
}

/// Per-element boolean functions over chosen-sets, monotone or not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecedenceTable {
    n: usize,
    tables: Vec<Vec<bool>>,
}

impl PrecedenceTable {
    pub fn from_fn(n: usize, f: impl Fn(Elem, ElemSet) -> bool) -> Result<Self> {
        check_limit(n, MAX_TABLE_N)?;
        let size = if n == 0 { 0 } else { 1usize << (n - 1) };
        let tables = elements(n)
            .map(|x| (0..size).map(|i| f(x, unsqueeze(i, x))).collect())
            .collect();
        Ok(PrecedenceTable { n, tables })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `p_x(chosen)`; the bit of `x` in `chosen` is ignored.
    #[inline]
    pub fn value(&self, x: Elem, chosen: ElemSet) -> bool {
        self.tables[x.index()][squeeze(chosen.without(x), x)]
    }

    /// All words `x1..xk` with `p_xi({x1..x(i-1)}) = 1` for every `i`.
    pub fn language(&self, limit: usize) -> Result<LanguageSet> {
        check_limit(self.n, limit)?;
        let mut words = Vec::new();
        let mut prefix = Vec::with_capacity(self.n);
        self.walk(&mut prefix, ElemSet::EMPTY, &mut |w, _| words.push(w.to_vec()));
        Ok(LanguageSet::from_sorted_unchecked(self.n, words))
    }

    /// The length-`n` members of the language, in lexicographic id order.
    pub fn permutations(&self, limit: usize) -> Result<Vec<Word>> {
        check_limit(self.n, limit)?;
        let mut out = Vec::new();
        let n = self.n;
        let mut prefix = Vec::with_capacity(n);
        self.walk(&mut prefix, ElemSet::EMPTY, &mut |w, _| {
            if w.len() == n {
                out.push(w.to_vec())
            }
        });
        Ok(out)
    }

    /// Depth-first walk over the language, visiting words in lexicographic
    /// order. The callback also receives the word's support.
    pub fn walk(&self, prefix: &mut Word, support: ElemSet, visit: &mut dyn FnMut(&[Elem], ElemSet)) {
        visit(prefix, support);
        for x in elements(self.n) {
            if !support.contains(x) && self.value(x, support) {
                prefix.push(x);
                self.walk(prefix, support.with(x), visit);
                prefix.pop();
            }
        }
    }

    fn first_monotonicity_failure(&self) -> Option<(Elem, ElemSet)> {
        for x in elements(self.n) {
            let others = ElemSet::full(self.n).without(x);
            for (i, &v) in self.tables[x.index()].iter().enumerate() {
                if !v {
                    continue;
                }
                let set = unsqueeze(i, x);
                for y in others.difference(set).iter() {
                    if !self.value(x, set.with(y)) {
                        return Some((x, set));
                    }
                }
            }
        }
        None
    }

    pub fn is_monotone(&self) -> bool {
        self.first_monotonicity_failure().is_none()
    }

    pub(crate) fn from_tables(n: usize, tables: Vec<Vec<bool>>) -> Self {
        PrecedenceTable { n, tables }
    }

    pub(crate) fn raw(&self, x: Elem) -> &[bool] {
        &self.tables[x.index()]
    }
}

/// A monotone precedence system stored as explicit truth tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitMps {
    table: PrecedenceTable,
}

impl ExplicitMps {
    pub fn new(table: PrecedenceTable) -> Result<Self> {
        match table.first_monotonicity_failure() {
            Some((x, set)) => Err(Error::NotMonotone { element: x.index(), set: set.0 }),
            None => Ok(ExplicitMps { table }),
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(Elem, ElemSet) -> bool) -> Result<Self> {
        ExplicitMps::new(PrecedenceTable::from_fn(n, f)?)
    }

    /// Three letters: `a` and `b` are always
    /// available, `c` becomes available once `a` or `b` is chosen.
    pub fn one_of_two() -> Self {
        ExplicitMps::from_fn(3, |x, set| match x.0 {
            2 => set.contains(Elem(0)) || set.contains(Elem(1)),
            _ => true,
        })
        .expect("example is monotone")
    }

    /// The system whose permutations are the linear extensions of `pred`,
    /// where `pred[x]` is the set of elements that must precede `x`.
    pub fn from_partial_order(pred: &[ElemSet]) -> Result<Self> {
        ExplicitMps::from_fn(pred.len(), |x, set| pred[x.index()].without(x).is_subset(set))
    }

    pub fn n(&self) -> usize {
        self.table.n
    }

    pub fn table(&self) -> &PrecedenceTable {
        &self.table
    }

    /// `p_x(chosen)`, requiring `x ∉ chosen`.
    pub fn evaluate(&self, x: Elem, chosen: ElemSet) -> Result<bool> {
        if x.index() >= self.n() {
            return Err(Error::Precondition(format!("element {x} outside alphabet")));
        }
        if chosen.contains(x) {
            return Err(Error::Precondition(format!("element {x} is already chosen")));
        }
        Ok(self.table.value(x, chosen))
    }

    #[inline]
    pub fn value(&self, x: Elem, chosen: ElemSet) -> bool {
        self.table.value(x, chosen)
    }

    pub fn enumerate_language(&self, limit: usize) -> Result<LanguageSet> {
        self.table.language(limit)
    }

    pub fn permutations(&self, limit: usize) -> Result<Vec<Word>> {
        self.table.permutations(limit)
    }

    /// `|P(S)|` by dynamic programming over feasible chosen-sets, without
    /// listing the words.
    pub fn count_permutations(&self) -> u128 {
        let n = self.n();
        let mut ways = vec![0u128; 1 << n];
        ways[0] = 1;
        for bits in 0..1usize << n {
            let w = ways[bits];
            if w == 0 {
                continue;
            }
            let set = ElemSet(bits as u64);
            for x in self.continuations(set).iter() {
                ways[bits | 1 << x.index()] += w;
            }
        }
        ways[(1 << n) - 1]
    }

    /// `{x ∉ chosen : p_x(chosen) = 1}`.
    pub fn continuations(&self, chosen: ElemSet) -> ElemSet {
        elements(self.n()).filter(|&x| !chosen.contains(x) && self.value(x, chosen)).collect()
    }

    /// Inclusion-minimal chosen-sets on which `p_x` is 1 (the terms of the
    /// minimal DNF of `p_x`).
    pub fn minimal_true_sets(&self, x: Elem) -> Vec<ElemSet> {
        let table = self.table.raw(x);
        let mut out = Vec::new();
        for (i, &v) in table.iter().enumerate() {
            if !v {
                continue;
            }
            let set = unsqueeze(i, x);
            if set.iter().all(|y| !self.value(x, set.without(y))) {
                out.push(set);
            }
        }
        out
    }

    /// Inclusion-maximal chosen-sets on which `p_x` is 0.
    pub fn maximal_false_sets(&self, x: Elem) -> Vec<ElemSet> {
        let table = self.table.raw(x);
        let others = ElemSet::full(self.n()).without(x);
        let mut out = Vec::new();
        for (i, &v) in table.iter().enumerate() {
            if v {
                continue;
            }
            let set = unsqueeze(i, x);
            if others.difference(set).iter().all(|y| self.value(x, set.with(y))) {
                out.push(set);
            }
        }
        out
    }
}
