//! Explicit simple languages and the axiom checks that classify them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::element::{elements, is_simple, Elem, ElemSet, Word};
use crate::error::{Error, Result};
use crate::mps::{squeeze, ExplicitMps, PrecedenceTable, MAX_TABLE_N};

/// A finite set of simple words over `0..n`, kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageSet {
    n: usize,
    words: BTreeSet<Word>,
}

/// Why a language is not an antimatroid (or greedoid).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `word` is in the language but its prefix without the last letter is not.
    NotPrefixClosed { word: Word },
    /// No letter of `alpha` outside `beta` extends `beta` inside the language.
    Exchange { alpha: Word, beta: Word },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |w: &Word| w.iter().map(|x| x.0.to_string()).collect::<Vec<_>>().join(" ");
        match self {
            Violation::NotPrefixClosed { word } => write!(f, "prefix of [{}] missing", show(word)),
            Violation::Exchange { alpha, beta } => {
                write!(f, "no letter of [{}] extends [{}]", show(alpha), show(beta))
            }
        }
    }
}

impl LanguageSet {
    pub fn new(n: usize, words: impl IntoIterator<Item = Word>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for w in words {
            if !is_simple(&w) || w.iter().any(|x| x.index() >= n) {
                return Err(Error::Input(format!("{w:?} is not a simple word over {n} letters")));
            }
            set.insert(w);
        }
        Ok(LanguageSet { n, words: set })
    }

    /// All prefixes (including ε) of the given words.
    pub fn prefix_closure(n: usize, words: impl IntoIterator<Item = Word>) -> Result<Self> {
        let mut all = Vec::new();
        for w in words {
            for k in 0..=w.len() {
                all.push(w[..k].to_vec());
            }
        }
        LanguageSet::new(n, all)
    }

    pub(crate) fn from_sorted_unchecked(n: usize, words: Vec<Word>) -> Self {
        LanguageSet { n, words: words.into_iter().collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &[Elem]) -> bool {
        self.words.contains(word)
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.words.iter()
    }

    /// Members of length `n`.
    pub fn permutations(&self) -> Vec<Word> {
        self.words.iter().filter(|w| w.len() == self.n).cloned().collect()
    }

    /// `log2 |P(L)|`; `-inf` for a language without permutations.
    pub fn itb_bits(&self) -> f64 {
        (self.words.iter().filter(|w| w.len() == self.n).count() as f64).log2()
    }

    fn continuations(&self) -> HashMap<&[Elem], ElemSet> {
        let mut cont: HashMap<&[Elem], ElemSet> = HashMap::with_capacity(self.words.len());
        for w in &self.words {
            cont.entry(w.as_slice()).or_default();
            if let Some((&last, prefix)) = w.split_last() {
                cont.entry(prefix).or_default().insert(last);
            }
        }
        cont
    }

    fn first_unclosed(&self) -> Option<Violation> {
        self.words
            .iter()
            .find(|w| !w.is_empty() && !self.words.contains(&w[..w.len() - 1]))
            .map(|w| Violation::NotPrefixClosed { word: w.clone() })
    }

    /// Lexicographically smallest word for every distinct support.
    fn support_representatives(&self) -> Vec<(&Word, ElemSet)> {
        let mut seen = BTreeMap::new();
        for w in &self.words {
            let s: ElemSet = w.iter().copied().collect();
            seen.entry(s).or_insert(w);
        }
        let mut reps: Vec<_> = seen.into_iter().map(|(s, w)| (w, s)).collect();
        reps.sort();
        reps
    }

    fn exchange_check(&self, applies: impl Fn(ElemSet, ElemSet) -> bool) -> Result<(), Violation> {
        if let Some(v) = self.first_unclosed() {
            return Err(v);
        }
        let cont = self.continuations();
        let betas: Vec<(&Word, ElemSet)> =
            self.words.iter().map(|w| (w, w.iter().copied().collect())).collect();
        for (alpha, a) in self.support_representatives() {
            for &(beta, b) in &betas {
                if applies(a, b) && a.difference(b).intersection(cont[beta.as_slice()]).is_empty() {
                    return Err(Violation::Exchange { alpha: alpha.clone(), beta: beta.clone() });
                }
            }
        }
        Ok(())
    }

    /// Prefix closure plus: for `α, β ∈ L` with `α̃ ⊄ β̃` some `x ∈ α̃ \ β̃` has
    /// `βx ∈ L`. Witnesses are the lexicographically smallest `(α, β)`.
    pub fn check_antimatroid_axioms(&self) -> Result<(), Violation> {
        self.guard_width();
        self.exchange_check(|a, b| !a.is_subset(b))
    }

    /// Prefix closure plus the length-based exchange axiom.
    pub fn check_greedoid_axioms(&self) -> Result<(), Violation> {
        self.guard_width();
        self.exchange_check(|a, b| a.len() > b.len())
    }

    fn guard_width(&self) {
        assert!(self.n <= 64, "axiom checks support at most 64 letters");
    }

    fn first_letter_tables(&self) -> Result<Vec<Vec<bool>>> {
        if self.n > MAX_TABLE_N {
            return Err(Error::SizeLimit { n: self.n, limit: MAX_TABLE_N });
        }
        let size = if self.n == 0 { 0 } else { 1usize << (self.n - 1) };
        let mut tables = vec![vec![false; size]; self.n];
        for w in &self.words {
            if let Some((&x, alpha)) = w.split_last() {
                let support: ElemSet = alpha.iter().copied().collect();
                tables[x.index()][squeeze(support, x)] = true;
            }
        }
        Ok(tables)
    }
}

/// The monotone precedence system `p_x(X) = 1` iff some `αx ∈ L` has
/// `α̃ ⊆ X`. Its language equals `L` whenever `L` is an antimatroid.
pub fn mps_from_language(language: &LanguageSet) -> Result<ExplicitMps> {
    if language.is_empty() {
        return Err(Error::Precondition("empty language".into()));
    }
    language.check_antimatroid_axioms().map_err(Error::Axiom)?;
    let n = language.n();
    let mut tables = language.first_letter_tables()?;
    // close every table upward over the n-1 squeezed bits
    for table in &mut tables {
        for bit in 0..n.saturating_sub(1) {
            let b = 1usize << bit;
            for i in 0..table.len() {
                if i & b != 0 && table[i ^ b] {
                    table[i] = true;
                }
            }
        }
    }
    ExplicitMps::new(PrecedenceTable::from_tables(n, tables))
}

/// The (generally non-monotone) system `p_x(Y) = 1` iff some `αx ∈ L` has
/// `α̃ = Y`.
pub fn nmps_from_language(language: &LanguageSet) -> Result<PrecedenceTable> {
    let tables = language.first_letter_tables()?;
    Ok(PrecedenceTable::from_tables(language.n(), tables))
}

/// As [`nmps_from_language`], after checking the greedoid axioms. The result
/// generates exactly `language`.
pub fn nmps_from_greedoid(language: &LanguageSet) -> Result<PrecedenceTable> {
    language.check_greedoid_axioms().map_err(Error::Axiom)?;
    nmps_from_language(language)
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Word> {
    fn go(n: usize, used: ElemSet, prefix: &mut Word, out: &mut Vec<Word>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for x in elements(n) {
            if !used.contains(x) {
                prefix.push(x);
                go(n, used.with(x), prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, ElemSet::EMPTY, &mut Vec::with_capacity(n), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mps::DEFAULT_BF_LIMIT;

    fn w(s: &str) -> Word {
        s.bytes().map(|b| Elem((b - b'a') as u32)).collect()
    }

    fn one_of_two_language() -> LanguageSet {
        LanguageSet::prefix_closure(3, ["abc", "bac", "acb", "bca"].map(w)).unwrap()
    }

    #[test]
    fn one_of_two_is_antimatroid() {
        assert_eq!(one_of_two_language().check_antimatroid_axioms(), Ok(()));
        assert_eq!(one_of_two_language().itb_bits(), 2.0);
    }

    #[test]
    fn abcd_dcba_violations() {
        let l = LanguageSet::prefix_closure(4, ["abcd", "dcba"].map(w)).unwrap();
        // smallest witness: α = a, β = ε is fine (a extends ε), α = a, β = d fails
        assert_eq!(
            l.check_antimatroid_axioms(),
            Err(Violation::Exchange { alpha: w("a"), beta: w("d") })
        );
        assert_eq!(
            l.check_greedoid_axioms(),
            Err(Violation::Exchange { alpha: w("ab"), beta: w("d") })
        );
    }

    #[test]
    fn empty_alphabet_is_antimatroid() {
        let l = LanguageSet::new(0, [vec![]]).unwrap();
        assert_eq!(l.check_antimatroid_axioms(), Ok(()));
        assert_eq!(l.itb_bits(), 0.0);
    }

    #[test]
    fn tiny_greedoid() {
        let l = LanguageSet::new(1, [vec![], w("a")]).unwrap();
        assert_eq!(l.check_greedoid_axioms(), Ok(()));
    }

    #[test]
    fn missing_prefix_detected() {
        let l = LanguageSet::new(2, [vec![], w("ab")]).unwrap();
        assert_eq!(l.check_antimatroid_axioms(), Err(Violation::NotPrefixClosed { word: w("ab") }));
    }

    #[test]
    fn xyz_zyx_needs_xzy() {
        // an antimatroid containing xyz and zyx also contains xzy
        let l = LanguageSet::prefix_closure(3, ["abc", "cba"].map(w)).unwrap();
        assert!(l.check_antimatroid_axioms().is_err());
        let l = LanguageSet::prefix_closure(3, ["abc", "cba", "acb", "cab"].map(w)).unwrap();
        assert!(l.check_antimatroid_axioms().is_ok());
    }

    #[test]
    fn prop24_one_of_two() {
        let s = mps_from_language(&one_of_two_language()).unwrap();
        assert!(!s.value(Elem(2), ElemSet::EMPTY));
        assert!(s.value(Elem(2), ElemSet::from_elems([Elem(0)])));
        assert_eq!(s.enumerate_language(DEFAULT_BF_LIMIT).unwrap(), one_of_two_language());
    }

    #[test]
    fn prop24_single_letter() {
        let l = LanguageSet::new(1, [vec![], w("a")]).unwrap();
        let s = mps_from_language(&l).unwrap();
        assert!(s.value(Elem(0), ElemSet::EMPTY));
    }

    #[test]
    fn prop24_rejects_non_antimatroid() {
        let l = LanguageSet::prefix_closure(4, ["abcd", "dcba"].map(w)).unwrap();
        assert!(matches!(mps_from_language(&l), Err(Error::Axiom(_))));
    }

    #[test]
    fn nmps_of_non_greedoid_still_generates() {
        let l = LanguageSet::prefix_closure(4, ["abcd", "dcba"].map(w)).unwrap();
        assert!(nmps_from_greedoid(&l).is_err());
        let t = nmps_from_language(&l).unwrap();
        assert!(!t.is_monotone());
        assert_eq!(t.language(DEFAULT_BF_LIMIT).unwrap(), l);
    }

    #[test]
    fn itb_of_all_permutations() {
        let l = LanguageSet::prefix_closure(4, all_permutations(4)).unwrap();
        assert!((l.itb_bits() - 24f64.log2()).abs() < 1e-12);
        assert_eq!(all_permutations(4).len(), 24);
    }
}
