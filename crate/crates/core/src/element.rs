//! Elements, alphabets, words and small element sets.
//!
//! Every structure in the crate indexes elements by a dense id `0..n`. The
//! [`Alphabet`] maps ids to the user-visible names.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Dense element id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u32);

impl Elem {
    #[inline]
    pub fn new(index: usize) -> Self {
        Elem(index as u32)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A sequence of letters. Simple words repeat no letter.
pub type Word = Vec<Elem>;

/// Iterator over `0..n` as elements.
pub fn elements(n: usize) -> impl DoubleEndedIterator<Item = Elem> + ExactSizeIterator {
    (0..n as u32).map(Elem)
}

/// True if no letter occurs twice.
pub fn is_simple(word: &[Elem]) -> bool {
    let mut seen = std::collections::HashSet::with_capacity(word.len());
    word.iter().all(|x| seen.insert(*x))
}

/// True if `word` contains each of `0..n` exactly once.
pub fn is_permutation(word: &[Elem], n: usize) -> bool {
    if word.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for x in word {
        match seen.get_mut(x.index()) {
            Some(s) if !*s => *s = true,
            _ => return false,
        }
    }
    true
}

/// `word` with every letter outside `keep` removed.
pub fn restrict(word: &[Elem], keep: impl Fn(Elem) -> bool) -> Word {
    word.iter().copied().filter(|&x| keep(x)).collect()
}

/// A set of elements over an alphabet of at most 64 letters, used by the
/// brute-force machinery.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ElemSet(pub u64);

impl ElemSet {
    pub const EMPTY: ElemSet = ElemSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            ElemSet(u64::MAX)
        } else {
            ElemSet((1u64 << n) - 1)
        }
    }

    pub fn from_elems(items: impl IntoIterator<Item = Elem>) -> Self {
        items.into_iter().fold(ElemSet::EMPTY, |s, x| s.with(x))
    }

    #[inline]
    pub fn contains(self, x: Elem) -> bool {
        self.0 >> x.0 & 1 == 1
    }

    #[inline]
    pub fn with(self, x: Elem) -> Self {
        ElemSet(self.0 | 1 << x.0)
    }

    #[inline]
    pub fn without(self, x: Elem) -> Self {
        ElemSet(self.0 & !(1 << x.0))
    }

    #[inline]
    pub fn insert(&mut self, x: Elem) {
        self.0 |= 1 << x.0;
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn is_subset(self, other: ElemSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn union(self, other: ElemSet) -> Self {
        ElemSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: ElemSet) -> Self {
        ElemSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: ElemSet) -> Self {
        ElemSet(self.0 & !other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = Elem> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros();
            bits &= bits - 1;
            Some(Elem(i))
        })
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|x| x.0)).finish()
    }
}

impl FromIterator<Elem> for ElemSet {
    fn from_iter<I: IntoIterator<Item = Elem>>(iter: I) -> Self {
        ElemSet::from_elems(iter)
    }
}

/// Ordered list of distinct names; ids are positions in the list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    ids: HashMap<String, Elem>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut ids = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.chars().any(|c| c.is_whitespace()) {
                return Err(Error::Input(format!("invalid element name {name:?}")));
            }
            if ids.insert(name.clone(), Elem::new(i)).is_some() {
                return Err(Error::Input(format!("duplicate element name {name:?}")));
            }
        }
        Ok(Alphabet { names, ids })
    }

    /// `a, b, c, ...` for up to 26 letters, `x0, x1, ...` beyond.
    pub fn letters(n: usize) -> Self {
        let names: Vec<String> = if n <= 26 {
            (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
        } else {
            (0..n).map(|i| format!("x{i}")).collect()
        };
        Alphabet::new(names).expect("generated names are distinct")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, x: Elem) -> &str {
        &self.names[x.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, name: &str) -> Option<Elem> {
        self.ids.get(name).copied()
    }

    /// Parses whitespace-separated names, or a run of single-letter names
    /// when every name of the alphabet is one character long.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        let tokens: Vec<String> = if self.single_char() && !text.contains(char::is_whitespace) {
            text.chars().map(String::from).collect()
        } else {
            text.split_whitespace().map(String::from).collect()
        };
        tokens
            .iter()
            .map(|t| self.id(t).ok_or_else(|| Error::Input(format!("unknown element {t:?}"))))
            .collect()
    }

    /// Letters concatenated when all names are single characters, space
    /// separated otherwise.
    pub fn format_word(&self, word: &[Elem]) -> String {
        let sep = if self.single_char() { "" } else { " " };
        word.iter().map(|&x| self.name(x)).collect::<Vec<_>>().join(sep)
    }

    fn single_char(&self) -> bool {
        self.names.iter().all(|s| s.chars().count() == 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letters_and_lookup() {
        let a = Alphabet::letters(3);
        assert_eq!(a.names(), &["a", "b", "c"]);
        assert_eq!(a.id("c"), Some(Elem(2)));
        assert_eq!(a.format_word(&[Elem(1), Elem(2), Elem(0)]), "bca");
        assert_eq!(a.parse_word("bca").unwrap(), vec![Elem(1), Elem(2), Elem(0)]);
        assert_eq!(a.parse_word("b c a").unwrap(), vec![Elem(1), Elem(2), Elem(0)]);
        assert_eq!(Alphabet::letters(30).name(Elem(29)), "x29");
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(Alphabet::new(["a", "b", "a"]).is_err());
        assert!(Alphabet::new(["a b"]).is_err());
    }

    #[test]
    fn empty_alphabet() {
        let a = Alphabet::new(Vec::<String>::new()).unwrap();
        assert!(a.is_empty());
        assert_eq!(a.format_word(&[]), "");
        assert!(a.parse_word("").unwrap().is_empty());
    }

    #[test]
    fn elem_set_ops() {
        let s = ElemSet::from_elems([Elem(0), Elem(3)]);
        assert!(s.contains(Elem(3)) && !s.contains(Elem(1)));
        assert_eq!(s.len(), 2);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![Elem(0), Elem(3)]);
        assert!(s.is_subset(ElemSet::full(4)));
        assert_eq!(s.without(Elem(0)), ElemSet(0b1000));
    }

    #[test]
    fn permutation_checks() {
        assert!(is_permutation(&[Elem(1), Elem(0)], 2));
        assert!(!is_permutation(&[Elem(1), Elem(1)], 2));
        assert!(is_simple(&[Elem(4), Elem(2)]));
        assert!(!is_simple(&[Elem(4), Elem(4)]));
    }
}
