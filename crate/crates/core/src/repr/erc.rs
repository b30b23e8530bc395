//! Elementary ranking conditions.
//!
//! An ERC `(A, B)` demands that some element of `A` precede every element
//! of `B`. An element `b` is available once every ERC with `b ∈ B` has been
//! hit by a chosen member of its `A`.

use crate::element::{elements, Elem, ElemSet};
use crate::error::{Error, Result};
use crate::language::{all_permutations, LanguageSet};
use crate::mps::{check_limit, ExplicitMps, PrecedenceTable, MAX_TABLE_N};
use crate::sorter::CandidateStructure;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Erc {
    pub a: Vec<Elem>,
    pub b: Vec<Elem>,
}

impl Erc {
    pub fn new(a: impl IntoIterator<Item = Elem>, b: impl IntoIterator<Item = Elem>) -> Self {
        let mut a: Vec<Elem> = a.into_iter().collect();
        let mut b: Vec<Elem> = b.into_iter().collect();
        a.sort();
        a.dedup();
        b.sort();
        b.dedup();
        Erc { a, b }
    }

    /// Some `a ∈ A` precedes every `b ∈ B` in `order`.
    pub fn satisfied_by(&self, order: &[Elem]) -> bool {
        for &x in order {
            if self.a.contains(&x) {
                return true;
            }
            if self.b.contains(&x) {
                return false;
            }
        }
        self.b.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErcSet {
    n: usize,
    ercs: Vec<Erc>,
}

impl ErcSet {
    /// Validates ERCs over `n` elements. ERCs with empty `B` are vacuous and
    /// dropped; a warning for each is returned alongside the set.
    pub fn new(n: usize, ercs: impl IntoIterator<Item = Erc>) -> Result<(Self, Vec<String>)> {
        let mut kept = Vec::new();
        let mut warnings = Vec::new();
        for (i, e) in ercs.into_iter().enumerate() {
            if let Some(x) = e.a.iter().chain(&e.b).find(|x| x.index() >= n) {
                return Err(Error::Input(format!("ERC {i} mentions {x} outside the alphabet")));
            }
            if e.a.is_empty() {
                return Err(Error::Input(format!("ERC {i} has an empty A; its B can never become available")));
            }
            if let Some(x) = e.a.iter().find(|x| e.b.contains(x)) {
                return Err(Error::Input(format!("ERC {i} has {x} on both sides")));
            }
            if e.b.is_empty() {
                warnings.push(format!("ERC {i} has an empty B and is dropped"));
                continue;
            }
            kept.push(e);
        }
        Ok((ErcSet { n, ercs: kept }, warnings))
    }

    /// One precedence per pair `(a, b)`.
    pub fn from_precedences(n: usize, pairs: &[(Elem, Elem)]) -> Result<Self> {
        Ok(ErcSet::new(n, pairs.iter().map(|&(a, b)| Erc::new([a], [b])))?.0)
    }

    /// Translation of a full MPS into ERCs: for every maximal false set `M`
    /// of `p_x`, the ERC `(Σ \ M \ {x}, {x})`.
    pub fn from_mps(mps: &ExplicitMps) -> Result<Self> {
        let n = mps.n();
        let all = ElemSet::full(n);
        let mut ercs = Vec::new();
        for x in elements(n) {
            for m in mps.maximal_false_sets(x) {
                let a = all.difference(m).without(x);
                if a.is_empty() {
                    return Err(Error::NotFull { covered: n - 1, n });
                }
                ercs.push(Erc::new(a.iter(), [x]));
            }
        }
        Ok(ErcSet { n, ercs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ercs(&self) -> &[Erc] {
        &self.ercs
    }

    /// Total number of element occurrences over all ERCs.
    pub fn size(&self) -> usize {
        self.ercs.iter().map(|e| e.a.len() + e.b.len()).sum()
    }

    pub fn is_available(&self, x: Elem, chosen: ElemSet) -> bool {
        self.ercs.iter().filter(|e| e.b.contains(&x)).all(|e| e.a.iter().any(|&a| chosen.contains(a)))
    }

    pub fn to_mps(&self) -> Result<ExplicitMps> {
        if self.n > MAX_TABLE_N {
            return Err(Error::SizeLimit { n: self.n, limit: MAX_TABLE_N });
        }
        ExplicitMps::new(PrecedenceTable::from_fn(self.n, |x, set| self.is_available(x, set))?)
    }

    pub fn cds(&self) -> ErcCds {
        ErcCds::new(self)
    }
}

/// ERC CDS: blocker counters plus, per element, the ERCs whose `A` holds it.
#[derive(Debug, Clone)]
pub struct ErcCds {
    n: usize,
    b: Vec<Vec<Elem>>,
    in_a: Vec<Vec<u32>>,
    initial_blockers: Vec<u32>,
    blockers: Vec<u32>,
    live: Vec<bool>,
    work: u64,
}

impl ErcCds {
    pub fn new(set: &ErcSet) -> Self {
        let n = set.n;
        let mut in_a = vec![Vec::new(); n];
        let mut initial_blockers = vec![0u32; n];
        for (i, e) in set.ercs.iter().enumerate() {
            for a in &e.a {
                in_a[a.index()].push(i as u32);
            }
            for b in &e.b {
                initial_blockers[b.index()] += 1;
            }
        }
        ErcCds {
            n,
            b: set.ercs.iter().map(|e| e.b.clone()).collect(),
            in_a,
            blockers: initial_blockers.clone(),
            initial_blockers,
            live: vec![true; set.ercs.len()],
            work: 0,
        }
    }
}

impl CandidateStructure for ErcCds {
    fn size(&self) -> usize {
        self.n
    }

    fn init(&mut self, out: &mut Vec<Elem>) -> Result<()> {
        self.blockers.copy_from_slice(&self.initial_blockers);
        self.live.iter_mut().for_each(|l| *l = true);
        self.work = 0;
        out.extend(elements(self.n).filter(|x| self.blockers[x.index()] == 0));
        Ok(())
    }

    fn step(&mut self, x: Elem, out: &mut Vec<Elem>) -> Result<()> {
        if x.index() >= self.n {
            return Err(Error::Contract(format!("step on element {x} outside alphabet")));
        }
        for k in 0..self.in_a[x.index()].len() {
            let e = self.in_a[x.index()][k] as usize;
            self.work += 1;
            if !std::mem::replace(&mut self.live[e], false) {
                continue;
            }
            for &b in &self.b[e] {
                self.work += 1;
                let c = &mut self.blockers[b.index()];
                *c -= 1;
                if *c == 0 {
                    out.push(b);
                }
            }
        }
        Ok(())
    }

    fn work(&self) -> u64 {
        self.work
    }
}

/// A failed ERC semantics check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ErcMismatch {
    /// The permutations satisfying every ERC differ from `P(L)`.
    Permutations { only_ercs: Vec<Vec<Elem>>, only_language: Vec<Vec<Elem>> },
    /// The two quantifier orders disagree on this ERC and permutation.
    Quantifiers { erc: usize, order: Vec<Elem> },
}

/// Checks that the permutations satisfying every ERC are exactly `P(L)`, and
/// that "every b has an earlier a" agrees with "one a precedes every b" on
/// every permutation and every ERC.
pub fn erc_semantics_check(set: &ErcSet, language: &LanguageSet, limit: usize) -> Result<Result<(), ErcMismatch>> {
    check_limit(set.n, limit)?;
    let mut satisfying = Vec::new();
    for pi in all_permutations(set.n) {
        let pos = position_map(&pi);
        for (i, e) in set.ercs.iter().enumerate() {
            let every_b = e.b.iter().all(|b| e.a.iter().any(|a| pos[a.index()] < pos[b.index()]));
            let one_a = e.a.iter().any(|a| e.b.iter().all(|b| pos[a.index()] < pos[b.index()]));
            if every_b != one_a {
                return Ok(Err(ErcMismatch::Quantifiers { erc: i, order: pi }));
            }
        }
        if set.ercs.iter().all(|e| e.satisfied_by(&pi)) {
            satisfying.push(pi);
        }
    }
    let perms = language.permutations();
    if satisfying != perms {
        let only_ercs = satisfying.iter().filter(|p| !perms.contains(p)).cloned().collect();
        let only_language = perms.iter().filter(|p| !satisfying.contains(p)).cloned().collect();
        return Ok(Err(ErcMismatch::Permutations { only_ercs, only_language }));
    }
    Ok(Ok(()))
}

fn position_map(order: &[Elem]) -> Vec<usize> {
    let mut pos = vec![0; order.len()];
    for (i, x) in order.iter().enumerate() {
        pos[x.index()] = i;
    }
    pos
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sorter::{cds_language, cds_permutations, validate_cds};

    fn e(a: &[u32], b: &[u32]) -> Erc {
        Erc::new(a.iter().map(|&i| Elem(i)), b.iter().map(|&i| Elem(i)))
    }

    fn perms(words: &[&str]) -> Vec<Vec<Elem>> {
        let mut v: Vec<Vec<Elem>> = words.iter().map(|w| w.bytes().map(|b| Elem((b - b'a') as u32)).collect()).collect();
        v.sort();
        v
    }

    #[test]
    fn single_precedence() {
        let (set, _) = ErcSet::new(2, [e(&[0], &[1])]).unwrap();
        let mut cds = set.cds();
        let mut out = Vec::new();
        cds.init(&mut out).unwrap();
        assert_eq!(out, vec![Elem(0)]);
        out.clear();
        cds.step(Elem(0), &mut out).unwrap();
        assert_eq!(out, vec![Elem(1)]);
    }

    #[test]
    fn one_of_two_as_erc() {
        let (set, _) = ErcSet::new(3, [e(&[0, 1], &[2])]).unwrap();
        assert_eq!(cds_permutations(&mut set.cds(), 10).unwrap(), perms(&["abc", "acb", "bac", "bca"]));
        assert_eq!(set.to_mps().unwrap(), ExplicitMps::one_of_two());
        let lang = cds_language(&mut set.cds(), 10).unwrap();
        assert_eq!(erc_semantics_check(&set, &lang, 10).unwrap(), Ok(()));
    }

    #[test]
    fn translation_from_mps_validates() {
        let mps = ExplicitMps::one_of_two();
        let set = ErcSet::from_mps(&mps).unwrap();
        assert_eq!(set.ercs(), &[e(&[0, 1], &[2])]);
        assert_eq!(validate_cds(&mut set.cds(), &mps, 10).unwrap(), Ok(()));
    }

    #[test]
    fn blocked_forever_stalls() {
        // b needs a, a needs b
        let (set, _) = ErcSet::new(2, [e(&[0], &[1]), e(&[1], &[0])]).unwrap();
        assert!(cds_permutations(&mut set.cds(), 10).unwrap().is_empty());
    }

    #[test]
    fn load_validation() {
        assert!(ErcSet::new(2, [e(&[], &[1])]).is_err());
        assert!(ErcSet::new(2, [e(&[0], &[0, 1])]).is_err());
        assert!(ErcSet::new(2, [e(&[0], &[2])]).is_err());
        let (set, warnings) = ErcSet::new(2, [e(&[0], &[])]).unwrap();
        assert!(set.ercs().is_empty());
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn empty_set_allows_everything() {
        let (set, _) = ErcSet::new(3, []).unwrap();
        let lang = cds_language(&mut set.cds(), 10).unwrap();
        assert_eq!(lang.permutations().len(), 6);
        assert_eq!(erc_semantics_check(&set, &lang, 10).unwrap(), Ok(()));
        let (one, _) = ErcSet::new(1, []).unwrap();
        let lang = cds_language(&mut one.cds(), 10).unwrap();
        assert_eq!(lang.permutations(), perms(&["a"]));
    }

    #[test]
    fn semantics_check_detects_wrong_language() {
        let (set, _) = ErcSet::new(3, [e(&[0, 1], &[2])]).unwrap();
        let (chain, _) = ErcSet::new(3, [e(&[0], &[1]), e(&[1], &[2])]).unwrap();
        let wrong = cds_language(&mut chain.cds(), 10).unwrap();
        assert!(matches!(erc_semantics_check(&set, &wrong, 10).unwrap(), Err(ErcMismatch::Permutations { .. })));
    }

    #[test]
    fn work_is_linear() {
        let (set, _) = ErcSet::new(4, [e(&[0, 1], &[2, 3]), e(&[2], &[3])]).unwrap();
        let mut cds = set.cds();
        let mut out = Vec::new();
        cds.init(&mut out).unwrap();
        for x in [0, 1, 2, 3] {
            cds.step(Elem(x), &mut out).unwrap();
        }
        assert!(cds.work() <= set.size() as u64);
    }
}
