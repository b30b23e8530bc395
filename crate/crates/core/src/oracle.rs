//! Comparison oracles with exact counting.

use std::cell::{Cell, RefCell};

use crate::element::{is_permutation, Elem, Word};
use crate::error::{Error, Result};

/// Strict order on dense item indices, as seen by a priority queue.
pub trait Comparator {
    fn less(&self, a: usize, b: usize) -> bool;
}

impl<C: Comparator + ?Sized> Comparator for &C {
    fn less(&self, a: usize, b: usize) -> bool {
        (**self).less(a, b)
    }
}

/// Answers `x ≺ y` queries for a hidden permutation and counts every query.
#[derive(Debug)]
pub struct ComparisonOracle {
    order: Word,
    rank: Vec<u32>,
    count: Cell<u64>,
    log: Option<RefCell<Vec<(Elem, Elem, bool)>>>,
}

impl ComparisonOracle {
    pub fn new(order: Word) -> Result<Self> {
        let n = order.len();
        if !is_permutation(&order, n) {
            return Err(Error::Input("hidden order is not a permutation".into()));
        }
        let mut rank = vec![0u32; n];
        for (i, x) in order.iter().enumerate() {
            rank[x.index()] = i as u32;
        }
        Ok(ComparisonOracle { order, rank, count: Cell::new(0), log: None })
    }

    /// Records every answered query for later replay.
    pub fn with_log(mut self) -> Self {
        self.log = Some(RefCell::new(Vec::new()));
        self
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// The hidden permutation. Test and reporting code only; algorithms
    /// must go through [`ComparisonOracle::less`].
    pub fn hidden_order(&self) -> &[Elem] {
        &self.order
    }

    /// `x ≺ y` in the hidden order. Comparing an element with itself is a
    /// logic error and panics.
    pub fn less(&self, x: Elem, y: Elem) -> bool {
        assert_ne!(x, y, "element compared with itself");
        self.count.set(self.count.get() + 1);
        let answer = self.rank[x.index()] < self.rank[y.index()];
        if let Some(log) = &self.log {
            log.borrow_mut().push((x, y, answer));
        }
        answer
    }

    pub fn count(&self) -> u64 {
        self.count.get()
    }

    /// Answered queries, if logging is on.
    pub fn queries(&self) -> Option<Vec<(Elem, Elem, bool)>> {
        self.log.as_ref().map(|l| l.borrow().clone())
    }
}

impl Comparator for ComparisonOracle {
    fn less(&self, a: usize, b: usize) -> bool {
        ComparisonOracle::less(self, Elem::new(a), Elem::new(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_answers() {
        // hidden order b ≺ a ≺ c
        let o = ComparisonOracle::new(vec![Elem(1), Elem(0), Elem(2)]).unwrap();
        assert!(o.less(Elem(1), Elem(0)));
        assert!(!o.less(Elem(2), Elem(0)));
        assert_eq!(o.count(), 2);
    }

    #[test]
    #[should_panic]
    fn self_comparison_panics() {
        let o = ComparisonOracle::new(vec![Elem(0), Elem(1)]).unwrap();
        o.less(Elem(0), Elem(0));
    }

    #[test]
    fn rejects_non_permutation() {
        assert!(ComparisonOracle::new(vec![Elem(0), Elem(0)]).is_err());
    }

    #[test]
    fn replay_is_consistent() {
        let order: Word = [3, 0, 4, 1, 2].into_iter().map(Elem).collect();
        let o = ComparisonOracle::new(order.clone()).unwrap().with_log();
        for a in 0..5 {
            for b in 0..5 {
                if a != b {
                    o.less(Elem(a), Elem(b));
                }
            }
        }
        let replay = ComparisonOracle::new(order).unwrap();
        for (x, y, ans) in o.queries().unwrap() {
            assert_eq!(replay.less(x, y), ans);
            // antisymmetry
            assert_eq!(replay.less(y, x), !ans);
        }
    }
}
