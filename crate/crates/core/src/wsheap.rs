//! Pairing heap over dense item ids, compared through an external
//! [`Comparator`].
//!
//! Two-pass pairing heaps without decrease-key have the working-set property,
//! which is what topological heapsort needs from its queue. Items are plain
//! indices; every item may be inserted at most once over the heap's lifetime.
//! An optional operation log records inserts and extracts so the weak
//! working-set sizes `w'(x)` can be measured afterwards.

use crate::error::{Error, Result};
use crate::oracle::Comparator;

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Never,
    Present,
    Gone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeapOp {
    Insert(usize),
    Extract(usize),
}

#[derive(Debug, Clone)]
pub struct WorkingSetHeap {
    child: Vec<u32>,
    last: Vec<u32>,
    sibling: Vec<u32>,
    slot: Vec<Slot>,
    root: u32,
    len: usize,
    comparisons: u64,
    scratch: Vec<u32>,
    log: Option<Vec<HeapOp>>,
}

/// Measurements derived from the operation log.
#[derive(Debug, Clone, PartialEq)]
pub struct HeapMetrics {
    /// Comparisons issued by the heap itself.
    pub comparisons: u64,
    /// `(item, w'(item))` for every extracted item, in extraction order.
    pub weak_working_sets: Vec<(usize, u64)>,
}

impl HeapMetrics {
    /// `Σ (1 + log2 w'(x))` over extracted items.
    pub fn working_set_bound(&self) -> f64 {
        self.weak_working_sets.iter().map(|&(_, w)| 1.0 + (w as f64).log2()).sum()
    }

    pub fn weak_working_set(&self, item: usize) -> Option<u64> {
        self.weak_working_sets.iter().find(|(x, _)| *x == item).map(|&(_, w)| w)
    }
}

impl Default for WorkingSetHeap {
    fn default() -> Self {
        WorkingSetHeap::new()
    }
}

impl WorkingSetHeap {
    pub fn new() -> Self {
        WorkingSetHeap {
            child: Vec::new(),
            last: Vec::new(),
            sibling: Vec::new(),
            slot: Vec::new(),
            root: NIL,
            len: 0,
            comparisons: 0,
            scratch: Vec::new(),
            log: None,
        }
    }

    /// Pre-sizes the arena for items `0..capacity`.
    pub fn with_capacity(capacity: usize) -> Self {
        let mut h = WorkingSetHeap::new();
        h.ensure(capacity);
        h
    }

    /// Turns on the operation log (needed by [`WorkingSetHeap::metrics`]).
    pub fn with_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    fn ensure(&mut self, size: usize) {
        if self.slot.len() < size {
            self.child.resize(size, NIL);
            self.last.resize(size, NIL);
            self.sibling.resize(size, NIL);
            self.slot.resize(size, Slot::Never);
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, item: usize) -> bool {
        self.slot.get(item) == Some(&Slot::Present)
    }

    /// Comparisons issued so far.
    pub fn comparisons(&self) -> u64 {
        self.comparisons
    }

    pub fn insert<C: Comparator + ?Sized>(&mut self, item: usize, cmp: &C) -> Result<()> {
        if item >= NIL as usize {
            return Err(Error::HeapUsage(format!("item {item} out of range")));
        }
        self.ensure(item + 1);
        if self.slot[item] != Slot::Never {
            return Err(Error::HeapUsage(format!("item {item} inserted twice")));
        }
        self.slot[item] = Slot::Present;
        self.child[item] = NIL;
        self.last[item] = NIL;
        self.sibling[item] = NIL;
        self.root = if self.root == NIL { item as u32 } else { self.link(self.root, item as u32, cmp) };
        self.len += 1;
        if let Some(log) = &mut self.log {
            log.push(HeapOp::Insert(item));
        }
        Ok(())
    }

    /// Current minimum without removing it.
    pub fn peek(&self) -> Option<usize> {
        (self.root != NIL).then_some(self.root as usize)
    }

    pub fn extract_min<C: Comparator + ?Sized>(&mut self, cmp: &C) -> Result<usize> {
        if self.root == NIL {
            return Err(Error::EmptyHeap);
        }
        let min = self.root;
        self.root = self.combine_children(min, cmp);
        self.slot[min as usize] = Slot::Gone;
        self.len -= 1;
        if let Some(log) = &mut self.log {
            log.push(HeapOp::Extract(min as usize));
        }
        Ok(min as usize)
    }

    /// Makes the larger of two roots the last child of the smaller, so child
    /// lists stay in linking order (oldest first). On sorted runs this costs
    /// markedly fewer comparisons than prepending.
    fn link<C: Comparator + ?Sized>(&mut self, a: u32, b: u32, cmp: &C) -> u32 {
        self.comparisons += 1;
        let (win, lose) = if cmp.less(b as usize, a as usize) { (b, a) } else { (a, b) };
        let (w, l) = (win as usize, lose as usize);
        self.sibling[l] = NIL;
        match self.last[w] {
            NIL => self.child[w] = lose,
            tail => self.sibling[tail as usize] = lose,
        }
        self.last[w] = lose;
        win
    }

    fn combine_children<C: Comparator + ?Sized>(&mut self, parent: u32, cmp: &C) -> u32 {
        let mut scratch = std::mem::take(&mut self.scratch);
        scratch.clear();
        // first pass: link adjacent pairs left to right
        let mut cur = self.child[parent as usize];
        while cur != NIL {
            let next = self.sibling[cur as usize];
            self.sibling[cur as usize] = NIL;
            if next == NIL {
                scratch.push(cur);
                break;
            }
            let after = self.sibling[next as usize];
            self.sibling[next as usize] = NIL;
            scratch.push(self.link(cur, next, cmp));
            cur = after;
        }
        // second pass: fold right to left
        let mut acc = scratch.pop().unwrap_or(NIL);
        while let Some(t) = scratch.pop() {
            acc = self.link(t, acc, cmp);
        }
        self.child[parent as usize] = NIL;
        self.last[parent as usize] = NIL;
        self.scratch = scratch;
        acc
    }

    pub fn log(&self) -> Option<&[HeapOp]> {
        self.log.as_deref()
    }

    /// `w'(x)` for every extracted item: the number of inserts between the
    /// insert and the extract of `x`, counting `x` itself.
    pub fn metrics(&self) -> Result<HeapMetrics> {
        let log = self.log.as_ref().ok_or(Error::LogDisabled)?;
        let mut count = 0u64;
        let mut inserted_at = vec![0u64; self.slot.len()];
        let mut weak = Vec::new();
        for op in log {
            match *op {
                HeapOp::Insert(x) => {
                    inserted_at[x] = count;
                    count += 1;
                }
                HeapOp::Extract(x) => weak.push((x, count - inserted_at[x])),
            }
        }
        Ok(HeapMetrics { comparisons: self.comparisons, weak_working_sets: weak })
    }
}
