//! Decremental simplicial vertices over a clique tree.
//!
//! A vertex is simplicial iff it lies in exactly one maximal clique, so the
//! structure tracks `count[v]`, the number of live tree nodes containing
//! `v`. Removing `v` shrinks its unique node `x`; if `x` is then contained
//! in a neighbour `y` (some incident separator equals `|K(x)|`), the edge is
//! contracted and every vertex of `K(x)` loses one containing node.
//!
//! Incident edges live in a per-node pairing max-heap keyed by separator
//! size; contraction melds heaps, and edges whose endpoints were merged are
//! discarded lazily when they surface.

use crate::element::{elements, Elem};
use crate::error::{Error, Result};
use crate::sorter::CandidateStructure;

use super::clique_tree::CliqueTree;
use super::graph::ChordalGraph;

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct SimplicialCds {
    tree: CliqueTree,
    pristine_count: Vec<u32>,
    // per-epoch state
    uf: Vec<usize>,
    size: Vec<usize>,
    count: Vec<u32>,
    dead: Vec<bool>,
    heap: Vec<u32>,
    child: Vec<u32>,
    sibling: Vec<u32>,
    scratch: Vec<u32>,
    work: u64,
}

impl SimplicialCds {
    pub fn new(graph: &ChordalGraph) -> Self {
        let tree = CliqueTree::build(graph);
        let mut pristine_count = vec![0u32; graph.n()];
        for c in &tree.cliques {
            for v in c {
                pristine_count[v.index()] += 1;
            }
        }
        let entries = 2 * tree.edges.len();
        let nodes = tree.len();
        SimplicialCds {
            pristine_count,
            uf: (0..nodes).collect(),
            size: tree.cliques.iter().map(Vec::len).collect(),
            count: vec![0; graph.n()],
            dead: vec![false; graph.n()],
            heap: vec![NIL; nodes],
            child: vec![NIL; entries],
            sibling: vec![NIL; entries],
            scratch: Vec::new(),
            work: 0,
            tree,
        }
    }

    pub fn tree(&self) -> &CliqueTree {
        &self.tree
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.uf[x] != x {
            self.uf[x] = self.uf[self.uf[x]];
            x = self.uf[x];
        }
        x
    }

    fn key(&self, entry: u32) -> (usize, std::cmp::Reverse<u32>) {
        let e = (entry / 2) as usize;
        (self.tree.edges[e].separator, std::cmp::Reverse(entry / 2))
    }

    /// Larger separator wins; ties go to the earlier edge.
    fn meld(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        self.work += 1;
        let (win, lose) = if self.key(b) > self.key(a) { (b, a) } else { (a, b) };
        self.sibling[lose as usize] = self.child[win as usize];
        self.child[win as usize] = lose;
        win
    }

    fn pop(&mut self, root: u32) -> u32 {
        let mut scratch = std::mem::take(&mut self.scratch);
        scratch.clear();
        let mut cur = self.child[root as usize];
        self.child[root as usize] = NIL;
        while cur != NIL {
            let next = self.sibling[cur as usize];
            self.sibling[cur as usize] = NIL;
            if next == NIL {
                scratch.push(cur);
                break;
            }
            let after = self.sibling[next as usize];
            self.sibling[next as usize] = NIL;
            scratch.push(self.meld(cur, next));
            cur = after;
        }
        let mut acc = scratch.pop().unwrap_or(NIL);
        while let Some(t) = scratch.pop() {
            acc = self.meld(t, acc);
        }
        self.scratch = scratch;
        acc
    }

    /// The live neighbour with the largest separator, discarding edges
    /// whose endpoints have been merged.
    fn best_neighbor(&mut self, x: usize) -> Option<(usize, usize)> {
        loop {
            let top = self.heap[x];
            if top == NIL {
                return None;
            }
            let e = self.tree.edges[(top / 2) as usize];
            let (a, b) = (self.find(e.x), self.find(e.y));
            if a != b {
                return Some((if a == x { b } else { a }, e.separator));
            }
            self.work += 1;
            self.heap[x] = self.pop(top);
        }
    }

    /// Merges `x` into `y`, where `K(x) ⊆ K(y)`.
    fn contract(&mut self, x: usize, y: usize, out: &mut Vec<Elem>) {
        self.uf[x] = y;
        let hx = std::mem::replace(&mut self.heap[x], NIL);
        self.heap[y] = self.meld(self.heap[y], hx);
        for k in 0..self.tree.cliques[x].len() {
            let u = self.tree.cliques[x][k];
            self.work += 1;
            if self.dead[u.index()] {
                continue;
            }
            self.count[u.index()] -= 1;
            if self.count[u.index()] == 1 {
                out.push(u);
            }
        }
    }
}

impl CandidateStructure for SimplicialCds {
    fn size(&self) -> usize {
        self.count.len()
    }

    fn init(&mut self, out: &mut Vec<Elem>) -> Result<()> {
        self.count.copy_from_slice(&self.pristine_count);
        self.dead.iter_mut().for_each(|d| *d = false);
        for (x, c) in self.tree.cliques.iter().enumerate() {
            self.uf[x] = x;
            self.size[x] = c.len();
            self.heap[x] = NIL;
        }
        self.child.iter_mut().for_each(|c| *c = NIL);
        self.sibling.iter_mut().for_each(|s| *s = NIL);
        self.work = 0;
        for e in 0..self.tree.edges.len() {
            let (x, y) = (self.tree.edges[e].x, self.tree.edges[e].y);
            let (ex, ey) = (2 * e as u32, 2 * e as u32 + 1);
            self.heap[x] = self.meld(self.heap[x], ex);
            self.heap[y] = self.meld(self.heap[y], ey);
        }
        out.extend(elements(self.count.len()).filter(|v| self.count[v.index()] == 1));
        Ok(())
    }

    fn step(&mut self, v: Elem, out: &mut Vec<Elem>) -> Result<()> {
        let i = v.index();
        if i >= self.count.len() || self.dead[i] || self.count[i] != 1 {
            return Err(Error::Contract(format!("vertex {v} is not simplicial")));
        }
        self.dead[i] = true;
        let x = self.find(self.tree.handle[i]);
        self.size[x] -= 1;
        self.work += 1;
        if let Some((y, separator)) = self.best_neighbor(x) {
            if separator == self.size[x] {
                self.contract(x, y, out);
            }
        }
        Ok(())
    }

    fn work(&self) -> u64 {
        self.work
    }
}
