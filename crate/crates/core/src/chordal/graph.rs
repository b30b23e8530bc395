//! Undirected chordal graphs: recognition by maximum cardinality search and
//! naive oracles (simplicial test, PEO check, PEO counting).

use crate::element::{elements, Elem, ElemSet};
use crate::error::{Error, Result};
use crate::mps::{ExplicitMps, PrecedenceTable, MAX_TABLE_N};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChordalGraph {
    adj: Vec<Vec<Elem>>,
    m: usize,
    /// Maximum cardinality search visit order; its reverse is a PEO.
    visit: Vec<Elem>,
}

impl ChordalGraph {
    /// Builds the graph and verifies chordality. Self-loops and repeated
    /// edges are dropped.
    pub fn new(n: usize, edges: &[(Elem, Elem)]) -> Result<Self> {
        let adj = adjacency(n, edges)?;
        let m = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let visit = maximum_cardinality_search(&adj);
        verify_peo(&adj, &visit)?;
        Ok(ChordalGraph { adj, m, visit })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: Elem) -> &[Elem] {
        &self.adj[v.index()]
    }

    pub fn adjacent(&self, u: Elem, v: Elem) -> bool {
        self.adj[u.index()].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> Vec<(Elem, Elem)> {
        elements(self.n())
            .flat_map(|u| self.adj[u.index()].iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect()
    }

    pub fn mcs_order(&self) -> &[Elem] {
        &self.visit
    }

    /// A perfect elimination ordering (reverse MCS order).
    pub fn peo(&self) -> Vec<Elem> {
        self.visit.iter().rev().copied().collect()
    }

    /// `v`'s neighbours outside `removed` form a clique.
    pub fn is_simplicial(&self, v: Elem, removed: &[bool]) -> bool {
        let live: Vec<Elem> = self.adj[v.index()].iter().copied().filter(|u| !removed[u.index()]).collect();
        live.iter().enumerate().all(|(i, &a)| live[i + 1..].iter().all(|&b| self.adjacent(a, b)))
    }

    /// Every element of `order` is simplicial once its predecessors are
    /// removed. Quadratic; a test oracle.
    pub fn is_peo(&self, order: &[Elem]) -> bool {
        if order.len() != self.n() {
            return false;
        }
        let mut removed = vec![false; self.n()];
        for &v in order {
            if removed[v.index()] || !self.is_simplicial(v, &removed) {
                return false;
            }
            removed[v.index()] = true;
        }
        true
    }

    /// Number of perfect elimination orderings, by dynamic programming over
    /// removed sets.
    pub fn count_peos(&self) -> Result<u128> {
        let n = self.n();
        if n > MAX_TABLE_N {
            return Err(Error::SizeLimit { n, limit: MAX_TABLE_N });
        }
        let mut ways = vec![0u128; 1 << n];
        ways[0] = 1;
        let mut removed = vec![false; n];
        for s in 0..(1usize << n) {
            if ways[s] == 0 {
                continue;
            }
            for (i, r) in removed.iter_mut().enumerate() {
                *r = s >> i & 1 == 1;
            }
            for v in elements(n).filter(|v| !removed[v.index()]) {
                if self.is_simplicial(v, &removed) {
                    ways[s | 1 << v.index()] += ways[s];
                }
            }
        }
        Ok(ways[(1 << n) - 1])
    }

    /// `p_v(X) = 1` iff `v` is simplicial in `G − X`.
    pub fn to_mps(&self) -> Result<ExplicitMps> {
        let n = self.n();
        if n > MAX_TABLE_N {
            return Err(Error::SizeLimit { n, limit: MAX_TABLE_N });
        }
        ExplicitMps::new(PrecedenceTable::from_fn(n, |v, chosen: ElemSet| {
            let removed: Vec<bool> = (0..n).map(|i| chosen.contains(Elem::new(i))).collect();
            self.is_simplicial(v, &removed)
        })?)
    }

    /// Maximal cliques by brute force over vertex subsets (tests only).
    pub fn maximal_cliques_brute_force(&self) -> Vec<ElemSet> {
        let n = self.n();
        assert!(n <= 20);
        let is_clique = |s: ElemSet| s.iter().all(|u| s.iter().all(|v| u == v || self.adjacent(u, v)));
        let cliques: Vec<ElemSet> = (1u64..(1 << n)).map(ElemSet).filter(|&s| is_clique(s)).collect();
        let mut maximal: Vec<ElemSet> = cliques
            .iter()
            .copied()
            .filter(|&s| !cliques.iter().any(|&t| t != s && s.is_subset(t)))
            .collect();
        maximal.sort();
        maximal
    }
}

pub(crate) fn adjacency(n: usize, edges: &[(Elem, Elem)]) -> Result<Vec<Vec<Elem>>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u.index() >= n || v.index() >= n {
            return Err(Error::Input(format!("edge {u} {v} outside the vertex set")));
        }
        if u != v {
            adj[u.index()].push(v);
            adj[v.index()].push(u);
        }
    }
    for list in &mut adj {
        list.sort();
        list.dedup();
    }
    Ok(adj)
}

/// Visits vertices in order of the number of already visited neighbours,
/// largest first, using weight buckets with lazy deletion.
pub(crate) fn maximum_cardinality_search(adj: &[Vec<Elem>]) -> Vec<Elem> {
    let n = adj.len();
    let mut weight = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut buckets: Vec<Vec<Elem>> = vec![Vec::new(); n + 1];
    buckets[0].extend(elements(n).rev());
    let mut top = 0;
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let v = loop {
            match buckets[top].pop() {
                Some(v) if !visited[v.index()] && weight[v.index()] == top => break v,
                Some(_) => {}
                None => top -= 1,
            }
        };
        visited[v.index()] = true;
        order.push(v);
        for &u in &adj[v.index()] {
            if !visited[u.index()] {
                weight[u.index()] += 1;
                buckets[weight[u.index()]].push(u);
                top = top.max(weight[u.index()]);
            }
        }
    }
    order
}

/// For the reverse of `visit` to be a PEO, every vertex's earlier-visited
/// neighbours other than the latest one `p` must be neighbours of `p`.
fn verify_peo(adj: &[Vec<Elem>], visit: &[Elem]) -> Result<()> {
    let n = adj.len();
    let mut pos = vec![0usize; n];
    for (i, v) in visit.iter().enumerate() {
        pos[v.index()] = i;
    }
    for &v in visit {
        let earlier: Vec<Elem> = adj[v.index()].iter().copied().filter(|u| pos[u.index()] < pos[v.index()]).collect();
        let Some(&p) = earlier.iter().max_by_key(|u| pos[u.index()]) else { continue };
        if let Some(&u) = earlier.iter().find(|&&u| u != p && adj[p.index()].binary_search(&u).is_err()) {
            return Err(Error::NotChordal(format!(
                "vertex {v} has non-adjacent neighbours {u} and {p} in the search order; no perfect elimination ordering exists"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn graph(n: usize, edges: &[(u32, u32)]) -> Result<ChordalGraph> {
        let edges: Vec<(Elem, Elem)> = edges.iter().map(|&(u, v)| (Elem(u), Elem(v))).collect();
        ChordalGraph::new(n, &edges)
    }

    fn w(s: &str) -> Vec<Elem> {
        s.bytes().map(|b| Elem((b - b'a') as u32)).collect()
    }

    #[test]
    fn recognizes_and_rejects() {
        assert!(graph(3, &[(0, 1), (1, 2), (0, 2)]).is_ok());
        assert!(matches!(graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]), Err(Error::NotChordal(_))));
        // a 5-cycle with one chord still has an induced 4-cycle
        assert!(graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).is_err());
        // a triangulated 5-cycle is chordal
        assert!(graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (0, 3)]).is_ok());
        assert!(graph(0, &[]).is_ok());
    }

    #[test]
    fn peo_checks() {
        let path = graph(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(path.is_peo(&w("acb")));
        assert!(!path.is_peo(&w("bac")));
        assert!(path.is_peo(&path.peo()));
        let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(tri.is_peo(&w("bca")));
    }

    #[test]
    fn peo_counts() {
        assert_eq!(graph(3, &[(0, 1), (1, 2), (0, 2)]).unwrap().count_peos().unwrap(), 6);
        assert_eq!(graph(3, &[(0, 1), (1, 2)]).unwrap().count_peos().unwrap(), 4);
        assert_eq!(graph(2, &[(0, 1)]).unwrap().count_peos().unwrap(), 2);
        assert_eq!(graph(1, &[]).unwrap().count_peos().unwrap(), 1);
    }

    #[test]
    fn count_matches_permutation_scan() {
        let g = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (0, 3)]).unwrap();
        let brute = crate::language::all_permutations(5).iter().filter(|p| g.is_peo(p)).count();
        assert_eq!(g.count_peos().unwrap(), brute as u128);
    }

    #[test]
    fn maximal_cliques_of_path() {
        let path = graph(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            path.maximal_cliques_brute_force(),
            vec![ElemSet::from_elems(w("ab")), ElemSet::from_elems(w("bc"))]
        );
    }
}
