//! Vertex search: a vertex is available once it is the root or has a chosen
//! in-neighbour, so every prefix induces a subgraph reachable from the root.

use std::collections::VecDeque;

use crate::element::{elements, Elem};
use crate::error::{Error, Result};
use crate::mps::{ExplicitMps, PrecedenceTable, MAX_TABLE_N};
use crate::sorter::CandidateStructure;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedGraph {
    n: usize,
    directed: bool,
    root: Elem,
    out: Vec<Vec<Elem>>,
    arcs: usize,
}

impl RootedGraph {
    /// Builds the graph and checks that every vertex is reachable from
    /// `root`. Undirected edges become two arcs; self-loops and repeated
    /// arcs are dropped.
    pub fn new(n: usize, edges: &[(Elem, Elem)], root: Elem, directed: bool) -> Result<Self> {
        if root.index() >= n {
            return Err(Error::Input(format!("root {root} outside the vertex set")));
        }
        let mut out = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u.index() >= n || v.index() >= n {
                return Err(Error::Input(format!("edge {u} {v} outside the vertex set")));
            }
            if u == v {
                continue;
            }
            out[u.index()].push(v);
            if !directed {
                out[v.index()].push(u);
            }
        }
        for list in &mut out {
            list.sort();
            list.dedup();
        }
        let arcs = out.iter().map(Vec::len).sum();
        let g = RootedGraph { n, directed, root, out, arcs };
        let dist = g.bfs_distances();
        if let Some(v) = elements(n).find(|v| dist[v.index()].is_none()) {
            return Err(Error::Input(format!("vertex {v} is unreachable from the root")));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> Elem {
        self.root
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of stored arcs (twice the edge count when undirected).
    pub fn arcs(&self) -> usize {
        self.arcs
    }

    pub fn out_neighbors(&self, v: Elem) -> &[Elem] {
        &self.out[v.index()]
    }

    /// Arc list, each undirected edge listed once with `u < v`.
    pub fn edges(&self) -> Vec<(Elem, Elem)> {
        let mut edges = Vec::new();
        for u in elements(self.n) {
            for &v in &self.out[u.index()] {
                if self.directed || u < v {
                    edges.push((u, v));
                }
            }
        }
        edges
    }

    /// Hop distance from the root, `None` when unreachable.
    pub fn bfs_distances(&self) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::from([self.root]);
        dist[self.root.index()] = Some(0);
        while let Some(u) = queue.pop_front() {
            let d = dist[u.index()].unwrap_or(0);
            for &v in &self.out[u.index()] {
                if dist[v.index()].is_none() {
                    dist[v.index()] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn to_mps(&self) -> Result<ExplicitMps> {
        if self.n > MAX_TABLE_N {
            return Err(Error::SizeLimit { n: self.n, limit: MAX_TABLE_N });
        }
        let mut preds = vec![Vec::new(); self.n];
        for (u, list) in self.out.iter().enumerate() {
            for v in list {
                preds[v.index()].push(Elem::new(u));
            }
        }
        ExplicitMps::new(PrecedenceTable::from_fn(self.n, |v, chosen| {
            v == self.root || preds[v.index()].iter().any(|&u| chosen.contains(u))
        })?)
    }

    pub fn cds(&self) -> VertexSearchCds<'_> {
        VertexSearchCds::new(self)
    }
}

#[derive(Debug, Clone)]
pub struct VertexSearchCds<'g> {
    graph: &'g RootedGraph,
    reported: Vec<bool>,
    work: u64,
}

impl<'g> VertexSearchCds<'g> {
    pub fn new(graph: &'g RootedGraph) -> Self {
        VertexSearchCds { graph, reported: vec![false; graph.n], work: 0 }
    }
}

impl CandidateStructure for VertexSearchCds<'_> {
    fn size(&self) -> usize {
        self.graph.n
    }

    fn init(&mut self, out: &mut Vec<Elem>) -> Result<()> {
        self.reported.iter_mut().for_each(|r| *r = false);
        self.work = 0;
        if self.graph.n > 0 {
            self.reported[self.graph.root.index()] = true;
            out.push(self.graph.root);
        }
        Ok(())
    }

    fn step(&mut self, v: Elem, out: &mut Vec<Elem>) -> Result<()> {
        if v.index() >= self.graph.n {
            return Err(Error::Contract(format!("step on vertex {v} outside the graph")));
        }
        for &u in &self.graph.out[v.index()] {
            self.work += 1;
            if !self.reported[u.index()] {
                self.reported[u.index()] = true;
                out.push(u);
            }
        }
        Ok(())
    }

    fn work(&self) -> u64 {
        self.work
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::ElemSet;
    use crate::language::all_permutations;
    use crate::sorter::{cds_permutations, validate_cds};

    fn g(n: usize, edges: &[(u32, u32)], root: u32, directed: bool) -> RootedGraph {
        let edges: Vec<(Elem, Elem)> = edges.iter().map(|&(u, v)| (Elem(u), Elem(v))).collect();
        RootedGraph::new(n, &edges, Elem(root), directed).unwrap()
    }

    /// Every prefix is reachable from the first vertex through earlier ones.
    fn brute_force(graph: &RootedGraph) -> Vec<Vec<Elem>> {
        all_permutations(graph.n())
            .into_iter()
            .filter(|pi| {
                pi[0] == graph.root()
                    && (1..pi.len()).all(|i| {
                        let before: ElemSet = pi[..i].iter().copied().collect();
                        before.iter().any(|u| graph.out_neighbors(u).contains(&pi[i]))
                    })
            })
            .collect()
    }

    #[test]
    fn path_is_forced() {
        let path = g(3, &[(0, 1), (1, 2)], 0, false);
        assert_eq!(cds_permutations(&mut path.cds(), 10).unwrap(), vec![vec![Elem(0), Elem(1), Elem(2)]]);
    }

    #[test]
    fn star_and_triangle_match_brute_force() {
        for graph in [g(3, &[(0, 1), (0, 2)], 0, false), g(3, &[(0, 1), (1, 2), (0, 2)], 1, false)] {
            let p = cds_permutations(&mut graph.cds(), 10).unwrap();
            assert_eq!(p, brute_force(&graph));
            assert_eq!(p.len(), 2);
        }
    }

    #[test]
    fn directed_graph_validates() {
        let graph = g(4, &[(0, 1), (0, 2), (2, 1), (1, 3), (3, 0)], 0, true);
        let mps = graph.to_mps().unwrap();
        assert_eq!(validate_cds(&mut graph.cds(), &mps, 10).unwrap(), Ok(()));
        assert_eq!(cds_permutations(&mut graph.cds(), 10).unwrap(), brute_force(&graph));
    }

    #[test]
    fn unreachable_rejected() {
        assert!(RootedGraph::new(3, &[(Elem(0), Elem(1))], Elem(0), false).is_err());
        assert!(RootedGraph::new(2, &[(Elem(1), Elem(0))], Elem(0), true).is_err());
    }

    #[test]
    fn self_loops_ignored_and_bfs() {
        let graph = g(3, &[(0, 0), (0, 1), (1, 2)], 0, false);
        assert_eq!(graph.arcs(), 4);
        assert_eq!(graph.bfs_distances(), vec![Some(0), Some(1), Some(2)]);
    }
}
