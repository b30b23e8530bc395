//! Clique trees built from the maximum cardinality search order.

use crate::element::{Elem, ElemSet};

use super::graph::ChordalGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeEdge {
    pub x: usize,
    pub y: usize,
    /// `|K(x) ∩ K(y)|`.
    pub separator: usize,
}

/// A clique forest: one node per maximal clique, one tree per component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueTree {
    pub cliques: Vec<Vec<Elem>>,
    pub edges: Vec<TreeEdge>,
    /// For every vertex, a node whose clique contains it.
    pub handle: Vec<usize>,
}

impl CliqueTree {
    /// A new clique starts whenever the number of already visited
    /// neighbours fails to grow; it hangs below the clique of its latest
    /// visited neighbour, sharing exactly those neighbours.
    pub fn build(graph: &ChordalGraph) -> Self {
        let n = graph.n();
        let order = graph.mcs_order();
        let mut pos = vec![usize::MAX; n];
        let mut cliques: Vec<Vec<Elem>> = Vec::new();
        let mut edges = Vec::new();
        let mut handle = vec![0; n];
        let mut previous: Option<usize> = None;
        for (i, &v) in order.iter().enumerate() {
            let earlier: Vec<Elem> = graph.neighbors(v).iter().copied().filter(|u| pos[u.index()] < i).collect();
            let starts = match previous {
                None => true,
                Some(c) => earlier.len() <= c,
            };
            if starts {
                let node = cliques.len();
                let mut members = earlier.clone();
                members.push(v);
                cliques.push(members);
                if let Some(&latest) = earlier.iter().max_by_key(|u| pos[u.index()]) {
                    edges.push(TreeEdge { x: handle[latest.index()], y: node, separator: earlier.len() });
                }
            } else {
                cliques.last_mut().expect("a clique is open").push(v);
            }
            handle[v.index()] = cliques.len() - 1;
            pos[v.index()] = i;
            previous = Some(earlier.len());
        }
        CliqueTree { cliques, edges, handle }
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn total_size(&self) -> usize {
        self.cliques.iter().map(Vec::len).sum()
    }

    pub fn clique_sets(&self) -> Vec<ElemSet> {
        let mut sets: Vec<ElemSet> = self.cliques.iter().map(|c| ElemSet::from_elems(c.iter().copied())).collect();
        sets.sort();
        sets
    }

    /// Running intersection: the nodes containing any vertex induce a
    /// connected subforest, and stored separator sizes are exact.
    pub fn is_coherent(&self, n: usize) -> bool {
        let sets: Vec<Vec<bool>> = self
            .cliques
            .iter()
            .map(|c| {
                let mut s = vec![false; n];
                c.iter().for_each(|v| s[v.index()] = true);
                s
            })
            .collect();
        let exact = self.edges.iter().all(|e| {
            self.cliques[e.x].iter().filter(|v| sets[e.y][v.index()]).count() == e.separator
        });
        exact && (0..n).all(|v| {
            let nodes = sets.iter().filter(|s| s[v]).count();
            let links = self.edges.iter().filter(|e| sets[e.x][v] && sets[e.y][v]).count();
            // a forest on `nodes` vertices is connected iff it has nodes − 1 edges
            nodes == 0 || links + 1 == nodes
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Result;

    fn graph(n: usize, edges: &[(u32, u32)]) -> Result<ChordalGraph> {
        let edges: Vec<(Elem, Elem)> = edges.iter().map(|&(u, v)| (Elem(u), Elem(v))).collect();
        ChordalGraph::new(n, &edges)
    }

    #[test]
    fn triangle_is_one_node() {
        let t = CliqueTree::build(&graph(3, &[(0, 1), (1, 2), (0, 2)]).unwrap());
        assert_eq!(t.len(), 1);
        assert!(t.edges.is_empty());
    }

    #[test]
    fn path_has_two_nodes() {
        let g = graph(3, &[(0, 1), (1, 2)]).unwrap();
        let t = CliqueTree::build(&g);
        assert_eq!(t.clique_sets(), g.maximal_cliques_brute_force());
        assert_eq!(t.edges.len(), 1);
        assert_eq!(t.edges[0].separator, 1);
        assert!(t.is_coherent(3));
    }

    #[test]
    fn disconnected_forest() {
        let g = graph(5, &[(0, 1), (2, 3), (3, 4), (2, 4)]).unwrap();
        let t = CliqueTree::build(&g);
        assert_eq!(t.clique_sets(), g.maximal_cliques_brute_force());
        assert!(t.edges.is_empty());
        assert!(t.is_coherent(5));
    }

    #[test]
    fn handles_point_to_containing_cliques() {
        let g = graph(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4), (4, 5)]).unwrap();
        let t = CliqueTree::build(&g);
        assert_eq!(t.clique_sets(), g.maximal_cliques_brute_force());
        assert!(t.is_coherent(6));
        for v in 0..6 {
            assert!(t.cliques[t.handle[v]].contains(&Elem::new(v)));
        }
    }
}
