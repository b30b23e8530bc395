//! Chordal graphs and the simplicial-vertex-pruning antimatroid.

pub mod clique_tree;
pub mod graph;
pub mod simplicial;

pub use clique_tree::{CliqueTree, TreeEdge};
pub use graph::ChordalGraph;
pub use simplicial::SimplicialCds;
