//! Concrete candidate data structures for three antimatroid encodings.

pub mod erc;
pub mod formula;
pub mod vertex_search;

pub use erc::{erc_semantics_check, Erc, ErcCds, ErcMismatch, ErcSet};
pub use formula::{simplify_formula, tokenize, Formula, FormulaCds, FormulaSystem, Token};
pub use vertex_search::{RootedGraph, VertexSearchCds};
