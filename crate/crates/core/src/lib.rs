//! Sorting under antimatroid constraints.

pub mod chordal;
pub mod dijkstra;
pub mod element;
pub mod error;
pub mod gen;
pub mod instance;
pub mod language;
pub mod limits;
pub mod mps;
pub mod optimal;
pub mod oracle;
pub mod par;
pub mod repr;
pub mod sorter;
pub mod suite;
pub mod wsheap;

pub use element::{Alphabet, Elem, ElemSet, Word};
pub use error::{Error, Result};
