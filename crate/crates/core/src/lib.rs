//! Exact tools for experimenting with holes (induced cycles of length at
//! least four) in graphs of large chromatic number, and with the homology
//! of independence complexes.
//!
//! Every search is exact and draws from a node [`Budget`]; running out is
//! always reported as an error, never as an approximate answer.

pub mod budget;
pub mod campaign;
pub mod gadgets;
pub mod graph;
pub mod holes;
pub mod homology;
pub mod invariants;
pub mod io;
pub mod structures;

pub use budget::{Budget, Exhausted, DEFAULT_NODE_BUDGET};
pub use graph::{Distance, Graph, GraphBuilder, GraphError, InducedSubgraph, VertexSet};
pub use holes::{enumerate_holes, Hole, HoleError};
