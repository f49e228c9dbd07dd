//! Maximum-weight induced subgraphs of bounded treewidth satisfying a fixed
//! property, solved by dynamic programming over tree decompositions whose bags
//! have small independence number.
//!
//! Partial solutions are compressed to one maximum-weight representative per
//! canonical *signature* (see [`signature`]), which keeps every table small.

pub mod algebra;
pub mod bench;
pub mod builders;
pub mod decomposition;
pub mod error;
pub mod family;
pub mod generate;
pub mod graph;
pub mod independence;
pub mod io;
pub mod oracle;
pub mod signature;
pub mod solver;
pub mod treewidth;
pub mod weight;

pub use error::{Error, Result};
pub use graph::{induced_subgraph, Graph, Vertex, VertexSet};
pub use weight::Weight;
