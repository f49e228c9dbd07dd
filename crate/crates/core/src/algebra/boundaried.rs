use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// A graph with an ordered tuple of distinct boundary vertices. Position `i`
/// of the tuple plays the role of the `i`-th boundary variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundariedGraph {
    pub graph: Graph,
    pub boundary: Vec<Vertex>,
}

impl BoundariedGraph {
    pub fn new(graph: Graph, boundary: Vec<Vertex>) -> Result<Self> {
        for (i, &b) in boundary.iter().enumerate() {
            if b >= graph.n() {
                return Err(Error::input(format!("boundary vertex {} out of range", b)));
            }
            if boundary[..i].contains(&b) {
                return Err(Error::input(format!("boundary vertex {} repeated", b)));
            }
        }
        Ok(BoundariedGraph { graph, boundary })
    }

    pub fn empty() -> Self {
        BoundariedGraph {
            graph: Graph::empty(0),
            boundary: Vec::new(),
        }
    }

    /// Disjoint union with `other`, fusing `self.boundary[i]` with
    /// `other.boundary[j]` for every `(i, j)` in `matching`.
    ///
    /// Vertices of `self` keep their ids; unfused vertices of `other` follow in
    /// order. The result boundary is `self.boundary` followed by the unmatched
    /// positions of `other.boundary`. Edges present on both sides are kept once.
    pub fn glue(&self, other: &BoundariedGraph, matching: &[(usize, usize)]) -> Result<BoundariedGraph> {
        let mut fused_to: Vec<Option<Vertex>> = vec![None; other.graph.n()];
        let mut left_used = vec![false; self.boundary.len()];
        let mut right_used = vec![false; other.boundary.len()];
        for &(i, j) in matching {
            if i >= self.boundary.len() || j >= other.boundary.len() {
                return Err(Error::input(format!("matching pair ({}, {}) out of range", i, j)));
            }
            if left_used[i] || right_used[j] {
                return Err(Error::input(format!("matching uses position ({}, {}) twice", i, j)));
            }
            left_used[i] = true;
            right_used[j] = true;
            fused_to[other.boundary[j]] = Some(self.boundary[i]);
        }
        let n1 = self.graph.n();
        let mut map = vec![0; other.graph.n()];
        let mut weights = self.graph.weights().to_vec();
        let mut next = n1;
        for v in 0..other.graph.n() {
            map[v] = match fused_to[v] {
                Some(u) => u,
                None => {
                    weights.push(other.graph.weight(v).clone());
                    next += 1;
                    next - 1
                }
            };
        }
        let mut edges: Vec<(Vertex, Vertex)> = self.graph.edges().collect();
        edges.extend(other.graph.edges().map(|(a, b)| (map[a], map[b])));
        let graph = Graph::with_weights(next, &edges, weights)?;
        let mut boundary = self.boundary.clone();
        boundary.extend(
            other
                .boundary
                .iter()
                .enumerate()
                .filter(|(j, _)| !right_used[*j])
                .map(|(_, &b)| map[b]),
        );
        Ok(BoundariedGraph { graph, boundary })
    }

    pub fn forget(&self, position: usize) -> Result<BoundariedGraph> {
        if position >= self.boundary.len() {
            return Err(Error::input(format!(
                "cannot forget position {} of a {}-vertex boundary",
                position,
                self.boundary.len()
            )));
        }
        let mut boundary = self.boundary.clone();
        boundary.remove(position);
        Ok(BoundariedGraph {
            graph: self.graph.clone(),
            boundary,
        })
    }

    pub fn forget_all(&self) -> BoundariedGraph {
        BoundariedGraph {
            graph: self.graph.clone(),
            boundary: Vec::new(),
        }
    }
}
