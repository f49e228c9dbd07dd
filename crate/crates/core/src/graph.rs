//! Simple undirected vertex-weighted graphs and sorted vertex sets.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weight::Weight;

pub type Vertex = usize;

/// A set of vertices kept in ascending order.
///
/// The derived `Ord` compares the sorted sequences lexicographically, which is
/// the tie-break order used for solutions and family representatives.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    pub fn singleton(v: Vertex) -> Self {
        VertexSet(vec![v])
    }

    /// Takes any vertices, sorting and deduplicating them.
    pub fn from_vec(mut v: Vec<Vertex>) -> Self {
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn range(n: usize) -> Self {
        VertexSet((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn insert(&mut self, v: Vertex) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, v);
                true
            }
        }
    }

    pub fn remove(&mut self, v: Vertex) -> bool {
        match self.0.binary_search(&v) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn with(&self, v: Vertex) -> Self {
        let mut s = self.clone();
        s.insert(v);
        s
    }

    pub fn without(&self, v: Vertex) -> Self {
        let mut s = self.clone();
        s.remove(v);
        s
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        VertexSet(out)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.iter().copied().filter(|&v| other.contains(v)).collect())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.iter().copied().filter(|&v| !other.contains(v)).collect())
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }

    /// All subsets of at most `max_size` elements, in increasing size and
    /// then lexicographic order.
    pub fn subsets_up_to(&self, max_size: usize) -> Vec<VertexSet> {
        let mut out = vec![VertexSet::new()];
        let items = &self.0;
        let mut frontier: Vec<(VertexSet, usize)> = vec![(VertexSet::new(), 0)];
        for _ in 0..max_size.min(items.len()) {
            let mut next = Vec::new();
            for (set, start) in &frontier {
                for (i, &v) in items.iter().enumerate().skip(*start) {
                    let mut s = set.0.clone();
                    s.push(v);
                    next.push((VertexSet(s), i + 1));
                }
            }
            out.extend(next.iter().map(|(s, _)| s.clone()));
            frontier = next;
        }
        out
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        VertexSet::from_vec(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a Vertex;
    type IntoIter = std::slice::Iter<'a, Vertex>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Immutable simple undirected graph on vertices `0..n` with rational weights.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    weights: Vec<Weight>,
    edge_count: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl Graph {
    /// Unit-weight graph from an edge list. Self-loops and out-of-range ids
    /// are rejected; parallel edges collapse.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        Self::with_weights(n, edges, vec![Weight::one(); n])
    }

    pub fn with_weights(n: usize, edges: &[(Vertex, Vertex)], weights: Vec<Weight>) -> Result<Self> {
        if weights.len() != n {
            return Err(Error::input(format!(
                "expected {} weights, got {}",
                n,
                weights.len()
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::input(format!(
                    "edge ({}, {}) out of range for {} vertices",
                    u, v, n
                )));
            }
            if u == v {
                return Err(Error::input(format!("self-loop at vertex {}", u)));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut edge_count = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Ok(Graph {
            adj,
            weights,
            edge_count: edge_count / 2,
        })
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            weights: vec![Weight::one(); n],
            edge_count: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::range(self.n())
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn weight(&self, v: Vertex) -> &Weight {
        &self.weights[v]
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn set_weights(mut self, weights: Vec<Weight>) -> Result<Self> {
        if weights.len() != self.n() {
            return Err(Error::input("weight vector length mismatch"));
        }
        self.weights = weights;
        Ok(self)
    }

    pub fn weight_of(&self, set: &VertexSet) -> Weight {
        set.iter().map(|v| &self.weights[v]).sum()
    }

    pub fn check_set(&self, s: &VertexSet) -> Result<()> {
        match s.as_slice().last() {
            Some(&v) if v >= self.n() => Err(Error::input(format!(
                "vertex {} out of range for {} vertices",
                v,
                self.n()
            ))),
            _ => Ok(()),
        }
    }

    /// Number of edges with both endpoints in `s`.
    pub fn edges_within(&self, s: &VertexSet) -> usize {
        s.iter()
            .map(|v| self.adj[v].iter().filter(|&&u| u > v && s.contains(u)).count())
            .sum()
    }

    pub fn is_clique(&self, s: &VertexSet) -> bool {
        let k = s.len();
        self.edges_within(s) == k * k.saturating_sub(1) / 2
    }

    /// Connected components of `G[s]`, each sorted, ordered by smallest vertex.
    pub fn components_within(&self, s: &VertexSet) -> Vec<VertexSet> {
        let mut seen = std::collections::HashSet::new();
        let mut comps = Vec::new();
        for start in s.iter() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &u in &self.adj[v] {
                    if s.contains(u) && seen.insert(u) {
                        comp.push(u);
                        stack.push(u);
                    }
                }
            }
            comps.push(VertexSet::from_vec(comp));
        }
        comps
    }
}

/// An induced subgraph re-indexed to `0..|s|`, with the map back to the
/// original ids.
#[derive(Clone, Debug)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `original[i]` is the id in the parent graph of local vertex `i`.
    pub original: Vec<Vertex>,
}

impl InducedSubgraph {
    pub fn local_of(&self, v: Vertex) -> Option<Vertex> {
        self.original.binary_search(&v).ok()
    }

    pub fn to_original(&self, local: &VertexSet) -> VertexSet {
        VertexSet::from_vec(local.iter().map(|v| self.original[v]).collect())
    }
}

pub fn induced_subgraph(g: &Graph, s: &VertexSet) -> Result<InducedSubgraph> {
    g.check_set(s)?;
    let original: Vec<Vertex> = s.iter().collect();
    let mut adj = Vec::with_capacity(original.len());
    let mut edge_count = 0;
    for &v in &original {
        let list: Vec<Vertex> = g.adj[v]
            .iter()
            .filter_map(|&u| original.binary_search(&u).ok())
            .collect();
        edge_count += list.len();
        adj.push(list);
    }
    let weights = original.iter().map(|&v| g.weights[v].clone()).collect();
    Ok(InducedSubgraph {
        graph: Graph {
            adj,
            weights,
            edge_count: edge_count / 2,
        },
        original,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn rejects_self_loops_and_range() {
        assert!(Graph::from_edges(2, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(2, &[(0, 2)]).is_err());
        let g = Graph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn triangle_restricted_to_pair() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let h = induced_subgraph(&g, &VertexSet::from_vec(vec![0, 1])).unwrap();
        assert_eq!(h.graph.n(), 2);
        assert_eq!(h.graph.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(h.original, vec![0, 1]);
    }

    #[test]
    fn empty_restriction() {
        let g = cycle(5);
        let h = induced_subgraph(&g, &VertexSet::new()).unwrap();
        assert_eq!(h.graph.n(), 0);
        assert_eq!(h.graph.edge_count(), 0);
    }

    #[test]
    fn c5_on_even_positions_has_one_edge() {
        let g = cycle(5);
        let s = VertexSet::from_vec(vec![0, 2, 4]);
        // brute force: edges of C5 with both ends in s
        let inside: Vec<_> = g.edges().filter(|&(u, v)| s.contains(u) && s.contains(v)).collect();
        assert_eq!(inside, vec![(0, 4)]);
        let h = induced_subgraph(&g, &s).unwrap();
        assert_eq!(h.graph.edge_count(), 1);
        assert!(h.graph.has_edge(0, 2)); // local ids of 0 and 4
    }

    #[test]
    fn out_of_range_subset() {
        let g = cycle(4);
        assert!(matches!(
            induced_subgraph(&g, &VertexSet::from_vec(vec![1, 7])),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn identity_restriction_is_the_graph() {
        let g = cycle(6);
        let h = induced_subgraph(&g, &g.vertices()).unwrap();
        assert_eq!(h.graph, g);
        assert_eq!(h.original, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn subsets_enumeration() {
        let s = VertexSet::from_vec(vec![1, 4, 6]);
        let subs = s.subsets_up_to(2);
        assert_eq!(subs.len(), 1 + 3 + 3);
        assert_eq!(s.subsets_up_to(9).len(), 8);
    }
}
