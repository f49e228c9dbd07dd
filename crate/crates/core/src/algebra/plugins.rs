use super::{restricted_growth, Fingerprint, Plugin};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::treewidth::is_forest;

/// Maximum weight independent set: ψ is trivially true and `tw < 1`.
pub struct Mwis;

impl Plugin for Mwis {
    fn name(&self) -> &'static str {
        "mwis"
    }
    fn t(&self) -> usize {
        1
    }
    fn fingerprint(&self, _g: &Graph, _boundary: &[Vertex]) -> Fingerprint {
        Fingerprint::unit()
    }
    fn accepts(&self, _g: &Graph) -> bool {
        true
    }
}

fn component_ids(g: &Graph) -> Vec<usize> {
    let mut comp = vec![usize::MAX; g.n()];
    let mut stack = Vec::new();
    for s in 0..g.n() {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = s;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &u in g.neighbors(v) {
                if comp[u] == usize::MAX {
                    comp[u] = s;
                    stack.push(u);
                }
            }
        }
    }
    comp
}

fn boundary_partition(g: &Graph, boundary: &[Vertex]) -> Vec<u8> {
    let comp = component_ids(g);
    restricted_growth(boundary.iter().map(|&b| comp[b]))
}

/// Maximum weight induced forest (feedback vertex set complement).
pub struct InducedForest;

impl Plugin for InducedForest {
    fn name(&self) -> &'static str {
        "induced-forest"
    }
    fn t(&self) -> usize {
        2
    }
    fn fingerprint(&self, g: &Graph, boundary: &[Vertex]) -> Fingerprint {
        if !is_forest(g) {
            return Fingerprint::dead();
        }
        Fingerprint {
            blocks: boundary_partition(g, boundary),
            ..Fingerprint::unit()
        }
    }
    fn accepts(&self, g: &Graph) -> bool {
        is_forest(g)
    }
}

/// Induced disjoint union of paths.
pub struct InducedLinearForest;

impl Plugin for InducedLinearForest {
    fn name(&self) -> &'static str {
        "induced-linear-forest"
    }
    fn t(&self) -> usize {
        2
    }
    fn fingerprint(&self, g: &Graph, boundary: &[Vertex]) -> Fingerprint {
        if !self.accepts(g) {
            return Fingerprint::dead();
        }
        Fingerprint {
            blocks: boundary_partition(g, boundary),
            labels: boundary.iter().map(|&b| g.degree(b) as u8).collect(),
            ..Fingerprint::unit()
        }
    }
    fn accepts(&self, g: &Graph) -> bool {
        g.vertices().iter().all(|v| g.degree(v) <= 2) && is_forest(g)
    }
    fn key_filter(&self, g: &Graph, b: &VertexSet) -> bool {
        max_inner_degree(g, b) <= 2
    }
}

/// Induced matching: every chosen vertex has exactly one chosen neighbour.
pub struct InducedMatching;

impl Plugin for InducedMatching {
    fn name(&self) -> &'static str {
        "induced-matching"
    }
    fn t(&self) -> usize {
        2
    }
    fn fingerprint(&self, g: &Graph, boundary: &[Vertex]) -> Fingerprint {
        let mut on_boundary = vec![false; g.n()];
        for &b in boundary {
            on_boundary[b] = true;
        }
        // interior vertices are final; boundary vertices may still gain one
        let broken = (0..g.n()).any(|v| {
            let d = g.degree(v);
            if on_boundary[v] {
                d > 1
            } else {
                d != 1
            }
        });
        if broken {
            return Fingerprint::dead();
        }
        Fingerprint {
            labels: boundary.iter().map(|&b| g.degree(b) as u8).collect(),
            ..Fingerprint::unit()
        }
    }
    fn accepts(&self, g: &Graph) -> bool {
        g.vertices().iter().all(|v| g.degree(v) == 1)
    }
    fn key_filter(&self, g: &Graph, b: &VertexSet) -> bool {
        max_inner_degree(g, b) <= 1
    }
}

fn max_inner_degree(g: &Graph, b: &VertexSet) -> usize {
    b.iter()
        .map(|v| g.neighbors(v).iter().filter(|&&u| b.contains(u)).count())
        .max()
        .unwrap_or(0)
}
