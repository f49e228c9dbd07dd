//! Signatures of boundaried solution pieces and their canonical forms.
//!
//! A solution piece `G[F]` with boundary `B` is cut along the lowest common
//! ancestor closure `Q` of nodes marking `B` in a binary decomposition of
//! `G[F]`. What remains is the graph `H` on the union `B'` of the `Q` bags and
//! a few pieces hanging off at most two `Q` nodes each, kept only through
//! their fingerprints.

mod canonical;

pub use canonical::{canonicalize, canonicalize_with, verify_relabeling, CanonMode, Canonical, CanonicalSignature};

use serde::Serialize;

use crate::algebra::{Fingerprint, ProblemSpec};
use crate::decomposition::{root_and_binarize, NodeId};
use crate::error::{Error, Result};
use crate::graph::{induced_subgraph, Graph, Vertex, VertexSet};
use crate::treewidth::{decompose_below, treewidth_less_than};

/// A piece `P_i` seen through its boundary slots and fingerprint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Piece {
    /// Ascending slot indices of `B_i`.
    pub slots: Vec<usize>,
    /// Fingerprint of `(P_i, B_i)` with the boundary in slot order.
    pub fingerprint: Fingerprint,
}

/// Slots `0..boundary.len()` are the vertices of `B` in ascending order; the
/// remaining `omega` slots are anonymous.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub boundary: Vec<Vertex>,
    pub omega: usize,
    /// Edges of `H`, as ascending slot pairs, sorted.
    pub h_edges: Vec<(usize, usize)>,
    pub pieces: Vec<Piece>,
    /// Graph vertex behind each slot; not part of the identity.
    #[serde(skip)]
    pub slot_vertices: Vec<Vertex>,
    #[serde(skip)]
    pub shape: Shape,
}

/// Sizes recorded while building a signature.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Shape {
    pub q: usize,
    pub s: usize,
    pub extended: usize,
    pub max_piece_boundary: usize,
    pub h_below_t: bool,
}

impl Shape {
    /// Violated size bounds for `ℓ = ell`, `t`.
    pub fn violations(&self, ell: usize, t: usize) -> Vec<String> {
        let mut out = Vec::new();
        if self.q >= 2 * ell.max(1) {
            out.push(format!("|Q| = {} is not below 2l = {}", self.q, 2 * ell));
        }
        if self.s > 2 * ell {
            out.push(format!("s = {} exceeds 2l = {}", self.s, 2 * ell));
        }
        if self.extended > 2 * ell * t {
            out.push(format!("|B'| = {} exceeds 2lt = {}", self.extended, 2 * ell * t));
        }
        if self.max_piece_boundary > 2 * t {
            out.push(format!("|B_i| = {} exceeds 2t = {}", self.max_piece_boundary, 2 * t));
        }
        if !self.h_below_t {
            out.push("H does not have treewidth below t".to_string());
        }
        out
    }
}

impl Signature {
    pub fn s(&self) -> usize {
        self.pieces.len()
    }

    pub fn slot_count(&self) -> usize {
        self.boundary.len() + self.omega
    }
}

/// Lowest common ancestor by climbing depths.
fn lca(parent: &[Option<NodeId>], depth: &[usize], mut a: NodeId, mut b: NodeId) -> NodeId {
    while depth[a] > depth[b] {
        a = parent[a].expect("deeper node has a parent");
    }
    while depth[b] > depth[a] {
        b = parent[b].expect("deeper node has a parent");
    }
    while a != b {
        a = parent[a].expect("not the root");
        b = parent[b].expect("not the root");
    }
    a
}

/// Signature of `(G[f], b)`.
///
/// Requires `b ⊆ f` and `tw(G[f]) < t`; the boundary size bound `ℓ` is only
/// checked through [`Shape::violations`].
pub fn compute_signature(spec: &ProblemSpec, g: &Graph, f: &VertexSet, b: &VertexSet) -> Result<Signature> {
    if !b.is_subset(f) {
        return Err(Error::contract("signature boundary is not inside the solution piece"));
    }
    let t = spec.t();
    let sub = induced_subgraph(g, f)?;
    let piece = &sub.graph;
    let raw = decompose_below(piece, t)?
        .ok_or_else(|| Error::contract(format!("solution piece has treewidth at least {}", t)))?;
    let root = raw.root().unwrap_or(0);
    let td = root_and_binarize(&raw, root)?;
    let rooted = td.rooted()?;
    let nodes = td.node_count();

    let mut pre_index = vec![0; nodes];
    for (i, &u) in rooted.preorder.iter().enumerate() {
        pre_index[u] = i;
    }
    let local_b: Vec<Vertex> = b.iter().map(|v| sub.local_of(v).expect("b inside f")).collect();
    let mut marked: Vec<NodeId> = local_b
        .iter()
        .map(|&v| (0..nodes).find(|&u| td.bag(u).contains(v)).expect("decomposition covers every vertex"))
        .collect();
    let mut q: Vec<NodeId> = if marked.is_empty() {
        vec![td.root().unwrap_or(0)]
    } else {
        marked.sort_by_key(|&u| pre_index[u]);
        marked.dedup();
        let mut q = marked.clone();
        for w in marked.windows(2) {
            q.push(lca(&rooted.parent, &rooted.depth, w[0], w[1]));
        }
        q.sort_by_key(|&u| pre_index[u]);
        q.dedup();
        q
    };
    q.sort_by_key(|&u| pre_index[u]);
    let in_q = {
        let mut m = vec![false; nodes];
        for &u in &q {
            m[u] = true;
        }
        m
    };
    let q_top = q[0];
    let q_parent = |u: NodeId| -> Option<NodeId> {
        let mut cur = rooted.parent[u];
        while let Some(p) = cur {
            if in_q[p] {
                return Some(p);
            }
            cur = rooted.parent[p];
        }
        None
    };

    // Group every node outside Q by the Q edge (upper, lower) it is attached
    // to. Walking down in preorder, a non-Q node inherits the group of its
    // parent unless the parent is in Q.
    // group key: the lower Q node of the edge, or q_top for the part above it
    let mut group_of: Vec<Option<NodeId>> = vec![None; nodes];
    for &u in &rooted.preorder {
        if in_q[u] {
            continue;
        }
        group_of[u] = Some(match rooted.parent[u] {
            None => {
                // above-root part: find the Q node below it
                q_top
            }
            Some(p) if in_q[p] => {
                // hanging below p; if the component contains a Q node below, it is
                // on the edge towards that node, else it hangs off p
                match lower_q_in_subtree(u, &rooted.children, &in_q) {
                    Some(lower) => lower,
                    None => p,
                }
            }
            Some(p) => group_of[p].expect("parent processed first"),
        });
    }
    // Groups keyed by lower Q node x cover the edge (q_parent(x), x). The
    // group keyed by q_top (above part, hanging off q_top) merges into its
    // first child edge when there is one.
    let mut q_children: Vec<Vec<NodeId>> = vec![Vec::new(); nodes];
    for &x in &q[1..] {
        q_children[q_parent(x).expect("closure has a single top")].push(x);
    }
    let top_target = q_children[q_top].first().copied();
    let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); nodes];
    for u in 0..nodes {
        if let Some(mut key) = group_of[u] {
            if key == q_top {
                if let Some(c) = top_target {
                    key = c;
                }
            }
            members[key].push(u);
        }
    }

    // Slots: B ascending, then B' \ B ascending.
    let b_prime: VertexSet = q.iter().fold(VertexSet::new(), |acc, &u| acc.union(td.bag(u)));
    let b_prime_orig = sub.to_original(&b_prime);
    let mut slot_vertices: Vec<Vertex> = b.iter().collect();
    slot_vertices.extend(b_prime_orig.difference(b).iter());
    let slot_of = |orig: Vertex| slot_vertices.iter().position(|&x| x == orig).expect("slot exists");

    let mut h_edges: Vec<(usize, usize)> = Vec::new();
    for (i, &a) in slot_vertices.iter().enumerate() {
        for (j, &c) in slot_vertices.iter().enumerate().skip(i + 1) {
            if g.has_edge(a, c) {
                h_edges.push((i.min(j), i.max(j)));
            }
        }
    }
    h_edges.sort();

    let mut pieces = Vec::new();
    let mut max_piece_boundary = 0;
    for &x in &q {
        if members[x].is_empty() {
            continue;
        }
        let z: Vec<NodeId> = match q_parent(x) {
            Some(p) => vec![p, x],
            None => vec![x],
        };
        let bi: VertexSet = z.iter().fold(VertexSet::new(), |acc, &u| acc.union(td.bag(u)));
        let pi: VertexSet = members[x].iter().fold(bi.clone(), |acc, &u| acc.union(td.bag(u)));
        if pi == bi {
            // nothing outside B'; H already records G[B_i]
            continue;
        }
        let bi_orig = sub.to_original(&bi);
        let pi_orig = sub.to_original(&pi);
        let mut slots: Vec<usize> = bi_orig.iter().map(slot_of).collect();
        slots.sort();
        let piece_graph = induced_subgraph(g, &pi_orig)?;
        let boundary: Vec<Vertex> = slots
            .iter()
            .map(|&s| piece_graph.local_of(slot_vertices[s]).expect("boundary inside piece"))
            .collect();
        max_piece_boundary = max_piece_boundary.max(slots.len());
        pieces.push(Piece {
            slots,
            fingerprint: spec.fingerprint_trusted(&piece_graph.graph, &boundary),
        });
    }

    let h_graph = Graph::from_edges(slot_vertices.len(), &h_edges)?;
    let shape = Shape {
        q: q.len(),
        s: pieces.len(),
        extended: slot_vertices.len(),
        max_piece_boundary,
        h_below_t: treewidth_less_than(&h_graph, t)?,
    };
    Ok(Signature {
        boundary: b.iter().collect(),
        omega: slot_vertices.len() - b.len(),
        h_edges,
        pieces,
        slot_vertices,
        shape,
    })
}

/// The first Q node in the subtree of `u`, if any (there is at most one
/// topmost such node in a component of `T - Q`).
fn lower_q_in_subtree(u: NodeId, children: &[Vec<NodeId>], in_q: &[bool]) -> Option<NodeId> {
    let mut stack = vec![u];
    while let Some(x) = stack.pop() {
        if in_q[x] {
            return Some(x);
        }
        stack.extend(children[x].iter().copied());
    }
    None
}

/// Number of distinct canonical signatures over `(f, b)` pairs.
pub fn signature_count_probe(spec: &ProblemSpec, g: &Graph, sample: &[(VertexSet, VertexSet)]) -> Result<usize> {
    let mut keys = std::collections::BTreeSet::new();
    for (f, b) in sample {
        keys.insert(canonicalize(&compute_signature(spec, g, f, b)?).key);
    }
    Ok(keys.len())
}
