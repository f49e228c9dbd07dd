//! Tree decompositions: representation, validation, rooting/binarization and
//! conversion to nice form.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::independence::{independence_number_with_cap, DEFAULT_ALPHA_CAP};

pub type NodeId = usize;

/// Hard bound on the number of decomposition nodes accepted by the validator.
pub const NODE_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Form {
    Raw,
    RootedBinary,
    Nice,
}

/// Node role in a nice decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "vertex", rename_all = "kebab-case")]
pub enum NodeKind {
    Leaf,
    Introduce(Vertex),
    Forget(Vertex),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<VertexSet>,
    adj: Vec<Vec<NodeId>>,
    root: Option<NodeId>,
    form: Form,
    kinds: Vec<NodeKind>,
    claimed_alpha: Option<usize>,
}

/// Parent/children view of a decomposition rooted at some node.
#[derive(Clone, Debug)]
pub struct Rooted {
    pub root: NodeId,
    pub parent: Vec<Option<NodeId>>,
    pub children: Vec<Vec<NodeId>>,
    /// Preorder; reversing it gives a valid bottom-up order.
    pub preorder: Vec<NodeId>,
    pub depth: Vec<usize>,
}

impl Rooted {
    pub fn postorder(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.preorder.iter().rev().copied()
    }
}

impl TreeDecomposition {
    /// A raw (unrooted) decomposition. Tree edges are checked for range and
    /// self-loops only; the tree shape itself is checked by [`validate`].
    pub fn new(bags: Vec<VertexSet>, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let n = bags.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::input(format!(
                    "tree edge ({}, {}) refers to a missing node ({} nodes)",
                    a, b, n
                )));
            }
            if a == b {
                return Err(Error::input(format!("tree self-loop at node {}", a)));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(TreeDecomposition {
            bags,
            adj,
            root: None,
            form: Form::Raw,
            kinds: Vec::new(),
            claimed_alpha: None,
        })
    }

    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    pub fn bag(&self, u: NodeId) -> &VertexSet {
        &self.bags[u]
    }

    pub fn bags(&self) -> &[VertexSet] {
        &self.bags
    }

    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u]
    }

    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for (a, list) in self.adj.iter().enumerate() {
            for &b in list {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn form(&self) -> Form {
        self.form
    }

    /// Node role; only meaningful for nice decompositions.
    pub fn kind(&self, u: NodeId) -> Option<NodeKind> {
        self.kinds.get(u).copied()
    }

    pub fn claimed_alpha(&self) -> Option<usize> {
        self.claimed_alpha
    }

    pub fn set_claimed_alpha(&mut self, alpha: Option<usize>) {
        self.claimed_alpha = alpha;
    }

    /// Max bag size minus one; `-1` when every bag is empty or there are no nodes.
    pub fn width(&self) -> i64 {
        self.bags.iter().map(|b| b.len() as i64).max().unwrap_or(0) - 1
    }

    pub fn with_root(mut self, root: NodeId) -> Result<Self> {
        if root >= self.node_count() {
            return Err(Error::input(format!("unknown root node {}", root)));
        }
        self.root = Some(root);
        Ok(self)
    }

    /// Parent/children structure from `root`; fails if the nodes do not form a tree.
    pub fn rooted_at(&self, root: NodeId) -> Result<Rooted> {
        let n = self.node_count();
        if root >= n {
            return Err(Error::input(format!("unknown root node {}", root)));
        }
        let edge_total: usize = self.adj.iter().map(Vec::len).sum();
        if edge_total / 2 + 1 != n {
            return Err(Error::input(format!(
                "{} nodes joined by {} edges do not form a tree",
                n,
                edge_total / 2
            )));
        }
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut preorder = Vec::with_capacity(n);
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(u) = stack.pop() {
            preorder.push(u);
            for &w in self.adj[u].iter().rev() {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    depth[w] = depth[u] + 1;
                    stack.push(w);
                }
            }
        }
        if preorder.len() != n {
            return Err(Error::input("decomposition tree is disconnected"));
        }
        for &u in &preorder {
            if let Some(p) = parent[u] {
                children[p].push(u);
            }
        }
        for c in &mut children {
            c.sort_unstable();
        }
        Ok(Rooted {
            root,
            parent,
            children,
            preorder,
            depth,
        })
    }

    /// Rooted view using the stored root, or node 0.
    pub fn rooted(&self) -> Result<Rooted> {
        if self.node_count() == 0 {
            return Err(Error::input("decomposition has no nodes"));
        }
        self.rooted_at(self.root.unwrap_or(0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum Violation {
    NoNodes,
    NodeCap { nodes: usize, cap: usize },
    NotATree { reason: String },
    BagVertexOutOfRange { node: NodeId, vertex: Vertex },
    VertexUncovered { vertex: Vertex },
    EdgeUncovered { u: Vertex, v: Vertex },
    DisconnectedOccurrence { vertex: Vertex, nodes: Vec<NodeId> },
    NiceForm { node: NodeId, reason: String },
    AlphaClaim { claimed: usize, actual: usize },
}

impl Violation {
    /// Shifts vertex and node ids, e.g. to the 1-indexed file convention.
    pub fn shifted(&self, by: usize) -> Violation {
        use Violation::*;
        match self.clone() {
            BagVertexOutOfRange { node, vertex } => BagVertexOutOfRange {
                node: node + by,
                vertex: vertex + by,
            },
            VertexUncovered { vertex } => VertexUncovered { vertex: vertex + by },
            EdgeUncovered { u, v } => EdgeUncovered { u: u + by, v: v + by },
            DisconnectedOccurrence { vertex, nodes } => DisconnectedOccurrence {
                vertex: vertex + by,
                nodes: nodes.into_iter().map(|x| x + by).collect(),
            },
            NiceForm { node, reason } => NiceForm {
                node: node + by,
                reason,
            },
            other => other,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub width: i64,
    /// `None` when some bag exceeded the independence-number cap.
    pub alpha: Option<usize>,
    pub node_count: usize,
    pub violations: Vec<Violation>,
}

/// Checks the three decomposition axioms (plus tree shape, nice form when
/// declared, and any claimed independence number).
pub fn validate(g: &Graph, td: &TreeDecomposition) -> ValidationReport {
    validate_with_cap(g, td, DEFAULT_ALPHA_CAP)
}

pub fn validate_with_cap(g: &Graph, td: &TreeDecomposition, alpha_cap: usize) -> ValidationReport {
    let mut violations = Vec::new();
    let nodes = td.node_count();
    let mut report = ValidationReport {
        valid: false,
        width: td.width(),
        alpha: None,
        node_count: nodes,
        violations: Vec::new(),
    };
    if nodes == 0 {
        report.violations.push(Violation::NoNodes);
        return report;
    }
    if nodes > NODE_CAP {
        report.violations.push(Violation::NodeCap {
            nodes,
            cap: NODE_CAP,
        });
        return report;
    }
    let rooted = match td.rooted() {
        Ok(r) => Some(r),
        Err(e) => {
            violations.push(Violation::NotATree {
                reason: match e {
                    Error::Input(m) => m,
                    other => other.to_string(),
                },
            });
            None
        }
    };

    let n = g.n();
    let mut occurrences: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for (u, bag) in td.bags.iter().enumerate() {
        for v in bag.iter() {
            if v >= n {
                violations.push(Violation::BagVertexOutOfRange { node: u, vertex: v });
            } else {
                occurrences[v].push(u);
            }
        }
    }
    for (v, occ) in occurrences.iter().enumerate() {
        if occ.is_empty() {
            violations.push(Violation::VertexUncovered { vertex: v });
        }
    }
    for (u, v) in g.edges() {
        let covered = occurrences[u]
            .iter()
            .any(|&node| td.bags[node].contains(v));
        if !covered {
            violations.push(Violation::EdgeUncovered { u, v });
        }
    }
    if let Some(r) = rooted.as_ref() {
        // In a tree, a node set is connected iff it has exactly one node
        // whose parent lies outside the set.
        for (v, occ) in occurrences.iter().enumerate() {
            if occ.is_empty() {
                continue;
            }
            let tops = occ
                .iter()
                .filter(|&&u| match r.parent[u] {
                    Some(p) => !td.bags[p].contains(v),
                    None => true,
                })
                .count();
            if tops != 1 {
                violations.push(Violation::DisconnectedOccurrence {
                    vertex: v,
                    nodes: occ.clone(),
                });
            }
        }
        if td.form == Form::Nice {
            check_nice(td, r, &mut violations);
        }
    }

    let mut alpha = Some(0);
    for bag in &td.bags {
        if bag.as_slice().last().is_some_and(|&v| v >= n) {
            continue;
        }
        match independence_number_with_cap(g, bag, alpha_cap) {
            Ok(a) => alpha = alpha.map(|x: usize| x.max(a)),
            Err(_) => {
                alpha = None;
                break;
            }
        }
    }
    if let (Some(claimed), Some(actual)) = (td.claimed_alpha, alpha) {
        if claimed < actual {
            violations.push(Violation::AlphaClaim { claimed, actual });
        }
    }
    report.alpha = alpha;
    report.valid = violations.is_empty();
    report.violations = violations;
    report
}

fn check_nice(td: &TreeDecomposition, r: &Rooted, out: &mut Vec<Violation>) {
    if !td.bags[r.root].is_empty() {
        out.push(Violation::NiceForm {
            node: r.root,
            reason: "root bag is not empty".into(),
        });
    }
    if td.kinds.len() != td.node_count() {
        out.push(Violation::NiceForm {
            node: r.root,
            reason: "node kinds missing".into(),
        });
        return;
    }
    for u in 0..td.node_count() {
        let ch = &r.children[u];
        let bag = &td.bags[u];
        let ok = match td.kinds[u] {
            NodeKind::Leaf => ch.is_empty() && bag.is_empty(),
            NodeKind::Introduce(v) => {
                ch.len() == 1 && !td.bags[ch[0]].contains(v) && td.bags[ch[0]].with(v) == *bag
            }
            NodeKind::Forget(v) => {
                ch.len() == 1 && td.bags[ch[0]].contains(v) && td.bags[ch[0]].without(v) == *bag
            }
            NodeKind::Join => ch.len() == 2 && ch.iter().all(|&c| td.bags[c] == *bag),
        };
        if !ok {
            out.push(Violation::NiceForm {
                node: u,
                reason: format!("{:?} inconsistent with child bags", td.kinds[u]),
            });
        }
    }
}

/// `max_u α(X_u)` with the default per-bag cap.
pub fn alpha_of_decomposition(g: &Graph, td: &TreeDecomposition) -> Result<usize> {
    alpha_of_decomposition_with_cap(g, td, DEFAULT_ALPHA_CAP)
}

pub fn alpha_of_decomposition_with_cap(g: &Graph, td: &TreeDecomposition, cap: usize) -> Result<usize> {
    let mut alpha = 0;
    for bag in &td.bags {
        alpha = alpha.max(independence_number_with_cap(g, bag, cap)?);
    }
    Ok(alpha)
}

/// Roots the tree at `root` and replaces every node with `c > 2` children by a
/// chain of `c - 1` copies of its bag, each with at most two children.
pub fn root_and_binarize(td: &TreeDecomposition, root: NodeId) -> Result<TreeDecomposition> {
    let r = td.rooted_at(root)?;
    let mut bags = td.bags.clone();
    let mut edges = Vec::new();
    for u in 0..td.node_count() {
        let ch = &r.children[u];
        if ch.len() <= 2 {
            edges.extend(ch.iter().map(|&c| (u, c)));
            continue;
        }
        // u keeps ch[0]; each copy takes the next child; the last copy takes two.
        let mut holder = u;
        for (i, &c) in ch.iter().enumerate() {
            let last_two = i + 2 >= ch.len();
            edges.push((holder, c));
            if !last_two {
                let copy = bags.len();
                bags.push(td.bags[u].clone());
                edges.push((holder, copy));
                holder = copy;
            }
        }
    }
    let mut out = TreeDecomposition::new(bags, &edges)?;
    out.root = Some(root);
    out.form = Form::RootedBinary;
    out.claimed_alpha = td.claimed_alpha;
    Ok(out)
}

/// Converts a valid decomposition into nice form. Every output bag is a
/// subset of an input bag.
///
/// The output has at most `4 * (width + 1) * n` nodes for `n >= 1` graph
/// vertices: redundant nodes are first contracted so that at most `n` remain,
/// then each tree edge contributes its forgets and introduces (ascending
/// vertex order, forgets first), and multi-child nodes a chain of joins.
pub fn make_nice(g: &Graph, td: &TreeDecomposition) -> Result<TreeDecomposition> {
    let report = validate(g, td);
    let structural: Vec<_> = report
        .violations
        .iter()
        .filter(|v| !matches!(v, Violation::AlphaClaim { .. }))
        .collect();
    if !structural.is_empty() {
        return Err(Error::input(format!(
            "cannot make an invalid decomposition nice: {}",
            serde_json::to_string(&report).unwrap_or_default()
        )));
    }
    if td.width() <= 0 {
        return Ok(nice_path_of_singletons(g.n(), td.claimed_alpha));
    }
    let (bags, children, root) = contract_redundant(td, td.root.unwrap_or(0))?;

    let mut builder = NiceBuilder::default();
    let mut top = vec![usize::MAX; bags.len()];
    let order = postorder(&children, root);
    for u in order {
        let bag = &bags[u];
        if children[u].is_empty() {
            let mut cur = builder.push(VertexSet::new(), NodeKind::Leaf, vec![]);
            for v in bag.iter() {
                cur = builder.introduce(cur, v);
            }
            top[u] = cur;
            continue;
        }
        let mut branches = Vec::new();
        for &c in &children[u] {
            let mut cur = top[c];
            for v in bags[c].difference(bag).iter() {
                cur = builder.forget(cur, v);
            }
            for v in bag.difference(&bags[c]).iter() {
                cur = builder.introduce(cur, v);
            }
            branches.push(cur);
        }
        let mut acc = branches[0];
        for &b in &branches[1..] {
            acc = builder.push(bag.clone(), NodeKind::Join, vec![acc, b]);
        }
        top[u] = acc;
    }
    let mut cur = top[root];
    for v in bags[root].iter() {
        cur = builder.forget(cur, v);
    }
    Ok(builder.finish(cur, td.claimed_alpha))
}

/// Contracts tree edges whose bags are nested. The result validates
/// whenever the input does.
pub fn contract_nested(td: &TreeDecomposition) -> Result<TreeDecomposition> {
    if td.node_count() <= 1 {
        return Ok(td.clone());
    }
    let (bags, children, root) = contract_redundant(td, td.root.unwrap_or(0))?;
    let edges: Vec<(NodeId, NodeId)> = children
        .iter()
        .enumerate()
        .flat_map(|(u, cs)| cs.iter().map(move |&c| (u, c)))
        .collect();
    let mut out = TreeDecomposition::new(bags, &edges)?.with_root(root)?;
    out.claimed_alpha = td.claimed_alpha;
    Ok(out)
}

fn nice_path_of_singletons(n: usize, claimed_alpha: Option<usize>) -> TreeDecomposition {
    let mut b = NiceBuilder::default();
    let mut cur = b.push(VertexSet::new(), NodeKind::Leaf, vec![]);
    for v in 0..n {
        cur = b.introduce(cur, v);
        cur = b.forget(cur, v);
    }
    b.finish(cur, claimed_alpha)
}

#[derive(Default)]
struct NiceBuilder {
    bags: Vec<VertexSet>,
    kinds: Vec<NodeKind>,
    edges: Vec<(NodeId, NodeId)>,
}

impl NiceBuilder {
    fn push(&mut self, bag: VertexSet, kind: NodeKind, children: Vec<NodeId>) -> NodeId {
        let id = self.bags.len();
        self.bags.push(bag);
        self.kinds.push(kind);
        for c in children {
            self.edges.push((id, c));
        }
        id
    }

    fn introduce(&mut self, child: NodeId, v: Vertex) -> NodeId {
        let bag = self.bags[child].with(v);
        self.push(bag, NodeKind::Introduce(v), vec![child])
    }

    fn forget(&mut self, child: NodeId, v: Vertex) -> NodeId {
        let bag = self.bags[child].without(v);
        self.push(bag, NodeKind::Forget(v), vec![child])
    }

    fn finish(self, root: NodeId, claimed_alpha: Option<usize>) -> TreeDecomposition {
        let mut td = TreeDecomposition::new(self.bags, &self.edges).expect("builder edges are in range");
        td.root = Some(root);
        td.form = Form::Nice;
        td.kinds = self.kinds;
        td.claimed_alpha = claimed_alpha;
        td
    }
}

fn postorder(children: &[Vec<NodeId>], root: NodeId) -> Vec<NodeId> {
    let mut pre = Vec::with_capacity(children.len());
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        pre.push(u);
        stack.extend(children[u].iter().rev());
    }
    pre.reverse();
    pre
}

/// Contracts tree edges whose bags are nested. Returns compacted bags,
/// children lists and the root.
fn contract_redundant(
    td: &TreeDecomposition,
    root: NodeId,
) -> Result<(Vec<VertexSet>, Vec<Vec<NodeId>>, NodeId)> {
    let n = td.node_count();
    let mut bags = td.bags.clone();
    let mut adj: Vec<BTreeSet<NodeId>> = td.adj.iter().map(|l| l.iter().copied().collect()).collect();
    let mut alive = vec![true; n];
    let mut work: VecDeque<(NodeId, NodeId)> = td.edges().into_iter().collect();
    while let Some((a, b)) = work.pop_front() {
        if !alive[a] || !alive[b] || !adj[a].contains(&b) {
            continue;
        }
        let (keep, drop) = if bags[a].is_subset(&bags[b]) {
            (b, a)
        } else if bags[b].is_subset(&bags[a]) {
            (a, b)
        } else {
            continue;
        };
        alive[drop] = false;
        let moved: Vec<NodeId> = adj[drop].iter().copied().filter(|&x| x != keep).collect();
        adj[drop].clear();
        adj[keep].remove(&drop);
        for x in moved {
            adj[x].remove(&drop);
            adj[x].insert(keep);
            adj[keep].insert(x);
            work.push_back((x.min(keep), x.max(keep)));
        }
        bags[drop] = VertexSet::new();
    }
    let ids: Vec<NodeId> = (0..n).filter(|&u| alive[u]).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &u) in ids.iter().enumerate() {
        index[u] = i;
    }
    let compact_bags: Vec<VertexSet> = ids.iter().map(|&u| bags[u].clone()).collect();
    let mut edges = Vec::new();
    for &u in &ids {
        for &w in &adj[u] {
            if u < w {
                edges.push((index[u], index[w]));
            }
        }
    }
    let compact = TreeDecomposition::new(compact_bags.clone(), &edges)?;
    // The requested root may have been contracted away; use the smallest survivor then.
    let new_root = if alive[root] { index[root] } else { 0 };
    let r = compact.rooted_at(new_root)?;
    Ok((compact_bags, r.children, new_root))
}
