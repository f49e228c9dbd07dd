//! Exact tests for `tw(G) < t`.
//!
//! `t = 1` and `t = 2` use the edgeless / forest characterizations and work at
//! any size. For `t >= 3` an elimination-ordering search over vertex subsets
//! runs per connected component, which must have at most [`TW_DP_CAP`]
//! vertices.

use std::collections::{BTreeSet, HashMap};

use crate::decomposition::TreeDecomposition;
use crate::error::{Error, Result};
use crate::graph::{induced_subgraph, Graph, Vertex, VertexSet};

/// Largest component handled by the subset search for `t >= 3`.
pub const TW_DP_CAP: usize = 25;

pub fn treewidth_less_than(g: &Graph, t: usize) -> Result<bool> {
    match t {
        0 => Err(Error::input("treewidth bound t must be at least 1")),
        1 => Ok(g.edge_count() == 0),
        2 => Ok(is_forest(g)),
        _ => Ok(elimination_order_below(g, t)?.is_some()),
    }
}

/// `tw(G[s]) < t` without materializing `G[s]` for `t <= 2`.
pub fn treewidth_less_than_within(g: &Graph, s: &VertexSet, t: usize) -> Result<bool> {
    match t {
        0 => Err(Error::input("treewidth bound t must be at least 1")),
        1 => Ok(g.edges_within(s) == 0),
        2 => Ok(is_forest_within(g, s)),
        _ => treewidth_less_than(&induced_subgraph(g, s)?.graph, t),
    }
}

pub fn is_forest(g: &Graph) -> bool {
    is_forest_within(g, &g.vertices())
}

/// Union-find cycle check on `G[s]`.
pub fn is_forest_within(g: &Graph, s: &VertexSet) -> bool {
    let verts = s.as_slice();
    let mut parent: Vec<usize> = (0..verts.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, &v) in verts.iter().enumerate() {
        for &u in g.neighbors(v) {
            if u <= v {
                continue;
            }
            if let Ok(j) = verts.binary_search(&u) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a == b {
                    return false;
                }
                parent[a] = b;
            }
        }
    }
    true
}

/// A tree decomposition of width `< t`, or `None` if `tw(G) >= t`.
///
/// Built from an elimination ordering; node `i` holds the bag of the `i`-th
/// eliminated vertex, and the stored root is the last node.
pub fn decompose_below(g: &Graph, t: usize) -> Result<Option<TreeDecomposition>> {
    let order = match t {
        0 => return Err(Error::input("treewidth bound t must be at least 1")),
        1 => {
            if g.edge_count() != 0 {
                return Ok(None);
            }
            (0..g.n()).collect()
        }
        2 => {
            if !is_forest(g) {
                return Ok(None);
            }
            min_degree_order(g)
        }
        _ => match elimination_order_below(g, t)? {
            Some(o) => o,
            None => return Ok(None),
        },
    };
    let td = decomposition_from_order(g, &order)?;
    debug_assert!(td.width() < t as i64);
    Ok(Some(td))
}

/// Greedy minimum-degree elimination (ties by smallest id). Exact for forests.
pub fn min_degree_order(g: &Graph) -> Vec<Vertex> {
    let n = g.n();
    let mut adj: Vec<BTreeSet<Vertex>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut alive: BTreeSet<(usize, Vertex)> = (0..n).map(|v| (adj[v].len(), v)).collect();
    let mut order = Vec::with_capacity(n);
    while let Some((_, v)) = alive.pop_first() {
        order.push(v);
        let nbrs: Vec<Vertex> = adj[v].iter().copied().collect();
        for &a in &nbrs {
            alive.remove(&(adj[a].len(), a));
            adj[a].remove(&v);
        }
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &a in &nbrs {
            alive.insert((adj[a].len(), a));
        }
        adj[v].clear();
    }
    order
}

/// Tree decomposition induced by eliminating vertices in `order`.
///
/// Bag of node `i` is `{order[i]}` plus its neighbors in the fill graph at
/// elimination time; its parent is the node of the earliest-eliminated such
/// neighbor. Component roots are chained, and the overall root is the last node.
pub fn decomposition_from_order(g: &Graph, order: &[Vertex]) -> Result<TreeDecomposition> {
    let n = g.n();
    if order.len() != n {
        return Err(Error::input("elimination order must list every vertex once"));
    }
    let mut position = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n || position[v] != usize::MAX {
            return Err(Error::input("elimination order must list every vertex once"));
        }
        position[v] = i;
    }
    if n == 0 {
        let mut td = TreeDecomposition::new(vec![VertexSet::new()], &[])?;
        td = td.with_root(0)?;
        return Ok(td);
    }
    let mut adj: Vec<BTreeSet<Vertex>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut edges = Vec::new();
    let mut roots = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let higher: Vec<Vertex> = adj[v].iter().copied().filter(|&u| position[u] > i).collect();
        for (a_idx, &a) in higher.iter().enumerate() {
            adj[a].remove(&v);
            for &b in &higher[a_idx + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        match higher.iter().map(|&u| position[u]).min() {
            Some(p) => edges.push((i, p)),
            None => roots.push(i),
        }
        let mut bag = higher;
        bag.push(v);
        bags.push(VertexSet::from_vec(bag));
    }
    for w in roots.windows(2) {
        edges.push((w[0], w[1]));
    }
    let root = *roots.last().expect("at least one component");
    TreeDecomposition::new(bags, &edges)?.with_root(root)
}

/// Elimination ordering of width `< t`, found by searching reachable sets of
/// eliminated vertices per component.
fn elimination_order_below(g: &Graph, t: usize) -> Result<Option<Vec<Vertex>>> {
    let k = t - 1;
    let mut order = Vec::with_capacity(g.n());
    for comp in g.components_within(&g.vertices()) {
        let c = comp.len();
        if c <= t {
            // any ordering of at most t vertices has bags of size <= t
            order.extend(comp.iter());
            continue;
        }
        let sub = induced_subgraph(g, &comp)?;
        let h = &sub.graph;
        // a graph of treewidth <= k has at most k*c - k(k+1)/2 edges
        if h.edge_count() > k * c - k * (k + 1) / 2 {
            return Ok(None);
        }
        let greedy = min_degree_order(h);
        if decomposition_from_order(h, &greedy)?.width() <= k as i64 {
            order.extend(greedy.into_iter().map(|v| sub.original[v]));
            continue;
        }
        if c > TW_DP_CAP {
            return Err(Error::resource(
                format!("treewidth search on a {}-vertex component (t = {})", c, t),
                TW_DP_CAP,
            ));
        }
        match component_order(h, k) {
            Some(local) => order.extend(local.into_iter().map(|v| sub.original[v])),
            None => return Ok(None),
        }
    }
    Ok(Some(order))
}

/// Search over eliminated sets `S` reachable by steps whose bag size is at
/// most `k + 1`; the full set is reachable iff `tw <= k`.
fn component_order(h: &Graph, k: usize) -> Option<Vec<Vertex>> {
    let c = h.n();
    let adj: Vec<u32> = (0..c)
        .map(|v| h.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let full: u32 = if c == 32 { u32::MAX } else { (1u32 << c) - 1 };
    let mut came_from: HashMap<u32, (u32, Vertex)> = HashMap::new();
    let mut stack = vec![0u32];
    came_from.insert(0, (0, usize::MAX));
    while let Some(s) = stack.pop() {
        if s == full {
            let mut order = Vec::with_capacity(c);
            let mut cur = s;
            while cur != 0 {
                let (prev, v) = came_from[&cur];
                order.push(v);
                cur = prev;
            }
            order.reverse();
            return Some(order);
        }
        for v in 0..c {
            if s >> v & 1 == 1 {
                continue;
            }
            let next = s | 1 << v;
            if came_from.contains_key(&next) {
                continue;
            }
            if reach_outside(&adj, s, v).count_ones() as usize <= k {
                came_from.insert(next, (s, v));
                stack.push(next);
            }
        }
    }
    None
}

/// Vertices outside `s ∪ {v}` reachable from `v` through paths inside `s`.
fn reach_outside(adj: &[u32], s: u32, v: usize) -> u32 {
    let mut visited = 1u32 << v;
    let mut frontier = 1u32 << v;
    let mut outside = 0u32;
    while frontier != 0 {
        let x = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let nb = adj[x] & !visited;
        visited |= nb;
        outside |= nb & !s;
        frontier |= nb & s;
    }
    outside
}
