use std::collections::VecDeque;

use crate::decomposition::{contract_nested, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::treewidth::decomposition_from_order;

/// Lexicographic breadth-first search by partition refinement. Returns the
/// visit order; its reverse is a perfect elimination ordering exactly when
/// `g` is chordal.
pub fn lex_bfs(g: &Graph) -> Vec<Vertex> {
    let n = g.n();
    let mut classes: Vec<Vec<Vertex>> = if n > 0 { vec![(0..n).collect()] } else { vec![] };
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut mark = vec![false; n];
    while let Some(first) = classes.first_mut() {
        let v = first.remove(0);
        if first.is_empty() {
            classes.remove(0);
        }
        visited[v] = true;
        order.push(v);
        for &u in g.neighbors(v) {
            mark[u] = !visited[u];
        }
        let mut next = Vec::with_capacity(classes.len() + 1);
        for class in classes {
            let (hit, miss): (Vec<_>, Vec<_>) = class.into_iter().partition(|&u| mark[u]);
            if !hit.is_empty() {
                next.push(hit);
            }
            if !miss.is_empty() {
                next.push(miss);
            }
        }
        classes = next;
        for &u in g.neighbors(v) {
            mark[u] = false;
        }
    }
    order
}

/// Whether `order` is a perfect elimination ordering: the later neighbours
/// of every vertex form a clique.
pub fn is_perfect_elimination_order(g: &Graph, order: &[Vertex]) -> bool {
    let mut pos = vec![0; g.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    order.iter().enumerate().all(|(i, &v)| {
        let later: Vec<Vertex> = g.neighbors(v).iter().copied().filter(|&u| pos[u] > i).collect();
        match later.iter().min_by_key(|&&u| pos[u]) {
            None => true,
            Some(&p) => later.iter().all(|&u| u == p || g.has_edge(p, u)),
        }
    })
}

/// Some induced cycle of length at least four, if `g` has one.
pub fn chordless_cycle(g: &Graph) -> Option<Vec<Vertex>> {
    let n = g.n();
    for v in 0..n {
        let nv = g.neighbors(v);
        for (i, &x) in nv.iter().enumerate() {
            for &y in &nv[i + 1..] {
                if g.has_edge(x, y) {
                    continue;
                }
                let mut blocked = vec![false; n];
                blocked[v] = true;
                for &u in nv {
                    blocked[u] = u != x && u != y;
                }
                if let Some(path) = shortest_path(g, x, y, &blocked) {
                    let mut cycle = vec![v];
                    cycle.extend(path);
                    return Some(cycle);
                }
            }
        }
    }
    None
}

fn shortest_path(g: &Graph, from: Vertex, to: Vertex, blocked: &[bool]) -> Option<Vec<Vertex>> {
    let mut prev = vec![usize::MAX; g.n()];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(a) = queue.pop_front() {
        if a == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &b in g.neighbors(a) {
            if !blocked[b] && prev[b] == usize::MAX {
                prev[b] = a;
                queue.push_back(b);
            }
        }
    }
    None
}

/// Clique tree of a chordal graph: every bag is a clique.
///
/// Non-chordal input is rejected with an induced cycle of length at least
/// four (vertices reported 1-indexed).
pub fn clique_tree_chordal(g: &Graph) -> Result<TreeDecomposition> {
    let mut peo = lex_bfs(g);
    peo.reverse();
    if !is_perfect_elimination_order(g, &peo) {
        let cycle = chordless_cycle(g).ok_or_else(|| Error::internal("no perfect elimination order but no induced cycle"))?;
        let shown: Vec<String> = cycle.iter().map(|v| (v + 1).to_string()).collect();
        return Err(Error::input(format!(
            "graph is not chordal: induced cycle {}",
            shown.join(" ")
        )));
    }
    let mut td = contract_nested(&decomposition_from_order(g, &peo)?)?;
    if g.n() > 0 {
        td.set_claimed_alpha(Some(1));
    }
    Ok(td)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{alpha_of_decomposition, validate};
    use crate::graph::VertexSet;

    #[test]
    fn tree_gives_edge_bags() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)]).unwrap();
        let td = clique_tree_chordal(&g).unwrap();
        assert!(validate(&g, &td).valid);
        let mut bags: Vec<_> = td.bags().to_vec();
        bags.sort();
        let mut edges: Vec<VertexSet> = g.edges().map(|(a, b)| VertexSet::from_vec(vec![a, b])).collect();
        edges.sort();
        assert_eq!(bags, edges);
        assert_eq!(alpha_of_decomposition(&g, &td).unwrap(), 1);
    }

    #[test]
    fn k4_single_bag() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let td = clique_tree_chordal(&g).unwrap();
        assert_eq!(td.node_count(), 1);
        assert_eq!(alpha_of_decomposition(&g, &td).unwrap(), 1);
    }

    #[test]
    fn c5_is_rejected_with_witness() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (4, 5)]).unwrap();
        let cycle = chordless_cycle(&g).unwrap();
        assert_eq!(cycle.len(), 5);
        for i in 0..cycle.len() {
            for j in i + 1..cycle.len() {
                let adjacent = j == i + 1 || (i == 0 && j == cycle.len() - 1);
                assert_eq!(g.has_edge(cycle[i], cycle[j]), adjacent);
            }
        }
        let err = clique_tree_chordal(&g).unwrap_err().to_string();
        assert!(err.contains("induced cycle"), "{}", err);
    }

    #[test]
    fn empty_and_edgeless() {
        let td = clique_tree_chordal(&Graph::empty(0)).unwrap();
        assert!(validate(&Graph::empty(0), &td).valid);
        let g = Graph::empty(4);
        let td = clique_tree_chordal(&g).unwrap();
        assert!(validate(&g, &td).valid);
        assert_eq!(alpha_of_decomposition(&g, &td).unwrap(), 1);
    }
}
