use crate::decomposition::{alpha_of_decomposition, contract_nested, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::treewidth::decomposition_from_order;

/// Largest graph accepted by [`exact_tree_alpha`].
pub const EXACT_TREE_ALPHA_CAP: usize = 12;

/// Exact tree-independence number with a decomposition attaining it.
///
/// Minimises over elimination orderings with a dynamic program over the set
/// of already eliminated vertices: eliminating `v` after `S` creates the bag
/// of `v` and everything outside `S` reachable from `v` through `S`.
pub fn exact_tree_alpha(g: &Graph) -> Result<(usize, TreeDecomposition)> {
    let n = g.n();
    if n > EXACT_TREE_ALPHA_CAP {
        return Err(Error::resource("exact tree-independence number vertices", EXACT_TREE_ALPHA_CAP));
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let full = 1usize << n;
    let mut alpha = vec![0u8; full];
    for m in 1..full {
        let v = m.trailing_zeros() as usize;
        let without = m & !(1 << v);
        let closed = without & !(adj[v] as usize);
        alpha[m] = alpha[without].max(1 + alpha[closed]);
    }
    let mut best = vec![u8::MAX; full];
    let mut choice = vec![0u8; full];
    best[0] = 0;
    for s in 1..full {
        for v in 0..n {
            if s >> v & 1 == 0 {
                continue;
            }
            let before = s & !(1 << v);
            let bag = bag_after(&adj, before as u32, v) as usize;
            let cost = best[before].max(alpha[bag]);
            if cost < best[s] {
                best[s] = cost;
                choice[s] = v as u8;
            }
        }
    }
    let mut order: Vec<Vertex> = Vec::with_capacity(n);
    let mut s = full - 1;
    while s != 0 {
        let v = choice[s] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    let k = best[full - 1] as usize;
    let mut td = contract_nested(&decomposition_from_order(g, &order)?)?;
    let achieved = alpha_of_decomposition(g, &td)?;
    if achieved != k {
        return Err(Error::internal(format!("ordering achieves alpha {} but the table says {}", achieved, k)));
    }
    td.set_claimed_alpha(Some(k));
    Ok((k, td))
}

/// `{v}` plus the vertices outside `eliminated ∪ {v}` reachable from `v`
/// through `eliminated`.
fn bag_after(adj: &[u32], eliminated: u32, v: usize) -> u32 {
    let mut seen = 1u32 << v;
    let mut frontier = 1u32 << v;
    let mut bag = 1u32 << v;
    while frontier != 0 {
        let x = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = adj[x] & !seen;
        seen |= fresh;
        bag |= fresh & !eliminated;
        frontier |= fresh & eliminated;
    }
    bag
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::validate;
    use crate::independence::independence_number;

    /// Tree-independence number by trying every elimination order with an
    /// explicit fill-in simulation.
    fn all_orders(g: &Graph) -> usize {
        fn rec(g: &Graph, order: &mut Vec<usize>, used: &mut Vec<bool>, best: &mut usize) {
            if order.len() == g.n() {
                let td = decomposition_from_order(g, order).unwrap();
                let a = td.bags().iter().map(|b| independence_number(g, b).unwrap()).max().unwrap_or(0);
                *best = (*best).min(a);
                return;
            }
            for v in 0..g.n() {
                if !used[v] {
                    used[v] = true;
                    order.push(v);
                    rec(g, order, used, best);
                    order.pop();
                    used[v] = false;
                }
            }
        }
        let mut best = usize::MAX;
        rec(g, &mut Vec::new(), &mut vec![false; g.n()], &mut best);
        best
    }

    #[test]
    fn chordal_is_one() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        let (k, td) = exact_tree_alpha(&g).unwrap();
        assert_eq!(k, 1);
        assert!(validate(&g, &td).valid);
    }

    #[test]
    fn c4_and_k33_agree_with_all_orders() {
        let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let (k, td) = exact_tree_alpha(&c4).unwrap();
        assert_eq!(k, all_orders(&c4));
        assert!(validate(&c4, &td).valid);
        let mut edges = Vec::new();
        for a in 0..3 {
            for b in 3..6 {
                edges.push((a, b));
            }
        }
        let k33 = Graph::from_edges(6, &edges).unwrap();
        let (k, td) = exact_tree_alpha(&k33).unwrap();
        assert_eq!(k, all_orders(&k33));
        assert!(validate(&k33, &td).valid);
    }

    #[test]
    fn cap() {
        assert!(matches!(exact_tree_alpha(&Graph::empty(13)), Err(Error::Resource { .. })));
        assert_eq!(exact_tree_alpha(&Graph::empty(0)).unwrap().0, 0);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(40))]
        #[test]
        fn matches_all_orders(n in 1usize..=6, seed in 0u64..u64::MAX) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let (k, td) = exact_tree_alpha(&g).unwrap();
            proptest::prop_assert_eq!(k, all_orders(&g));
            proptest::prop_assert!(validate(&g, &td).valid);
        }
    }
}
