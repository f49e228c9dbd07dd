//! Exact independence number by branch and bound over local bitsets.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// Default bound on `|s|` for [`independence_number`].
pub const DEFAULT_ALPHA_CAP: usize = 40;

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }

    fn full(n: usize) -> Self {
        let mut b = Bits::empty(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(wi, &w)| wi * 64 + w.trailing_zeros() as usize)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn and_count(&self, other: &Bits) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn minus(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}

struct Search {
    adj: Vec<Bits>,
    closed: Vec<Bits>,
    best: usize,
}

impl Search {
    /// Greedy clique cover of `p`; its size bounds the independence number.
    fn cover_bound(&self, p: &Bits) -> usize {
        let mut rest = p.clone();
        let mut cliques = 0;
        while let Some(v) = rest.first() {
            cliques += 1;
            rest.clear(v);
            let mut cand = rest.and(&self.adj[v]);
            while let Some(u) = cand.first() {
                rest.clear(u);
                cand = cand.and(&self.adj[u]);
            }
        }
        cliques
    }

    fn run(&mut self, p: Bits, size: usize) {
        if p.is_empty() {
            self.best = self.best.max(size);
            return;
        }
        if size + self.cover_bound(&p) <= self.best {
            return;
        }
        // A vertex of degree <= 1 inside p is always in some maximum
        // independent set of G[p].
        let mut min_v = usize::MAX;
        let mut min_d = usize::MAX;
        let mut max_v = usize::MAX;
        let mut max_d = 0;
        for v in p.iter() {
            let d = p.and_count(&self.adj[v]);
            if d < min_d {
                min_d = d;
                min_v = v;
            }
            if d > max_d || max_v == usize::MAX {
                max_d = d;
                max_v = v;
            }
        }
        if min_d <= 1 {
            let next = p.minus(&self.closed[min_v]);
            self.run(next, size + 1);
            return;
        }
        let take = p.minus(&self.closed[max_v]);
        self.run(take, size + 1);
        let mut skip = p;
        skip.clear(max_v);
        self.run(skip, size);
    }
}

/// `α(G[s])` with the default cap of [`DEFAULT_ALPHA_CAP`] vertices.
pub fn independence_number(g: &Graph, s: &VertexSet) -> Result<usize> {
    independence_number_with_cap(g, s, DEFAULT_ALPHA_CAP)
}

pub fn independence_number_with_cap(g: &Graph, s: &VertexSet, cap: usize) -> Result<usize> {
    g.check_set(s)?;
    if s.len() > cap {
        return Err(Error::resource(
            format!("independence number over {} vertices", s.len()),
            cap,
        ));
    }
    let verts = s.as_slice();
    let k = verts.len();
    if k == 0 {
        return Ok(0);
    }
    let mut adj = vec![Bits::empty(k); k];
    for (i, &v) in verts.iter().enumerate() {
        for &u in g.neighbors(v) {
            if let Ok(j) = verts.binary_search(&u) {
                adj[i].set(j);
            }
        }
    }
    let closed = adj
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let mut c = a.clone();
            c.set(i);
            c
        })
        .collect();
    let mut search = Search {
        adj,
        closed,
        best: 0,
    };
    let all = Bits::full(k);
    debug_assert_eq!(all.count(), k);
    search.run(all, 0);
    Ok(search.best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_alpha(g: &Graph, s: &VertexSet) -> usize {
        let verts = s.as_slice();
        let mut best = 0;
        for mask in 0u32..(1 << verts.len()) {
            let chosen: Vec<_> = (0..verts.len()).filter(|i| mask >> i & 1 == 1).map(|i| verts[i]).collect();
            let independent = chosen
                .iter()
                .enumerate()
                .all(|(i, &a)| chosen[i + 1..].iter().all(|&b| !g.has_edge(a, b)));
            if independent {
                best = best.max(chosen.len());
            }
        }
        best
    }

    #[test]
    fn small_cases() {
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(independence_number(&k3, &k3.vertices()).unwrap(), 1);
        let e4 = Graph::empty(4);
        assert_eq!(independence_number(&e4, &e4.vertices()).unwrap(), 4);
        let c5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(brute_alpha(&c5, &c5.vertices()), 2);
        assert_eq!(independence_number(&c5, &c5.vertices()).unwrap(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::empty(50);
        match independence_number(&g, &g.vertices()) {
            Err(Error::Resource { cap, .. }) => assert_eq!(cap, DEFAULT_ALPHA_CAP),
            other => panic!("unexpected {:?}", other),
        }
        assert_eq!(independence_number_with_cap(&g, &g.vertices(), 64).unwrap(), 50);
    }

    #[test]
    fn large_union_of_cliques() {
        // three disjoint cliques of size 30 -> alpha 3, well beyond one word
        let mut edges = Vec::new();
        for c in 0..3 {
            for i in 0..30 {
                for j in i + 1..30 {
                    edges.push((c * 30 + i, c * 30 + j));
                }
            }
        }
        let g = Graph::from_edges(90, &edges).unwrap();
        assert_eq!(independence_number_with_cap(&g, &g.vertices(), 128).unwrap(), 3);
    }

    proptest::proptest! {
        #[test]
        fn matches_brute_force(n in 0usize..=16, seed in 0u64..u64::MAX, density in 0.0f64..1.0) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(density) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let s: VertexSet = (0..n).filter(|_| rng.gen_bool(0.8)).collect();
            proptest::prop_assert_eq!(independence_number(&g, &s).unwrap(), brute_alpha(&g, &s));
        }
    }
}
