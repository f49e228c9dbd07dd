//! Seeded random and structured graph families.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builders::{interval_graph, Interval};
use crate::decomposition::TreeDecomposition;
use crate::error::Result;
use crate::graph::{Graph, Vertex, VertexSet};
use crate::weight::Weight;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p.clamp(0.0, 1.0)) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("generated edges are valid")
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    Graph::from_edges(n, &edges).expect("path")
}

pub fn cycle(n: usize) -> Graph {
    let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    if n >= 3 {
        edges.push((n - 1, 0));
    }
    Graph::from_edges(n, &edges).expect("cycle")
}

/// `rows x cols` grid, vertex `r * cols + c`.
pub fn grid(rows: usize, cols: usize) -> Graph {
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    Graph::from_edges(rows * cols, &edges).expect("grid")
}

/// Chordal graph with a clique tree: each new vertex attaches to a random
/// subset of a random existing bag.
pub fn chordal_with_tree(n: usize, seed: u64) -> (Graph, TreeDecomposition) {
    let mut r = rng(seed);
    let mut bags: Vec<VertexSet> = Vec::new();
    let mut tree = Vec::new();
    let mut edges = Vec::new();
    for v in 0..n {
        if bags.is_empty() {
            bags.push(VertexSet::singleton(v));
            continue;
        }
        let b = r.gen_range(0..bags.len());
        let keep = r.gen_range(0.3..1.0);
        let attach: Vec<Vertex> = bags[b].iter().filter(|_| r.gen_bool(keep)).collect();
        edges.extend(attach.iter().map(|&u| (u, v)));
        bags.push(VertexSet::from_vec(attach).with(v));
        tree.push((b, bags.len() - 1));
    }
    let g = Graph::from_edges(n, &edges).expect("chordal edges");
    if bags.is_empty() {
        bags.push(VertexSet::new());
    }
    let td = TreeDecomposition::new(bags, &tree)
        .and_then(|td| td.with_root(0))
        .expect("tree edges point backwards");
    (g, td)
}

pub fn chordal(n: usize, seed: u64) -> Graph {
    chordal_with_tree(n, seed).0
}

/// A chordal graph minus a random matching, with the clique tree of the
/// chordal graph. Every bag was a clique, so it now has independence number
/// at most 2.
pub fn chordal_minus_matching(n: usize, seed: u64) -> (Graph, TreeDecomposition) {
    let (g, td) = chordal_with_tree(n, seed);
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut all: Vec<(Vertex, Vertex)> = g.edges().collect();
    all.shuffle(&mut r);
    let mut used = vec![false; n];
    let mut removed = Vec::new();
    for (a, b) in all {
        if !used[a] && !used[b] && r.gen_bool(0.5) {
            used[a] = true;
            used[b] = true;
            removed.push((a, b));
        }
    }
    let kept: Vec<_> = g.edges().filter(|e| !removed.contains(e)).collect();
    (Graph::from_edges(n, &kept).expect("subgraph"), td)
}

fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Intervals with integer endpoints in `[0, 2n]` and lengths up to `span`.
pub fn intervals(n: usize, span: u64, seed: u64) -> Vec<Interval> {
    let mut r = rng(seed);
    let top = 2 * n.max(1) as i64;
    (0..n)
        .map(|_| {
            let lo = r.gen_range(0..top);
            let len = r.gen_range(0..=span as i64);
            (int(lo), int(lo + len))
        })
        .collect()
}

/// Intervals of length exactly one with rational left ends.
pub fn unit_intervals(n: usize, seed: u64) -> Vec<Interval> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let lo = BigRational::new(BigInt::from(r.gen_range(0..(n as i64).max(1) * 4)), BigInt::from(4));
            let hi = &lo + int(1);
            (lo, hi)
        })
        .collect()
}

pub fn interval(n: usize, span: u64, seed: u64) -> (Graph, Vec<Interval>) {
    let iv = intervals(n, span, seed);
    (interval_graph(&iv).expect("lo <= hi"), iv)
}

/// Rational weights with numerators in `1..=9` and denominators in `1..=3`.
pub fn random_weights(n: usize, seed: u64) -> Vec<Weight> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| Weight::new(r.gen_range(1..=9), r.gen_range(1..=3)).expect("positive"))
        .collect()
}

pub fn with_random_weights(g: Graph, seed: u64) -> Result<Graph> {
    let w = random_weights(g.n(), seed);
    g.set_weights(w)
}
