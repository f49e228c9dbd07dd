use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::decomposition::TreeDecomposition;
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, VertexSet};

/// Cliques whose union leaves only components of at most `beta * n` vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueSeparator {
    pub cliques: Vec<VertexSet>,
    pub beta: BigRational,
}

impl CliqueSeparator {
    pub fn union(&self) -> VertexSet {
        self.cliques.iter().fold(VertexSet::new(), |acc, c| acc.union(c))
    }
}

/// Finds a separator of `G[within]`; returned vertex ids are those of `g`.
pub trait SeparatorFinder: Sync {
    fn find(&self, g: &Graph, within: &VertexSet, beta: &BigRational) -> Result<CliqueSeparator>;
}

fn check_beta(beta: &BigRational, low: &BigRational) -> Result<()> {
    if beta < low || beta >= &BigRational::one() {
        return Err(Error::input(format!("balance {} must lie in [{}, 1)", beta, low)));
    }
    Ok(())
}

fn half() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(2))
}

/// `size <= beta * total`, exactly.
fn fits(size: usize, total: usize, beta: &BigRational) -> bool {
    BigRational::from_integer(BigInt::from(size)) <= beta * BigRational::from_integer(BigInt::from(total))
}

/// Largest component of `G[within] - removed`.
fn largest_component(g: &Graph, within: &VertexSet, removed: &VertexSet) -> usize {
    g.components_within(&within.difference(removed))
        .iter()
        .map(|c| c.len())
        .max()
        .unwrap_or(0)
}

fn bfs_layers(g: &Graph, within: &[bool], start: Vertex) -> Vec<Vec<Vertex>> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[start] = 0;
    let mut layers = vec![vec![start]];
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if within[u] && dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                if layers.len() <= dist[u] {
                    layers.push(Vec::new());
                }
                layers[dist[u]].push(u);
                queue.push_back(u);
            }
        }
    }
    layers
}

/// Partition `s` into cliques of `g`, each maximal among the still uncovered
/// vertices.
pub fn greedy_clique_cover(g: &Graph, s: &VertexSet) -> Vec<VertexSet> {
    let mut left: Vec<Vertex> = s.iter().collect();
    let mut cliques = Vec::new();
    while !left.is_empty() {
        let mut clique = vec![left.remove(0)];
        left.retain(|&u| {
            if clique.iter().all(|&c| g.has_edge(c, u)) {
                clique.push(u);
                false
            } else {
                true
            }
        });
        cliques.push(VertexSet::from_vec(clique));
    }
    cliques
}

/// Balanced separator by BFS layering with local pruning, covered greedily by
/// cliques. Always valid, without any bound on the number of cliques.
pub fn greedy_clique_separator(g: &Graph, beta: &BigRational) -> Result<CliqueSeparator> {
    GreedyFinder.find(g, &g.vertices(), beta)
}

pub struct GreedyFinder;

impl SeparatorFinder for GreedyFinder {
    fn find(&self, g: &Graph, within: &VertexSet, beta: &BigRational) -> Result<CliqueSeparator> {
        check_beta(beta, &half())?;
        g.check_set(within)?;
        let total = within.len();
        let balanced = |s: &VertexSet| fits(largest_component(g, within, s), total, beta);
        let empty = VertexSet::new();
        if balanced(&empty) {
            return Ok(CliqueSeparator {
                cliques: Vec::new(),
                beta: beta.clone(),
            });
        }
        let comps = g.components_within(within);
        let big = comps.iter().max_by_key(|c| c.len()).expect("unbalanced implies nonempty");
        let mut inside = vec![false; g.n()];
        for v in big.iter() {
            inside[v] = true;
        }
        let sweep = bfs_layers(g, &inside, big.as_slice()[0]);
        let far = *sweep.last().unwrap().iter().min().unwrap();
        let layers = bfs_layers(g, &inside, far);

        let mut best: Option<VertexSet> = None;
        for layer in &layers {
            let s = VertexSet::from_vec(layer.clone());
            if best.as_ref().is_some_and(|b| b.len() <= s.len()) {
                continue;
            }
            if balanced(&s) {
                best = Some(s);
            }
        }
        let mut sep = match best {
            Some(s) => s,
            None => {
                // grow from the middle layer by highest degree in the worst component
                let mut s = VertexSet::from_vec(layers[layers.len() / 2].clone());
                while !balanced(&s) {
                    let rest = within.difference(&s);
                    let worst = g.components_within(&rest).into_iter().max_by_key(|c| c.len()).unwrap();
                    let pick = worst
                        .iter()
                        .max_by_key(|&v| (g.neighbors(v).iter().filter(|&&u| worst.contains(u)).count(), std::cmp::Reverse(v)))
                        .unwrap();
                    s.insert(pick);
                }
                s
            }
        };
        for v in sep.clone().iter() {
            let smaller = sep.without(v);
            if balanced(&smaller) {
                sep = smaller;
            }
        }
        Ok(CliqueSeparator {
            cliques: greedy_clique_cover(g, &sep),
            beta: beta.clone(),
        })
    }
}

/// Closed intervals `[lo, hi]`; vertex `i` is interval `i`.
pub type Interval = (BigRational, BigRational);

/// Intersection graph of closed intervals.
pub fn interval_graph(intervals: &[Interval]) -> Result<Graph> {
    for (i, (lo, hi)) in intervals.iter().enumerate() {
        if lo > hi {
            return Err(Error::input(format!("interval {} has lo > hi", i + 1)));
        }
    }
    let mut by_lo: Vec<usize> = (0..intervals.len()).collect();
    by_lo.sort_by(|&a, &b| intervals[a].0.cmp(&intervals[b].0).then(a.cmp(&b)));
    let mut edges = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    for &i in &by_lo {
        let lo = &intervals[i].0;
        active.retain(|&j| &intervals[j].1 >= lo);
        edges.extend(active.iter().map(|&j| (i.min(j), i.max(j))));
        active.push(i);
    }
    Graph::from_edges(intervals.len(), &edges)
}

/// Single-clique separator of an interval graph: all intervals through a
/// stabbing point chosen at a right endpoint.
pub fn interval_clique_separator(intervals: &[Interval], beta: &BigRational) -> Result<CliqueSeparator> {
    let all: Vec<usize> = (0..intervals.len()).collect();
    interval_separator_within(intervals, &all, beta)
}

fn interval_separator_within(intervals: &[Interval], within: &[usize], beta: &BigRational) -> Result<CliqueSeparator> {
    check_beta(beta, &half())?;
    if within.is_empty() {
        return Ok(CliqueSeparator {
            cliques: vec![],
            beta: beta.clone(),
        });
    }
    let mut his: Vec<&BigRational> = within.iter().map(|&i| &intervals[i].1).collect();
    let mut los: Vec<&BigRational> = within.iter().map(|&i| &intervals[i].0).collect();
    his.sort();
    los.sort();
    let mut candidates = his.clone();
    candidates.dedup();
    let n = within.len();
    // (larger side, clique size) for stabbing point x
    let score = |x: &BigRational| {
        let left = his.partition_point(|h| *h < x);
        let right = n - los.partition_point(|l| *l <= x);
        (left.max(right), n - left - right)
    };
    let x = candidates
        .iter()
        .min_by_key(|x| score(x))
        .map(|x| (*x).clone())
        .expect("nonempty");
    let clique: VertexSet = within
        .iter()
        .copied()
        .filter(|&i| intervals[i].0 <= x && x <= intervals[i].1)
        .collect();
    Ok(CliqueSeparator {
        cliques: vec![clique],
        beta: beta.clone(),
    })
}

pub struct IntervalFinder {
    pub intervals: Vec<Interval>,
}

impl SeparatorFinder for IntervalFinder {
    fn find(&self, g: &Graph, within: &VertexSet, beta: &BigRational) -> Result<CliqueSeparator> {
        if g.n() != self.intervals.len() {
            return Err(Error::input("interval model does not match the graph"));
        }
        interval_separator_within(&self.intervals, within.as_slice(), beta)
    }
}

/// Result of the separator recursion.
#[derive(Clone, Debug)]
pub struct SeparatorDecomposition {
    pub td: TreeDecomposition,
    /// Per node: number of separator cliques stacked on its root path; bounds
    /// the independence number of the bag.
    pub bag_bounds: Vec<usize>,
    pub depth: usize,
}

/// Recursive decomposition from balanced clique separators.
///
/// A node for vertex set `W` with inherited interface `I` gets bag `I ∪ S`
/// where `S` is the separator of `G[W]`; every component `C` of `G[W] - S`
/// becomes a child with `W = C` and interface `N(C) ∩ (I ∪ S)`. Branches are
/// processed serially.
pub fn build_from_separators(
    g: &Graph,
    finder: &dyn SeparatorFinder,
    beta: &BigRational,
) -> Result<SeparatorDecomposition> {
    if beta <= &BigRational::zero() || beta >= &BigRational::one() {
        return Err(Error::input(format!("balance {} must lie in (0, 1)", beta)));
    }
    let mut bags = Vec::new();
    let mut bounds = Vec::new();
    let mut edges = Vec::new();
    let mut depth = 0;
    // (W, interface, parent node, cliques stacked above, level)
    let mut stack = vec![(g.vertices(), VertexSet::new(), None::<usize>, 0usize, 1usize)];
    while let Some((w, iface, parent, above, level)) = stack.pop() {
        let sep = finder.find(g, &w, beta)?;
        for c in &sep.cliques {
            if c.is_empty() || !c.is_subset(&w) {
                return Err(Error::contract(format!("separator clique {:?} is empty or leaves the subgraph", c.as_slice())));
            }
            if !g.is_clique(c) {
                return Err(Error::contract(format!("separator set {:?} is not a clique", c.as_slice())));
            }
        }
        let s = sep.union();
        let rest = w.difference(&s);
        let comps = g.components_within(&rest);
        if let Some(c) = comps.iter().find(|c| !fits(c.len(), w.len(), beta)) {
            return Err(Error::contract(format!(
                "separator leaves a component of {} of {} vertices, above balance {}",
                c.len(),
                w.len(),
                beta
            )));
        }
        let id = bags.len();
        let bag = iface.union(&s);
        bags.push(bag.clone());
        let stacked = above + sep.cliques.len();
        bounds.push(stacked);
        depth = depth.max(level);
        if let Some(p) = parent {
            edges.push((p, id));
        }
        if bags.len() > crate::decomposition::NODE_CAP {
            return Err(Error::resource("separator recursion nodes", crate::decomposition::NODE_CAP));
        }
        for c in comps.into_iter().rev() {
            let child_iface: VertexSet = bag
                .iter()
                .filter(|&x| g.neighbors(x).iter().any(|&y| c.contains(y)))
                .collect();
            stack.push((c, child_iface, Some(id), stacked, level + 1));
        }
    }
    let td = TreeDecomposition::new(bags, &edges)?.with_root(0)?;
    Ok(SeparatorDecomposition {
        td,
        bag_bounds: bounds,
        depth,
    })
}
