//! Dynamic program over a nice tree decomposition whose bags have
//! independence number at most `k`.
//!
//! Table `F[u, B]` holds feasible sets `F ⊆ V_u` with `F ∩ X_u = B` and
//! `tw(G[F]) < t`, compressed to one heaviest set per signature class. Keys
//! range over `B ⊆ X_u` with `|B| <= k t` and `tw(G[B]) < t`.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::ProblemSpec;
use crate::decomposition::{alpha_of_decomposition_with_cap, make_nice, validate_with_cap, NodeId, NodeKind, TreeDecomposition, Violation};
use crate::error::{Error, Result};
use crate::family::{compress, CompressOptions, FamilyEntry, Merge};
use crate::graph::{induced_subgraph, Graph, Vertex, VertexSet};
use crate::signature::{CanonMode, Signature};
use crate::treewidth::treewidth_less_than_within;
use crate::weight::Weight;

/// Independence-number cap used when checking the decomposition.
pub const SOLVER_ALPHA_CAP: usize = 64;

/// Deliberate defects for mutation testing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Faults {
    pub skip_join_tw_check: bool,
    pub skip_compress_weight: bool,
    /// Key families by the colour-refinement invariant and skip the slot
    /// bijection check.
    pub refinement_only_keys: bool,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Worker threads; 0 uses the global pool.
    pub threads: usize,
    /// Re-check feasibility, the introduce-node neighbourhood fact and the
    /// key bound on every entry.
    pub debug_checks: bool,
    pub use_key_filters: bool,
    pub log_merges: bool,
    pub dump_signatures: bool,
    pub faults: Faults,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            threads: 0,
            debug_checks: cfg!(debug_assertions),
            use_key_filters: false,
            log_merges: false,
            dump_signatures: false,
            faults: Faults::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub nodes: usize,
    pub ell: usize,
    pub max_family_size: usize,
    /// Distinct signature classes over all tables, boundary identities
    /// ignored.
    pub distinct_signatures: usize,
    pub entries_created: usize,
    pub merges: usize,
    pub structural_violations: usize,
    pub inexact_canonical_forms: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Solved,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub treewidth_below_t: bool,
    pub accepted: bool,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub set: VertexSet,
    pub weight: Weight,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct SignatureDump {
    pub node: NodeId,
    pub boundary: VertexSet,
    pub set: VertexSet,
    pub key: String,
    pub signature: Signature,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub problem: String,
    pub k: usize,
    pub solution: Option<Solution>,
    pub stats: Stats,
    pub merges: Vec<Merge>,
    pub violations: Vec<String>,
    pub signatures: Vec<SignatureDump>,
    pub wall_time: std::time::Duration,
}

impl Outcome {
    pub fn status(&self) -> Status {
        match self.solution {
            Some(_) => Status::Solved,
            None => Status::Infeasible,
        }
    }

    pub fn weight(&self) -> Option<&Weight> {
        self.solution.as_ref().map(|s| &s.weight)
    }

    /// Result object; vertices shifted by `offset` (1 for file formats),
    /// wall time only on request so that output is reproducible.
    pub fn to_json(&self, offset: usize, timing: bool) -> Value {
        let mut stats = serde_json::to_value(&self.stats).expect("plain struct");
        if timing {
            stats["wall_time"] = json!(format!("{:.6}", self.wall_time.as_secs_f64()));
        }
        let (weight, vertices, certificate) = match &self.solution {
            Some(s) => (
                json!(s.weight.to_string()),
                json!(s.set.iter().map(|v| v + offset).collect::<Vec<_>>()),
                serde_json::to_value(&s.certificate).expect("plain struct"),
            ),
            None => (Value::Null, json!([]), Value::Null),
        };
        json!({
            "problem": self.problem,
            "status": self.status(),
            "k": self.k,
            "weight": weight,
            "vertices": vertices,
            "certificate": certificate,
            "stats": stats,
        })
    }
}

type Table = BTreeMap<VertexSet, Vec<FamilyEntry>>;

struct Run<'a> {
    g: &'a Graph,
    spec: &'a ProblemSpec,
    config: &'a SolverConfig,
    ell: usize,
    mode: CanonMode,
    compress_options: CompressOptions,
}

/// Per-key result of a node handler.
struct KeyResult {
    key: VertexSet,
    entries: Vec<FamilyEntry>,
    merges: Vec<Merge>,
    created: usize,
}

impl Run<'_> {
    fn t(&self) -> usize {
        self.spec.t()
    }

    fn keys(&self, bag: &VertexSet) -> Result<Vec<VertexSet>> {
        let mut out = Vec::new();
        for b in bag.subsets_up_to(self.ell) {
            if !treewidth_less_than_within(self.g, &b, self.t())? {
                continue;
            }
            if self.config.use_key_filters && !self.spec.key_filter(self.g, &b) {
                continue;
            }
            out.push(b);
        }
        Ok(out)
    }

    fn entry(&self, set: VertexSet, b: &VertexSet) -> Result<FamilyEntry> {
        FamilyEntry::new(self.spec, self.g, set, b.clone(), self.mode)
    }

    fn compress(&self, b: &VertexSet, family: Vec<FamilyEntry>) -> Result<(Vec<FamilyEntry>, Vec<Merge>)> {
        let mut merges = Vec::new();
        let log = if self.config.log_merges { Some(&mut merges) } else { None };
        let out = compress(b, family, self.compress_options, log)?;
        Ok((out, merges))
    }

    fn introduce(&self, bag: &VertexSet, v: Vertex, child: &Table) -> Result<Vec<KeyResult>> {
        let keys = self.keys(bag)?;
        keys.into_par_iter()
            .map(|b| {
                if !b.contains(v) {
                    let entries = child
                        .get(&b)
                        .ok_or_else(|| Error::internal(format!("introduce: child table lacks key {:?}", b.as_slice())))?
                        .clone();
                    return Ok(KeyResult { key: b, entries, merges: vec![], created: 0 });
                }
                let below = b.without(v);
                let source = child
                    .get(&below)
                    .ok_or_else(|| Error::internal(format!("introduce: child table lacks key {:?}", below.as_slice())))?;
                let mut entries = Vec::new();
                for e in source {
                    let grown = e.set.with(v);
                    if treewidth_less_than_within(self.g, &grown, self.t())? {
                        entries.push(self.entry(grown, &b)?);
                    }
                }
                let created = entries.len();
                Ok(KeyResult { key: b, entries, merges: vec![], created })
            })
            .collect()
    }

    fn forget(&self, bag: &VertexSet, v: Vertex, child: &Table) -> Result<Vec<KeyResult>> {
        let keys = self.keys(bag)?;
        keys.into_par_iter()
            .map(|b| {
                let mut family = child
                    .get(&b)
                    .ok_or_else(|| Error::internal(format!("forget: child table lacks key {:?}", b.as_slice())))?
                    .clone();
                let mut created = 0;
                // B ∪ {v} is absent exactly when it was pruned (too large or tw >= t)
                if let Some(with_v) = child.get(&b.with(v)) {
                    for e in with_v {
                        family.push(self.entry(e.set.clone(), &b)?);
                        created += 1;
                    }
                }
                let (entries, merges) = self.compress(&b, family)?;
                Ok(KeyResult { key: b, entries, merges, created })
            })
            .collect()
    }

    fn join(&self, bag: &VertexSet, left: &Table, right: &Table) -> Result<Vec<KeyResult>> {
        let keys = self.keys(bag)?;
        keys.into_par_iter()
            .map(|b| {
                let missing = || Error::internal(format!("join: child table lacks key {:?}", b.as_slice()));
                let l = left.get(&b).ok_or_else(missing)?;
                let r = right.get(&b).ok_or_else(missing)?;
                let mut family = Vec::new();
                for x in l {
                    for y in r {
                        let union = x.set.union(&y.set);
                        if self.config.faults.skip_join_tw_check
                            || treewidth_less_than_within(self.g, &union, self.t())?
                        {
                            family.push(self.entry(union, &b)?);
                        }
                    }
                }
                let created = family.len();
                let (entries, merges) = self.compress(&b, family)?;
                Ok(KeyResult { key: b, entries, merges, created })
            })
            .collect()
    }

    fn check(&self, u: NodeId, bag: &VertexSet, kind: NodeKind, table: &Table) -> Result<()> {
        for (b, entries) in table {
            if b.len() > self.ell {
                return Err(Error::internal(format!("node {}: key {:?} exceeds l = {}", u, b.as_slice(), self.ell)));
            }
            for e in entries {
                if e.set.intersection(bag) != *b || !treewidth_less_than_within(self.g, &e.set, self.t())? {
                    return Err(Error::internal(format!("node {}: {:?} is not feasible for key {:?}", u, e.set.as_slice(), b.as_slice())));
                }
                if let NodeKind::Introduce(v) = kind {
                    if e.set.contains(v) && g_neighbors_in(self.g, v, &e.set).iter().any(|&x| !bag.contains(x)) {
                        return Err(Error::internal(format!(
                            "node {}: introduced vertex {} has a neighbour in {:?} outside the bag",
                            u,
                            v,
                            e.set.as_slice()
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn g_neighbors_in(g: &Graph, v: Vertex, s: &VertexSet) -> Vec<Vertex> {
    g.neighbors(v).iter().copied().filter(|&u| s.contains(u)).collect()
}

/// Boundary ids removed from a canonical key.
fn shape_key(key: &[u8], nb: usize) -> Vec<u8> {
    let mut out = key[..5].to_vec();
    out.extend_from_slice(&key[5 + 4 * nb..]);
    out
}

/// Maximum-weight `F` with `tw(G[F]) < t` and `G[F] ⊨ ψ`.
///
/// `k` defaults to the decomposition's independence number; a smaller `k`
/// than the actual one is rejected.
pub fn solve(g: &Graph, td: &TreeDecomposition, spec: &ProblemSpec, k: Option<usize>, config: &SolverConfig) -> Result<Outcome> {
    let start = Instant::now();
    let k = checked_k(g, td, k)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::internal(format!("thread pool: {}", e)))?;
    let mut outcome = pool.install(|| run(g, td, spec, k, config))?;
    outcome.wall_time = start.elapsed();
    Ok(outcome)
}

/// [`solve`] on the current rayon pool, ignoring `config.threads`. For callers
/// that already parallelize over instances.
pub fn solve_in_current_pool(
    g: &Graph,
    td: &TreeDecomposition,
    spec: &ProblemSpec,
    k: Option<usize>,
    config: &SolverConfig,
) -> Result<Outcome> {
    let start = Instant::now();
    let k = checked_k(g, td, k)?;
    let mut outcome = run(g, td, spec, k, config)?;
    outcome.wall_time = start.elapsed();
    Ok(outcome)
}

/// Validates `td` and settles `k`.
fn checked_k(g: &Graph, td: &TreeDecomposition, k: Option<usize>) -> Result<usize> {
    let report = validate_with_cap(g, td, SOLVER_ALPHA_CAP);
    let structural: Vec<&Violation> = report
        .violations
        .iter()
        .filter(|v| !matches!(v, Violation::AlphaClaim { .. }))
        .collect();
    if !structural.is_empty() {
        return Err(Error::input(format!(
            "invalid tree decomposition: {}",
            serde_json::to_string(&structural).unwrap_or_default()
        )));
    }
    let alpha = alpha_of_decomposition_with_cap(g, td, SOLVER_ALPHA_CAP)?;
    match k {
        Some(k) if alpha > k => Err(Error::input(format!(
            "decomposition has independence number {} > k = {}",
            alpha, k
        ))),
        Some(k) => Ok(k),
        None => Ok(alpha),
    }
}

fn run(g: &Graph, td: &TreeDecomposition, spec: &ProblemSpec, k: usize, config: &SolverConfig) -> Result<Outcome> {
    let nice = make_nice(g, td)?;
    let rooted = nice.rooted()?;
    let ctx = Run {
        g,
        spec,
        config,
        ell: k * spec.t(),
        mode: if config.faults.refinement_only_keys { CanonMode::RefinementOnly } else { CanonMode::Exact },
        compress_options: CompressOptions {
            skip_weight_comparison: config.faults.skip_compress_weight,
            skip_bijection_check: config.faults.refinement_only_keys,
        },
    };
    let mut stats = Stats {
        nodes: nice.node_count(),
        ell: ctx.ell,
        ..Stats::default()
    };
    let mut shapes: BTreeSet<Vec<u8>> = BTreeSet::new();
    let mut merges = Vec::new();
    let mut violations = Vec::new();
    let mut dumps = Vec::new();
    let mut tables: Vec<Option<Table>> = vec![None; nice.node_count()];

    for u in rooted.postorder() {
        let bag = nice.bag(u);
        let kind = nice.kind(u).ok_or_else(|| Error::internal("nice decomposition without node kinds"))?;
        let mut take = |c: NodeId| tables[c].take().ok_or_else(|| Error::internal("child table missing"));
        let children = &rooted.children[u];
        let results = match kind {
            NodeKind::Leaf => {
                if !bag.is_empty() {
                    return Err(Error::contract(format!("leaf node {} has a nonempty bag", u)));
                }
                vec![KeyResult {
                    key: VertexSet::new(),
                    entries: vec![ctx.entry(VertexSet::new(), &VertexSet::new())?],
                    merges: vec![],
                    created: 1,
                }]
            }
            NodeKind::Introduce(v) => ctx.introduce(bag, v, &take(children[0])?)?,
            NodeKind::Forget(v) => ctx.forget(bag, v, &take(children[0])?)?,
            NodeKind::Join => {
                let left = take(children[0])?;
                let right = take(children[1])?;
                if nice.bag(children[0]) != bag || nice.bag(children[1]) != bag {
                    return Err(Error::input(format!("join node {} has children with different bags", u)));
                }
                ctx.join(bag, &left, &right)?
            }
        };
        let mut table = Table::new();
        for r in results {
            stats.entries_created += r.created;
            stats.merges += r.merges.len();
            stats.max_family_size = stats.max_family_size.max(r.entries.len());
            merges.extend(r.merges);
            for e in &r.entries {
                shapes.insert(shape_key(&e.canonical.key.0, r.key.len()));
                if !e.canonical.exact && !config.faults.refinement_only_keys {
                    stats.inexact_canonical_forms += 1;
                }
                if r.created > 0 {
                    let v = e.signature.shape.violations(ctx.ell, spec.t());
                    stats.structural_violations += v.len();
                    violations.extend(v.into_iter().map(|m| format!("node {}: {}", u, m)));
                }
                if config.dump_signatures {
                    dumps.push(SignatureDump {
                        node: u,
                        boundary: r.key.clone(),
                        set: e.set.clone(),
                        key: e.canonical.key.0.iter().map(|b| format!("{:02x}", b)).collect(),
                        signature: (*e.signature).clone(),
                    });
                }
            }
            table.insert(r.key, r.entries);
        }
        if config.debug_checks {
            ctx.check(u, bag, kind, &table)?;
        }
        tables[u] = Some(table);
    }
    stats.distinct_signatures = shapes.len();

    let root_table = tables[rooted.preorder[0]].take().ok_or_else(|| Error::internal("root table missing"))?;
    let candidates = root_table
        .get(&VertexSet::new())
        .ok_or_else(|| Error::internal("root table lacks the empty key"))?;
    let mut best: Option<&FamilyEntry> = None;
    for e in candidates {
        let sub = induced_subgraph(g, &e.set)?;
        if !spec.accepts(&sub.graph) {
            continue;
        }
        if best.is_none_or(|b| e.weight > b.weight || (e.weight == b.weight && e.set < b.set)) {
            best = Some(e);
        }
    }
    let solution = match best {
        None => None,
        Some(e) => {
            let sub = induced_subgraph(g, &e.set)?;
            Some(Solution {
                set: e.set.clone(),
                weight: e.weight.clone(),
                certificate: Certificate {
                    treewidth_below_t: crate::treewidth::treewidth_less_than(&sub.graph, spec.t())?,
                    accepted: spec.accepts(&sub.graph),
                },
            })
        }
    };
    Ok(Outcome {
        problem: spec.name(),
        k,
        solution,
        stats,
        merges,
        violations,
        signatures: dumps,
        wall_time: std::time::Duration::ZERO,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(v: &[Vertex]) -> VertexSet {
        v.iter().copied().collect()
    }

    fn with_run<R>(g: &Graph, problem: &str, k: usize, f: impl FnOnce(&Run) -> R) -> R {
        let spec = ProblemSpec::parse(problem).unwrap();
        let config = SolverConfig::default();
        let run = Run {
            g,
            spec: &spec,
            config: &config,
            ell: k * spec.t(),
            mode: CanonMode::Exact,
            compress_options: CompressOptions::default(),
        };
        f(&run)
    }

    /// Child table over `bag`; keys not listed get empty families.
    fn table_over(run: &Run, bag: &[Vertex], items: &[(&[Vertex], &[&[Vertex]])]) -> Table {
        let mut t: Table = run.keys(&vs(bag)).unwrap().into_iter().map(|b| (b, vec![])).collect();
        for (b, sets) in items {
            let b = vs(b);
            let entries = sets.iter().map(|s| run.entry(vs(s), &b).unwrap()).collect();
            t.insert(b, entries);
        }
        t
    }

    fn table(run: &Run, items: &[(&[Vertex], &[&[Vertex]])]) -> Table {
        table_over(run, &[], items)
    }

    fn sets(results: &[KeyResult], key: &[Vertex]) -> Option<Vec<Vec<Vertex>>> {
        results
            .iter()
            .find(|r| r.key == vs(key))
            .map(|r| r.entries.iter().map(|e| e.set.as_slice().to_vec()).collect())
    }

    #[test]
    fn leaf_entry_is_empty_and_weightless() {
        let g = Graph::empty(1);
        with_run(&g, "mwis", 1, |run| {
            let e = run.entry(VertexSet::new(), &VertexSet::new()).unwrap();
            assert!(e.set.is_empty());
            assert_eq!(e.weight, Weight::zero());
        });
    }

    #[test]
    fn introduce_isolated_vertex() {
        let g = Graph::empty(1);
        with_run(&g, "mwis", 1, |run| {
            let child = table_over(run, &[], &[(&[], &[&[]])]);
            let out = run.introduce(&vs(&[0]), 0, &child).unwrap();
            assert_eq!(sets(&out, &[0]), Some(vec![vec![0]]));
            assert_eq!(sets(&out, &[]), Some(vec![vec![]]));
        });
    }

    #[test]
    fn introduce_prunes_keys_with_edges_for_mwis() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        with_run(&g, "mwis", 2, |run| {
            let child = table_over(run, &[0], &[(&[], &[&[]]), (&[0], &[&[0]])]);
            let out = run.introduce(&vs(&[0, 1]), 1, &child).unwrap();
            assert!(sets(&out, &[0, 1]).is_none());
            assert_eq!(sets(&out, &[1]), Some(vec![vec![1]]));
        });
    }

    #[test]
    fn introduce_rejects_closing_a_cycle() {
        // path 0-1-2 in the bag; 3 is adjacent to both ends
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 3), (2, 3)]).unwrap();
        with_run(&g, "induced-forest", 2, |run| {
            let child = table_over(run, &[0, 2], &[(&[0, 2], &[&[0, 1, 2]])]);
            let out = run.introduce(&vs(&[0, 2, 3]), 3, &child).unwrap();
            assert_eq!(sets(&out, &[0, 2, 3]), Some(vec![]));
        });
    }

    #[test]
    fn forget_merges_equal_signatures() {
        // {1} and {2} are both a lone vertex below an empty boundary
        let g = Graph::empty(3)
            .set_weights(vec![Weight::one(), Weight::one(), Weight::new(2, 1).unwrap()])
            .unwrap();
        with_run(&g, "mwis", 1, |run| {
            let child = table_over(run, &[2], &[(&[], &[&[1]]), (&[2], &[&[2]])]);
            let out = run.forget(&vs(&[]), 2, &child).unwrap();
            assert_eq!(sets(&out, &[]), Some(vec![vec![2]]));
            assert_eq!(out[0].created, 1);
        });
    }

    #[test]
    fn forget_keeps_finer_classes_apart() {
        // the empty set has no slots, {1} has one; they stay apart
        let g = Graph::empty(2);
        with_run(&g, "mwis", 2, |run| {
            let child = table_over(run, &[1], &[(&[], &[&[]]), (&[1], &[&[1]])]);
            let out = run.forget(&vs(&[]), 1, &child).unwrap();
            assert_eq!(sets(&out, &[]), Some(vec![vec![], vec![1]]));
        });
    }

    #[test]
    fn join_of_empty_families_is_empty() {
        let g = Graph::empty(1);
        with_run(&g, "mwis", 1, |run| {
            let left = table(run, &[(&[], &[])]);
            let right = table(run, &[(&[], &[&[]])]);
            let out = run.join(&vs(&[]), &left, &right).unwrap();
            assert_eq!(sets(&out, &[]), Some(vec![]));
            let out = run.join(&vs(&[]), &right, &left).unwrap();
            assert_eq!(sets(&out, &[]), Some(vec![]));
        });
    }

    #[test]
    fn join_keeps_distinct_classes() {
        // bag {0}; left adds a pendant 1, right adds a pendant path 2-3
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (2, 3)]).unwrap();
        with_run(&g, "induced-matching", 1, |run| {
            let left = table_over(run, &[0], &[(&[0], &[&[0], &[0, 1]])]);
            let right = table_over(run, &[0], &[(&[0], &[&[0]])]);
            let out = run.join(&vs(&[0]), &left, &right).unwrap();
            assert_eq!(sets(&out, &[0]).unwrap().len(), 2);
        });
    }

    #[test]
    fn join_compresses_symmetric_extensions() {
        // 0 is the bag; 1 and 2 are pendant on it, 2 heavier
        let g = Graph::from_edges(3, &[(0, 1), (0, 2)])
            .unwrap()
            .set_weights(vec![Weight::one(), Weight::one(), Weight::new(2, 1).unwrap()])
            .unwrap();
        with_run(&g, "induced-forest", 1, |run| {
            let left = table_over(run, &[0], &[(&[0], &[&[0, 1], &[0, 2]])]);
            let right = table_over(run, &[0], &[(&[0], &[&[0]])]);
            let out = run.join(&vs(&[0]), &left, &right).unwrap();
            assert_eq!(sets(&out, &[0]), Some(vec![vec![0, 2]]));
        });
    }
}
