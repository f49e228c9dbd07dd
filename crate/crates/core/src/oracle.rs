//! Independent ground truth: exhaustive solving, random-context equivalence
//! testing and the randomized cross-check suite.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{BoundariedGraph, ProblemSpec};
use crate::builders::{build_from_separators, exact_tree_alpha, GreedyFinder, IntervalFinder};
use crate::decomposition::TreeDecomposition;
use crate::error::{Error, Result};
use crate::family::Merge;
use crate::generate;
use crate::graph::{induced_subgraph, Graph, VertexSet};
use crate::solver::{Faults, SolverConfig};
use crate::treewidth::treewidth_less_than;
use crate::weight::Weight;

pub const BRUTE_FORCE_CAP: usize = 20;

/// `tw(G) < t` and `G ⊨ ψ`.
fn satisfies(spec: &ProblemSpec, g: &Graph) -> Result<bool> {
    Ok(treewidth_less_than(g, spec.t())? && spec.accepts(g))
}

/// Best set over all `2^n` subsets, ties to the lexicographically smallest.
pub fn brute_force_solve(g: &Graph, spec: &ProblemSpec) -> Result<Option<(VertexSet, Weight)>> {
    let n = g.n();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::resource("brute force vertices", BRUTE_FORCE_CAP));
    }
    let mut best: Option<(VertexSet, Weight)> = None;
    for mask in 0u32..(1u32 << n) {
        let set: VertexSet = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let w = g.weight_of(&set);
        if let Some((bs, bw)) = &best {
            if w < *bw || (w == *bw && set > *bs) {
                continue;
            }
        }
        let sub = induced_subgraph(g, &set)?;
        if satisfies(spec, &sub.graph)? {
            best = Some((set, w));
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    EquivalentSoFar {
        trials: usize,
    },
    Counterexample {
        trial: usize,
        /// Context vertices; the first `boundary` of them are glued to the
        /// boundary positions in order.
        context_vertices: usize,
        boundary: usize,
        context_edges: Vec<(usize, usize)>,
        left: bool,
        right: bool,
    },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::EquivalentSoFar { .. })
    }
}

/// Context for `trial`: boundary vertices `0..m` followed by up to
/// `context_size` interior vertices, with random interior edges and
/// boundary-interior attachments but no boundary-boundary edges. Resampled
/// until its treewidth is below `t`; trial 0 is the empty context.
fn sample_context(m: usize, t: usize, context_size: usize, seed: u64, trial: usize) -> Result<BoundariedGraph> {
    let empty = || BoundariedGraph::new(Graph::empty(m), (0..m).collect());
    if trial == 0 {
        return empty();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x2545_f491_4f6c_dd1d).wrapping_add(trial as u64));
    for _ in 0..64 {
        let r = rng.gen_range(0..=context_size);
        let p_inner = *[0.0, 0.15, 0.3, 0.5].choose(&mut rng).expect("nonempty");
        let p_attach = *[0.15, 0.3, 0.5].choose(&mut rng).expect("nonempty");
        let mut edges = Vec::new();
        for a in m..m + r {
            for b in a + 1..m + r {
                if rng.gen_bool(p_inner) {
                    edges.push((a, b));
                }
            }
            for b in 0..m {
                if rng.gen_bool(p_attach) {
                    edges.push((b, a));
                }
            }
        }
        let g = Graph::from_edges(m + r, &edges)?;
        if treewidth_less_than(&g, t)? {
            return BoundariedGraph::new(g, (0..m).collect());
        }
    }
    empty()
}

/// Glue random contexts onto both graphs along their boundaries and compare
/// `tw < t ∧ ψ` on the results. Trials run in parallel; the verdict reports
/// the lowest failing trial.
pub fn contextual_equivalence(
    spec: &ProblemSpec,
    g1: &BoundariedGraph,
    g2: &BoundariedGraph,
    trials: usize,
    context_size: usize,
    seed: u64,
) -> Result<Verdict> {
    let m = g1.boundary.len();
    if g2.boundary.len() != m {
        return Err(Error::input(format!(
            "boundary lengths differ: {} and {}",
            m,
            g2.boundary.len()
        )));
    }
    let matching: Vec<(usize, usize)> = (0..m).map(|i| (i, i)).collect();
    let outcomes: Vec<Option<Verdict>> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<Option<Verdict>> {
            let c = sample_context(m, spec.t(), context_size, seed, trial)?;
            let left = satisfies(spec, &g1.glue(&c, &matching)?.forget_all().graph)?;
            let right = satisfies(spec, &g2.glue(&c, &matching)?.forget_all().graph)?;
            Ok((left != right).then(|| Verdict::Counterexample {
                trial,
                context_vertices: c.graph.n(),
                boundary: m,
                context_edges: c.graph.edges().collect(),
                left,
                right,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(outcomes
        .into_iter()
        .flatten()
        .next()
        .unwrap_or(Verdict::EquivalentSoFar { trials }))
}

/// `(G[f], b)` with `b` in ascending order.
pub fn boundaried_piece(g: &Graph, f: &VertexSet, b: &VertexSet) -> Result<BoundariedGraph> {
    let sub = induced_subgraph(g, f)?;
    let boundary = b
        .iter()
        .map(|v| sub.local_of(v).ok_or_else(|| Error::input("boundary vertex outside the piece")))
        .collect::<Result<Vec<_>>>()?;
    BoundariedGraph::new(sub.graph, boundary)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Gnp20,
    Gnp40,
    Gnp60,
    Chordal,
    Interval,
}

pub const FAMILIES: [Family; 5] = [Family::Gnp20, Family::Gnp40, Family::Gnp60, Family::Chordal, Family::Interval];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builder {
    Exact,
    Separators,
}

/// A reproducible random instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub index: usize,
    pub seed: u64,
    pub family: Family,
    pub builder: Builder,
    pub graph: Graph,
    pub td: TreeDecomposition,
}

fn instance_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Instance `index` of the suite with base `seed`: family and builder cycle
/// with the index, `n` in `1..=max_n`, weights random rationals.
pub fn make_instance(seed: u64, index: usize, max_n: usize) -> Result<Instance> {
    let s = instance_seed(seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    let family = FAMILIES[index % FAMILIES.len()];
    let builder = if (index / FAMILIES.len()).is_multiple_of(2) { Builder::Exact } else { Builder::Separators };
    let n = rng.gen_range(1..=max_n.max(1));
    let beta = BigRational::new(BigInt::from(2), BigInt::from(3));
    let (graph, intervals) = match family {
        Family::Gnp20 => (generate::gnp(n, 0.2, s), None),
        Family::Gnp40 => (generate::gnp(n, 0.4, s), None),
        Family::Gnp60 => (generate::gnp(n, 0.6, s), None),
        Family::Chordal => (generate::chordal(n, s), None),
        Family::Interval => {
            let (g, iv) = generate::interval(n, 4, s);
            (g, Some(iv))
        }
    };
    let graph = generate::with_random_weights(graph, s ^ 1)?;
    let td = match builder {
        Builder::Exact => exact_tree_alpha(&graph)?.1,
        Builder::Separators => match intervals {
            Some(iv) => build_from_separators(&graph, &IntervalFinder { intervals: iv }, &beta)?.td,
            None => build_from_separators(&graph, &GreedyFinder, &beta)?.td,
        },
    };
    Ok(Instance {
        index,
        seed: s,
        family,
        builder,
        graph,
        td,
    })
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub instances: usize,
    pub max_n: usize,
    pub problems: Vec<String>,
    /// Merged pairs re-tested with random contexts.
    pub merged_samples: usize,
    pub trials: usize,
    pub context_size: usize,
    pub faults: Faults,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 1,
            instances: 100,
            max_n: 12,
            problems: all_problems(),
            merged_samples: 200,
            trials: 200,
            context_size: 8,
            faults: Faults::default(),
        }
    }
}

/// The four plugins, each also with the parity modifier.
pub fn all_problems() -> Vec<String> {
    let mut out = Vec::new();
    for p in crate::algebra::PLUGIN_NAMES {
        out.push(p.to_string());
        out.push(format!("{}@mod2=0", p));
    }
    out
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteSummary {
    pub seed: u64,
    pub instances: usize,
    pub solves: usize,
    pub mismatches: usize,
    pub errors: usize,
    pub merged_pairs: usize,
    pub merged_pairs_tested: usize,
    pub disagreements: usize,
    pub structural_violations: usize,
    pub inexact_canonical_forms: usize,
    pub max_family_size: usize,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub lines: Vec<Value>,
    pub summary: SuiteSummary,
}

impl SuiteReport {
    /// JSON lines: one per solve, one per failed context probe, then the
    /// summary.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            out.push_str(&l.to_string());
            out.push('\n');
        }
        out.push_str(&json!({ "summary": self.summary }).to_string());
        out.push('\n');
        out
    }
}

struct MergedPair {
    instance: usize,
    problem: String,
    merge: Merge,
}

/// Solver against brute force on random instances, then random-context
/// checks of sampled merged pairs.
pub fn cross_check_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let specs = config
        .problems
        .iter()
        .map(|p| ProblemSpec::parse(p))
        .collect::<Result<Vec<_>>>()?;
    let instances = (0..config.instances)
        .into_par_iter()
        .map(|i| make_instance(config.seed, i, config.max_n))
        .collect::<Result<Vec<_>>>()?;
    let solver_config = SolverConfig {
        threads: 1,
        debug_checks: false,
        log_merges: true,
        faults: config.faults,
        ..SolverConfig::default()
    };
    let jobs: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..specs.len()).map(move |p| (i, p)))
        .collect();
    struct JobResult {
        line: Value,
        ok: bool,
        error: bool,
        merges: Vec<MergedPair>,
        structural: usize,
        inexact: usize,
        max_family: usize,
    }
    let results: Vec<JobResult> = jobs
        .par_iter()
        .map(|&(i, p)| {
            let inst = &instances[i];
            let spec = &specs[p];
            let expected = brute_force_solve(&inst.graph, spec);
            let got = crate::solver::solve_in_current_pool(&inst.graph, &inst.td, spec, None, &solver_config);
            let expected_w = expected.as_ref().ok().map(|e| e.as_ref().map(|(_, w)| w.to_string()));
            let mut line = json!({
                "instance": i,
                "seed": inst.seed,
                "family": inst.family,
                "builder": inst.builder,
                "n": inst.graph.n(),
                "m": inst.graph.edge_count(),
                "problem": spec.name(),
                "oracle_weight": expected_w,
            });
            match got {
                Ok(outcome) => {
                    let w = outcome.weight().map(|w| w.to_string());
                    let ok = expected_w.as_ref() == Some(&w);
                    line["k"] = json!(outcome.k);
                    line["solver_weight"] = json!(w);
                    line["ok"] = json!(ok);
                    JobResult {
                        line,
                        ok,
                        error: false,
                        structural: outcome.stats.structural_violations,
                        inexact: outcome.stats.inexact_canonical_forms,
                        max_family: outcome.stats.max_family_size,
                        merges: outcome
                            .merges
                            .into_iter()
                            .map(|merge| MergedPair {
                                instance: i,
                                problem: spec.name(),
                                merge,
                            })
                            .collect(),
                    }
                }
                Err(e) => {
                    line["ok"] = json!(false);
                    line["error"] = json!(e.to_string());
                    JobResult {
                        line,
                        ok: false,
                        error: true,
                        merges: vec![],
                        structural: 0,
                        inexact: 0,
                        max_family: 0,
                    }
                }
            }
        })
        .collect();

    let mut summary = SuiteSummary {
        seed: config.seed,
        instances: instances.len(),
        solves: results.len(),
        ..SuiteSummary::default()
    };
    let mut lines = Vec::new();
    let mut merged = Vec::new();
    for r in results {
        summary.mismatches += (!r.ok) as usize;
        summary.errors += r.error as usize;
        summary.structural_violations += r.structural;
        summary.inexact_canonical_forms += r.inexact;
        summary.max_family_size = summary.max_family_size.max(r.max_family);
        merged.extend(r.merges);
        lines.push(r.line);
    }
    summary.merged_pairs = merged.len();

    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(config.seed, usize::MAX));
    let sample: Vec<&MergedPair> = merged.choose_multiple(&mut rng, config.merged_samples).collect();
    let probes: Vec<Option<Value>> = sample
        .par_iter()
        .enumerate()
        .map(|(j, pair)| -> Result<Option<Value>> {
            let g = &instances[pair.instance].graph;
            let spec = ProblemSpec::parse(&pair.problem)?;
            let a = boundaried_piece(g, &pair.merge.kept, &pair.merge.boundary)?;
            let b = boundaried_piece(g, &pair.merge.dropped, &pair.merge.boundary)?;
            let verdict = contextual_equivalence(&spec, &a, &b, config.trials, config.context_size, instance_seed(config.seed, j))?;
            Ok((!verdict.is_equivalent()).then(|| {
                json!({
                    "instance": pair.instance,
                    "problem": pair.problem,
                    "merge": pair.merge,
                    "counterexample": verdict,
                })
            }))
        })
        .collect::<Result<_>>()?;
    summary.merged_pairs_tested = sample.len();
    for p in probes.into_iter().flatten() {
        summary.disagreements += 1;
        lines.push(p);
    }
    summary.pass = summary.mismatches == 0 && summary.disagreements == 0 && summary.structural_violations == 0;
    Ok(SuiteReport { lines, summary })
}
