//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treealpha::algebra::ProblemSpec;
use treealpha::bench::{loglog_slope, plateau, run_bench, BenchConfig};
use treealpha::builders::{build_from_separators, clique_tree_chordal, Interval, IntervalFinder};
use treealpha::decomposition::alpha_of_decomposition_with_cap;
use treealpha::family::{compress, CompressOptions, FamilyEntry};
use treealpha::oracle::{all_problems, cross_check_suite, make_instance, SuiteConfig, SuiteSummary};
use treealpha::signature::CanonMode;
use treealpha::solver::Faults;
use treealpha::treewidth::treewidth_less_than;
use treealpha::{generate, induced_subgraph, io, Graph, VertexSet, Weight};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn suite(faults: Faults) -> (SuiteSummary, Duration) {
    let config = SuiteConfig {
        seed: 2024,
        instances: 500,
        max_n: 12,
        problems: all_problems(),
        merged_samples: 200,
        trials: 200,
        context_size: 8,
        faults,
    };
    let start = Instant::now();
    let report = cross_check_suite(&config).expect("suite runs");
    (report.summary, start.elapsed())
}

fn oracle_equivalence(s: &SuiteSummary, elapsed: Duration) -> Outcome {
    let expected = s.instances * all_problems().len();
    outcome(
        s.instances >= 500 && s.solves == expected && s.mismatches == 0 && s.errors == 0 && elapsed < Duration::from_secs(600),
        format!(
            "{} instances x {} problems, {} solves, {} mismatches, {} errors, {:.1}s",
            s.instances,
            all_problems().len(),
            s.solves,
            s.mismatches,
            s.errors,
            elapsed.as_secs_f64()
        ),
    )
}

fn signature_soundness(s: &SuiteSummary) -> Outcome {
    outcome(
        s.merged_pairs_tested >= 200 && s.disagreements == 0,
        format!(
            "{} merged pairs logged, {} re-tested with 200 contexts of <= 8 vertices, {} disagreements",
            s.merged_pairs, s.merged_pairs_tested, s.disagreements
        ),
    )
}

fn structural_bounds(s: &SuiteSummary) -> Outcome {
    outcome(
        s.structural_violations == 0,
        format!("{} violations, largest family {}", s.structural_violations, s.max_family_size),
    )
}

/// Up to 64 feasible sets meeting `bag` exactly in `b`.
fn small_family(spec: &ProblemSpec, g: &Graph, bag: &VertexSet, b: &VertexSet, rng: &mut ChaCha8Rng) -> Vec<FamilyEntry> {
    let outside: Vec<usize> = g.vertices().difference(bag).into_vec();
    let mut masks: Vec<u32> = (0..1u32 << outside.len()).collect();
    masks.shuffle(rng);
    let mut out = Vec::new();
    for mask in masks {
        let set = outside
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .fold(b.clone(), |acc, (_, &v)| acc.with(v));
        if treewidth_less_than(&induced_subgraph(g, &set).unwrap().graph, spec.t()).unwrap() {
            out.push(FamilyEntry::new(spec, g, set, b.clone(), CanonMode::Exact).unwrap());
            if out.len() == 64 {
                break;
            }
        }
    }
    out
}

fn compression_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let problems = all_problems();
    let (mut families, mut failures, mut entries) = (0, 0, 0);
    for round in 0..400 {
        let spec = ProblemSpec::parse(&problems[round % problems.len()]).unwrap();
        let n = rng.gen_range(3..=10);
        let g = generate::with_random_weights(generate::gnp(n, [0.2, 0.4, 0.6][round % 3], round as u64), round as u64).unwrap();
        let bag: VertexSet = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
        for b in bag.subsets_up_to(2 * spec.t()) {
            if !treewidth_less_than(&induced_subgraph(&g, &b).unwrap().graph, spec.t()).unwrap() {
                continue;
            }
            let input = small_family(&spec, &g, &bag, &b, &mut rng);
            families += 1;
            entries += input.len();
            let out = compress(&b, input.clone(), CompressOptions::default(), None).unwrap();
            let mut best: BTreeMap<Vec<u8>, Weight> = BTreeMap::new();
            for e in &input {
                let w = best.entry(e.canonical.key.0.clone()).or_insert_with(|| e.weight.clone());
                if e.weight > *w {
                    *w = e.weight.clone();
                }
            }
            let subset = out.iter().all(|e| input.iter().any(|x| x.set == e.set));
            let dominance = out.len() == best.len() && out.iter().all(|e| best[&e.canonical.key.0] == e.weight);
            let again = compress(&b, out.clone(), CompressOptions::default(), None).unwrap();
            let idempotent = again.len() == out.len() && again.iter().zip(&out).all(|(x, y)| x.set == y.set && x.weight == y.weight);
            if !(subset && dominance && idempotent && out.len() <= input.len()) {
                failures += 1;
            }
        }
    }
    outcome(
        failures == 0 && families >= 500,
        format!("{} families ({} entries, each <= 64, n <= 10): {} failed", families, entries, failures),
    )
}

fn chordal_pipeline() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut bad = Vec::new();
    let mut largest = 0;
    for i in 0..100 {
        let n = rng.gen_range(10..=200);
        largest = largest.max(n);
        let g = generate::chordal(n, 1000 + i);
        let ok = clique_tree_chordal(&g)
            .and_then(|td| alpha_of_decomposition_with_cap(&g, &td, 256))
            .map(|a| a == 1)
            .unwrap_or(false);
        if !ok {
            bad.push(i);
        }
    }
    outcome(bad.is_empty(), format!("100 graphs up to n = {}, alpha != 1 on {:?}", largest, bad))
}

/// Independence number of intervals by earliest right end.
fn interval_alpha(intervals: &[Interval], members: &VertexSet) -> usize {
    let mut chosen: Vec<&Interval> = members.iter().map(|v| &intervals[v]).collect();
    chosen.sort_by(|a, b| a.1.cmp(&b.1));
    let mut count = 0;
    let mut last: Option<&BigRational> = None;
    for (lo, hi) in chosen {
        if last.is_none_or(|l| lo > l) {
            count += 1;
            last = Some(hi);
        }
    }
    count
}

fn separator_builder() -> Outcome {
    let beta = BigRational::new(2.into(), 3.into());
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let (mut failures, mut slowest, mut worst_ratio) = (Vec::new(), Duration::ZERO, String::new());
    let mut worst = 0.0f64;
    for i in 0..50 {
        let n = rng.gen_range(100..=1000);
        let span = rng.gen_range(2..=(n as u64 / 10).max(3));
        let iv = generate::intervals(n, span, 500 + i);
        let g = treealpha::builders::interval_graph(&iv).unwrap();
        let start = Instant::now();
        let built = build_from_separators(&g, &IntervalFinder { intervals: iv.clone() }, &beta);
        let took = start.elapsed();
        slowest = slowest.max(took);
        let built = match built {
            Ok(b) => b,
            Err(e) => {
                failures.push(format!("#{} failed: {}", i, e));
                continue;
            }
        };
        let alphas: Vec<usize> = built.td.bags().iter().map(|bag| interval_alpha(&iv, bag)).collect();
        let alpha = alphas.iter().copied().max().unwrap_or(0);
        let limit = ((n as f64).ln() / 1.5f64.ln()).ceil() as usize + 1;
        let bounds_ok = alphas.iter().zip(&built.bag_bounds).all(|(a, b)| b >= a);
        if !bounds_ok || alpha > limit || took >= Duration::from_secs(5) {
            failures.push(format!("#{} n={} alpha={} limit={} bounds_ok={} {:?}", i, n, alpha, limit, bounds_ok, took));
        }
        let ratio = alpha as f64 / limit as f64;
        if ratio > worst {
            worst = ratio;
            worst_ratio = format!("alpha {} of limit {} at n = {}", alpha, limit, n);
        }
    }
    outcome(
        failures.is_empty(),
        format!("50 graphs, n <= 1000: slowest build {:.2}s, tightest {}; failures {:?}", slowest.as_secs_f64(), worst_ratio, failures),
    )
}

fn scaling_probe() -> Outcome {
    let config = BenchConfig {
        ns: (10..=40).step_by(2).collect(),
        ks: vec![1, 2],
        ..BenchConfig::default()
    };
    let rows = run_bench(&config).expect("bench runs");
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [1, 2] {
        let p = plateau(&rows, k).expect("rows for k");
        pass &= p.holds;
        parts.push(format!(
            "k={}: slope {:.2}, family max mid {} last {}",
            k,
            loglog_slope(&rows, k).unwrap_or(f64::NAN),
            p.mid_quartiles_max,
            p.last_quartile_max
        ));
    }
    outcome(pass, parts.join("; "))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let exe = env!("CARGO_BIN_EXE_treealpha");
    let problems = all_problems();
    let mut differing = Vec::new();
    for i in 0..50 {
        let inst = make_instance(808, i, 12).unwrap();
        let g = generate::with_random_weights(inst.graph.clone(), i as u64).unwrap();
        let write = |name: &str, text: String| {
            let p = dir.path().join(format!("{}{}", i, name));
            std::fs::write(&p, text).unwrap();
            p
        };
        let gr = write(".gr", io::write_gr(&g, &[]));
        let td = write(".td", io::write_td(&inst.td, g.n()));
        let w = write(".w", io::write_weights(&g));
        let run = |threads: &str| {
            let args: Vec<&str> = vec![
                "solve",
                "--graph",
                path_str(&gr),
                "--td",
                path_str(&td),
                "--weights",
                path_str(&w),
                "--problem",
                &problems[i % problems.len()],
                "--threads",
                threads,
            ];
            Command::new(exe).args(&args).output().unwrap()
        };
        let (one, eight) = (run("1"), run("8"));
        let ok_code = matches!(one.status.code(), Some(0) | Some(2));
        if !ok_code || one.stdout != eight.stdout || one.status.code() != eight.status.code() {
            differing.push(i);
        }
    }
    outcome(differing.is_empty(), format!("50 instances, threads 1 vs 8, differing or failing: {:?}", differing))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn mutation(name: &str, faults: Faults) -> Outcome {
    let (s, _) = suite(faults);
    outcome(
        !s.pass,
        format!(
            "{}: {} mismatches, {} errors, {} disagreements",
            name, s.mismatches, s.errors, s.disagreements
        ),
    )
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut report = |name: &'static str, o: Outcome| {
        println!("{} {}: {}", if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
        results.push((name, o));
    };

    let (summary, elapsed) = suite(Faults::default());
    report("oracle-equivalence", oracle_equivalence(&summary, elapsed));
    report("signature-soundness", signature_soundness(&summary));
    report("structural-bounds", structural_bounds(&summary));
    report("compression-properties", compression_properties());
    report("chordal-pipeline", chordal_pipeline());
    report("separator-builder", separator_builder());
    report("scaling-plateau", scaling_probe());
    report("determinism", determinism());
    report(
        "mutation-join-tw-check",
        mutation("join without treewidth check", Faults { skip_join_tw_check: true, ..Faults::default() }),
    );
    report(
        "mutation-compress-weight",
        mutation("compress without weight comparison", Faults { skip_compress_weight: true, ..Faults::default() }),
    );
    report(
        "mutation-canonical-bijection",
        mutation("keys without bijection validation", Faults { refinement_only_keys: true, ..Faults::default() }),
    );

    let failed: Vec<&str> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
    } else {
        println!("acceptance: failed {:?}", failed);
        std::process::exit(1);
    }
}
