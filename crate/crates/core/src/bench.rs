//! Scaling probe: solve time and family sizes against `n` for fixed `k`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::algebra::ProblemSpec;
use crate::builders::clique_tree_chordal;
use crate::error::{Error, Result};
use crate::generate;
use crate::solver::{solve, SolverConfig};

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub ns: Vec<usize>,
    /// 1: random chordal graphs with clique trees; 2: the same minus a random
    /// matching, on the clique tree of the chordal graph.
    pub ks: Vec<usize>,
    pub problem: String,
    pub seed: u64,
    /// Instances per `(n, k)`.
    pub repeats: usize,
    pub threads: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            ns: (10..=40).step_by(2).collect(),
            ks: vec![1, 2],
            problem: "induced-forest".into(),
            seed: 1,
            repeats: 3,
            threads: 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub problem: String,
    /// Mean seconds per instance.
    pub wall_time: f64,
    pub max_family_size: usize,
    pub distinct_signatures: usize,
}

pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    let spec = ProblemSpec::parse(&config.problem)?;
    let solver = SolverConfig {
        threads: config.threads,
        debug_checks: false,
        ..SolverConfig::default()
    };
    let mut rows = Vec::new();
    for &k in &config.ks {
        for &n in &config.ns {
            let mut total = 0.0;
            let mut max_family = 0;
            let mut distinct = 0;
            for r in 0..config.repeats.max(1) {
                let seed = config.seed.wrapping_add((n * 1000 + r) as u64);
                let (g, td) = match k {
                    1 => {
                        let g = generate::chordal(n, seed);
                        let td = clique_tree_chordal(&g)?;
                        (g, td)
                    }
                    2 => generate::chordal_minus_matching(n, seed),
                    _ => return Err(Error::input(format!("bench supports k in {{1, 2}}, got {}", k))),
                };
                let g = generate::with_random_weights(g, seed)?;
                let out = solve(&g, &td, &spec, Some(k), &solver)?;
                total += out.wall_time.as_secs_f64();
                max_family = max_family.max(out.stats.max_family_size);
                distinct = distinct.max(out.stats.distinct_signatures);
            }
            rows.push(BenchRow {
                n,
                k,
                t: spec.t(),
                problem: spec.name(),
                wall_time: total / config.repeats.max(1) as f64,
                max_family_size: max_family,
                distinct_signatures: distinct,
            });
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("n,k,t,problem,wall_time,max_family_size,distinct_signatures\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6},{},{}",
            r.n, r.k, r.t, r.problem, r.wall_time, r.max_family_size, r.distinct_signatures
        );
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Plateau {
    pub k: usize,
    pub mid_quartiles_max: usize,
    pub last_quartile_max: usize,
    pub holds: bool,
}

/// Rows of one `k` sorted by `n`: the largest family in the last quarter may
/// be at most twice the largest in the middle half.
pub fn plateau(rows: &[BenchRow], k: usize) -> Option<Plateau> {
    let mut sel: Vec<&BenchRow> = rows.iter().filter(|r| r.k == k).collect();
    if sel.len() < 4 {
        return None;
    }
    sel.sort_by_key(|r| r.n);
    let q = sel.len() / 4;
    let mid = sel[q..sel.len() - q].iter().map(|r| r.max_family_size).max()?;
    let last = sel[sel.len() - q..].iter().map(|r| r.max_family_size).max()?;
    Some(Plateau {
        k,
        mid_quartiles_max: mid,
        last_quartile_max: last,
        holds: last <= 2 * mid,
    })
}

/// Least-squares slope of `ln(wall_time)` against `ln(n)`.
pub fn loglog_slope(rows: &[BenchRow], k: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.k == k && r.wall_time > 0.0 && r.n > 0)
        .map(|r| ((r.n as f64).ln(), r.wall_time.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
