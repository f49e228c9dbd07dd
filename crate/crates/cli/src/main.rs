//! `treealpha`: solve, decompose, validate, generate, cross-check and bench.
//!
//! Exit codes: 0 success (solved / valid / suite passed), 2 negative answer
//! (infeasible / invalid / suite failed), 1 usage or input error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::json;

use treealpha::algebra::ProblemSpec;
use treealpha::bench::{loglog_slope, plateau, run_bench, to_csv, BenchConfig};
use treealpha::builders::{
    build_from_separators, clique_tree_chordal, exact_tree_alpha, interval_graph, GreedyFinder, IntervalFinder,
    EXACT_TREE_ALPHA_CAP,
};
use treealpha::decomposition::{alpha_of_decomposition_with_cap, validate_with_cap, TreeDecomposition};
use treealpha::io;
use treealpha::oracle::{all_problems, cross_check_suite, SuiteConfig};
use treealpha::solver::{solve, SolverConfig, Status, SOLVER_ALPHA_CAP};
use treealpha::{generate, Error, Graph, Result};

#[derive(Parser)]
#[command(name = "treealpha", version, about = "Maximum-weight induced subgraphs of bounded treewidth over decompositions of bounded independence number")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem on a graph with a given or constructed decomposition.
    Solve(SolveArgs),
    /// Check a decomposition and report width and independence number.
    Validate(ValidateArgs),
    /// Build a decomposition and write it as .td.
    Decompose(DecomposeArgs),
    /// Generate a graph in .gr format.
    Gen(GenArgs),
    /// Compare the solver against brute force on random instances.
    Oracle(OracleArgs),
    /// Time the solver over growing n and print CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BuilderName {
    /// exact for n <= 12, clique tree for chordal graphs, greedy separators otherwise
    Auto,
    Exact,
    CliqueTree,
    GreedySeparators,
    IntervalSeparators,
}

#[derive(Args)]
struct BuildOpts {
    /// Decomposition builder.
    #[arg(long, value_enum, default_value = "auto")]
    builder: BuilderName,
    /// Interval model (`<lo> <hi>` per vertex) for interval-separators.
    #[arg(long)]
    intervals: Option<PathBuf>,
    /// Separator balance.
    #[arg(long, default_value = "2/3")]
    beta: String,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    td: Option<PathBuf>,
    #[command(flatten)]
    build: BuildOpts,
    /// mwis, induced-forest, induced-linear-forest or induced-matching, optionally with @mod<p>=<r>.
    #[arg(long)]
    problem: String,
    /// Bound on the decomposition's independence number (default: computed).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Also write the result JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Include wall time in the stats (output is then not reproducible).
    #[arg(long)]
    timing: bool,
    /// Write every stored signature as JSON lines to this file.
    #[arg(long)]
    dump_signatures: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    td: PathBuf,
    /// Largest bag whose independence number is computed.
    #[arg(long, default_value_t = 64)]
    alpha_cap: usize,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    build: BuildOpts,
    /// Output .td file (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GenFamily {
    Gnp,
    Chordal,
    Interval,
    Grid,
    Cycle,
    Path,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    family: GenFamily,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Edge probability for gnp.
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    /// Grid rows (columns = n / rows).
    #[arg(long)]
    rows: Option<usize>,
    /// Longest interval length for interval graphs.
    #[arg(long, default_value_t = 4)]
    span: u64,
    /// Output .gr file (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Interval model output for interval graphs (default: <out>.intervals).
    #[arg(long)]
    intervals_out: Option<PathBuf>,
    /// Also write random rational weights to this file.
    #[arg(long)]
    weights_out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    instances: usize,
    #[arg(long, default_value_t = 12)]
    max_n: usize,
    /// Problems to check (default: every plugin with and without @mod2=0).
    #[arg(long, value_delimiter = ',')]
    problems: Vec<String>,
    /// Merged pairs re-tested against random contexts.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 8)]
    context_size: usize,
    /// JSON lines output (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Values of n, comma separated, or a range `lo..hi[:step]`.
    #[arg(long, default_value = "10..40:2")]
    ns: String,
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    ks: Vec<usize>,
    #[arg(long, default_value = "induced-forest")]
    problem: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// CSV output (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn read_graph(path: &Path, weights: Option<&Path>) -> Result<Graph> {
    let g = io::parse_gr(&io::read_to_string(path)?, &display(path))?;
    match weights {
        None => Ok(g),
        Some(w) => {
            let ws = io::parse_weights(&io::read_to_string(w)?, &display(w), g.n())?;
            g.set_weights(ws)
        }
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::input(format!("{}: {}", p.display(), e))),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn parse_beta(s: &str) -> Result<BigRational> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|_| Error::input(format!("invalid balance `{}`", s)))
}

struct Built {
    td: TreeDecomposition,
    builder: &'static str,
    depth: Option<usize>,
    max_bag_bound: Option<usize>,
}

fn build(g: &Graph, opts: &BuildOpts) -> Result<Built> {
    let beta = parse_beta(&opts.beta)?;
    let choice = match opts.builder {
        BuilderName::Auto if g.n() <= EXACT_TREE_ALPHA_CAP => BuilderName::Exact,
        BuilderName::Auto if opts.intervals.is_some() => BuilderName::IntervalSeparators,
        BuilderName::Auto => match clique_tree_chordal(g) {
            Ok(td) => {
                return Ok(Built {
                    td,
                    builder: "clique-tree",
                    depth: None,
                    max_bag_bound: None,
                })
            }
            Err(_) => BuilderName::GreedySeparators,
        },
        other => other,
    };
    let simple = |td, builder| Built {
        td,
        builder,
        depth: None,
        max_bag_bound: None,
    };
    match choice {
        BuilderName::Exact => Ok(simple(exact_tree_alpha(g)?.1, "exact")),
        BuilderName::CliqueTree => Ok(simple(clique_tree_chordal(g)?, "clique-tree")),
        BuilderName::GreedySeparators | BuilderName::IntervalSeparators => {
            let built = if choice == BuilderName::GreedySeparators {
                build_from_separators(g, &GreedyFinder, &beta)?
            } else {
                let path = opts
                    .intervals
                    .as_ref()
                    .ok_or_else(|| Error::input("interval-separators needs --intervals"))?;
                let iv = io::parse_intervals(&io::read_to_string(path)?, &display(path))?;
                if interval_graph(&iv)? != Graph::from_edges(g.n(), &g.edges().collect::<Vec<_>>())? {
                    return Err(Error::input("the interval model does not describe this graph"));
                }
                build_from_separators(g, &IntervalFinder { intervals: iv }, &beta)?
            };
            Ok(Built {
                td: built.td,
                builder: if choice == BuilderName::GreedySeparators { "greedy-separators" } else { "interval-separators" },
                depth: Some(built.depth),
                max_bag_bound: built.bag_bounds.iter().copied().max(),
            })
        }
        BuilderName::Auto => unreachable!("resolved above"),
    }
}

fn cmd_solve(a: &SolveArgs) -> Result<u8> {
    let g = read_graph(&a.graph, a.weights.as_deref())?;
    let td = match &a.td {
        Some(p) => io::parse_td(&io::read_to_string(p)?, &display(p))?,
        None => build(&g, &a.build)?.td,
    };
    let spec = ProblemSpec::parse(&a.problem)?;
    let config = SolverConfig {
        threads: a.threads,
        dump_signatures: a.dump_signatures.is_some(),
        ..SolverConfig::default()
    };
    let outcome = solve(&g, &td, &spec, a.k, &config)?;
    let text = format!("{}\n", serde_json::to_string_pretty(&outcome.to_json(1, a.timing)).expect("json"));
    print!("{}", text);
    if let Some(out) = &a.out {
        write_or_print(Some(out), &text)?;
    }
    if let Some(path) = &a.dump_signatures {
        let mut lines = String::new();
        for d in &outcome.signatures {
            lines.push_str(&serde_json::to_string(d).expect("json"));
            lines.push('\n');
        }
        write_or_print(Some(path), &lines)?;
    }
    Ok(match outcome.status() {
        Status::Solved => 0,
        Status::Infeasible => 2,
    })
}

fn cmd_validate(a: &ValidateArgs) -> Result<u8> {
    let g = read_graph(&a.graph, None)?;
    let td = io::parse_td(&io::read_to_string(&a.td)?, &display(&a.td))?;
    // vertex and bag ids in violations are shifted to the 1-indexed file view
    let mut report = validate_with_cap(&g, &td, a.alpha_cap);
    report.violations = report.violations.iter().map(|v| v.shifted(1)).collect();
    println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    Ok(if report.valid { 0 } else { 2 })
}

fn cmd_decompose(a: &DecomposeArgs) -> Result<u8> {
    let g = read_graph(&a.graph, None)?;
    let mut built = build(&g, &a.build)?;
    let alpha = alpha_of_decomposition_with_cap(&g, &built.td, SOLVER_ALPHA_CAP)?;
    built.td.set_claimed_alpha(Some(alpha));
    let text = io::write_td(&built.td, g.n());
    let stats = json!({
        "builder": built.builder,
        "nodes": built.td.node_count(),
        "width": built.td.width(),
        "alpha": alpha,
        "depth": built.depth,
        "max_bag_bound": built.max_bag_bound,
    });
    match &a.out {
        Some(p) => {
            write_or_print(Some(p), &text)?;
            println!("{}", serde_json::to_string_pretty(&stats).expect("json"));
        }
        None => {
            print!("{}", text);
            eprintln!("{}", stats);
        }
    }
    Ok(0)
}

fn cmd_gen(a: &GenArgs) -> Result<u8> {
    let mut intervals = None;
    let g = match a.family {
        GenFamily::Gnp => generate::gnp(a.n, a.p, a.seed),
        GenFamily::Chordal => generate::chordal(a.n, a.seed),
        GenFamily::Interval => {
            let (g, iv) = generate::interval(a.n, a.span, a.seed);
            intervals = Some(iv);
            g
        }
        GenFamily::Grid => {
            let rows = a.rows.unwrap_or_else(|| (a.n as f64).sqrt().floor().max(1.0) as usize);
            generate::grid(rows, a.n / rows.max(1))
        }
        GenFamily::Cycle => generate::cycle(a.n),
        GenFamily::Path => generate::path(a.n),
    };
    let family = format!("{:?}", a.family).to_lowercase();
    let comments = vec![format!("gen {} n={} seed={} p={} span={}", family, a.n, a.seed, a.p, a.span)];
    write_or_print(a.out.as_deref(), &io::write_gr(&g, &comments))?;
    if let Some(iv) = intervals {
        let path = match (&a.intervals_out, &a.out) {
            (Some(p), _) => Some(p.clone()),
            (None, Some(out)) => Some(PathBuf::from(format!("{}.intervals", out.display()))),
            (None, None) => None,
        };
        match path {
            Some(p) => write_or_print(Some(&p), &io::write_intervals(&iv))?,
            None => eprint!("{}", io::write_intervals(&iv)),
        }
    }
    if let Some(p) = &a.weights_out {
        let weighted = generate::with_random_weights(g, a.seed)?;
        write_or_print(Some(p), &io::write_weights(&weighted))?;
    }
    Ok(0)
}

fn cmd_oracle(a: &OracleArgs) -> Result<u8> {
    let config = SuiteConfig {
        seed: a.seed,
        instances: a.instances,
        max_n: a.max_n,
        problems: if a.problems.is_empty() { all_problems() } else { a.problems.clone() },
        merged_samples: a.samples,
        trials: a.trials,
        context_size: a.context_size,
        ..SuiteConfig::default()
    };
    let report = cross_check_suite(&config)?;
    write_or_print(a.out.as_deref(), &report.to_json_lines())?;
    if a.out.is_some() {
        println!("{}", serde_json::to_string_pretty(&report.summary).expect("json"));
    }
    Ok(if report.summary.pass { 0 } else { 2 })
}

fn parse_ns(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::input(format!("invalid --ns `{}`", s));
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let lo: usize = lo.parse().map_err(|_| bad())?;
        let hi: usize = hi.parse().map_err(|_| bad())?;
        let step: usize = step.parse().map_err(|_| bad())?;
        if step == 0 {
            return Err(bad());
        }
        return Ok((lo..=hi).step_by(step).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

fn cmd_bench(a: &BenchArgs) -> Result<u8> {
    let config = BenchConfig {
        ns: parse_ns(&a.ns)?,
        ks: a.ks.clone(),
        problem: a.problem.clone(),
        seed: a.seed,
        repeats: a.repeats,
        threads: a.threads,
    };
    let rows = run_bench(&config)?;
    write_or_print(a.out.as_deref(), &to_csv(&rows))?;
    for &k in &a.ks {
        eprintln!(
            "{}",
            json!({ "k": k, "loglog_slope": loglog_slope(&rows, k).map(|s| format!("{:.3}", s)), "plateau": plateau(&rows, k) })
        );
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(1)
        }
    }
}
