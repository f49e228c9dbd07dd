use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treealpha")).args(args).output().expect("spawn")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({}): {}", e, String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const C5: &str = "p tw 5 5\n1 2\n2 3\n3 4\n4 5\n5 1\n";
const C5_TD: &str = "s td 3 3 5\nb 1 1 2 3\nb 2 1 3 4\nb 3 1 4 5\n1 2\n2 3\n";
const K4: &str = "p tw 4 6\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n";
const K4_TD: &str = "s td 1 4 4\nb 1 1 2 3 4\n";
const P4: &str = "p tw 4 3\n1 2\n2 3\n3 4\n";

#[test]
fn c5_mwis() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "c5.gr", C5);
    let td = write(dir.path(), "c5.td", C5_TD);
    let out = run(&["solve", "--graph", s(&g), "--td", s(&td), "--problem", "mwis"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["weight"], "2");
    assert_eq!(v["status"], "solved");
    assert_eq!(v["k"], 2);
}

#[test]
fn k4_forest() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k4.gr", K4);
    let td = write(dir.path(), "k4.td", K4_TD);
    let out = run(&["solve", "--graph", s(&g), "--td", s(&td), "--problem", "induced-forest"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["weight"], "2");
}

#[test]
fn p4_matching_even() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "p4.gr", P4);
    let out = run(&["solve", "--graph", s(&g), "--problem", "induced-matching@mod2=0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["weight"], "2");
    let verts: Vec<u64> = v["vertices"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert_eq!(verts.len(), 2);
    assert!(verts.iter().all(|&x| (1..=4).contains(&x)));
}

#[test]
fn weights_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "p4.gr", P4);
    let w = write(dir.path(), "p4.w", "1 7/2\n4 5/4\n");
    let out_path = dir.path().join("res.json");
    let out = run(&["solve", "--graph", s(&g), "--weights", s(&w), "--problem", "mwis", "--out", s(&out_path)]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["weight"], "19/4");
    assert_eq!(std::fs::read(&out_path).unwrap(), out.stdout);
}

#[test]
fn infeasible_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k2.gr", "p tw 2 1\n1 2\n");
    let out = run(&["solve", "--graph", s(&g), "--problem", "mwis@mod3=2"]);
    assert_eq!(code(&out), 2);
    let v = json(&out);
    assert_eq!(v["status"], "infeasible");
    assert!(v["weight"].is_null());
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.gr", "p tw 3 2\n1 2\n2 x\n");
    let out = run(&["solve", "--graph", s(&bad), "--problem", "mwis"]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.gr:3"), "{}", err);

    let g = write(dir.path(), "c5.gr", C5);
    let td = write(dir.path(), "c5.td", C5_TD);
    let out = run(&["solve", "--graph", s(&g), "--td", s(&td), "--problem", "mwis", "--k", "1"]);
    assert_eq!(code(&out), 1);
    let out = run(&["solve", "--graph", s(&g), "--problem", "induced-cactus"]);
    assert_eq!(code(&out), 1);
    let out = run(&["solve", "--graph", s(&dir.path().join("missing.gr")), "--problem", "mwis"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["solve", "--bogus"])), 1);
    assert_eq!(code(&run(&[])), 1);
    let help = run(&["--help"]);
    assert_eq!(code(&help), 0);
    let text = String::from_utf8_lossy(&help.stdout);
    for sub in ["solve", "validate", "decompose", "gen", "oracle", "bench"] {
        assert!(text.contains(sub), "{}", text);
    }
}

#[test]
fn validate_p3() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "p3.gr", "p tw 3 2\n1 2\n2 3\n");
    let td = write(dir.path(), "p3.td", "s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n");
    let out = run(&["validate", "--graph", s(&g), "--td", s(&td)]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["valid"], true);
    assert_eq!(v["width"], 1);
    assert_eq!(v["alpha"], 1);

    let broken = write(dir.path(), "broken.td", "s td 2 2 3\nb 1 1 2\nb 2 3\n1 2\n");
    let out = run(&["validate", "--graph", s(&g), "--td", s(&broken)]);
    assert_eq!(code(&out), 2);
    let v = json(&out);
    assert_eq!(v["valid"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn gen_chordal_then_clique_tree() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("ch.gr");
    let td = dir.path().join("ch.td");
    assert_eq!(code(&run(&["gen", "chordal", "--n", "30", "--seed", "7", "--out", s(&g)])), 0);
    let text = std::fs::read_to_string(&g).unwrap();
    assert!(text.contains("seed=7"));
    let out = run(&["decompose", "--graph", s(&g), "--builder", "clique-tree", "--out", s(&td)]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["alpha"], 1);
    let out = run(&["validate", "--graph", s(&g), "--td", s(&td)]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["alpha"], 1);
}

#[test]
fn gen_round_trips_through_gr() {
    let dir = tempfile::tempdir().unwrap();
    for family in ["gnp", "chordal", "interval", "grid", "cycle", "path"] {
        let a = dir.path().join(format!("{}.gr", family));
        assert_eq!(code(&run(&["gen", family, "--n", "16", "--seed", "3", "--out", s(&a)])), 0);
        let text = std::fs::read_to_string(&a).unwrap();
        let g = treealpha::io::parse_gr(&text, "a").unwrap();
        assert_eq!(treealpha::io::parse_gr(&treealpha::io::write_gr(&g, &[]), "b").unwrap(), g);
        // same seed, same bytes
        let out = run(&["gen", family, "--n", "16", "--seed", "3"]);
        assert_eq!(out.stdout, text.as_bytes());
    }
    let iv = dir.path().join("interval.gr.intervals");
    let intervals = treealpha::io::parse_intervals(&std::fs::read_to_string(&iv).unwrap(), "iv").unwrap();
    let g = treealpha::io::parse_gr(&std::fs::read_to_string(dir.path().join("interval.gr")).unwrap(), "g").unwrap();
    let from_model = treealpha::builders::interval_graph(&intervals).unwrap();
    assert_eq!(from_model.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
}

#[test]
fn decompose_round_trips_through_td() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.gr");
    assert_eq!(code(&run(&["gen", "interval", "--n", "120", "--seed", "5", "--out", s(&g)])), 0);
    let iv = dir.path().join("g.gr.intervals");
    let graph = treealpha::io::parse_gr(&std::fs::read_to_string(&g).unwrap(), "g").unwrap();
    for (builder, extra) in [
        ("greedy-separators", vec![]),
        ("interval-separators", vec!["--intervals", s(&iv)]),
        ("clique-tree", vec![]),
    ] {
        let td = dir.path().join(format!("{}.td", builder));
        let mut args = vec!["decompose", "--graph", s(&g), "--builder", builder, "--out", s(&td)];
        args.extend(extra);
        let out = run(&args);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let text = std::fs::read_to_string(&td).unwrap();
        let parsed = treealpha::io::parse_td(&text, "td").unwrap();
        let again = treealpha::io::parse_td(&treealpha::io::write_td(&parsed, graph.n()), "td").unwrap();
        let r1 = treealpha::decomposition::validate(&graph, &parsed);
        let r2 = treealpha::decomposition::validate(&graph, &again);
        assert!(r1.valid, "{:?}", r1);
        assert_eq!(r1, r2);
        let out = run(&["validate", "--graph", s(&g), "--td", s(&td)]);
        assert_eq!(code(&out), 0);
    }
}

#[test]
fn interval_builder_requires_model() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "p4.gr", P4);
    let out = run(&["decompose", "--graph", s(&g), "--builder", "interval-separators"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..6 {
        let g = dir.path().join(format!("g{}.gr", seed));
        let w = dir.path().join(format!("g{}.w", seed));
        let seed_s = seed.to_string();
        let gen = run(&["gen", "gnp", "--n", "11", "--p", "0.4", "--seed", &seed_s, "--out", s(&g), "--weights-out", s(&w)]);
        assert_eq!(code(&gen), 0);
        for problem in ["induced-forest", "induced-matching@mod2=1"] {
            let solve = |threads: &str| {
                run(&["solve", "--graph", s(&g), "--weights", s(&w), "--problem", problem, "--threads", threads])
            };
            let one = solve("1");
            let eight = solve("8");
            assert_ne!(code(&one), 1, "{}", String::from_utf8_lossy(&one.stderr));
            assert_eq!(one.stdout, eight.stdout);
        }
    }
}

#[test]
fn dump_signatures_writes_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "c5.gr", C5);
    let dump = dir.path().join("sig.jsonl");
    let out = run(&["solve", "--graph", s(&g), "--problem", "induced-forest", "--dump-signatures", s(&dump)]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&dump).unwrap();
    assert!(text.lines().count() > 0);
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert!(v.is_object());
    }
}

#[test]
fn oracle_and_bench_smoke() {
    let out = run(&["oracle", "--instances", "2", "--max-n", "8", "--samples", "20", "--trials", "20"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let last: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(last["summary"]["pass"], true);

    let out = run(&["bench", "--ns", "10,15,20,25,30", "--ks", "1,2", "--repeats", "1"]);
    assert_eq!(code(&out), 0);
    let csv = String::from_utf8_lossy(&out.stdout);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "n,k,t,problem,wall_time,max_family_size,distinct_signatures");
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    assert_eq!(rows.len(), 10);
    for k in ["1", "2"] {
        let ns: Vec<usize> = rows.iter().filter(|r| r[1] == k).map(|r| r[0].parse().unwrap()).collect();
        assert!(ns.windows(2).all(|w| w[0] < w[1]));
    }
}
