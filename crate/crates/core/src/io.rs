//! Text formats: PACE-style `.gr` graphs and `.td` decompositions, weight
//! sidecars and interval lists. Files use 1-indexed vertices and bags.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::builders::Interval;
use crate::decomposition::TreeDecomposition;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::weight::Weight;

fn parse_err(file: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        file: file.to_string(),
        line,
        message: message.into(),
    }
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {}", path.display(), e)))
}

/// Numbered content lines, skipping blanks and `c` comments.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let fields: Vec<&str> = l.split_whitespace().collect();
        match fields.first() {
            None => None,
            Some(&"c") => None,
            Some(_) => Some((i + 1, fields)),
        }
    })
}

fn number(file: &str, line: usize, s: &str, what: &str) -> Result<usize> {
    s.parse::<usize>()
        .map_err(|_| parse_err(file, line, format!("expected {} but found `{}`", what, s)))
}

pub fn parse_gr(text: &str, file: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut seen = BTreeSet::new();
    let mut last_line = 0;
    for (line, f) in content_lines(text) {
        last_line = line;
        if f[0] == "p" {
            if header.is_some() {
                return Err(parse_err(file, line, "second header line"));
            }
            if f.len() != 4 || f[1] != "tw" {
                return Err(parse_err(file, line, "header must read `p tw <n> <m>`"));
            }
            header = Some((number(file, line, f[2], "vertex count")?, number(file, line, f[3], "edge count")?));
            continue;
        }
        let (n, _) = header.ok_or_else(|| parse_err(file, line, "edge before the `p tw` header"))?;
        if f.len() != 2 {
            return Err(parse_err(file, line, "edge lines must read `<u> <v>`"));
        }
        let u = number(file, line, f[0], "a vertex")?;
        let v = number(file, line, f[1], "a vertex")?;
        for x in [u, v] {
            if x == 0 || x > n {
                return Err(parse_err(file, line, format!("vertex {} outside 1..={}", x, n)));
            }
        }
        if u == v {
            return Err(parse_err(file, line, format!("self-loop at vertex {}", u)));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(parse_err(file, line, format!("repeated edge {} {}", u, v)));
        }
        edges.push((u - 1, v - 1));
    }
    let (n, m) = header.ok_or_else(|| parse_err(file, last_line.max(1), "missing `p tw <n> <m>` header"))?;
    if edges.len() != m {
        return Err(parse_err(
            file,
            last_line.max(1),
            format!("header announces {} edges but {} were listed", m, edges.len()),
        ));
    }
    Graph::from_edges(n, &edges)
}

pub fn write_gr(g: &Graph, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "c {}", c);
    }
    let _ = writeln!(out, "p tw {} {}", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    out
}

/// `<vertex> <weight>` lines; unlisted vertices weigh 1.
pub fn parse_weights(text: &str, file: &str, n: usize) -> Result<Vec<Weight>> {
    let mut weights = vec![Weight::one(); n];
    let mut seen = vec![false; n];
    for (line, f) in content_lines(text) {
        if f.len() != 2 {
            return Err(parse_err(file, line, "weight lines must read `<vertex> <num>/<den>`"));
        }
        let v = number(file, line, f[0], "a vertex")?;
        if v == 0 || v > n {
            return Err(parse_err(file, line, format!("vertex {} outside 1..={}", v, n)));
        }
        if seen[v - 1] {
            return Err(parse_err(file, line, format!("vertex {} weighted twice", v)));
        }
        seen[v - 1] = true;
        weights[v - 1] = f[1].parse().map_err(|e: String| parse_err(file, line, e))?;
    }
    Ok(weights)
}

pub fn write_weights(g: &Graph) -> String {
    let mut out = String::new();
    for (v, w) in g.weights().iter().enumerate() {
        let _ = writeln!(out, "{} {}", v + 1, w);
    }
    out
}

pub fn parse_td(text: &str, file: &str) -> Result<TreeDecomposition> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<VertexSet>> = Vec::new();
    let mut edges = Vec::new();
    let mut claimed = None;
    let mut last_line = 0;
    for (i, l) in text.lines().enumerate() {
        let line = i + 1;
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() == 3 && f[0] == "c" && f[1] == "alpha" {
            claimed = Some(number(file, line, f[2], "a claimed independence number")?);
        }
    }
    for (line, f) in content_lines(text) {
        last_line = line;
        match f[0] {
            "s" => {
                if header.is_some() {
                    return Err(parse_err(file, line, "second header line"));
                }
                if f.len() != 5 || f[1] != "td" {
                    return Err(parse_err(file, line, "header must read `s td <bags> <width+1> <n>`"));
                }
                let count = number(file, line, f[2], "bag count")?;
                header = Some((count, number(file, line, f[3], "width + 1")?, number(file, line, f[4], "vertex count")?));
                bags = vec![None; count];
            }
            "b" => {
                let (count, _, n) = header.ok_or_else(|| parse_err(file, line, "bag before the `s td` header"))?;
                if f.len() < 2 {
                    return Err(parse_err(file, line, "bag lines must read `b <id> <vertices>`"));
                }
                let id = number(file, line, f[1], "a bag id")?;
                if id == 0 || id > count {
                    return Err(parse_err(file, line, format!("bag id {} outside 1..={}", id, count)));
                }
                if bags[id - 1].is_some() {
                    return Err(parse_err(file, line, format!("bag {} listed twice", id)));
                }
                let mut vs = Vec::new();
                for s in &f[2..] {
                    let v = number(file, line, s, "a vertex")?;
                    if v == 0 || v > n {
                        return Err(parse_err(file, line, format!("vertex {} outside 1..={}", v, n)));
                    }
                    vs.push(v - 1);
                }
                bags[id - 1] = Some(VertexSet::from_vec(vs));
            }
            _ => {
                let (count, _, _) = header.ok_or_else(|| parse_err(file, line, "tree edge before the `s td` header"))?;
                if f.len() != 2 {
                    return Err(parse_err(file, line, "tree edge lines must read `<id1> <id2>`"));
                }
                let a = number(file, line, f[0], "a bag id")?;
                let b = number(file, line, f[1], "a bag id")?;
                for x in [a, b] {
                    if x == 0 || x > count {
                        return Err(parse_err(file, line, format!("bag id {} outside 1..={}", x, count)));
                    }
                }
                edges.push((a - 1, b - 1));
            }
        }
    }
    let (_, width1, _) = header.ok_or_else(|| parse_err(file, last_line.max(1), "missing `s td` header"))?;
    let bags: Vec<VertexSet> = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| parse_err(file, last_line.max(1), format!("bag {} is never listed", i + 1))))
        .collect::<Result<_>>()?;
    let largest = bags.iter().map(|b| b.len()).max().unwrap_or(0);
    if largest != width1 {
        return Err(parse_err(
            file,
            1,
            format!("header width+1 is {} but the largest bag has {} vertices", width1, largest),
        ));
    }
    let mut td = TreeDecomposition::new(bags, &edges)?;
    td.set_claimed_alpha(claimed);
    Ok(td)
}

pub fn write_td(td: &TreeDecomposition, n: usize) -> String {
    let mut out = String::new();
    if let Some(a) = td.claimed_alpha() {
        let _ = writeln!(out, "c alpha {}", a);
    }
    let width1 = td.bags().iter().map(|b| b.len()).max().unwrap_or(0);
    let _ = writeln!(out, "s td {} {} {}", td.node_count(), width1, n);
    for (i, b) in td.bags().iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for v in b.iter() {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    for (a, b) in td.edges() {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
    out
}

fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    let num: BigInt = num.parse().map_err(|_| format!("invalid number `{}`", s))?;
    let den: BigInt = den.parse().map_err(|_| format!("invalid number `{}`", s))?;
    if den == BigInt::from(0) {
        return Err(format!("zero denominator in `{}`", s));
    }
    Ok(BigRational::new(num, den))
}

fn show_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `<lo> <hi>` per line, interval `i` on line `i` of content.
pub fn parse_intervals(text: &str, file: &str) -> Result<Vec<Interval>> {
    let mut out = Vec::new();
    for (line, f) in content_lines(text) {
        if f.len() != 2 {
            return Err(parse_err(file, line, "interval lines must read `<lo> <hi>`"));
        }
        let lo = parse_rational(f[0]).map_err(|e| parse_err(file, line, e))?;
        let hi = parse_rational(f[1]).map_err(|e| parse_err(file, line, e))?;
        if lo > hi {
            return Err(parse_err(file, line, "interval has lo > hi"));
        }
        out.push((lo, hi));
    }
    Ok(out)
}

pub fn write_intervals(intervals: &[Interval]) -> String {
    let mut out = String::new();
    for (lo, hi) in intervals {
        let _ = writeln!(out, "{} {}", show_rational(lo), show_rational(hi));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::validate;

    #[test]
    fn gr_round_trip() {
        let g = crate::generate::gnp(12, 0.3, 2);
        let text = write_gr(&g, &["seed 2".into()]);
        assert_eq!(parse_gr(&text, "g.gr").unwrap(), g);
    }

    #[test]
    fn gr_errors_have_lines() {
        let cases = [
            ("1 2\n", 1),
            ("p tw 3 1\nc fine\n1 4\n", 3),
            ("p tw 3 2\n1 2\n2 1\n", 3),
            ("p tw 3 1\n2 2\n", 2),
            ("p tw 3 2\n1 2\n", 2),
            ("p tw x 2\n", 1),
        ];
        for (text, line) in cases {
            match parse_gr(text, "bad.gr") {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{:?}", text),
                other => panic!("{:?} gave {:?}", text, other),
            }
        }
    }

    #[test]
    fn weights() {
        let w = parse_weights("c w\n2 7/2\n3 5\n", "w", 3).unwrap();
        assert_eq!(w[0], Weight::one());
        assert_eq!(w[1].to_string(), "7/2");
        assert!(matches!(parse_weights("1 -1\n", "w", 3), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_weights("1 1\n\n1 2\n", "w", 3), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn td_round_trip() {
        let g = crate::generate::path(3);
        let text = "c alpha 1\ns td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n";
        let td = parse_td(text, "p3.td").unwrap();
        assert_eq!(td.claimed_alpha(), Some(1));
        let report = validate(&g, &td);
        assert!(report.valid);
        let again = parse_td(&write_td(&td, 3), "again.td").unwrap();
        assert_eq!(again.bags(), td.bags());
        assert_eq!(validate(&g, &again), report);
    }

    #[test]
    fn td_errors() {
        assert!(matches!(parse_td("s td 1 2 3\nb 1 1 4\n", "x"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_td("s td 2 2 3\nb 1 1 2\n", "x"), Err(Error::Parse { .. })));
        assert!(matches!(parse_td("s td 1 3 3\nb 1 1 2\n", "x"), Err(Error::Parse { .. })));
        assert!(matches!(parse_td("b 1 1\n", "x"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn intervals_round_trip() {
        let iv = parse_intervals("0 1/2\n-3 4\n", "i").unwrap();
        assert_eq!(write_intervals(&iv), "0 1/2\n-3 4\n");
        assert!(matches!(parse_intervals("2 1\n", "i"), Err(Error::Parse { line: 1, .. })));
    }
}
