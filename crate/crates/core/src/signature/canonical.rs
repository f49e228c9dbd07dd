//! Canonical forms of signatures up to renaming the anonymous slots.
//!
//! Colour refinement over the slots followed by individualization of the
//! first non-singleton cell; the least serialization over all leaves is the
//! key. Twins (slots whose transposition is an automorphism) are explored
//! once. Past [`LEAF_CAP`] leaves the identity labeling is serialized
//! instead, which keeps keys sound but may split isomorphic signatures.

use std::collections::BTreeMap;

use super::{Piece, Signature};
use crate::algebra::Fingerprint;

pub const LEAF_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CanonMode {
    #[default]
    Exact,
    /// Key from the stable colouring alone, with no labeling. Only for fault
    /// injection: colour refinement cannot tell some non-isomorphic
    /// signatures apart.
    RefinementOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalSignature(pub Vec<u8>);

#[derive(Clone, Debug)]
pub struct Canonical {
    pub key: CanonicalSignature,
    /// `labeling[slot]` is the canonical position of `slot`; boundary slots
    /// are fixed.
    pub labeling: Vec<usize>,
    /// False when the leaf cap forced the identity fallback or in
    /// refinement-only mode.
    pub exact: bool,
}

struct Writer(Vec<u8>);

impl Writer {
    fn num(&mut self, x: usize) {
        self.0.extend_from_slice(&(x as u32).to_be_bytes());
    }

    fn bytes(&mut self, b: &[u8]) {
        self.num(b.len());
        self.0.extend_from_slice(b);
    }
}

fn encode_fingerprint(f: &Fingerprint, w: &mut Writer) {
    w.0.push(f.alive as u8);
    w.bytes(&f.blocks);
    w.bytes(&f.labels);
    w.num(f.residue.map_or(0, |r| r as usize + 1));
}

/// Piece under a relabeling: new ascending slots and the fingerprint
/// reordered to match.
fn relabel_piece(p: &Piece, labeling: &[usize]) -> Piece {
    let mut order: Vec<usize> = (0..p.slots.len()).collect();
    order.sort_by_key(|&j| labeling[p.slots[j]]);
    Piece {
        slots: order.iter().map(|&j| labeling[p.slots[j]]).collect(),
        fingerprint: p.fingerprint.permuted(&order),
    }
}

fn encode_piece(p: &Piece) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.num(p.slots.len());
    for &s in &p.slots {
        w.num(s);
    }
    encode_fingerprint(&p.fingerprint, &mut w);
    w.0
}

/// Serialization of `sig` with slot `x` renamed to `labeling[x]`.
pub(crate) fn serialize(sig: &Signature, labeling: &[usize]) -> Vec<u8> {
    let mut w = Writer(vec![b'E']);
    w.num(sig.boundary.len());
    for &b in &sig.boundary {
        w.num(b);
    }
    w.num(sig.omega);
    let mut edges: Vec<(usize, usize)> = sig
        .h_edges
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (labeling[a], labeling[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    edges.sort();
    w.num(edges.len());
    for (a, b) in edges {
        w.num(a);
        w.num(b);
    }
    let mut pieces: Vec<Vec<u8>> = sig.pieces.iter().map(|p| encode_piece(&relabel_piece(p, labeling))).collect();
    pieces.sort();
    w.num(pieces.len());
    for p in &pieces {
        w.bytes(p);
    }
    w.0
}

/// Order-free summary of a piece.
fn piece_invariant(p: &Piece) -> Vec<u32> {
    let f = &p.fingerprint;
    let mut labels: Vec<u32> = f.labels.iter().map(|&l| l as u32).collect();
    labels.sort();
    let mut sizes: BTreeMap<u8, u32> = BTreeMap::new();
    for &b in &f.blocks {
        *sizes.entry(b).or_default() += 1;
    }
    let mut sizes: Vec<u32> = sizes.into_values().collect();
    sizes.sort();
    let mut out = vec![f.alive as u32, f.residue.map_or(0, |r| r + 1), p.slots.len() as u32];
    out.push(labels.len() as u32);
    out.extend(labels);
    out.push(sizes.len() as u32);
    out.extend(sizes);
    out
}

struct Refiner<'a> {
    sig: &'a Signature,
    nb: usize,
    adj: Vec<Vec<usize>>,
    /// For each slot: (piece index, position inside the piece).
    incidence: Vec<Vec<(usize, usize)>>,
    invariants: Vec<Vec<u32>>,
}

impl<'a> Refiner<'a> {
    fn new(sig: &'a Signature) -> Self {
        let n = sig.slot_count();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &sig.h_edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut incidence = vec![Vec::new(); n];
        for (i, p) in sig.pieces.iter().enumerate() {
            for (j, &s) in p.slots.iter().enumerate() {
                incidence[s].push((i, j));
            }
        }
        Refiner {
            sig,
            nb: sig.boundary.len(),
            adj,
            incidence,
            invariants: sig.pieces.iter().map(piece_invariant).collect(),
        }
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    fn initial(&self) -> Vec<u32> {
        let sigs: Vec<Vec<u32>> = (0..self.n())
            .map(|x| if x < self.nb { vec![0, x as u32] } else { vec![1] })
            .collect();
        rank(&sigs)
    }

    fn round(&self, colors: &[u32]) -> Vec<u32> {
        let sigs: Vec<Vec<u32>> = (0..self.n())
            .map(|x| {
                let mut s = vec![colors[x]];
                let mut nbr: Vec<u32> = self.adj[x].iter().map(|&y| colors[y]).collect();
                nbr.sort();
                s.push(nbr.len() as u32);
                s.extend(nbr);
                let mut inc: Vec<Vec<u32>> = self.incidence[x]
                    .iter()
                    .map(|&(i, j)| {
                        let p = &self.sig.pieces[i];
                        let f = &p.fingerprint;
                        let mut d = self.invariants[i].clone();
                        d.push(f.labels.get(j).map_or(0, |&l| l as u32 + 1));
                        let block = f.blocks.get(j).copied();
                        d.push(block.map_or(0, |b| f.blocks.iter().filter(|&&c| c == b).count() as u32));
                        let mut others: Vec<[u32; 3]> = p
                            .slots
                            .iter()
                            .enumerate()
                            .filter(|&(k, _)| k != j)
                            .map(|(k, &y)| {
                                [
                                    colors[y],
                                    (block.is_some() && f.blocks.get(k).copied() == block) as u32,
                                    f.labels.get(k).map_or(0, |&l| l as u32 + 1),
                                ]
                            })
                            .collect();
                        others.sort();
                        d.extend(others.into_iter().flatten());
                        d
                    })
                    .collect();
                inc.sort();
                s.push(inc.len() as u32);
                for d in inc {
                    s.push(d.len() as u32);
                    s.extend(d);
                }
                s
            })
            .collect();
        rank(&sigs)
    }

    fn refine(&self, mut colors: Vec<u32>) -> Vec<u32> {
        let mut classes = count_classes(&colors);
        loop {
            let next = self.round(&colors);
            let c = count_classes(&next);
            colors = next;
            if c == classes {
                return colors;
            }
            classes = c;
        }
    }
}

fn rank(sigs: &[Vec<u32>]) -> Vec<u32> {
    let mut distinct: Vec<&Vec<u32>> = sigs.iter().collect();
    distinct.sort();
    distinct.dedup();
    sigs.iter()
        .map(|s| distinct.binary_search(&s).expect("present") as u32)
        .collect()
}

fn count_classes(colors: &[u32]) -> usize {
    colors.iter().copied().max().map_or(0, |m| m as usize + 1)
}

fn individualize(colors: &[u32], x: usize) -> Vec<u32> {
    let sigs: Vec<Vec<u32>> = colors
        .iter()
        .enumerate()
        .map(|(y, &c)| vec![c, (y != x) as u32])
        .collect();
    rank(&sigs)
}

struct Search<'a> {
    refiner: Refiner<'a>,
    leaves: usize,
    best: Option<(Vec<u8>, Vec<usize>)>,
    identity: Vec<u8>,
}

impl<'a> Search<'a> {
    fn twins(&self, x: usize, y: usize) -> bool {
        let mut swap: Vec<usize> = (0..self.refiner.n()).collect();
        swap.swap(x, y);
        serialize(self.refiner.sig, &swap) == self.identity
    }

    /// Returns false once the leaf cap is exceeded.
    fn run(&mut self, colors: Vec<u32>) -> bool {
        let colors = self.refiner.refine(colors);
        let n = self.refiner.n();
        let mut cells: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for x in 0..n {
            cells.entry(colors[x]).or_default().push(x);
        }
        let target = cells.into_values().find(|c| c.len() > 1);
        let Some(cell) = target else {
            self.leaves += 1;
            if self.leaves > LEAF_CAP {
                return false;
            }
            let labeling: Vec<usize> = colors.iter().map(|&c| c as usize).collect();
            let ser = serialize(self.refiner.sig, &labeling);
            if self.best.as_ref().is_none_or(|(b, _)| ser < *b) {
                self.best = Some((ser, labeling));
            }
            return true;
        };
        let mut explored: Vec<usize> = Vec::new();
        for &x in &cell {
            if explored.iter().any(|&y| self.twins(x, y)) {
                continue;
            }
            explored.push(x);
            if !self.run(individualize(&colors, x)) {
                return false;
            }
        }
        true
    }
}

pub fn canonicalize(sig: &Signature) -> Canonical {
    canonicalize_with(sig, CanonMode::Exact)
}

pub fn canonicalize_with(sig: &Signature, mode: CanonMode) -> Canonical {
    let n = sig.slot_count();
    let identity: Vec<usize> = (0..n).collect();
    let refiner = Refiner::new(sig);
    if mode == CanonMode::RefinementOnly {
        let colors = refiner.refine(refiner.initial());
        return Canonical {
            key: CanonicalSignature(refinement_key(sig, &colors)),
            labeling: identity,
            exact: false,
        };
    }
    if sig.omega == 0 {
        return Canonical {
            key: CanonicalSignature(serialize(sig, &identity)),
            labeling: identity,
            exact: true,
        };
    }
    let start = refiner.initial();
    let mut search = Search {
        identity: serialize(sig, &identity),
        refiner,
        leaves: 0,
        best: None,
    };
    if search.run(start) {
        let (key, labeling) = search.best.expect("at least one leaf");
        Canonical {
            key: CanonicalSignature(key),
            labeling,
            exact: true,
        }
    } else {
        Canonical {
            key: CanonicalSignature(search.identity),
            labeling: identity,
            exact: false,
        }
    }
}

/// Serialization of the stable colouring: slots replaced by colours.
fn refinement_key(sig: &Signature, colors: &[u32]) -> Vec<u8> {
    let mut w = Writer(vec![b'R']);
    w.num(sig.boundary.len());
    for &b in &sig.boundary {
        w.num(b);
    }
    w.num(sig.omega);
    let mut cs: Vec<u32> = colors.to_vec();
    cs.sort();
    for c in cs {
        w.num(c as usize);
    }
    let mut edges: Vec<(u32, u32)> = sig
        .h_edges
        .iter()
        .map(|&(a, b)| (colors[a].min(colors[b]), colors[a].max(colors[b])))
        .collect();
    edges.sort();
    w.num(edges.len());
    for (a, b) in edges {
        w.num(a as usize);
        w.num(b as usize);
    }
    let mut pieces: Vec<Vec<u32>> = sig
        .pieces
        .iter()
        .map(|p| {
            let mut slots: Vec<u32> = p.slots.iter().map(|&s| colors[s]).collect();
            slots.sort();
            let mut d = piece_invariant(p);
            d.extend(slots);
            d
        })
        .collect();
    pieces.sort();
    w.num(pieces.len());
    for p in pieces {
        w.num(p.len());
        for x in p {
            w.num(x as usize);
        }
    }
    w.0
}

/// Checks explicitly that `x ↦ lb⁻¹(la(x))` is an isomorphism from `a` to `b`
/// fixing the boundary slots.
pub fn verify_relabeling(a: &Signature, la: &[usize], b: &Signature, lb: &[usize]) -> bool {
    let n = a.slot_count();
    if a.boundary != b.boundary || n != b.slot_count() || la.len() != n || lb.len() != n {
        return false;
    }
    let mut inv_b = vec![usize::MAX; n];
    for (x, &l) in lb.iter().enumerate() {
        if l >= n || inv_b[l] != usize::MAX {
            return false;
        }
        inv_b[l] = x;
    }
    let mut sigma = vec![0; n];
    for x in 0..n {
        if la[x] >= n {
            return false;
        }
        sigma[x] = inv_b[la[x]];
    }
    if (0..a.boundary.len()).any(|x| sigma[x] != x) {
        return false;
    }
    let mut ea: Vec<(usize, usize)> = a
        .h_edges
        .iter()
        .map(|&(x, y)| (sigma[x].min(sigma[y]), sigma[x].max(sigma[y])))
        .collect();
    ea.sort();
    let mut eb = b.h_edges.clone();
    eb.sort();
    if ea != eb {
        return false;
    }
    let mut pa: Vec<Vec<u8>> = a.pieces.iter().map(|p| encode_piece(&relabel_piece(p, &sigma))).collect();
    let mut pb: Vec<Vec<u8>> = b.pieces.iter().map(encode_piece).collect();
    pa.sort();
    pb.sort();
    pa == pb
}
