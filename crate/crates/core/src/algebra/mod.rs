//! Boundary fingerprints standing in for logical types, plus the problem
//! registry that selects them by name.

mod boundaried;
mod plugins;

pub use boundaried::BoundariedGraph;
pub use plugins::{InducedForest, InducedLinearForest, InducedMatching, Mwis};

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::treewidth::treewidth_less_than;

/// Finite summary of a boundaried piece.
///
/// `blocks[i]` is the block of boundary position `i` in a restricted-growth
/// encoding of a boundary partition; `labels[i]` is a per-position flag whose
/// meaning belongs to the plugin. A piece that can never be completed to an
/// accepted graph is collapsed to the single dead value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Fingerprint {
    pub alive: bool,
    pub blocks: Vec<u8>,
    pub labels: Vec<u8>,
    pub residue: Option<u32>,
}

impl Fingerprint {
    pub fn unit() -> Self {
        Fingerprint {
            alive: true,
            blocks: Vec::new(),
            labels: Vec::new(),
            residue: None,
        }
    }

    pub fn dead() -> Self {
        Fingerprint {
            alive: false,
            ..Fingerprint::unit()
        }
    }

    /// The fingerprint of the same piece with boundary reordered so that new
    /// position `j` is old position `order[j]`.
    pub fn permuted(&self, order: &[usize]) -> Fingerprint {
        let mut out = self.clone();
        if !self.blocks.is_empty() {
            out.blocks = restricted_growth(order.iter().map(|&i| self.blocks[i]));
        }
        if !self.labels.is_empty() {
            out.labels = order.iter().map(|&i| self.labels[i]).collect();
        }
        out
    }
}

/// Renumber block ids in order of first appearance.
pub(crate) fn restricted_growth(ids: impl IntoIterator<Item = impl Into<usize>>) -> Vec<u8> {
    let mut seen: Vec<usize> = Vec::new();
    ids.into_iter()
        .map(|id| {
            let id = id.into();
            match seen.iter().position(|&s| s == id) {
                Some(p) => p as u8,
                None => {
                    seen.push(id);
                    (seen.len() - 1) as u8
                }
            }
        })
        .collect()
}

/// A supported problem: a property ψ of `G[F]` together with a fingerprint
/// fine enough to decide ψ after gluing.
pub trait Plugin: Send + Sync {
    fn name(&self) -> &'static str;
    /// Solutions must satisfy `tw(G[F]) < t`.
    fn t(&self) -> usize;
    /// Called only with `tw(g) < t` and at most `2t` boundary vertices.
    fn fingerprint(&self, g: &Graph, boundary: &[Vertex]) -> Fingerprint;
    fn accepts(&self, g: &Graph) -> bool;
    /// Optional extra pruning of table keys: false only when no accepted
    /// solution can contain `b`.
    fn key_filter(&self, _g: &Graph, _b: &VertexSet) -> bool {
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Modulus {
    pub p: u32,
    pub r: u32,
}

#[derive(Clone)]
pub struct ProblemSpec {
    plugin: Arc<dyn Plugin>,
    modulus: Option<Modulus>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProblemSpec({})", self.name())
    }
}

pub const PLUGIN_NAMES: [&str; 4] = ["mwis", "induced-forest", "induced-linear-forest", "induced-matching"];

pub fn registry() -> Vec<Arc<dyn Plugin>> {
    vec![
        Arc::new(Mwis),
        Arc::new(InducedForest),
        Arc::new(InducedLinearForest),
        Arc::new(InducedMatching),
    ]
}

impl ProblemSpec {
    pub fn new(plugin: Arc<dyn Plugin>, modulus: Option<Modulus>) -> Result<Self> {
        if let Some(m) = modulus {
            if m.p < 2 || m.r >= m.p {
                return Err(Error::input(format!("bad modulus p={} r={}", m.p, m.r)));
            }
        }
        Ok(ProblemSpec { plugin, modulus })
    }

    /// Parse `name` or `name@mod<p>=<r>`; a bare `@mod<p>` means residue 0.
    pub fn parse(s: &str) -> Result<Self> {
        let (base, suffix) = match s.split_once('@') {
            Some((b, m)) => (b, Some(m)),
            None => (s, None),
        };
        let plugin = registry()
            .into_iter()
            .find(|p| p.name() == base)
            .ok_or_else(|| {
                Error::input(format!("unknown problem '{}' (expected one of {})", base, PLUGIN_NAMES.join(", ")))
            })?;
        let modulus = match suffix {
            None => None,
            Some(m) => {
                let body = m
                    .strip_prefix("mod")
                    .ok_or_else(|| Error::input(format!("bad problem suffix '@{}'", m)))?;
                let (p, r) = body.split_once('=').unwrap_or((body, "0"));
                let parse = |x: &str| {
                    x.parse::<u32>()
                        .map_err(|_| Error::input(format!("bad problem suffix '@{}'", m)))
                };
                Some(Modulus { p: parse(p)?, r: parse(r)? })
            }
        };
        ProblemSpec::new(plugin, modulus)
    }

    pub fn name(&self) -> String {
        match self.modulus {
            None => self.plugin.name().to_string(),
            Some(m) => format!("{}@mod{}={}", self.plugin.name(), m.p, m.r),
        }
    }

    pub fn t(&self) -> usize {
        self.plugin.t()
    }

    pub fn modulus(&self) -> Option<Modulus> {
        self.modulus
    }

    pub fn plugin(&self) -> &dyn Plugin {
        &*self.plugin
    }

    /// Fingerprint with the preconditions checked.
    pub fn fingerprint(&self, g: &BoundariedGraph) -> Result<Fingerprint> {
        if g.boundary.len() > 2 * self.t() {
            return Err(Error::contract(format!(
                "fingerprint needs at most {} boundary vertices, got {}",
                2 * self.t(),
                g.boundary.len()
            )));
        }
        if !treewidth_less_than(&g.graph, self.t())? {
            return Err(Error::contract(format!("fingerprint needs treewidth below {}", self.t())));
        }
        Ok(self.fingerprint_trusted(&g.graph, &g.boundary))
    }

    /// Fingerprint without precondition checks; callers have already
    /// established `tw < t`.
    pub fn fingerprint_trusted(&self, g: &Graph, boundary: &[Vertex]) -> Fingerprint {
        let mut f = self.plugin.fingerprint(g, boundary);
        if f.alive {
            if let Some(m) = self.modulus {
                f.residue = Some((g.n() % m.p as usize) as u32);
            }
        }
        f
    }

    pub fn key_filter(&self, g: &Graph, b: &VertexSet) -> bool {
        self.plugin.key_filter(g, b)
    }

    /// The acceptance test ψ on a whole graph.
    pub fn accepts(&self, g: &Graph) -> bool {
        self.plugin.accepts(g) && self.modulus.is_none_or(|m| g.n() % m.p as usize == m.r as usize)
    }

    /// ψ together with the treewidth bound, for a vertex subset of `g`.
    pub fn accepts_set(&self, g: &Graph, s: &VertexSet) -> Result<bool> {
        let sub = crate::graph::induced_subgraph(g, s)?;
        Ok(treewidth_less_than(&sub.graph, self.t())? && self.accepts(&sub.graph))
    }
}
