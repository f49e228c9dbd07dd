//! Representative families: one heaviest set per canonical signature.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::ProblemSpec;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::signature::{canonicalize_with, compute_signature, verify_relabeling, CanonMode, Canonical, Signature};
use crate::weight::Weight;

/// A feasible set with its weight and cached signature.
#[derive(Clone, Debug)]
pub struct FamilyEntry {
    pub set: VertexSet,
    pub weight: Weight,
    pub boundary: VertexSet,
    pub signature: Arc<Signature>,
    pub canonical: Arc<Canonical>,
}

impl FamilyEntry {
    /// Fails with a contract error unless `boundary ⊆ set` and
    /// `tw(G[set]) < t`.
    pub fn new(spec: &ProblemSpec, g: &Graph, set: VertexSet, boundary: VertexSet, mode: CanonMode) -> Result<Self> {
        let signature = compute_signature(spec, g, &set, &boundary)?;
        let canonical = canonicalize_with(&signature, mode);
        Ok(FamilyEntry {
            weight: g.weight_of(&set),
            set,
            boundary,
            signature: Arc::new(signature),
            canonical: Arc::new(canonical),
        })
    }
}

/// One merge performed by [`compress`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Merge {
    pub boundary: VertexSet,
    pub kept: VertexSet,
    pub dropped: VertexSet,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CompressOptions {
    /// Fault injection: keep the first entry of each class regardless of weight.
    pub skip_weight_comparison: bool,
    /// Fault injection: trust equal keys without checking the slot bijection.
    pub skip_bijection_check: bool,
}

/// Heaviest entry per canonical signature, ties to the lexicographically
/// smallest set. Output is sorted by set.
pub fn compress(
    b: &VertexSet,
    family: Vec<FamilyEntry>,
    options: CompressOptions,
    mut merges: Option<&mut Vec<Merge>>,
) -> Result<Vec<FamilyEntry>> {
    let mut classes: BTreeMap<Vec<u8>, FamilyEntry> = BTreeMap::new();
    for (i, entry) in family.into_iter().enumerate() {
        if &entry.boundary != b || !b.is_subset(&entry.set) {
            return Err(Error::contract(format!(
                "family entry {} ({:?}) does not contain the boundary {:?}",
                i,
                entry.set.as_slice(),
                b.as_slice()
            )));
        }
        let key = entry.canonical.key.0.clone();
        match classes.get_mut(&key) {
            None => {
                classes.insert(key, entry);
            }
            Some(incumbent) => {
                if !options.skip_bijection_check
                    && !verify_relabeling(
                        &entry.signature,
                        &entry.canonical.labeling,
                        &incumbent.signature,
                        &incumbent.canonical.labeling,
                    )
                {
                    return Err(Error::internal(format!(
                        "equal canonical keys without a slot bijection for {:?} and {:?}",
                        entry.set.as_slice(),
                        incumbent.set.as_slice()
                    )));
                }
                if entry.set == incumbent.set {
                    continue;
                }
                let better = !options.skip_weight_comparison
                    && (entry.weight > incumbent.weight
                        || (entry.weight == incumbent.weight && entry.set < incumbent.set));
                let (kept, dropped) = if better {
                    let old = std::mem::replace(incumbent, entry);
                    (incumbent.set.clone(), old.set)
                } else {
                    (incumbent.set.clone(), entry.set)
                };
                if let Some(log) = merges.as_deref_mut() {
                    log.push(Merge {
                        boundary: b.clone(),
                        kept,
                        dropped,
                    });
                }
            }
        }
    }
    let mut out: Vec<FamilyEntry> = classes.into_values().collect();
    out.sort_by(|x, y| x.set.cmp(&y.set));
    Ok(out)
}
