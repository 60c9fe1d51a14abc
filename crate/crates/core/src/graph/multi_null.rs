use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{ExposureTable, NullExposureGraph};
use crate::bits;
use crate::error::{Error, Result};
use crate::exposure::{Assignment, ExposureMap, Label};

/// Family of pairwise disjoint exposure sets used by intersection hypotheses.
///
/// The exclusion family puts every label in its own set, whatever the
/// alphabet turns out to be.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExposureFamily {
    sets: Option<Vec<Vec<Label>>>,
}

impl ExposureFamily {
    pub fn new(sets: Vec<Vec<Label>>) -> Result<Self> {
        if sets.is_empty() || sets.iter().any(Vec::is_empty) {
            return Err(Error::EmptyFocalSet);
        }
        let mut owner: HashMap<&Label, usize> = HashMap::new();
        for (k, set) in sets.iter().enumerate() {
            for label in set {
                if let Some(&prev) = owner.get(label) {
                    if prev != k {
                        return Err(Error::OverlappingFamily(format!("label {label} appears in sets {prev} and {k}")));
                    }
                }
                owner.insert(label, k);
            }
        }
        let sets = sets
            .into_iter()
            .map(|mut s| {
                s.sort();
                s.dedup();
                s
            })
            .collect();
        Ok(ExposureFamily { sets: Some(sets) })
    }

    /// Every exposure is its own set (the exclusion restriction).
    pub fn exclusion() -> Self {
        ExposureFamily { sets: None }
    }

    pub fn is_exclusion(&self) -> bool {
        self.sets.is_none()
    }

    pub fn sets(&self) -> Option<&[Vec<Label>]> {
        self.sets.as_deref()
    }

    /// Index of the set holding `label`, if any. Under the exclusion family
    /// every label is covered, so this returns `Some(0)` as a marker only.
    pub fn set_of(&self, label: &Label) -> Option<usize> {
        match &self.sets {
            None => Some(0),
            Some(sets) => sets.iter().position(|s| s.contains(label)),
        }
    }

    pub fn covers(&self, label: &Label) -> bool {
        self.set_of(label).is_some()
    }

    /// Class id per dictionary code; two codes are linked iff their classes are
    /// equal and present.
    pub(crate) fn classes(&self, dict: &[Label]) -> Vec<Option<usize>> {
        match &self.sets {
            None => (0..dict.len()).map(Some).collect(),
            Some(_) => dict.iter().map(|l| self.set_of(l)).collect(),
        }
    }
}

/// Null exposure graph of an intersection hypothesis, anchored at one
/// assignment: unit `i` links to `z'` iff `f_i(z')` lies in the family member
/// that holds `f_i(anchor)`.
#[derive(Clone, Debug)]
pub struct MultiNullGraph {
    anchor: usize,
    family: ExposureFamily,
    graph: NullExposureGraph,
}

impl MultiNullGraph {
    /// Index of the anchor among the candidate assignments.
    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn family(&self) -> &ExposureFamily {
        &self.family
    }

    pub fn graph(&self) -> &NullExposureGraph {
        &self.graph
    }

    pub fn into_graph(self) -> NullExposureGraph {
        self.graph
    }
}

pub fn build_multi_null_graph(
    z: &Assignment,
    candidates: Vec<Assignment>,
    map: &ExposureMap,
    family: &ExposureFamily,
) -> Result<MultiNullGraph> {
    super::null_graph::check_distinct(&candidates)?;
    let anchor = candidates
        .iter()
        .position(|c| c == z)
        .ok_or_else(|| Error::InvalidParameter("anchor assignment is not among the candidates".into()))?;
    let table = ExposureTable::compute(map, &candidates)?;
    let classes = family.classes(table.dict());
    let rows: Vec<usize> = (0..candidates.len()).collect();
    let data = multi_null_rows(&table, &classes, anchor, &rows);
    let focal = match family.sets() {
        Some(sets) => sets.iter().flatten().cloned().collect(),
        None => Vec::new(),
    };
    let graph = NullExposureGraph::from_raw_parts(table.n_units(), data, focal, candidates, Some(table))?;
    Ok(MultiNullGraph { anchor, family: family.clone(), graph })
}

/// Bit-rows of the anchored graph over the listed table rows.
pub(crate) fn multi_null_rows(table: &ExposureTable, classes: &[Option<usize>], anchor: usize, rows: &[usize]) -> Vec<u64> {
    let n = table.n_units();
    let words = bits::words_for(n);
    let anchor_class: Vec<Option<usize>> = table.row(anchor).iter().map(|&c| classes[c as usize]).collect();
    let mut data = vec![0u64; words * rows.len()];
    for (r, &j) in rows.iter().enumerate() {
        let out = &mut data[r * words..(r + 1) * words];
        for (i, &c) in table.row(j).iter().enumerate() {
            if let Some(a) = anchor_class[i] {
                if classes[c as usize] == Some(a) {
                    bits::set(out, i);
                }
            }
        }
    }
    data
}
