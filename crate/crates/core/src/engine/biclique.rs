use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NullExposureGraph;

/// Complete bipartite subgraph: every listed unit is adjacent to every listed
/// assignment. Both sides are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Biclique {
    pub units: Vec<usize>,
    #[serde(rename = "assignment_indices")]
    pub assignments: Vec<usize>,
}

impl Biclique {
    pub fn new(mut units: Vec<usize>, mut assignments: Vec<usize>) -> Self {
        units.sort_unstable();
        units.dedup();
        assignments.sort_unstable();
        assignments.dedup();
        Biclique { units, assignments }
    }

    pub fn n_units(&self) -> usize {
        self.units.len()
    }

    pub fn n_assignments(&self) -> usize {
        self.assignments.len()
    }

    pub fn n_edges(&self) -> usize {
        self.units.len() * self.assignments.len()
    }

    pub fn contains_assignment(&self, j: usize) -> bool {
        self.assignments.binary_search(&j).is_ok()
    }

    pub fn contains_unit(&self, i: usize) -> bool {
        self.units.binary_search(&i).is_ok()
    }
}

/// Ranking used everywhere a single biclique must be chosen: more edges, then
/// more units, then the lexicographically smaller unit list, then the smaller
/// assignment list. `Greater` means `a` is preferred.
pub fn compare_bicliques(a: &Biclique, b: &Biclique) -> Ordering {
    a.n_edges()
        .cmp(&b.n_edges())
        .then(a.n_units().cmp(&b.n_units()))
        .then_with(|| b.units.cmp(&a.units))
        .then_with(|| b.assignments.cmp(&a.assignments))
}

/// Completeness check against `graph`. Empty sides are not bicliques.
pub fn is_biclique(graph: &NullExposureGraph, candidate: &Biclique) -> Result<bool> {
    if let Some(&i) = candidate.units.iter().find(|&&i| i >= graph.n_units()) {
        return Err(Error::UnitOutOfRange { index: i, n_units: graph.n_units() });
    }
    if let Some(&j) = candidate.assignments.iter().find(|&&j| j >= graph.n_assignments()) {
        return Err(Error::AssignmentOutOfRange { index: j, n_assignments: graph.n_assignments() });
    }
    if candidate.units.is_empty() || candidate.assignments.is_empty() {
        return Ok(false);
    }
    let need = crate::bits::from_indices(graph.n_units(), candidate.units.iter().copied());
    Ok(candidate.assignments.iter().all(|&j| crate::bits::is_subset(&need, graph.row(j))))
}
