use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::ExposureTable;
use crate::bits;
use crate::error::{Error, Result};
use crate::exposure::{Assignment, ExposureMap, Label};

/// Bipartite graph between units and assignments: unit `i` and assignment `j`
/// are adjacent iff the exposure of `i` under `j` is focal.
///
/// Stored as one bit-row over units per assignment.
#[derive(Clone, Debug, PartialEq)]
pub struct NullExposureGraph {
    n_units: usize,
    n_assignments: usize,
    words: usize,
    rows: Vec<u64>,
    focal: Vec<Label>,
    assignments: Vec<Assignment>,
    table: Option<ExposureTable>,
}

impl NullExposureGraph {
    /// Builds the graph for `focal` from the exposure mapping.
    pub fn build(assignments: Vec<Assignment>, map: &ExposureMap, focal: &[Label]) -> Result<Self> {
        let table = ExposureTable::compute(map, &assignments)?;
        Self::from_table(assignments, table, focal)
    }

    /// Builds the graph from precomputed exposures.
    pub fn from_table(assignments: Vec<Assignment>, table: ExposureTable, focal: &[Label]) -> Result<Self> {
        let focal = normalize_focal(focal)?;
        if assignments.is_empty() {
            return Err(Error::InvalidParameter("no assignments".into()));
        }
        check_distinct(&assignments)?;
        if table.n_assignments() != assignments.len() {
            return Err(Error::Format("exposure table does not match assignments".into()));
        }
        let is_focal: Vec<bool> = table.dict().iter().map(|l| focal.contains(l)).collect();
        let n = table.n_units();
        let words = bits::words_for(n);
        let mut rows = vec![0u64; words * assignments.len()];
        for j in 0..assignments.len() {
            let row = &mut rows[j * words..(j + 1) * words];
            for (i, &c) in table.row(j).iter().enumerate() {
                if is_focal[c as usize] {
                    bits::set(row, i);
                }
            }
        }
        Ok(NullExposureGraph {
            n_units: n,
            n_assignments: assignments.len(),
            words,
            rows,
            focal,
            assignments,
            table: Some(table),
        })
    }

    /// Graph from explicit adjacency rows (`rows[j]` lists the units adjacent
    /// to assignment `j`). No assignment vectors or exposure labels attached.
    pub fn from_adjacency(n_units: usize, rows: &[Vec<usize>]) -> Result<Self> {
        let words = bits::words_for(n_units);
        let mut data = vec![0u64; words * rows.len()];
        for (j, row) in rows.iter().enumerate() {
            for &i in row {
                if i >= n_units {
                    return Err(Error::UnitOutOfRange { index: i, n_units });
                }
                bits::set(&mut data[j * words..(j + 1) * words], i);
            }
        }
        Ok(NullExposureGraph {
            n_units,
            n_assignments: rows.len(),
            words,
            rows: data,
            focal: Vec::new(),
            assignments: Vec::new(),
            table: None,
        })
    }

    pub(crate) fn from_raw_parts(
        n_units: usize,
        rows: Vec<u64>,
        focal: Vec<Label>,
        assignments: Vec<Assignment>,
        table: Option<ExposureTable>,
    ) -> Result<Self> {
        let words = bits::words_for(n_units);
        if words == 0 && !rows.is_empty() || words > 0 && rows.len() % words != 0 {
            return Err(Error::Format("edge rows do not match unit count".into()));
        }
        let n_assignments = if words == 0 { 0 } else { rows.len() / words };
        if !assignments.is_empty() && assignments.len() != n_assignments {
            return Err(Error::Format("assignment count does not match edge rows".into()));
        }
        Ok(NullExposureGraph { n_units, n_assignments, words, rows, focal, assignments, table })
    }

    pub fn n_units(&self) -> usize {
        self.n_units
    }

    pub fn n_assignments(&self) -> usize {
        self.n_assignments
    }

    pub fn words_per_row(&self) -> usize {
        self.words
    }

    /// Units adjacent to assignment `j`, as a bit-row.
    #[inline]
    pub fn row(&self, j: usize) -> &[u64] {
        &self.rows[j * self.words..(j + 1) * self.words]
    }

    pub(crate) fn raw_rows(&self) -> &[u64] {
        &self.rows
    }

    #[inline]
    pub fn has_edge(&self, unit: usize, assignment: usize) -> bool {
        bits::get(self.row(assignment), unit)
    }

    pub fn focal(&self) -> &[Label] {
        &self.focal
    }

    /// Assignment vectors, when the graph was built from a mapping.
    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn exposure_table(&self) -> Option<&ExposureTable> {
        self.table.as_ref()
    }

    /// Exposure label on edge (`unit`, `assignment`); `None` for non-edges or
    /// graphs without labels.
    pub fn edge_label(&self, unit: usize, assignment: usize) -> Option<&Label> {
        if !self.has_edge(unit, assignment) {
            return None;
        }
        self.table.as_ref().map(|t| t.label(assignment, unit))
    }

    pub fn index_of(&self, z: &Assignment) -> Option<usize> {
        self.assignments.iter().position(|a| a == z)
    }

    pub fn n_edges(&self) -> usize {
        bits::count(&self.rows)
    }

    pub fn density(&self) -> f64 {
        let cells = self.n_units * self.n_assignments;
        if cells == 0 {
            0.0
        } else {
            self.n_edges() as f64 / cells as f64
        }
    }

    pub fn assignment_degree(&self, j: usize) -> usize {
        bits::count(self.row(j))
    }

    pub fn unit_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n_units];
        for j in 0..self.n_assignments {
            for i in bits::ones(self.row(j)) {
                deg[i] += 1;
            }
        }
        deg
    }

    /// Assignments adjacent to at least one unit, ascending.
    pub fn focal_support(&self) -> Vec<usize> {
        (0..self.n_assignments).filter(|&j| !bits::is_zero(self.row(j))).collect()
    }

    pub fn summary(&self) -> GraphSummary {
        let mut by_assignment = BTreeMap::new();
        for j in 0..self.n_assignments {
            *by_assignment.entry(self.assignment_degree(j)).or_insert(0usize) += 1;
        }
        let mut by_unit = BTreeMap::new();
        for d in self.unit_degrees() {
            *by_unit.entry(d).or_insert(0usize) += 1;
        }
        GraphSummary {
            n_units: self.n_units,
            n_assignments: self.n_assignments,
            n_edges: self.n_edges(),
            density: self.density(),
            focal: self.focal.iter().map(ToString::to_string).collect(),
            focal_support_size: self.focal_support().len(),
            degree_histogram: by_assignment,
            unit_degree_histogram: by_unit,
        }
    }
}

/// JSON summary of a graph.
#[derive(Clone, Debug, Serialize)]
pub struct GraphSummary {
    #[serde(rename = "N")]
    pub n_units: usize,
    #[serde(rename = "H")]
    pub n_assignments: usize,
    pub n_edges: usize,
    pub density: f64,
    pub focal: Vec<String>,
    pub focal_support_size: usize,
    /// Assignment degree -> number of assignments.
    pub degree_histogram: BTreeMap<usize, usize>,
    /// Unit degree -> number of units.
    pub unit_degree_histogram: BTreeMap<usize, usize>,
}

pub(crate) fn normalize_focal(focal: &[Label]) -> Result<Vec<Label>> {
    if focal.is_empty() {
        return Err(Error::EmptyFocalSet);
    }
    let mut f = focal.to_vec();
    f.sort();
    f.dedup();
    Ok(f)
}

pub(crate) fn check_distinct(assignments: &[Assignment]) -> Result<()> {
    let mut seen: HashMap<&Assignment, usize> = HashMap::with_capacity(assignments.len());
    for (j, z) in assignments.iter().enumerate() {
        if let Some(&first) = seen.get(z) {
            return Err(Error::DuplicateAssignment { index: j, first });
        }
        seen.insert(z, j);
    }
    Ok(())
}
