use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exposure::{Assignment, ExposureMap, Label};

/// Exposure of every unit under every assignment, dictionary-coded.
#[derive(Clone, Debug, PartialEq)]
pub struct ExposureTable {
    n_units: usize,
    n_assignments: usize,
    dict: Vec<Label>,
    codes: Vec<u16>,
}

impl ExposureTable {
    pub fn compute(map: &ExposureMap, assignments: &[Assignment]) -> Result<Self> {
        let n = map.n_units();
        let mut dict: Vec<Label> = Vec::new();
        let mut lookup: HashMap<Label, u16> = HashMap::new();
        let mut codes = Vec::with_capacity(n * assignments.len());
        for z in assignments {
            for label in map.exposures(z)? {
                let code = match lookup.get(&label) {
                    Some(&c) => c,
                    None => {
                        let c = u16::try_from(dict.len())
                            .map_err(|_| Error::InvalidExposure("more than 65535 distinct exposure labels".into()))?;
                        lookup.insert(label.clone(), c);
                        dict.push(label);
                        c
                    }
                };
                codes.push(code);
            }
        }
        Ok(ExposureTable { n_units: n, n_assignments: assignments.len(), dict, codes })
    }

    pub(crate) fn from_parts(n_units: usize, n_assignments: usize, dict: Vec<Label>, codes: Vec<u16>) -> Result<Self> {
        if codes.len() != n_units * n_assignments {
            return Err(Error::Format("label table has the wrong size".into()));
        }
        if codes.iter().any(|&c| c as usize >= dict.len()) {
            return Err(Error::Format("label code outside dictionary".into()));
        }
        Ok(ExposureTable { n_units, n_assignments, dict, codes })
    }

    pub fn n_units(&self) -> usize {
        self.n_units
    }

    pub fn n_assignments(&self) -> usize {
        self.n_assignments
    }

    pub fn dict(&self) -> &[Label] {
        &self.dict
    }

    pub fn code_of(&self, label: &Label) -> Option<u16> {
        self.dict.iter().position(|l| l == label).map(|c| c as u16)
    }

    /// Codes of all units under assignment `j`.
    #[inline]
    pub fn row(&self, j: usize) -> &[u16] {
        &self.codes[j * self.n_units..(j + 1) * self.n_units]
    }

    #[inline]
    pub fn code(&self, j: usize, i: usize) -> u16 {
        self.codes[j * self.n_units + i]
    }

    pub fn label(&self, j: usize, i: usize) -> &Label {
        &self.dict[self.code(j, i) as usize]
    }

    pub(crate) fn codes(&self) -> &[u16] {
        &self.codes
    }

    /// Table restricted to the listed assignment rows, in that order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut codes = Vec::with_capacity(rows.len() * self.n_units);
        for &j in rows {
            codes.extend_from_slice(self.row(j));
        }
        ExposureTable { n_units: self.n_units, n_assignments: rows.len(), dict: self.dict.clone(), codes }
    }
}
