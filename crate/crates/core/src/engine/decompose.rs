use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::biclique::{is_biclique, Biclique};
use super::matrix::{self, Floors, Matrix};
use crate::bits;
use crate::error::{Error, Result};
use crate::exposure::{Assignment, ExposureMap};
use crate::graph::{check_distinct, multi_null_rows, ExposureFamily, ExposureTable, NullExposureGraph};
use crate::rng::Rng;

/// Default cap on search-tree nodes per biclique extraction.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

const NONE: u32 = u32::MAX;

static VALIDATED: AtomicUsize = AtomicUsize::new(0);
static VIOLATIONS: AtomicUsize = AtomicUsize::new(0);

/// Number of decompositions checked so far in this process, and how many
/// failed. Every decomposition built by this crate is checked on construction.
pub fn validation_counts() -> (usize, usize) {
    (VALIDATED.load(AtomicOrdering::Relaxed), VIOLATIONS.load(AtomicOrdering::Relaxed))
}

fn record(outcome: &Result<()>) {
    VALIDATED.fetch_add(1, AtomicOrdering::Relaxed);
    if outcome.is_err() {
        VIOLATIONS.fetch_add(1, AtomicOrdering::Relaxed);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecomposeConfig {
    pub min_units: usize,
    pub min_assignments: usize,
    pub node_budget: usize,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig { min_units: 1, min_assignments: 1, node_budget: DEFAULT_NODE_BUDGET }
    }
}

impl DecomposeConfig {
    pub fn with_floors(min_units: usize, min_assignments: usize) -> Self {
        DecomposeConfig { min_units, min_assignments, ..Default::default() }
    }

    fn floors(&self) -> Floors {
        Floors::new(self.min_units, self.min_assignments)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DecompositionKind {
    SingleGraph,
    MultiNull { family: ExposureFamily },
}

/// Bicliques whose assignment sets partition the testable assignments.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    kind: DecompositionKind,
    seed: Option<u64>,
    floors: [usize; 2],
    bicliques: Vec<Biclique>,
    anchors: Option<Vec<usize>>,
    relaxed_from: Option<usize>,
    truncated_searches: usize,
    locator: Vec<u32>,
}

impl Decomposition {
    /// Assembles a decomposition over `n_assignments` host assignments and
    /// checks that the assignment sets are disjoint and in range.
    pub fn from_parts(
        kind: DecompositionKind,
        seed: Option<u64>,
        floors: [usize; 2],
        n_assignments: usize,
        bicliques: Vec<Biclique>,
        anchors: Option<Vec<usize>>,
    ) -> Result<Self> {
        let mut locator = vec![NONE; n_assignments];
        for (k, b) in bicliques.iter().enumerate() {
            if b.units.is_empty() || b.assignments.is_empty() {
                return Err(Error::Format(format!("biclique {k} has an empty side")));
            }
            for &j in &b.assignments {
                if j >= n_assignments {
                    return Err(Error::AssignmentOutOfRange { index: j, n_assignments });
                }
                if locator[j] != NONE {
                    return Err(Error::Format(format!("assignment {j} appears in bicliques {} and {k}", locator[j])));
                }
                locator[j] = k as u32;
            }
        }
        if let Some(a) = &anchors {
            if a.len() != bicliques.len() {
                return Err(Error::Format("one anchor per biclique required".into()));
            }
        }
        Ok(Decomposition { kind, seed, floors, bicliques, anchors, relaxed_from: None, truncated_searches: 0, locator })
    }

    pub fn kind(&self) -> &DecompositionKind {
        &self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn floors(&self) -> [usize; 2] {
        self.floors
    }

    pub fn bicliques(&self) -> &[Biclique] {
        &self.bicliques
    }

    pub fn len(&self) -> usize {
        self.bicliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bicliques.is_empty()
    }

    /// Anchor assignment of each biclique (multi-null decompositions only).
    pub fn anchors(&self) -> Option<&[usize]> {
        self.anchors.as_deref()
    }

    /// Index of the first biclique extracted after the floors were relaxed.
    pub fn relaxed_from(&self) -> Option<usize> {
        self.relaxed_from
    }

    /// Number of extractions that hit the node budget.
    pub fn truncated_searches(&self) -> usize {
        self.truncated_searches
    }

    pub fn n_assignments(&self) -> usize {
        self.locator.len()
    }

    /// Index of the biclique holding assignment `j`.
    pub fn locate(&self, j: usize) -> Option<usize> {
        self.locator.get(j).copied().filter(|&k| k != NONE).map(|k| k as usize)
    }

    /// The biclique holding assignment `j`; untestable if there is none.
    pub fn locate_biclique(&self, j: usize) -> Result<&Biclique> {
        self.locate(j).map(|k| &self.bicliques[k]).ok_or_else(|| {
            Error::Untestable(format!("assignment {j} exposes no unit to the hypothesis and lies in no biclique"))
        })
    }

    /// Sorted union of all assignment sets.
    pub fn covered(&self) -> Vec<usize> {
        (0..self.locator.len()).filter(|&j| self.locator[j] != NONE).collect()
    }

    /// SHA-256 of the locator as little-endian `u32`s, `u32::MAX` for
    /// uncovered assignments.
    pub fn locator_checksum(&self) -> String {
        let mut h = Sha256::new();
        for k in &self.locator {
            h.update(k.to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Checks completeness of every biclique and that the assignment sets
    /// cover exactly the focal support of `graph`.
    pub fn validate(&self, graph: &NullExposureGraph) -> Result<()> {
        let out = self.check_single(graph);
        record(&out);
        out
    }

    fn check_single(&self, graph: &NullExposureGraph) -> Result<()> {
        if self.locator.len() != graph.n_assignments() {
            return Err(Error::Format("decomposition and graph differ in assignment count".into()));
        }
        for (k, b) in self.bicliques.iter().enumerate() {
            if !is_biclique(graph, b)? {
                return Err(Error::Format(format!("biclique {k} is not complete")));
            }
        }
        if self.covered() != graph.focal_support() {
            return Err(Error::Format("assignment sets do not cover the focal support exactly".into()));
        }
        Ok(())
    }

    /// Checks a multi-null decomposition against the exposures it was built
    /// from: each biclique holds its anchor and is complete in the anchored
    /// graph, and together they cover the initialized candidate set.
    pub fn validate_multi_null(&self, table: &ExposureTable, family: &ExposureFamily) -> Result<()> {
        let out = self.check_multi_null(table, family);
        record(&out);
        out
    }

    fn check_multi_null(&self, table: &ExposureTable, family: &ExposureFamily) -> Result<()> {
        let anchors = self.anchors.as_ref().ok_or_else(|| Error::Format("multi-null decomposition lacks anchors".into()))?;
        if self.locator.len() != table.n_assignments() {
            return Err(Error::Format("decomposition and candidates differ in size".into()));
        }
        let classes = family.classes(table.dict());
        for (k, (b, &a)) in self.bicliques.iter().zip(anchors).enumerate() {
            if !b.contains_assignment(a) {
                return Err(Error::Format(format!("biclique {k} lacks its anchor")));
            }
            for &i in &b.units {
                let want = classes[table.code(a, i) as usize];
                if want.is_none() || b.assignments.iter().any(|&j| classes[table.code(j, i) as usize] != want) {
                    return Err(Error::Format(format!("biclique {k} is not complete at unit {i}")));
                }
            }
        }
        if self.covered() != initial_candidates(table, family) {
            return Err(Error::Format("assignment sets do not cover the candidate set exactly".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let file = DecompositionFile {
            kind: self.kind.clone(),
            seed: self.seed,
            floors: self.floors,
            n_assignments: self.locator.len(),
            relaxed_from: self.relaxed_from,
            bicliques: self
                .bicliques
                .iter()
                .enumerate()
                .map(|(k, b)| BicliqueEntry {
                    units: b.units.clone(),
                    assignment_indices: b.assignments.clone(),
                    anchor: self.anchors.as_ref().map(|a| a[k]),
                })
                .collect(),
            locator_checksum: self.locator_checksum(),
        };
        serde_json::to_string_pretty(&file).map_err(|e| Error::Format(e.to_string()))
    }

    /// Parses a decomposition file and checks its locator checksum. Callers
    /// should still run [`Decomposition::validate`] against the host graph.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: DecompositionFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let anchors = if file.bicliques.iter().all(|b| b.anchor.is_some()) && !file.bicliques.is_empty() {
            Some(file.bicliques.iter().map(|b| b.anchor.unwrap()).collect())
        } else {
            None
        };
        let bicliques = file.bicliques.into_iter().map(|b| Biclique::new(b.units, b.assignment_indices)).collect();
        let mut d = Decomposition::from_parts(file.kind, file.seed, file.floors, file.n_assignments, bicliques, anchors)?;
        d.relaxed_from = file.relaxed_from;
        if d.locator_checksum() != file.locator_checksum {
            return Err(Error::Format("locator checksum mismatch".into()));
        }
        Ok(d)
    }
}

#[derive(Serialize, Deserialize)]
struct DecompositionFile {
    kind: DecompositionKind,
    seed: Option<u64>,
    floors: [usize; 2],
    n_assignments: usize,
    #[serde(default)]
    relaxed_from: Option<usize>,
    bicliques: Vec<BicliqueEntry>,
    locator_checksum: String,
}

#[derive(Serialize, Deserialize)]
struct BicliqueEntry {
    units: Vec<usize>,
    assignment_indices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    anchor: Option<usize>,
}

/// All inclusion-maximal bicliques with at least `n0` units and `n1`
/// assignments, best first (see [`super::compare_bicliques`]).
pub fn enumerate_bicliques(graph: &NullExposureGraph, n0: usize, n1: usize) -> Vec<Biclique> {
    enumerate_bicliques_with_budget(graph, n0, n1, DEFAULT_NODE_BUDGET).0
}

/// As [`enumerate_bicliques`]; the flag reports whether the budget ran out.
pub fn enumerate_bicliques_with_budget(graph: &NullExposureGraph, n0: usize, n1: usize, budget: usize) -> (Vec<Biclique>, bool) {
    if n0 > graph.n_units() || n1 > graph.n_assignments() {
        return (Vec::new(), false);
    }
    let ids: Vec<usize> = (0..graph.n_assignments()).collect();
    let m = Matrix::from_graph(graph, &ids);
    let out = matrix::enumerate(&m, Floors::new(n0, n1), budget);
    (out.found, out.truncated)
}

/// Heuristic maximum-edge biclique meeting the floors (exact when the search
/// finishes within `budget` nodes).
pub fn max_edge_biclique(graph: &NullExposureGraph, n0: usize, n1: usize, budget: usize) -> Option<Biclique> {
    let ids: Vec<usize> = (0..graph.n_assignments()).collect();
    let m = Matrix::from_graph(graph, &ids);
    matrix::max_edge(&m, Floors::new(n0, n1), budget).found.pop()
}

/// Greedy decomposition: repeatedly take the largest biclique meeting the
/// floors and remove its assignments. Once nothing meets the floors they drop
/// to one unit and one assignment so that every testable assignment is
/// covered.
pub fn decompose_greedy(graph: &NullExposureGraph, config: &DecomposeConfig) -> Result<Decomposition> {
    let mut active = graph.focal_support();
    if active.is_empty() {
        return Err(Error::Untestable("no assignment exposes any unit to the focal set".into()));
    }
    let mut floors = config.floors();
    let mut bicliques = Vec::new();
    let mut relaxed_from = None;
    let mut truncated = 0;
    while !active.is_empty() {
        let m = Matrix::from_graph(graph, &active);
        let res = matrix::max_edge(&m, floors, config.node_budget);
        truncated += res.truncated as usize;
        match res.found.into_iter().next() {
            Some(b) => {
                active.retain(|j| !b.contains_assignment(*j));
                bicliques.push(b);
            }
            None if floors != Floors::ONE => {
                floors = Floors::ONE;
                relaxed_from = Some(bicliques.len());
            }
            None => unreachable!("every active assignment has an edge"),
        }
    }
    let mut d = Decomposition::from_parts(
        DecompositionKind::SingleGraph,
        None,
        [config.min_units, config.min_assignments],
        graph.n_assignments(),
        bicliques,
        None,
    )?;
    d.relaxed_from = relaxed_from;
    d.truncated_searches = truncated;
    let check = d.validate(graph);
    debug_assert!(check.is_ok(), "{check:?}");
    check?;
    Ok(d)
}

/// Candidates where at least one unit has an exposure covered by the family.
pub fn initial_candidates(table: &ExposureTable, family: &ExposureFamily) -> Vec<usize> {
    let classes = family.classes(table.dict());
    (0..table.n_assignments()).filter(|&j| table.row(j).iter().any(|&c| classes[c as usize].is_some())).collect()
}

/// Patchwork decomposition for an intersection hypothesis: draw an anchor
/// uniformly from the remaining candidates, take the largest biclique of the
/// anchored graph that contains it, remove its assignments, repeat.
pub fn decompose_multi_null(
    candidates: &[Assignment],
    map: &ExposureMap,
    family: &ExposureFamily,
    config: &DecomposeConfig,
    rng: &mut Rng,
) -> Result<(Decomposition, ExposureTable)> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no candidate assignments".into()));
    }
    check_distinct(candidates)?;
    let table = ExposureTable::compute(map, candidates)?;
    let d = decompose_multi_null_table(&table, family, config, rng)?;
    Ok((d, table))
}

/// As [`decompose_multi_null`] on precomputed exposures.
pub fn decompose_multi_null_table(
    table: &ExposureTable,
    family: &ExposureFamily,
    config: &DecomposeConfig,
    rng: &mut Rng,
) -> Result<Decomposition> {
    let classes = family.classes(table.dict());
    let mut remaining = initial_candidates(table, family);
    if remaining.is_empty() {
        return Err(Error::Untestable("no candidate exposes any unit to the hypothesis".into()));
    }
    let n = table.n_units();
    let words = bits::words_for(n);
    let mut floors = config.floors();
    let mut bicliques = Vec::new();
    let mut anchors = Vec::new();
    let mut relaxed_from = None;
    let mut truncated = 0;
    while !remaining.is_empty() {
        let anchor = remaining[rng.random_range(0..remaining.len())];
        let mut rows = multi_null_rows(table, &classes, anchor, &remaining);
        let local = remaining.binary_search(&anchor).expect("anchor is remaining");
        let nbhd = rows[local * words..(local + 1) * words].to_vec();
        // Keeping only units linked to the anchor forces it into every extent.
        for chunk in rows.chunks_mut(words.max(1)) {
            bits::and_into(chunk, &nbhd);
        }
        let m = Matrix::new(n, remaining.clone(), rows);
        let mut found = None;
        while found.is_none() {
            let res = matrix::max_edge(&m, floors, config.node_budget);
            truncated += res.truncated as usize;
            found = res.found.into_iter().next();
            if found.is_none() {
                if floors == Floors::ONE {
                    return Err(Error::Untestable(format!("anchor {anchor} has no linked unit")));
                }
                floors = Floors::ONE;
                relaxed_from = Some(bicliques.len());
            }
        }
        let b = found.unwrap();
        debug_assert!(b.contains_assignment(anchor));
        remaining.retain(|j| !b.contains_assignment(*j));
        bicliques.push(b);
        anchors.push(anchor);
    }
    let mut d = Decomposition::from_parts(
        DecompositionKind::MultiNull { family: family.clone() },
        None,
        [config.min_units, config.min_assignments],
        table.n_assignments(),
        bicliques,
        Some(anchors),
    )?;
    d.relaxed_from = relaxed_from;
    d.truncated_searches = truncated;
    let check = d.validate_multi_null(table, family);
    debug_assert!(check.is_ok(), "{check:?}");
    check?;
    Ok(d)
}

impl Decomposition {
    /// Records the seed that drove a randomized construction.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}
