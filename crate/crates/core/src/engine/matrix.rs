//! Working copy of a graph restricted to some assignments, with both row and
//! column bitsets, and the closed-set search over it.

use std::cmp::Ordering;

use super::biclique::{compare_bicliques, Biclique};
use crate::bits;

/// Minimum sizes of the unit and assignment sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Floors {
    pub units: usize,
    pub assignments: usize,
}

impl Floors {
    pub fn new(units: usize, assignments: usize) -> Self {
        Floors { units: units.max(1), assignments: assignments.max(1) }
    }

    pub const ONE: Floors = Floors { units: 1, assignments: 1 };
}

pub(crate) struct Matrix {
    n_units: usize,
    uw: usize,
    ids: Vec<usize>,
    rows: Vec<u64>,
    aw: usize,
    cols: Vec<u64>,
}

impl Matrix {
    /// `rows` holds one unit bitset per entry of `ids`.
    pub(crate) fn new(n_units: usize, ids: Vec<usize>, rows: Vec<u64>) -> Self {
        let uw = bits::words_for(n_units);
        debug_assert_eq!(rows.len(), uw * ids.len());
        let aw = bits::words_for(ids.len());
        let mut cols = vec![0u64; n_units * aw];
        for r in 0..ids.len() {
            for i in bits::ones(&rows[r * uw..(r + 1) * uw]) {
                bits::set(&mut cols[i * aw..(i + 1) * aw], r);
            }
        }
        Matrix { n_units, uw, ids, rows, aw, cols }
    }

    pub(crate) fn from_graph(graph: &crate::graph::NullExposureGraph, ids: &[usize]) -> Self {
        let uw = graph.words_per_row();
        let mut rows = Vec::with_capacity(uw * ids.len());
        for &j in ids {
            rows.extend_from_slice(graph.row(j));
        }
        Matrix::new(graph.n_units(), ids.to_vec(), rows)
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.rows[r * self.uw..(r + 1) * self.uw]
    }

    fn col(&self, i: usize) -> &[u64] {
        &self.cols[i * self.aw..(i + 1) * self.aw]
    }

    fn to_biclique(&self, units: &[u64], ext: &[u64]) -> Biclique {
        Biclique::new(bits::ones(units).collect(), bits::ones(ext).map(|r| self.ids[r]).collect())
    }

    /// Units adjacent to every assignment in `ext`.
    fn closure(&self, ext: &[u64]) -> Vec<u64> {
        let mut out = bits::full(self.n_units);
        for r in bits::ones(ext) {
            bits::and_into(&mut out, self.row(r));
        }
        out
    }

    /// Greedy peeling: start from all units, repeatedly drop the unit that
    /// blocks the most nearly-full rows, keep the best closed biclique seen.
    fn peel(&self, floors: Floors) -> Option<Biclique> {
        let mut units = vec![0u64; self.uw];
        for i in 0..self.n_units {
            if bits::count(self.col(i)) >= floors.assignments {
                bits::set(&mut units, i);
            }
        }
        let mut size = bits::count(&units);
        let mut best: Option<Biclique> = None;
        let mut credit = vec![0.0f64; self.n_units];
        let mut missing = vec![0u64; self.uw];
        while size >= floors.units {
            let mut full = vec![0u64; self.aw];
            credit.iter_mut().for_each(|c| *c = 0.0);
            for r in 0..self.ids.len() {
                let row = self.row(r);
                let m = size - bits::count_and(&units, row);
                if m == 0 {
                    bits::set(&mut full, r);
                } else if m <= 30 {
                    let w = 0.5f64.powi(m as i32 - 1);
                    for (k, slot) in missing.iter_mut().enumerate() {
                        *slot = units[k] & !row[k];
                    }
                    for i in bits::ones(&missing) {
                        credit[i] += w;
                    }
                }
            }
            if bits::count(&full) >= floors.assignments {
                let closed = self.closure(&full);
                if bits::count(&closed) >= floors.units {
                    let cand = self.to_biclique(&closed, &full);
                    if best.as_ref().is_none_or(|b| compare_bicliques(&cand, b) == Ordering::Greater) {
                        best = Some(cand);
                    }
                }
            }
            let mut drop = None;
            let mut top = 0.0;
            for i in bits::ones(&units) {
                if credit[i] > top {
                    top = credit[i];
                    drop = Some(i);
                }
            }
            let drop = match drop {
                Some(i) => i,
                None => match bits::ones(&units).min_by_key(|&i| (bits::count(self.col(i)), std::cmp::Reverse(i))) {
                    Some(i) => i,
                    None => break,
                },
            };
            bits::clear(&mut units, drop);
            size -= 1;
        }
        best
    }
}

/// Outcome of a budgeted search.
pub(crate) struct SearchResult {
    pub found: Vec<Biclique>,
    pub truncated: bool,
}

enum Goal {
    All,
    Best(Option<Biclique>),
}

struct Search<'a> {
    m: &'a Matrix,
    floors: Floors,
    order: Vec<usize>,
    pos: Vec<usize>,
    budget: usize,
    nodes: usize,
    truncated: bool,
    goal: Goal,
    all: Vec<Biclique>,
}

impl<'a> Search<'a> {
    fn new(m: &'a Matrix, floors: Floors, budget: usize, goal: Goal) -> Self {
        let mut order: Vec<usize> = (0..m.n_units).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(bits::count(m.col(i))), i));
        let mut pos = vec![0; m.n_units];
        for (p, &i) in order.iter().enumerate() {
            pos[i] = p;
        }
        Search { m, floors, order, pos, budget, nodes: 0, truncated: false, goal, all: Vec::new() }
    }

    fn best_edges(&self) -> usize {
        match &self.goal {
            Goal::Best(Some(b)) => b.n_edges(),
            _ => 0,
        }
    }

    fn run(&mut self) {
        let ext = bits::full(self.m.ids.len());
        if bits::count(&ext) < self.floors.assignments {
            return;
        }
        let units = self.m.closure(&ext);
        self.visit(units, ext, 0);
    }

    fn visit(&mut self, units: Vec<u64>, ext: Vec<u64>, start: usize) {
        if self.nodes >= self.budget {
            self.truncated = true;
            return;
        }
        self.nodes += 1;
        let n_u = bits::count(&units);
        let n_e = bits::count(&ext);
        if n_u >= self.floors.units && n_e >= self.floors.assignments {
            let cand = self.m.to_biclique(&units, &ext);
            match &mut self.goal {
                Goal::All => self.all.push(cand),
                Goal::Best(best) => {
                    if best.as_ref().is_none_or(|b| compare_bicliques(&cand, b) == Ordering::Greater) {
                        *best = Some(cand);
                    }
                }
            }
        }

        // Candidate extensions and their surviving assignment counts.
        let mut children: Vec<(usize, usize)> = Vec::new();
        for p in start..self.order.len() {
            let j = self.order[p];
            if bits::get(&units, j) {
                continue;
            }
            let c = bits::count_and(&ext, self.m.col(j));
            if c >= self.floors.assignments {
                children.push((p, c));
            }
        }
        if children.is_empty() {
            return;
        }
        if matches!(self.goal, Goal::Best(_)) {
            let mut counts: Vec<usize> = children.iter().map(|&(_, c)| c).collect();
            counts.sort_unstable_by(|a, b| b.cmp(a));
            let bound = counts
                .iter()
                .enumerate()
                .filter(|&(k, _)| n_u + k + 1 >= self.floors.units)
                .map(|(k, &c)| (n_u + k + 1) * c)
                .max()
                .unwrap_or(0);
            if bound < self.best_edges() {
                return;
            }
        }
        for (p, _) in children {
            let j = self.order[p];
            let mut child_ext = ext.clone();
            bits::and_into(&mut child_ext, self.m.col(j));
            let child_units = self.m.closure(&child_ext);
            // Canonical only if the closure adds no unit ordered before j.
            let canonical = bits::ones(&child_units).all(|i| bits::get(&units, i) || self.pos[i] >= p);
            if canonical {
                self.visit(child_units, child_ext, p + 1);
                if self.truncated {
                    return;
                }
            }
        }
    }
}

/// All inclusion-maximal bicliques meeting the floors, best first.
pub(crate) fn enumerate(m: &Matrix, floors: Floors, budget: usize) -> SearchResult {
    let mut s = Search::new(m, floors, budget, Goal::All);
    s.run();
    let mut found = std::mem::take(&mut s.all);
    found.sort_by(|a, b| compare_bicliques(b, a));
    SearchResult { found, truncated: s.truncated }
}

/// Largest biclique meeting the floors, or `None` if none does. Exact unless
/// the node budget runs out, in which case the best one seen is returned.
pub(crate) fn max_edge(m: &Matrix, floors: Floors, budget: usize) -> SearchResult {
    let seed = m.peel(floors);
    let mut s = Search::new(m, floors, budget, Goal::Best(seed));
    s.run();
    let found = match std::mem::replace(&mut s.goal, Goal::All) {
        Goal::Best(b) => b.into_iter().collect(),
        Goal::All => Vec::new(),
    };
    SearchResult { found, truncated: s.truncated }
}
