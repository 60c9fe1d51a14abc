//! Exhaustive searches for small graphs, independent of the heuristic engine.

use std::cmp::Ordering;

use super::biclique::{compare_bicliques, Biclique};
use crate::bits;
use crate::error::{Error, Result};
use crate::graph::NullExposureGraph;

/// Largest side that exhaustive search accepts.
pub const EXACT_LIMIT: usize = 24;

/// Per-unit assignment bitsets.
fn columns(g: &NullExposureGraph) -> Vec<Vec<u64>> {
    let mut cols = vec![vec![0u64; bits::words_for(g.n_assignments())]; g.n_units()];
    for j in 0..g.n_assignments() {
        for i in bits::ones(g.row(j)) {
            bits::set(&mut cols[i], j);
        }
    }
    cols
}

fn guard(g: &NullExposureGraph) -> Result<()> {
    if g.n_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    if g.n_units() > EXACT_LIMIT && g.n_assignments() > EXACT_LIMIT {
        return Err(Error::SearchTooLarge { n_units: g.n_units(), n_assignments: g.n_assignments(), limit: EXACT_LIMIT });
    }
    Ok(())
}

/// Maximum-edge biclique by brute force over subsets of the smaller side,
/// ranked by [`compare_bicliques`].
pub fn max_edge_biclique_exact(g: &NullExposureGraph) -> Result<Biclique> {
    guard(g)?;
    let mut best: Option<Biclique> = None;
    let mut offer = |c: Biclique| {
        if best.as_ref().is_none_or(|b| compare_bicliques(&c, b) == Ordering::Greater) {
            best = Some(c);
        }
    };
    if g.n_units() <= g.n_assignments() || g.n_assignments() > EXACT_LIMIT {
        let cols = columns(g);
        let mut chosen = Vec::new();
        subsets(&cols, 0, bits::full(g.n_assignments()), &mut chosen, &mut |s, ext| {
            offer(Biclique::new(s.to_vec(), bits::ones(ext).collect()));
        });
    } else {
        let rows: Vec<Vec<u64>> = (0..g.n_assignments()).map(|j| g.row(j).to_vec()).collect();
        let mut chosen = Vec::new();
        subsets(&rows, 0, bits::full(g.n_units()), &mut chosen, &mut |t, units| {
            offer(Biclique::new(bits::ones(units).collect(), t.to_vec()));
        });
    }
    Ok(best.expect("graph has an edge"))
}

/// Visits every non-empty subset of `sets` whose intersection is non-empty.
fn subsets(sets: &[Vec<u64>], from: usize, acc: Vec<u64>, chosen: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize], &[u64])) {
    for k in from..sets.len() {
        let mut next = acc.clone();
        bits::and_into(&mut next, &sets[k]);
        if bits::is_zero(&next) {
            continue;
        }
        chosen.push(k);
        visit(chosen, &next);
        subsets(sets, k + 1, next, chosen, visit);
        chosen.pop();
    }
}

/// Whether the graph holds a biclique with `n` units and `h` assignments.
pub fn exists_biclique(g: &NullExposureGraph, n: usize, h: usize) -> Result<bool> {
    if n == 0 || h == 0 {
        return Err(Error::InvalidParameter("biclique sides must be positive".into()));
    }
    if n > g.n_units() || h > g.n_assignments() {
        return Ok(false);
    }
    if g.n_units() > EXACT_LIMIT && g.n_assignments() > EXACT_LIMIT {
        return Err(Error::SearchTooLarge { n_units: g.n_units(), n_assignments: g.n_assignments(), limit: EXACT_LIMIT });
    }
    let (sets, pick, need, width) = if g.n_units() <= g.n_assignments() || g.n_assignments() > EXACT_LIMIT {
        (columns(g), n, h, g.n_assignments())
    } else {
        ((0..g.n_assignments()).map(|j| g.row(j).to_vec()).collect(), h, n, g.n_units())
    };
    Ok(choose_with_common(&sets, 0, pick, need, bits::full(width)))
}

fn choose_with_common(sets: &[Vec<u64>], from: usize, left: usize, need: usize, acc: Vec<u64>) -> bool {
    if left == 0 {
        return true;
    }
    for k in from..=sets.len().saturating_sub(left) {
        let mut next = acc.clone();
        bits::and_into(&mut next, &sets[k]);
        if bits::count(&next) >= need && choose_with_common(sets, k + 1, left - 1, need, next) {
            return true;
        }
    }
    false
}
