//! Conditioning on a biclique induced by a set of focal units chosen
//! independently of the assignment.

use rand::Rng as _;

use super::biclique::Biclique;
use crate::bits;
use crate::error::{Error, Result};
use crate::exposure::{EnumeratedDesign, ExposureMap};
use crate::graph::{ExposureFamily, ExposureTable, NullExposureGraph};
use crate::rng::Rng;

/// Keeps the focal units linked to `obs` and pairs them with every assignment
/// linked to all of them. `None` when no focal unit is linked to `obs`.
pub fn induced_biclique_from_focals(graph: &NullExposureGraph, focal_units: &[usize], obs: usize) -> Result<Option<Biclique>> {
    if obs >= graph.n_assignments() {
        return Err(Error::AssignmentOutOfRange { index: obs, n_assignments: graph.n_assignments() });
    }
    if let Some(&i) = focal_units.iter().find(|&&i| i >= graph.n_units()) {
        return Err(Error::UnitOutOfRange { index: i, n_units: graph.n_units() });
    }
    let units: Vec<usize> = focal_units.iter().copied().filter(|&i| graph.has_edge(i, obs)).collect();
    if units.is_empty() {
        return Ok(None);
    }
    let need = bits::from_indices(graph.n_units(), units.iter().copied());
    let assignments = (0..graph.n_assignments()).filter(|&j| bits::is_subset(&need, graph.row(j))).collect();
    Ok(Some(Biclique::new(units, assignments)))
}

/// Average degree of each unit in the anchored graph, over `reps` anchors
/// drawn from `candidates`, normalized to sum to one.
pub fn focal_degree_weights(
    candidates: &EnumeratedDesign,
    map: &ExposureMap,
    family: &ExposureFamily,
    reps: usize,
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    if reps == 0 {
        return Err(Error::InvalidParameter("at least one replication required".into()));
    }
    let table = ExposureTable::compute(map, candidates.assignments())?;
    let classes = family.classes(table.dict());
    let n = table.n_units();
    let mut deg = vec![0u64; n];
    for _ in 0..reps {
        let a = candidates.sample_index(rng);
        let anchor = table.row(a);
        for j in 0..table.n_assignments() {
            for (i, &c) in table.row(j).iter().enumerate() {
                let want = classes[anchor[i] as usize];
                if want.is_some() && classes[c as usize] == want {
                    deg[i] += 1;
                }
            }
        }
    }
    let total: u64 = deg.iter().sum();
    if total == 0 {
        return Err(Error::ZeroDegrees);
    }
    Ok(deg.iter().map(|&d| d as f64 / total as f64).collect())
}

/// Draws `n` distinct units with probability increasing in `weights`
/// (successive sampling). Units of weight zero are never drawn.
pub fn sample_focal_units(weights: &[f64], n: usize, rng: &mut Rng) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(i, &w)| {
            let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
            (u.ln() / w, i)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut out: Vec<usize> = keyed.into_iter().take(n).map(|(_, i)| i).collect();
    out.sort_unstable();
    out
}
