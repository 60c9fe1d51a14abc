//! Conditioning built from the two-stage design: each cluster is split in
//! half and every unit is compared only across assignments that treat the
//! other half of its cluster.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exposure::{Assignment, TwoStageCluster};
use crate::rng::Rng;
use crate::{combinations, esp, sample_weighted_subset};

/// Per-cluster half splits and the side that the all-control cluster
/// assignment joins.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignAssistedRule {
    halves: Vec<[Vec<usize>; 2]>,
    zero_joins: Vec<u8>,
}

/// Randomly splits every cluster: the first half gets `ceil(n/2)` units.
pub fn decompose_design_assisted(design: &TwoStageCluster, rng: &mut Rng) -> Result<DesignAssistedRule> {
    let clusters = design.clusters();
    let mut halves = Vec::with_capacity(clusters.n_clusters());
    let mut zero_joins = Vec::with_capacity(clusters.n_clusters());
    for (k, members) in clusters.clusters().iter().enumerate() {
        if members.len() < 2 {
            return Err(Error::InvalidDesign(format!("cluster {k} has a single unit and cannot be split")));
        }
        let mut shuffled = members.clone();
        shuffled.shuffle(rng);
        let cut = members.len().div_ceil(2);
        let mut first = shuffled[..cut].to_vec();
        let mut second = shuffled[cut..].to_vec();
        first.sort_unstable();
        second.sort_unstable();
        halves.push([first, second]);
        zero_joins.push(rng.random_range(0..2u8));
    }
    Ok(DesignAssistedRule { halves, zero_joins })
}

impl DesignAssistedRule {
    pub fn n_clusters(&self) -> usize {
        self.halves.len()
    }

    /// Units of half `side` (0 or 1) of cluster `k`.
    pub fn half(&self, k: usize, side: usize) -> &[usize] {
        &self.halves[k][side]
    }

    /// Which side the all-control assignment of cluster `k` joins.
    pub fn zero_side(&self, k: usize) -> usize {
        self.zero_joins[k] as usize
    }

    /// Side of cluster `k` selected by an assignment that treats `treated`
    /// (`None` for all-control): units of the selected side are untreated.
    fn side_for(&self, k: usize, treated: Option<usize>) -> usize {
        match treated {
            None => self.zero_side(k),
            Some(t) if self.halves[k][0].binary_search(&t).is_ok() => 1,
            Some(_) => 0,
        }
    }

    /// The conditioning biclique that holds `z`.
    pub fn conditioning(&self, design: &TwoStageCluster, z: &Assignment) -> Result<ConditioningSet> {
        let clusters = design.clusters();
        if clusters.n_clusters() != self.halves.len() {
            return Err(Error::InvalidParameter("rule was built for a different cluster structure".into()));
        }
        z.check_len(clusters.n_units())?;
        let mut treated = vec![None; clusters.n_clusters()];
        for t in z.treated() {
            let k = clusters.cluster_of(t);
            if treated[k].is_some() {
                return Err(Error::InvalidParameter(format!("cluster {k} has more than one treated unit")));
            }
            treated[k] = Some(t);
        }
        if treated.iter().filter(|t| t.is_some()).count() != design.treated_clusters() {
            return Err(Error::InvalidParameter("assignment is outside the two-stage support".into()));
        }
        let mut units = Vec::new();
        let mut allowed = Vec::with_capacity(self.halves.len());
        let mut zero_ok = Vec::with_capacity(self.halves.len());
        for (k, t) in treated.iter().enumerate() {
            let side = self.side_for(k, *t);
            units.extend_from_slice(&self.halves[k][side]);
            allowed.push(self.halves[k][1 - side].clone());
            zero_ok.push(self.zero_side(k) == side);
        }
        units.sort_unstable();
        let sizes = clusters.clusters().iter().map(Vec::len).collect();
        Ok(ConditioningSet { n_units: clusters.n_units(), units, allowed, zero_ok, sizes, treated_clusters: design.treated_clusters() })
    }
}

/// Assignments of the two-stage support compatible with one conditioning
/// biclique, weighted by their design mass.
#[derive(Clone, Debug)]
pub struct ConditioningSet {
    n_units: usize,
    units: Vec<usize>,
    allowed: Vec<Vec<usize>>,
    zero_ok: Vec<bool>,
    sizes: Vec<usize>,
    treated_clusters: usize,
}

impl ConditioningSet {
    /// Focal units of the conditioning biclique.
    pub fn units(&self) -> &[usize] {
        &self.units
    }

    fn forced(&self) -> Vec<usize> {
        (0..self.allowed.len()).filter(|&k| !self.zero_ok[k]).collect()
    }

    fn optional(&self) -> Vec<usize> {
        (0..self.allowed.len()).filter(|&k| self.zero_ok[k]).collect()
    }

    pub fn contains(&self, z: &Assignment) -> bool {
        if z.len() != self.n_units {
            return false;
        }
        let mut hit = vec![0usize; self.allowed.len()];
        let mut count = 0;
        for t in z.treated() {
            let Some(k) = self.allowed.iter().position(|a| a.binary_search(&t).is_ok()) else {
                return false;
            };
            hit[k] += 1;
            count += 1;
        }
        count == self.treated_clusters && hit.iter().zip(&self.zero_ok).all(|(&h, &ok)| h == 1 || (h == 0 && ok))
    }

    /// Number of assignments in the set.
    pub fn size(&self) -> f64 {
        let forced = self.forced();
        if forced.len() > self.treated_clusters {
            return 0.0;
        }
        let f: f64 = forced.iter().map(|&k| self.allowed[k].len() as f64).product();
        let counts: Vec<f64> = self.optional().iter().map(|&k| self.allowed[k].len() as f64).collect();
        f * esp(&counts, self.treated_clusters - forced.len())
    }

    /// Every assignment with its relative design mass, when there are at most
    /// `limit` of them.
    pub fn enumerate(&self, limit: usize) -> Option<Vec<(Assignment, f64)>> {
        if self.size() > limit as f64 {
            return None;
        }
        let forced = self.forced();
        let optional = self.optional();
        let mut out = Vec::new();
        for pick in combinations(optional.len(), self.treated_clusters - forced.len()) {
            let mut chosen: Vec<usize> = forced.clone();
            chosen.extend(pick.iter().map(|&p| optional[p]));
            let weight: f64 = chosen.iter().map(|&k| 1.0 / self.sizes[k] as f64).product();
            let mut idx = vec![0usize; chosen.len()];
            loop {
                let treated: Vec<usize> = chosen.iter().zip(&idx).map(|(&k, &i)| self.allowed[k][i]).collect();
                out.push((Assignment::from_treated(self.n_units, &treated).expect("units in range"), weight));
                let mut p = 0;
                while p < idx.len() {
                    idx[p] += 1;
                    if idx[p] < self.allowed[chosen[p]].len() {
                        break;
                    }
                    idx[p] = 0;
                    p += 1;
                }
                if p == idx.len() {
                    break;
                }
            }
        }
        Some(out)
    }

    /// One draw with probability proportional to design mass.
    pub fn sample(&self, rng: &mut Rng) -> Assignment {
        let forced = self.forced();
        let optional = self.optional();
        let weights: Vec<f64> = optional.iter().map(|&k| self.allowed[k].len() as f64 / self.sizes[k] as f64).collect();
        let pick = sample_weighted_subset(&weights, self.treated_clusters - forced.len(), rng)
            .expect("observed assignment lies in the set");
        let mut treated = Vec::with_capacity(self.treated_clusters);
        for k in forced.into_iter().chain(pick.into_iter().map(|p| optional[p])) {
            let a = &self.allowed[k];
            treated.push(a[rng.random_range(0..a.len())]);
        }
        Assignment::from_treated(self.n_units, &treated).expect("units in range")
    }
}
