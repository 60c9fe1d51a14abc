use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{Assignment, ClusterStructure};
use crate::combin;
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Supports at most this large are enumerated instead of rejection-sampled
/// when drawing a subsample of distinct assignments.
const ENUMERATE_SUPPORT_LIMIT: usize = 1 << 20;

/// Finite list of distinct assignments with positive weights.
///
/// `mass` is the weight normalized by the total. The raw weights are kept so a
/// subsampled support can carry the original design probabilities.
#[derive(Clone, Debug)]
pub struct EnumeratedDesign {
    assignments: Vec<Assignment>,
    weights: Vec<f64>,
    total: f64,
    cumulative: Vec<f64>,
    index: HashMap<Assignment, usize>,
}

impl EnumeratedDesign {
    /// Identical assignments are merged by summing their weights.
    pub fn new(assignments: Vec<Assignment>, weights: Vec<f64>) -> Result<Self> {
        if assignments.is_empty() {
            return Err(Error::InvalidDesign("enumerated design has an empty support".into()));
        }
        if assignments.len() != weights.len() {
            return Err(Error::InvalidDesign(format!(
                "{} assignments but {} masses",
                assignments.len(),
                weights.len()
            )));
        }
        let n = assignments[0].len();
        let mut merged: Vec<Assignment> = Vec::new();
        let mut merged_w: Vec<f64> = Vec::new();
        let mut index: HashMap<Assignment, usize> = HashMap::new();
        for (z, w) in assignments.into_iter().zip(weights) {
            z.check_len(n)?;
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidDesign(format!("mass must be positive and finite, got {w}")));
            }
            match index.get(&z) {
                Some(&k) => merged_w[k] += w,
                None => {
                    index.insert(z.clone(), merged.len());
                    merged.push(z);
                    merged_w.push(w);
                }
            }
        }
        let mut cumulative = Vec::with_capacity(merged_w.len());
        let mut acc = 0.0;
        for &w in &merged_w {
            acc += w;
            cumulative.push(acc);
        }
        Ok(EnumeratedDesign { assignments: merged, weights: merged_w, total: acc, cumulative, index })
    }

    pub fn uniform(assignments: Vec<Assignment>) -> Result<Self> {
        let w = vec![1.0; assignments.len()];
        Self::new(assignments, w)
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn mass_at(&self, k: usize) -> f64 {
        self.weights[k] / self.total
    }

    pub fn index_of(&self, z: &Assignment) -> Option<usize> {
        self.index.get(z).copied()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn sample_index(&self, rng: &mut Rng) -> usize {
        let u = rng.random::<f64>() * self.total;
        self.cumulative.partition_point(|&c| c <= u).min(self.len() - 1)
    }
}

/// Exactly `n_treated` of the eligible units treated, uniformly.
#[derive(Clone, Debug)]
pub struct CompleteRandomization {
    n_units: usize,
    n_treated: usize,
    eligible: Vec<usize>,
    eligible_mask: Vec<bool>,
}

impl CompleteRandomization {
    pub fn new(n_units: usize, n_treated: usize) -> Result<Self> {
        Self::with_eligible(n_units, n_treated, (0..n_units).collect())
    }

    /// Only `eligible` units can be treated (e.g. hotspots).
    pub fn with_eligible(n_units: usize, n_treated: usize, mut eligible: Vec<usize>) -> Result<Self> {
        eligible.sort_unstable();
        eligible.dedup();
        if let Some(&bad) = eligible.iter().find(|&&i| i >= n_units) {
            return Err(Error::UnitOutOfRange { index: bad, n_units });
        }
        if n_treated > eligible.len() {
            return Err(Error::InvalidDesign(format!(
                "cannot treat {n_treated} of {} eligible units",
                eligible.len()
            )));
        }
        let mut eligible_mask = vec![false; n_units];
        for &i in &eligible {
            eligible_mask[i] = true;
        }
        Ok(CompleteRandomization { n_units, n_treated, eligible, eligible_mask })
    }

    pub fn n_treated(&self) -> usize {
        self.n_treated
    }

    pub fn eligible(&self) -> &[usize] {
        &self.eligible
    }
}

/// Treat `treated_clusters` clusters uniformly at random, then exactly one unit
/// uniformly within each treated cluster.
#[derive(Clone, Debug)]
pub struct TwoStageCluster {
    clusters: Arc<ClusterStructure>,
    treated_clusters: usize,
}

impl TwoStageCluster {
    pub fn new(clusters: Arc<ClusterStructure>, treated_clusters: usize) -> Result<Self> {
        if treated_clusters > clusters.n_clusters() {
            return Err(Error::InvalidDesign(format!(
                "cannot treat {treated_clusters} of {} clusters",
                clusters.n_clusters()
            )));
        }
        Ok(TwoStageCluster { clusters, treated_clusters })
    }

    pub fn clusters(&self) -> &ClusterStructure {
        &self.clusters
    }

    pub fn clusters_arc(&self) -> &Arc<ClusterStructure> {
        &self.clusters
    }

    pub fn treated_clusters(&self) -> usize {
        self.treated_clusters
    }
}

/// Independent Bernoulli treatment with probability `p[zone]`.
#[derive(Clone, Debug)]
pub struct BernoulliTwoZone {
    zone: Vec<u8>,
    p: [f64; 2],
}

impl BernoulliTwoZone {
    /// `zone[i]` is 0 (probability `p0`, e.g. the city center) or 1 (`p1`).
    pub fn new(zone: Vec<u8>, p0: f64, p1: f64) -> Result<Self> {
        for p in [p0, p1] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidDesign(format!("probability {p} outside [0,1]")));
            }
        }
        if let Some(z) = zone.iter().find(|&&z| z > 1) {
            return Err(Error::InvalidDesign(format!("zone {z} is not 0 or 1")));
        }
        Ok(BernoulliTwoZone { zone, p: [p0, p1] })
    }

    pub fn p(&self, unit: usize) -> f64 {
        self.p[self.zone[unit] as usize]
    }

    fn free_units(&self) -> usize {
        (0..self.zone.len()).filter(|&i| self.p(i) > 0.0 && self.p(i) < 1.0).count()
    }
}

/// Experimental design: a distribution over assignment vectors.
#[derive(Clone, Debug)]
pub enum Design {
    Enumerated(EnumeratedDesign),
    CompleteRandomization(CompleteRandomization),
    TwoStageCluster(TwoStageCluster),
    BernoulliTwoZone(BernoulliTwoZone),
}

impl Design {
    pub fn enumerated(assignments: Vec<Assignment>, masses: Vec<f64>) -> Result<Self> {
        EnumeratedDesign::new(assignments, masses).map(Design::Enumerated)
    }

    pub fn complete(n_units: usize, n_treated: usize) -> Result<Self> {
        CompleteRandomization::new(n_units, n_treated).map(Design::CompleteRandomization)
    }

    pub fn two_stage(clusters: ClusterStructure, treated_clusters: usize) -> Result<Self> {
        TwoStageCluster::new(Arc::new(clusters), treated_clusters).map(Design::TwoStageCluster)
    }

    pub fn bernoulli_two_zone(zone: Vec<u8>, p0: f64, p1: f64) -> Result<Self> {
        BernoulliTwoZone::new(zone, p0, p1).map(Design::BernoulliTwoZone)
    }

    pub fn n_units(&self) -> usize {
        match self {
            Design::Enumerated(d) => d.assignments[0].len(),
            Design::CompleteRandomization(d) => d.n_units,
            Design::TwoStageCluster(d) => d.clusters.n_units(),
            Design::BernoulliTwoZone(d) => d.zone.len(),
        }
    }

    /// Probability of `z` under the design; zero outside the support.
    pub fn mass(&self, z: &Assignment) -> Result<f64> {
        z.check_len(self.n_units())?;
        Ok(match self {
            Design::Enumerated(d) => d.index_of(z).map_or(0.0, |k| d.mass_at(k)),
            Design::CompleteRandomization(d) => {
                let ok = z.n_treated() == d.n_treated && z.treated().all(|i| d.eligible_mask[i]);
                if ok {
                    (-combin::ln_choose(d.eligible.len(), d.n_treated)).exp()
                } else {
                    0.0
                }
            }
            Design::TwoStageCluster(d) => {
                let c = &d.clusters;
                let mut per_cluster = vec![0usize; c.n_clusters()];
                for t in z.treated() {
                    per_cluster[c.cluster_of(t)] += 1;
                }
                if per_cluster.iter().any(|&m| m > 1)
                    || per_cluster.iter().filter(|&&m| m == 1).count() != d.treated_clusters
                {
                    0.0
                } else {
                    let ln_within: f64 = per_cluster
                        .iter()
                        .enumerate()
                        .filter(|(_, &m)| m == 1)
                        .map(|(k, _)| (c.members(k).len() as f64).ln())
                        .sum();
                    (-combin::ln_choose(c.n_clusters(), d.treated_clusters) - ln_within).exp()
                }
            }
            Design::BernoulliTwoZone(d) => (0..d.zone.len())
                .map(|i| if z.get(i) { d.p(i) } else { 1.0 - d.p(i) })
                .product(),
        })
    }

    pub fn in_support(&self, z: &Assignment) -> Result<bool> {
        Ok(self.mass(z)? > 0.0)
    }

    /// One draw from the design.
    pub fn sample_one(&self, rng: &mut Rng) -> Assignment {
        let n = self.n_units();
        match self {
            Design::Enumerated(d) => d.assignments[d.sample_index(rng)].clone(),
            Design::CompleteRandomization(d) => {
                let mut pool = d.eligible.clone();
                let (chosen, _) = pool.partial_shuffle(rng, d.n_treated);
                let mut z = Assignment::zeros(n);
                for &i in chosen.iter() {
                    z.set(i, true);
                }
                z
            }
            Design::TwoStageCluster(d) => {
                let c = &d.clusters;
                let mut ids: Vec<usize> = (0..c.n_clusters()).collect();
                let (chosen, _) = ids.partial_shuffle(rng, d.treated_clusters);
                let mut z = Assignment::zeros(n);
                for &k in chosen.iter() {
                    let m = c.members(k);
                    z.set(m[rng.random_range(0..m.len())], true);
                }
                z
            }
            Design::BernoulliTwoZone(d) => {
                let mut z = Assignment::zeros(n);
                for i in 0..n {
                    if rng.random::<f64>() < d.p(i) {
                        z.set(i, true);
                    }
                }
                z
            }
        }
    }

    /// Draw from the uniform distribution over the support (not the design).
    pub fn sample_support_uniform(&self, rng: &mut Rng) -> Assignment {
        let n = self.n_units();
        match self {
            Design::Enumerated(d) => d.assignments[rng.random_range(0..d.len())].clone(),
            // Uniform already.
            Design::CompleteRandomization(_) => self.sample_one(rng),
            Design::TwoStageCluster(d) => {
                let c = &d.clusters;
                let sizes: Vec<f64> = c.clusters().iter().map(|m| m.len() as f64).collect();
                let chosen = combin::sample_weighted_subset(&sizes, d.treated_clusters, rng)
                    .expect("clusters are non-empty");
                let mut z = Assignment::zeros(n);
                for k in chosen {
                    let m = c.members(k);
                    z.set(m[rng.random_range(0..m.len())], true);
                }
                z
            }
            Design::BernoulliTwoZone(d) => {
                let mut z = Assignment::zeros(n);
                for i in 0..n {
                    let p = d.p(i);
                    if p >= 1.0 || (p > 0.0 && rng.random::<bool>()) {
                        z.set(i, true);
                    }
                }
                z
            }
        }
    }

    /// Number of assignments with positive mass (as f64; may be astronomically large).
    pub fn support_size(&self) -> f64 {
        match self {
            Design::Enumerated(d) => d.len() as f64,
            Design::CompleteRandomization(d) => combin::choose_f64(d.eligible.len(), d.n_treated),
            Design::TwoStageCluster(d) => {
                let sizes: Vec<f64> = d.clusters.clusters().iter().map(|m| m.len() as f64).collect();
                combin::esp(&sizes, d.treated_clusters).round()
            }
            Design::BernoulliTwoZone(d) => 2f64.powi(d.free_units() as i32),
        }
    }

    /// Every support point, if there are at most `limit` of them.
    pub fn enumerate_support(&self, limit: usize) -> Option<Vec<Assignment>> {
        if self.support_size() > limit as f64 {
            return None;
        }
        let n = self.n_units();
        Some(match self {
            Design::Enumerated(d) => d.assignments.clone(),
            Design::CompleteRandomization(d) => combin::combinations(d.eligible.len(), d.n_treated)
                .into_iter()
                .map(|s| {
                    let t: Vec<usize> = s.into_iter().map(|k| d.eligible[k]).collect();
                    Assignment::from_treated(n, &t).expect("eligible units in range")
                })
                .collect(),
            Design::TwoStageCluster(d) => {
                let c = &d.clusters;
                let mut out = Vec::new();
                for chosen in combin::combinations(c.n_clusters(), d.treated_clusters) {
                    let mut partial = vec![Vec::<usize>::new()];
                    for &k in &chosen {
                        partial = partial
                            .into_iter()
                            .flat_map(|p| {
                                c.members(k).iter().map(move |&u| {
                                    let mut q = p.clone();
                                    q.push(u);
                                    q
                                })
                            })
                            .collect();
                    }
                    for t in partial {
                        out.push(Assignment::from_treated(n, &t).expect("members in range"));
                    }
                }
                out
            }
            Design::BernoulliTwoZone(d) => {
                let free: Vec<usize> = (0..n).filter(|&i| d.p(i) > 0.0 && d.p(i) < 1.0).collect();
                let forced: Vec<usize> = (0..n).filter(|&i| d.p(i) >= 1.0).collect();
                (0u64..(1u64 << free.len()))
                    .map(|mask| {
                        let mut z = Assignment::from_treated(n, &forced).expect("in range");
                        for (b, &i) in free.iter().enumerate() {
                            if mask >> b & 1 == 1 {
                                z.set(i, true);
                            }
                        }
                        z
                    })
                    .collect()
            }
        })
    }
}

/// `count` i.i.d. draws from the design.
pub fn design_sample(design: &Design, rng: &mut Rng, count: usize) -> Result<Vec<Assignment>> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    Ok((0..count).map(|_| design.sample_one(rng)).collect())
}

/// Restricts the support to `z_obs` plus `m - 1` distinct other support points
/// drawn uniformly without replacement.
///
/// The result lists `z_obs` first, and each retained assignment keeps its
/// original design probability as its weight.
pub fn subsample_support(design: &Design, z_obs: &Assignment, m: usize, rng: &mut Rng) -> Result<EnumeratedDesign> {
    let obs_mass = design.mass(z_obs)?;
    if obs_mass <= 0.0 {
        return Err(Error::InvalidParameter("observed assignment is outside the design support".into()));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("subsample size must be at least 1".into()));
    }
    let support = design.support_size();
    if (m as f64) > support {
        return Err(Error::SupportTooSmall { requested: m, available: support.min(usize::MAX as f64) as usize });
    }
    let mut chosen = vec![z_obs.clone()];
    if m > 1 {
        let small = support <= ENUMERATE_SUPPORT_LIMIT as f64;
        let dense = (m as f64) > support / 2.0;
        if small && dense {
            let mut rest: Vec<Assignment> = design
                .enumerate_support(ENUMERATE_SUPPORT_LIMIT)
                .expect("support within limit")
                .into_iter()
                .filter(|z| z != z_obs)
                .collect();
            let (picked, _) = rest.partial_shuffle(rng, m - 1);
            chosen.extend(picked.iter().cloned());
        } else {
            let mut seen: HashSet<Assignment> = HashSet::from([z_obs.clone()]);
            while chosen.len() < m {
                let z = design.sample_support_uniform(rng);
                if seen.insert(z.clone()) {
                    chosen.push(z);
                }
            }
        }
    }
    let weights = chosen.iter().map(|z| design.mass(z)).collect::<Result<Vec<_>>>()?;
    EnumeratedDesign::new(chosen, weights)
}
