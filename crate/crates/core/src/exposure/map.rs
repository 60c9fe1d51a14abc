use std::fmt;
use std::sync::Arc;

use super::{Assignment, ClusterStructure, HopNetwork, Label, SpatialNetwork};
use crate::error::{Error, Result};

pub const DEFAULT_CONTROL_RADIUS: f64 = 500.0;

/// Spatial exposure: "pure control" when untreated with no treated unit within
/// the control radius, "spillover_r" when untreated with a treated unit within
/// `radius`, otherwise "other". Cases are checked in that order.
#[derive(Clone, Debug)]
pub struct SpatialExposure {
    network: Arc<SpatialNetwork>,
    radius: f64,
    control_radius: f64,
    // Other units within the control radius, with distances.
    near: Vec<Vec<(u32, f64)>>,
}

impl SpatialExposure {
    pub fn new(network: Arc<SpatialNetwork>, radius: f64, control_radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) || !control_radius.is_finite() {
            return Err(Error::InvalidExposure(format!("bad radius {radius} / control radius {control_radius}")));
        }
        if radius > control_radius {
            return Err(Error::InvalidExposure(format!(
                "spillover radius {radius} exceeds control radius {control_radius}"
            )));
        }
        let near = network.neighbors_within(control_radius);
        Ok(SpatialExposure { network, radius, control_radius, near })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn control_radius(&self) -> f64 {
        self.control_radius
    }

    pub fn network(&self) -> &SpatialNetwork {
        &self.network
    }

    fn label(&self, i: usize, z: &Assignment) -> Label {
        if z.get(i) {
            return Label::Other;
        }
        let mut any_control = false;
        let mut any_spill = false;
        for &(j, d) in &self.near[i] {
            if z.get(j as usize) {
                any_control = true;
                if d <= self.radius {
                    any_spill = true;
                    break;
                }
            }
        }
        if !any_control {
            Label::PureControl
        } else if any_spill {
            Label::spillover(self.radius)
        } else {
            Label::Other
        }
    }

    fn all_labels(&self, z: &Assignment) -> Vec<Label> {
        // 0 = nothing within control radius, 1 = within control radius only, 2 = within r
        let mut state = vec![0u8; self.near.len()];
        for t in z.treated() {
            for &(j, d) in &self.near[t] {
                let s = &mut state[j as usize];
                *s = (*s).max(if d <= self.radius { 2 } else { 1 });
            }
        }
        state
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                if z.get(i) {
                    Label::Other
                } else {
                    match s {
                        0 => Label::PureControl,
                        2 => Label::spillover(self.radius),
                        _ => Label::Other,
                    }
                }
            })
            .collect()
    }
}

/// k-hop exposure: the treatment vector masked to the k-hop neighborhood.
#[derive(Clone, Debug)]
pub struct KHopExposure {
    k: usize,
    neighborhoods: Vec<Vec<u32>>,
}

impl KHopExposure {
    pub fn new(network: &HopNetwork, k: usize) -> Self {
        let neighborhoods = (0..network.n_units())
            .map(|i| network.within_hops(i, k).into_iter().map(|j| j as u32).collect())
            .collect();
        KHopExposure { k, neighborhoods }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn neighborhood(&self, i: usize) -> &[u32] {
        &self.neighborhoods[i]
    }

    fn label(&self, i: usize, z: &Assignment) -> Label {
        Label::Neighborhood(self.neighborhoods[i].iter().copied().filter(|&j| z.get(j as usize)).collect())
    }
}

type Rule = dyn Fn(usize, &Assignment) -> Label + Send + Sync;

/// User-supplied exposure rule. Must be deterministic.
#[derive(Clone)]
pub struct CustomExposure {
    n_units: usize,
    rule: Arc<Rule>,
}

impl CustomExposure {
    pub fn new(n_units: usize, rule: impl Fn(usize, &Assignment) -> Label + Send + Sync + 'static) -> Self {
        CustomExposure { n_units, rule: Arc::new(rule) }
    }
}

impl fmt::Debug for CustomExposure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomExposure").field("n_units", &self.n_units).finish_non_exhaustive()
    }
}

/// Deterministic rule mapping (unit, assignment) to an exposure label.
#[derive(Clone, Debug)]
pub enum ExposureMap {
    /// Own treatment plus treated count in the unit's cluster (own unit included).
    Clustered(Arc<ClusterStructure>),
    Spatial(SpatialExposure),
    KHop(KHopExposure),
    Custom(CustomExposure),
}

impl ExposureMap {
    pub fn clustered(clusters: ClusterStructure) -> Self {
        ExposureMap::Clustered(Arc::new(clusters))
    }

    pub fn spatial(network: SpatialNetwork, radius: f64, control_radius: f64) -> Result<Self> {
        SpatialExposure::new(Arc::new(network), radius, control_radius).map(ExposureMap::Spatial)
    }

    pub fn k_hop(network: &HopNetwork, k: usize) -> Self {
        ExposureMap::KHop(KHopExposure::new(network, k))
    }

    pub fn custom(n_units: usize, rule: impl Fn(usize, &Assignment) -> Label + Send + Sync + 'static) -> Self {
        ExposureMap::Custom(CustomExposure::new(n_units, rule))
    }

    pub fn n_units(&self) -> usize {
        match self {
            ExposureMap::Clustered(c) => c.n_units(),
            ExposureMap::Spatial(s) => s.near.len(),
            ExposureMap::KHop(h) => h.neighborhoods.len(),
            ExposureMap::Custom(c) => c.n_units,
        }
    }

    /// Exposure of unit `i` under `z`.
    pub fn eval(&self, i: usize, z: &Assignment) -> Result<Label> {
        let n = self.n_units();
        if i >= n {
            return Err(Error::UnitOutOfRange { index: i, n_units: n });
        }
        z.check_len(n)?;
        Ok(self.eval_unchecked(i, z))
    }

    fn eval_unchecked(&self, i: usize, z: &Assignment) -> Label {
        match self {
            ExposureMap::Clustered(c) => {
                let in_cluster = c.members(c.cluster_of(i)).iter().filter(|&&j| z.get(j)).count();
                Label::Level(z.get(i) as u32 + in_cluster as u32)
            }
            ExposureMap::Spatial(s) => s.label(i, z),
            ExposureMap::KHop(h) => h.label(i, z),
            ExposureMap::Custom(c) => (c.rule)(i, z),
        }
    }

    /// Exposures of every unit under `z`.
    pub fn exposures(&self, z: &Assignment) -> Result<Vec<Label>> {
        let n = self.n_units();
        z.check_len(n)?;
        Ok(match self {
            ExposureMap::Clustered(c) => {
                let mut treated_in = vec![0u32; c.n_clusters()];
                for t in z.treated() {
                    treated_in[c.cluster_of(t)] += 1;
                }
                (0..n).map(|i| Label::Level(z.get(i) as u32 + treated_in[c.cluster_of(i)])).collect()
            }
            ExposureMap::Spatial(s) => s.all_labels(z),
            _ => (0..n).map(|i| self.eval_unchecked(i, z)).collect(),
        })
    }
}
