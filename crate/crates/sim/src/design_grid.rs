//! Power of the spillover test across two-zone Bernoulli designs.

use std::sync::Arc;

use biclique_core::exposure::{design_sample, Design, EnumeratedDesign, ExposureMap, Label, SpatialExposure, SpatialNetwork};
use biclique_core::rng::Rng;
use biclique_core::{Error, Result};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::power::{replicate, GraphStudy, PowerEstimate, RepOutcome, StudyConfig};

/// Network, zones and outcome model for a design study. Outcomes are
/// `N(0, sd^2)` under pure control, shifted by `tau` under spillover.
#[derive(Clone, Debug)]
pub struct DesignGridConfig {
    pub network: Arc<SpatialNetwork>,
    /// 0 for the center (probability `p0`), 1 for the outskirts (`p1`).
    pub zone: Vec<u8>,
    pub radius: f64,
    pub control_radius: f64,
    pub tau: f64,
    pub sd: f64,
    pub study: StudyConfig,
}

impl DesignGridConfig {
    /// Spillover radius 0.1 and control radius 0.2 in network units, effect
    /// 0.3 standard deviations.
    pub fn new(network: SpatialNetwork, zone: Vec<u8>) -> Self {
        DesignGridConfig {
            network: Arc::new(network),
            zone,
            radius: 0.1,
            control_radius: 0.2,
            tau: 0.3,
            sd: 1.0,
            study: StudyConfig::new(500, 20, 20),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub p0: f64,
    pub p1: f64,
    pub estimate: PowerEstimate,
    pub mean_focals: f64,
}

fn cell(config: &DesignGridConfig, p0: f64, p1: f64, reps: usize, alpha: f64, rng: &mut Rng) -> Result<GridCell> {
    let design = Design::bernoulli_two_zone(config.zone.clone(), p0, p1)?;
    let candidates = EnumeratedDesign::uniform(design_sample(&design, rng, config.study.n_assignments)?)?;
    let map = ExposureMap::Spatial(SpatialExposure::new(config.network.clone(), config.radius, config.control_radius)?);
    let spill = Label::spillover(config.radius);
    let study = match GraphStudy::new(candidates, map, Label::PureControl, spill, &config.study.decompose) {
        Ok(s) => s,
        Err(e) if e.is_untestable() => {
            let out = vec![RepOutcome::Untestable; reps];
            return Ok(GridCell { p0, p1, estimate: PowerEstimate::from_outcomes(&out), mean_focals: 0.0 });
        }
        Err(e) => return Err(e),
    };
    let noise = Normal::new(0.0, config.sd).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let spill = Label::spillover(config.radius);
    let out = replicate(reps, rng, |r| {
        study.replication(&config.study.test, alpha, r, |labels, r| {
            Ok(labels.iter().map(|l| noise.sample(r) + if *l == spill { config.tau } else { 0.0 }).collect())
        })
    })?;
    let outcomes: Vec<RepOutcome> = out.iter().map(|(o, _)| *o).collect();
    let focals: Vec<f64> = out.iter().filter_map(|(_, f)| f.map(|v| v as f64)).collect();
    let mean_focals = if focals.is_empty() { 0.0 } else { focals.iter().sum::<f64>() / focals.len() as f64 };
    Ok(GridCell { p0, p1, estimate: PowerEstimate::from_outcomes(&outcomes), mean_focals })
}

/// Power and mean focal count for every `(p0, p1)` pair, `p0` outermost.
pub fn design_power_grid(
    config: &DesignGridConfig,
    p0_grid: &[f64],
    p1_grid: &[f64],
    reps: usize,
    alpha: f64,
    rng: &mut Rng,
) -> Result<Vec<GridCell>> {
    if reps == 0 {
        return Err(Error::InvalidParameter("need at least one replication".into()));
    }
    if config.zone.len() != config.network.n_units() {
        return Err(Error::LengthMismatch { expected: config.network.n_units(), found: config.zone.len() });
    }
    if let Some(p) = p0_grid.iter().chain(p1_grid).find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0,1]")));
    }
    let mut out = Vec::with_capacity(p0_grid.len() * p1_grid.len());
    for &p0 in p0_grid {
        for &p1 in p1_grid {
            out.push(cell(config, p0, p1, reps, alpha, rng)?);
        }
    }
    Ok(out)
}
