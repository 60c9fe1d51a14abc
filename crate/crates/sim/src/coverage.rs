//! Coverage of inverted confidence intervals for an additive spillover effect.

use biclique_core::engine::DecomposeConfig;
use biclique_core::exposure::{ClusterStructure, Design, ExposureMap, Label};
use biclique_core::rng::Rng;
use biclique_core::test::{Mode, TestConfig};
use biclique_core::{Error, Result};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::power::{replicate, GraphStudy};

/// Two-stage clustered experiment with a constant additive spillover effect
/// `tau`, tested on a sampled candidate set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoverageConfig {
    pub n_units: usize,
    pub n_clusters: usize,
    pub treated_clusters: usize,
    pub n_assignments: usize,
    pub tau: f64,
    pub mu0: f64,
    pub sd: f64,
    pub grid: Vec<f64>,
    pub alpha: f64,
    pub decompose: DecomposeConfig,
}

impl Default for CoverageConfig {
    fn default() -> Self {
        CoverageConfig {
            n_units: 100,
            n_clusters: 20,
            treated_clusters: 10,
            n_assignments: 2_000,
            tau: 0.5,
            mu0: 2.0,
            sd: 0.5,
            grid: (0..=60).map(|k| k as f64 / 20.0 - 1.0).collect(),
            alpha: 0.05,
            decompose: DecomposeConfig { node_budget: 20_000, ..DecomposeConfig::with_floors(30, 20) },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult {
    pub reps: usize,
    pub covered: usize,
    pub empty: usize,
    pub untestable: usize,
    pub rate: f64,
    pub se: f64,
    /// Average length of the non-empty intervals.
    pub mean_width: f64,
}

enum Rep {
    Covered(f64),
    Missed { empty: bool },
    Untestable,
}

pub fn ci_coverage(config: &CoverageConfig, reps: usize, rng: &mut Rng) -> Result<CoverageResult> {
    if reps == 0 {
        return Err(Error::InvalidParameter("need at least one replication".into()));
    }
    let clusters = ClusterStructure::equal(config.n_units, config.n_clusters)?;
    let design = Design::two_stage(clusters.clone(), config.treated_clusters)?;
    let set = GraphStudy::sample_candidates(&design, config.n_assignments, rng)?;
    let map = ExposureMap::clustered(clusters);
    let (a, b) = (Label::Level(0), Label::Level(1));
    let study = GraphStudy::new(set, map, a.clone(), b.clone(), &config.decompose)?;
    let (set, test) = (study.candidates(), study.test());
    let noise = Normal::new(config.mu0, config.sd).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let tconf = TestConfig { mode: Mode::Exact, ..TestConfig::default() };
    let out = replicate(reps, rng, |r| {
        let obs = set.sample_index(r);
        let y: Vec<f64> = test
            .labels_at(obs)
            .iter()
            .map(|l| noise.sample(r) + if *l == b { config.tau } else { 0.0 })
            .collect();
        match test.confidence_interval(obs, &y, &a, &b, &config.grid, config.alpha, &tconf, r) {
            Ok(ci) if ci.contains(config.tau) => Ok(Rep::Covered(ci.upper.unwrap_or(0.0) - ci.lower.unwrap_or(0.0))),
            Ok(ci) => Ok(Rep::Missed { empty: ci.is_empty() }),
            Err(e) if e.is_untestable() => Ok(Rep::Untestable),
            Err(e) => Err(e),
        }
    })?;
    let covered = out.iter().filter(|o| matches!(o, Rep::Covered(_))).count();
    let widths: Vec<f64> = out.iter().filter_map(|o| if let Rep::Covered(w) = o { Some(*w) } else { None }).collect();
    let mean_width = if widths.is_empty() { 0.0 } else { widths.iter().sum::<f64>() / widths.len() as f64 };
    let empty = out.iter().filter(|o| matches!(o, Rep::Missed { empty: true })).count();
    let untestable = out.iter().filter(|o| matches!(o, Rep::Untestable)).count();
    let n = (reps - untestable) as f64;
    let rate = if n > 0.0 { covered as f64 / n } else { 0.0 };
    let se = if n > 0.0 { (rate * (1.0 - rate) / n).sqrt() } else { 0.0 };
    Ok(CoverageResult { reps, covered, empty, untestable, rate, se, mean_width })
}
