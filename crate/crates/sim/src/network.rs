//! Synthetic spatial networks and hotspot designs.

use biclique_core::exposure::{CompleteRandomization, Design, SpatialNetwork};
use biclique_core::rng::Rng;
use biclique_core::{Error, Result};
use rand::seq::index;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Points from a correlated bivariate Gaussian centred at the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianCloud {
    pub n_units: usize,
    pub sd_x: f64,
    pub sd_y: f64,
    pub correlation: f64,
}

impl GaussianCloud {
    /// 2,000 street-like units spread over a city of roughly 10 km across.
    pub fn city() -> Self {
        GaussianCloud { n_units: 2_000, sd_x: 1_800.0, sd_y: 1_400.0, correlation: 0.4 }
    }

    /// 1,000 points in unit-free coordinates for design studies.
    pub fn unit_scale() -> Self {
        GaussianCloud { n_units: 1_000, sd_x: 1.0, sd_y: 0.7, correlation: 0.5 }
    }

    pub fn sample(&self, rng: &mut Rng) -> Result<SpatialNetwork> {
        if self.n_units == 0 {
            return Err(Error::InvalidParameter("network needs at least one unit".into()));
        }
        if !(self.sd_x > 0.0 && self.sd_y > 0.0) || !(-1.0 < self.correlation && self.correlation < 1.0) {
            return Err(Error::InvalidParameter("need positive scales and |correlation| < 1".into()));
        }
        let rho = self.correlation;
        let coords = (0..self.n_units)
            .map(|_| {
                let u: f64 = StandardNormal.sample(rng);
                let v: f64 = StandardNormal.sample(rng);
                [self.sd_x * u, self.sd_y * (rho * u + (1.0 - rho * rho).sqrt() * v)]
            })
            .collect();
        SpatialNetwork::new(coords)
    }
}

/// Zone 0 for the `fraction` of units closest to the origin, zone 1 for
/// the rest. Returns the zones and the radius of the central disk.
pub fn central_zone(network: &SpatialNetwork, fraction: f64) -> Result<(Vec<u8>, f64)> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidParameter(format!("fraction {fraction} outside [0,1]")));
    }
    let n = network.n_units();
    let dist: Vec<f64> = network.coords().iter().map(|p| p[0].hypot(p[1])).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
    let inside = ((fraction * n as f64).round() as usize).min(n);
    let mut zone = vec![1u8; n];
    for &i in &order[..inside] {
        zone[i] = 0;
    }
    let radius = if inside == 0 { 0.0 } else { dist[order[inside - 1]] };
    Ok((zone, radius))
}

/// Hotspot experiment: `n_treated` of the hotspot units treated by complete
/// randomization; every other unit is never treated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HotspotDesign {
    pub hotspots: Vec<usize>,
    pub n_treated: usize,
}

impl HotspotDesign {
    /// Picks `n_hotspots` units uniformly at random.
    pub fn random(n_units: usize, n_hotspots: usize, n_treated: usize, rng: &mut Rng) -> Result<Self> {
        if n_hotspots > n_units || n_treated > n_hotspots {
            return Err(Error::InvalidParameter(format!(
                "need n_treated <= n_hotspots <= n_units (got {n_treated}, {n_hotspots}, {n_units})"
            )));
        }
        let mut hotspots = index::sample(rng, n_units, n_hotspots).into_vec();
        hotspots.sort_unstable();
        Ok(HotspotDesign { hotspots, n_treated })
    }

    pub fn design(&self, n_units: usize) -> Result<Design> {
        CompleteRandomization::with_eligible(n_units, self.n_treated, self.hotspots.clone())
            .map(Design::CompleteRandomization)
    }
}
