//! Outcome models for the clustered and spatial simulations.

use biclique_core::exposure::{ClusterStructure, Label};
use biclique_core::rng::Rng;
use biclique_core::{Error, Result};
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

/// Two-stage clustered outcome model.
///
/// Each unit draws a baseline `y0 ~ N(mu0, sigma_mu^2)` and idiosyncratic
/// effects `N(tau_p, sigma_tau^2)` and `N(tau_s, sigma_tau^2)`. Potential
/// outcomes are then drawn with noise `sigma_y` around `y0`, `y0 + spillover`
/// and `y0 + primary`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusteredDgp {
    pub n_units: usize,
    pub n_clusters: usize,
    pub mu0: f64,
    pub sigma_mu: f64,
    pub sigma_tau: f64,
    pub sigma_y: f64,
    pub tau_p: f64,
    pub tau_s: f64,
}

impl ClusteredDgp {
    /// 300 units with the reference parameters and `n_clusters` clusters.
    pub fn reference(n_clusters: usize) -> Self {
        ClusteredDgp {
            n_units: 300,
            n_clusters,
            mu0: 2.0,
            sigma_mu: 0.1,
            sigma_tau: 0.1,
            sigma_y: 0.5,
            tau_p: 1.5,
            tau_s: 0.7,
        }
    }

    pub fn with_spillover(mut self, tau_s: f64) -> Self {
        self.tau_s = tau_s;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_clusters == 0 || self.n_clusters > self.n_units {
            return Err(Error::InvalidParameter(format!(
                "cannot split {} units into {} clusters",
                self.n_units, self.n_clusters
            )));
        }
        let params = [self.mu0, self.sigma_mu, self.sigma_tau, self.sigma_y, self.tau_p, self.tau_s];
        if params.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("model parameters must be finite".into()));
        }
        if self.sigma_mu < 0.0 || self.sigma_tau < 0.0 || self.sigma_y < 0.0 {
            return Err(Error::InvalidParameter("standard deviations must be non-negative".into()));
        }
        Ok(())
    }

    pub fn clusters(&self) -> Result<ClusterStructure> {
        ClusterStructure::equal(self.n_units, self.n_clusters)
    }
}

/// Potential outcomes under control, spillover and treatment.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusteredOutcomes {
    pub control: Vec<f64>,
    pub spillover: Vec<f64>,
    pub treated: Vec<f64>,
}

impl ClusteredOutcomes {
    /// Observed outcomes given clustered exposure levels 0, 1, 2.
    pub fn realize(&self, labels: &[Label]) -> Result<Vec<f64>> {
        if labels.len() != self.control.len() {
            return Err(Error::LengthMismatch { expected: self.control.len(), found: labels.len() });
        }
        labels
            .iter()
            .enumerate()
            .map(|(i, l)| match l {
                Label::Level(0) => Ok(self.control[i]),
                Label::Level(1) => Ok(self.spillover[i]),
                Label::Level(2) => Ok(self.treated[i]),
                other => Err(Error::InvalidExposure(format!("unexpected clustered label {other}"))),
            })
            .collect()
    }
}

fn normal(mean: f64, sd: f64) -> Normal<f64> {
    Normal::new(mean, sd).expect("validated parameters")
}

pub fn gen_clustered_outcomes(dgp: &ClusteredDgp, rng: &mut Rng) -> Result<ClusteredOutcomes> {
    dgp.validate()?;
    let n = dgp.n_units;
    let base = normal(dgp.mu0, dgp.sigma_mu);
    let primary = normal(dgp.tau_p, dgp.sigma_tau);
    let spill = normal(dgp.tau_s, dgp.sigma_tau);
    let noise = normal(0.0, dgp.sigma_y);
    let mut out = ClusteredOutcomes {
        control: Vec::with_capacity(n),
        spillover: Vec::with_capacity(n),
        treated: Vec::with_capacity(n),
    };
    for _ in 0..n {
        let y0 = base.sample(rng);
        let tp = primary.sample(rng);
        let ts = spill.sample(rng);
        out.control.push(y0 + noise.sample(rng));
        out.spillover.push(y0 + ts + noise.sample(rng));
        out.treated.push(y0 + tp + noise.sample(rng));
    }
    Ok(out)
}

/// Spatial outcome model: Gamma baseline plus an additive spillover effect
/// `tau_scale / r^2` at radius `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialDgp {
    pub shape: f64,
    pub rate: f64,
    pub tau_scale: f64,
    pub radii: Vec<f64>,
}

/// Radius at which the default effect equals `DEFAULT_EFFECT_SD` baseline
/// standard deviations.
pub const REFERENCE_RADIUS: f64 = 125.0;
pub const DEFAULT_EFFECT_SD: f64 = 0.3;
pub const DEFAULT_RADII: [f64; 10] = [75.0, 100.0, 125.0, 150.0, 175.0, 225.0, 275.0, 325.0, 375.0, 425.0];

impl SpatialDgp {
    pub fn new(shape: f64, rate: f64, tau_scale: f64, radii: Vec<f64>) -> Result<Self> {
        if !(shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite()) {
            return Err(Error::InvalidParameter("gamma shape and rate must be positive".into()));
        }
        if !tau_scale.is_finite() {
            return Err(Error::InvalidParameter("effect scale must be finite".into()));
        }
        if radii.is_empty() || radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("radii must be positive and strictly increasing".into()));
        }
        Ok(SpatialDgp { shape, rate, tau_scale, radii })
    }

    /// Baseline with the given mean and variance, effect scaled so that
    /// `tau(125) = 0.3` baseline standard deviations.
    pub fn from_moments(mean: f64, variance: f64, radii: Vec<f64>) -> Result<Self> {
        if !(mean > 0.0 && variance > 0.0) {
            return Err(Error::InvalidParameter("mean and variance must be positive".into()));
        }
        let (shape, rate) = (mean * mean / variance, mean / variance);
        let c = DEFAULT_EFFECT_SD * variance.sqrt() * REFERENCE_RADIUS * REFERENCE_RADIUS;
        Self::new(shape, rate, c, radii)
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn sd(&self) -> f64 {
        self.shape.sqrt() / self.rate
    }

    pub fn tau(&self, r: f64) -> f64 {
        self.tau_scale / (r * r)
    }

    pub fn with_tau_scale(mut self, c: f64) -> Self {
        self.tau_scale = c;
        self
    }
}

impl Default for SpatialDgp {
    fn default() -> Self {
        Self::from_moments(1.0, 0.5, DEFAULT_RADII.to_vec()).expect("valid defaults")
    }
}

/// Potential outcomes under pure control and under spillover at one radius.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialOutcomes {
    pub radius: f64,
    pub pure_control: Vec<f64>,
    pub spillover: Vec<f64>,
}

impl SpatialOutcomes {
    /// Observed outcomes; units exposed to anything but the radius-`r`
    /// spillover keep their baseline.
    pub fn realize(&self, labels: &[Label]) -> Result<Vec<f64>> {
        if labels.len() != self.pure_control.len() {
            return Err(Error::LengthMismatch { expected: self.pure_control.len(), found: labels.len() });
        }
        let spill = Label::spillover(self.radius);
        Ok(labels
            .iter()
            .enumerate()
            .map(|(i, l)| if *l == spill { self.spillover[i] } else { self.pure_control[i] })
            .collect())
    }
}

pub fn gen_spatial_outcomes(dgp: &SpatialDgp, r: f64, n_units: usize, rng: &mut Rng) -> Result<SpatialOutcomes> {
    if !dgp.radii.contains(&r) {
        return Err(Error::InvalidParameter(format!("radius {r} is not in the model's radius list")));
    }
    let gamma = Gamma::new(dgp.shape, 1.0 / dgp.rate).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let tau = dgp.tau(r);
    let pure_control: Vec<f64> = (0..n_units).map(|_| gamma.sample(rng)).collect();
    let spillover = pure_control.iter().map(|y| y + tau).collect();
    Ok(SpatialOutcomes { radius: r, pure_control, spillover })
}
