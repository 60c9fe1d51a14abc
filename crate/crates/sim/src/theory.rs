//! Stylized power model: a biclique with `n` focal units and `m` focal
//! assignments, where the statistic is Normal with standard deviation
//! `1/sqrt(n)` under both the null and the shifted alternative.

use biclique_core::rng::Rng;
use biclique_core::{Error, Result};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal as StdNormal};

use crate::power::{replicate, PowerEstimate, RepOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    pub n: usize,
    pub m: usize,
    pub tau: f64,
    pub alpha: f64,
}

impl PowerModel {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidParameter("n and m must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) || !self.tau.is_finite() {
            return Err(Error::InvalidParameter("need 0 < alpha < 1 and a finite effect".into()));
        }
        Ok(())
    }

    fn sd(&self) -> f64 {
        1.0 / (self.n as f64).sqrt()
    }

    /// One replication: `m` null draws, one alternative draw, reject when the
    /// fraction of null draws at or above it is at most `alpha`.
    pub fn replicate_once(&self, rng: &mut Rng) -> RepOutcome {
        let null = Normal::new(0.0, self.sd()).expect("positive sd");
        let t_obs = self.tau + null.sample(rng);
        let above = (0..self.m).filter(|_| null.sample(rng) >= t_obs).count();
        RepOutcome::from_pvalue(above as f64 / self.m as f64, self.alpha)
    }
}

pub fn theory_power(model: &PowerModel, reps: usize, rng: &mut Rng) -> Result<PowerEstimate> {
    model.validate()?;
    if reps == 0 {
        return Err(Error::InvalidParameter("need at least one replication".into()));
    }
    let out = replicate(reps, rng, |r| Ok(model.replicate_once(r)))?;
    Ok(PowerEstimate::from_outcomes(&out))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryPoint {
    pub model: PowerModel,
    pub estimate: PowerEstimate,
}

/// Power over the grid `ns x ms x taus`, in that nesting order.
pub fn theory_power_curve(
    ns: &[usize],
    ms: &[usize],
    taus: &[f64],
    alpha: f64,
    reps: usize,
    rng: &mut Rng,
) -> Result<Vec<TheoryPoint>> {
    let mut out = Vec::with_capacity(ns.len() * ms.len() * taus.len());
    for &n in ns {
        for &m in ms {
            for &tau in taus {
                let model = PowerModel { n, m, tau, alpha };
                out.push(TheoryPoint { model, estimate: theory_power(&model, reps, rng)? });
            }
        }
    }
    Ok(out)
}

/// Population `1 - alpha` quantile of the null law.
pub fn null_quantile(n: usize, alpha: f64) -> f64 {
    StdNormal::standard().inverse_cdf(1.0 - alpha) / (n as f64).sqrt()
}

/// Empirical `1 - alpha` quantile of `m` null draws.
pub fn empirical_quantile(n: usize, m: usize, alpha: f64, rng: &mut Rng) -> f64 {
    let null = Normal::new(0.0, 1.0 / (n as f64).sqrt()).expect("positive sd");
    let mut t: Vec<f64> = (0..m).map(|_| null.sample(rng)).collect();
    t.sort_by(f64::total_cmp);
    let k = (((1.0 - alpha) * m as f64).ceil() as usize).clamp(1, m);
    t[k - 1]
}

/// Overlay curve `1 / (1 + A exp(-a tau sqrt(n)))` with caller-supplied
/// constants.
pub fn theorem_bound(big_a: f64, a: f64, tau: f64, n: usize) -> f64 {
    1.0 / (1.0 + big_a * (-a * tau * (n as f64).sqrt()).exp())
}
