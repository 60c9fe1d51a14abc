//! Scenario-driven Monte Carlo commands.

use std::fs;
use std::path::{Path, PathBuf};

use biclique_core::rng::{self, Rng};
use biclique_sim::dgp::DEFAULT_RADII;
use biclique_sim::output::{write_curve, write_surface, CurveRow};
use biclique_sim::{
    central_zone, ci_coverage, design_power_grid, radius_profile, theory_power, ClusteredDgp, ClusteredStudy, CoverageConfig,
    DesignGridConfig, GaussianCloud, HotspotDesign, PowerModel, SpatialDgp, SpatialScenario, StudyConfig,
};
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{at_path, CliError, CliResult};
use crate::report::{emit, stamp};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusteredSpec {
    pub n_units: usize,
    pub n_clusters: usize,
    pub taus: Vec<f64>,
    pub reps: usize,
    pub alpha: f64,
    pub study: StudyConfig,
    /// Power curves use the design-assisted test instead of the plain one.
    pub design_assisted: bool,
}

impl Default for ClusteredSpec {
    fn default() -> Self {
        ClusteredSpec {
            n_units: 300,
            n_clusters: 20,
            taus: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            reps: 400,
            alpha: 0.05,
            study: StudyConfig::clustered(),
            design_assisted: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpatialSpec {
    pub network: GaussianCloud,
    pub hotspots: usize,
    pub treated: usize,
    pub radii: Vec<f64>,
    /// Effect scale `c` in `tau_r = c / r^2`; the outcome model default when
    /// absent.
    pub tau_scale: Option<f64>,
    pub control_radius: f64,
    pub reps: usize,
    pub alpha: f64,
    pub study: StudyConfig,
}

impl Default for SpatialSpec {
    fn default() -> Self {
        SpatialSpec {
            network: GaussianCloud::city(),
            hotspots: 52,
            treated: 21,
            radii: DEFAULT_RADII.to_vec(),
            tau_scale: None,
            control_radius: biclique_core::exposure::DEFAULT_CONTROL_RADIUS,
            reps: 500,
            alpha: 0.05,
            study: StudyConfig::spatial(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TheorySpec {
    /// Focal units.
    pub n: usize,
    /// Randomization draws.
    pub m: usize,
    pub taus: Vec<f64>,
    pub reps: usize,
    pub alpha: f64,
}

impl Default for TheorySpec {
    fn default() -> Self {
        TheorySpec { n: 100, m: 1_000, taus: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5], reps: 2_000, alpha: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoverageSpec {
    pub reps: usize,
    pub config: CoverageConfig,
}

impl Default for CoverageSpec {
    fn default() -> Self {
        CoverageSpec { reps: 200, config: CoverageConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    Clustered(ClusteredSpec),
    Spatial(SpatialSpec),
    Theory(TheorySpec),
    Coverage(CoverageSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub network: GaussianCloud,
    /// Share of units in the central zone.
    pub central_fraction: f64,
    pub radius: f64,
    pub control_radius: f64,
    pub tau: f64,
    pub sd: f64,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    pub reps: usize,
    pub alpha: f64,
    pub study: StudyConfig,
}

impl Default for GridSpec {
    fn default() -> Self {
        let steps: Vec<f64> = (1..=5).map(|k| k as f64 * 0.03).collect();
        let mut study = StudyConfig::new(500, 20, 20);
        study.decompose.node_budget = 2_000;
        GridSpec {
            network: GaussianCloud::unit_scale(),
            central_fraction: 0.362,
            radius: 0.1,
            control_radius: 0.2,
            tau: 0.3,
            sd: 1.0,
            p0: steps.clone(),
            p1: steps,
            reps: 200,
            alpha: 0.05,
            study,
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = at_path(path, fs::read_to_string(path))?;
    at_path(path, serde_json::from_str(&text))
}

#[derive(Args, Debug, Serialize)]
pub struct ScenarioArgs {
    /// Scenario JSON with a `kind` of clustered, spatial, theory or coverage.
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct GridArgs {
    /// Design grid JSON; every field is optional.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long)]
    pub seed: u64,
    /// Long-format CSV p0,p1,power,se,mean_focals.
    #[arg(long)]
    pub out: PathBuf,
}

fn clustered_study(spec: &ClusteredSpec, r: &mut Rng) -> CliResult<ClusteredStudy> {
    let dgp = ClusteredDgp { n_units: spec.n_units, ..ClusteredDgp::reference(spec.n_clusters) };
    Ok(ClusteredStudy::new(dgp, spec.study.clone(), r)?)
}

fn spatial_parts(spec: &SpatialSpec, r: &mut Rng) -> CliResult<(SpatialScenario, SpatialDgp)> {
    let net = spec.network.sample(r)?;
    let hot = HotspotDesign::random(spec.network.n_units, spec.hotspots, spec.treated, r)?;
    let mut scenario = SpatialScenario::new(net, hot, spec.study.clone());
    scenario.control_radius = spec.control_radius;
    let mut dgp = SpatialDgp { radii: spec.radii.clone(), ..SpatialDgp::default() };
    if let Some(c) = spec.tau_scale {
        dgp = dgp.with_tau_scale(c);
    }
    Ok((scenario, dgp))
}

fn curve(scenario: &Scenario, r: &mut Rng) -> CliResult<Vec<CurveRow>> {
    match scenario {
        Scenario::Clustered(s) => {
            let study = clustered_study(s, r)?;
            s.taus
                .iter()
                .map(|&tau| {
                    let est = if s.design_assisted {
                        study.design_assisted_power(tau, s.reps, s.alpha, r)?
                    } else {
                        study.power(tau, s.reps, s.alpha, r)?
                    };
                    Ok(CurveRow::new(tau, &est))
                })
                .collect()
        }
        Scenario::Spatial(s) => {
            let (scenario, dgp) = spatial_parts(s, r)?;
            let points = radius_profile(&scenario, &dgp, s.reps, s.alpha, r)?;
            Ok(points.iter().map(|p| CurveRow::new(p.radius, &p.estimate)).collect())
        }
        Scenario::Theory(s) => s
            .taus
            .iter()
            .map(|&tau| {
                let model = PowerModel { n: s.n, m: s.m, tau, alpha: s.alpha };
                Ok(CurveRow::new(tau, &theory_power(&model, s.reps, r)?))
            })
            .collect(),
        Scenario::Coverage(_) => Err(CliError::validation("coverage scenarios have no power curve; use simulate")),
    }
}

pub fn run_power(args: &ScenarioArgs) -> CliResult<()> {
    let scenario: Scenario = read_json(&args.scenario)?;
    let rows = curve(&scenario, &mut rng::seeded(args.seed))?;
    write_curve(at_path(&args.out, fs::File::create(&args.out))?, &rows)?;
    emit(&stamp(args, Some(args.seed), &json!({ "scenario": scenario, "curve": args.out, "rows": rows.len() }))?, None)
}

/// Full diagnostics of a scenario.
fn simulate(scenario: &Scenario, r: &mut Rng) -> CliResult<serde_json::Value> {
    Ok(match scenario {
        Scenario::Clustered(s) => {
            let study = clustered_study(s, r)?;
            let stats = study.study().stats()?;
            let mut points = Vec::new();
            for &tau in &s.taus {
                let plain = study.power(tau, s.reps, s.alpha, r)?;
                let assisted = study.design_assisted_power(tau, s.reps, s.alpha, r)?;
                points.push(json!({ "tau": tau, "biclique": plain, "design_assisted": assisted }));
            }
            json!({
                "decomposition": stats,
                "focal_units_per_cluster": stats.focal_units_per_cluster(s.n_clusters),
                "points": points,
            })
        }
        Scenario::Spatial(s) => {
            let (scenario, dgp) = spatial_parts(s, r)?;
            json!({ "points": radius_profile(&scenario, &dgp, s.reps, s.alpha, r)? })
        }
        Scenario::Theory(s) => {
            let mut points = Vec::new();
            for &tau in &s.taus {
                let model = PowerModel { n: s.n, m: s.m, tau, alpha: s.alpha };
                points.push(json!({ "model": model, "estimate": theory_power(&model, s.reps, r)? }));
            }
            json!({ "points": points })
        }
        Scenario::Coverage(s) => json!({ "coverage": ci_coverage(&s.config, s.reps, r)? }),
    })
}

pub fn run_simulate(args: &ScenarioArgs) -> CliResult<()> {
    let scenario: Scenario = read_json(&args.scenario)?;
    let result = simulate(&scenario, &mut rng::seeded(args.seed))?;
    let report = stamp(args, Some(args.seed), &json!({ "scenario": scenario, "result": result }))?;
    emit(&report, Some(&args.out))
}

pub fn run_design_grid(args: &GridArgs) -> CliResult<()> {
    let spec: GridSpec = match &args.scenario {
        Some(p) => read_json(p)?,
        None => GridSpec::default(),
    };
    let mut r = rng::seeded(args.seed);
    let net = spec.network.sample(&mut r)?;
    let (zone, zone_radius) = central_zone(&net, spec.central_fraction)?;
    let config = DesignGridConfig {
        radius: spec.radius,
        control_radius: spec.control_radius,
        tau: spec.tau,
        sd: spec.sd,
        study: spec.study.clone(),
        ..DesignGridConfig::new(net, zone)
    };
    let cells = design_power_grid(&config, &spec.p0, &spec.p1, spec.reps, spec.alpha, &mut r)?;
    write_surface(at_path(&args.out, fs::File::create(&args.out))?, &cells)?;
    let body = json!({ "scenario": spec, "zone_radius": zone_radius, "surface": args.out, "cells": cells.len() });
    emit(&stamp(args, Some(args.seed), &body)?, None)
}
