//! Monte Carlo power estimation for the clustered and spatial scenarios.

use std::sync::Arc;

use biclique_core::engine::{decompose_design_assisted, DecomposeConfig, DesignAssistedRule};
use biclique_core::exposure::{
    subsample_support, Design, EnumeratedDesign, ExposureMap, Label, SpatialNetwork, TwoStageCluster,
    DEFAULT_CONTROL_RADIUS,
};
use biclique_core::graph::NullExposureGraph;
use biclique_core::rng::{self, Rng};
use biclique_core::test::{run_design_assisted_test, BicliqueTest, TestConfig, TestStatistic};
use biclique_core::{Error, Result};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dgp::{gen_clustered_outcomes, gen_spatial_outcomes, ClusteredDgp, SpatialDgp};
use crate::network::HotspotDesign;
use crate::stats::{decomposition_stats, DecompositionStats};

/// Result of one replication.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepOutcome {
    Reject,
    Accept,
    /// The realization could not be tested (observed assignment outside every
    /// biclique, or an empty exposure group).
    Untestable,
}

impl RepOutcome {
    pub fn from_pvalue(p: f64, alpha: f64) -> Self {
        if p <= alpha {
            RepOutcome::Reject
        } else {
            RepOutcome::Accept
        }
    }
}

/// Maps untestable errors to [`RepOutcome::Untestable`] and keeps the rest.
pub fn classify(result: Result<f64>, alpha: f64) -> Result<RepOutcome> {
    match result {
        Ok(p) => Ok(RepOutcome::from_pvalue(p, alpha)),
        Err(e) if e.is_untestable() => Ok(RepOutcome::Untestable),
        Err(e) => Err(e),
    }
}

/// Rejection rate over testable replications with its binomial standard
/// error. Untestable replications are counted apart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerEstimate {
    pub reps: usize,
    pub rejections: usize,
    pub untestable: usize,
    pub power: f64,
    pub se: f64,
}

impl PowerEstimate {
    pub fn from_outcomes(outcomes: &[RepOutcome]) -> Self {
        let rejections = outcomes.iter().filter(|&&o| o == RepOutcome::Reject).count();
        let untestable = outcomes.iter().filter(|&&o| o == RepOutcome::Untestable).count();
        let testable = outcomes.len() - untestable;
        let (power, se) = if testable == 0 {
            (0.0, 0.0)
        } else {
            let p = rejections as f64 / testable as f64;
            (p, (p * (1.0 - p) / testable as f64).sqrt())
        };
        PowerEstimate { reps: outcomes.len(), rejections, untestable, power, se }
    }

    pub fn testable(&self) -> usize {
        self.reps - self.untestable
    }

    pub fn untestable_frac(&self) -> f64 {
        if self.reps == 0 {
            0.0
        } else {
            self.untestable as f64 / self.reps as f64
        }
    }
}

/// Runs `reps` replications in parallel. Replication `k` gets stream `k` of
/// a seed drawn from `rng`, so results do not depend on thread count.
pub fn replicate<T: Send>(reps: usize, rng: &mut Rng, f: impl Fn(&mut Rng) -> Result<T> + Sync) -> Result<Vec<T>> {
    let seed: u64 = rng.random();
    (0..reps).into_par_iter().map(|k| f(&mut rng::stream(seed, k as u64))).collect()
}

fn check_reps(reps: usize) -> Result<()> {
    if reps == 0 {
        return Err(Error::InvalidParameter("need at least one replication".into()));
    }
    Ok(())
}

/// Settings shared by the graph-based power studies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StudyConfig {
    /// Size of the sampled candidate set the graph is built on.
    pub n_assignments: usize,
    pub decompose: DecomposeConfig,
    pub test: TestConfig,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self::new(500, 20, 20)
    }
}

impl StudyConfig {
    pub fn new(n_assignments: usize, min_units: usize, min_assignments: usize) -> Self {
        StudyConfig {
            n_assignments,
            decompose: DecomposeConfig { node_budget: 20_000, ..DecomposeConfig::with_floors(min_units, min_assignments) },
            test: TestConfig { draws: 2_000, ..TestConfig::default() },
        }
    }

    /// 5,000 sampled assignments, bicliques of at least 100 units and 20
    /// assignments.
    pub fn clustered() -> Self {
        Self::new(5_000, 100, 20)
    }

    /// 2,000 sampled assignments, bicliques of at least 100 units and 200
    /// assignments.
    pub fn spatial() -> Self {
        Self::new(2_000, 100, 200)
    }
}

/// A decomposed null exposure graph over a sampled candidate set, reused
/// across replications. The candidate set plays the role of the design:
/// observed assignments are drawn from it.
#[derive(Clone, Debug)]
pub struct GraphStudy {
    map: ExposureMap,
    candidates: EnumeratedDesign,
    test: BicliqueTest,
    stat: TestStatistic,
}

impl GraphStudy {
    pub fn new(candidates: EnumeratedDesign, map: ExposureMap, a: Label, b: Label, decompose: &DecomposeConfig) -> Result<Self> {
        let graph = NullExposureGraph::build(candidates.assignments().to_vec(), &map, &[a.clone(), b.clone()])?;
        let test = BicliqueTest::new(graph, candidates.weights().to_vec(), decompose)?;
        Ok(GraphStudy { map, candidates, test, stat: TestStatistic::diff_in_means(a, b)? })
    }

    /// Candidate set of `m` distinct support points of `design`.
    pub fn sample_candidates(design: &Design, m: usize, rng: &mut Rng) -> Result<EnumeratedDesign> {
        let z0 = design.sample_one(rng);
        subsample_support(design, &z0, m, rng)
    }

    pub fn map(&self) -> &ExposureMap {
        &self.map
    }

    pub fn candidates(&self) -> &EnumeratedDesign {
        &self.candidates
    }

    pub fn test(&self) -> &BicliqueTest {
        &self.test
    }

    pub fn stats(&self) -> Result<DecompositionStats> {
        decomposition_stats(self.test.decomposition())
    }

    /// One replication: draw the observed assignment, realize outcomes with
    /// `outcomes(labels, rng)` and test.
    pub fn replication(
        &self,
        config: &TestConfig,
        alpha: f64,
        rng: &mut Rng,
        outcomes: impl Fn(&[Label], &mut Rng) -> Result<Vec<f64>>,
    ) -> Result<(RepOutcome, Option<usize>)> {
        let obs = self.candidates.sample_index(rng);
        let labels = self.test.labels_at(obs);
        let y = outcomes(&labels, rng)?;
        let focals = self.test.decomposition().locate_biclique(obs).ok().map(|b| b.n_units());
        let outcome = classify(self.test.test(obs, &y, &self.stat, config, rng).map(|r| r.pval), alpha)?;
        Ok((outcome, focals))
    }
}

/// The two-stage clustered scenario: one graph and decomposition, plus the
/// design-assisted rule, shared across replications and effect sizes.
#[derive(Clone, Debug)]
pub struct ClusteredStudy {
    dgp: ClusteredDgp,
    design: TwoStageCluster,
    rule: DesignAssistedRule,
    study: GraphStudy,
    config: StudyConfig,
}

impl ClusteredStudy {
    /// `floor(K/2)` clusters treated, one unit in each.
    pub fn new(dgp: ClusteredDgp, config: StudyConfig, rng: &mut Rng) -> Result<Self> {
        dgp.validate()?;
        let clusters = Arc::new(dgp.clusters()?);
        let design = TwoStageCluster::new(clusters.clone(), dgp.n_clusters / 2)?;
        let map = ExposureMap::Clustered(clusters);
        let full = Design::TwoStageCluster(design.clone());
        let candidates = GraphStudy::sample_candidates(&full, config.n_assignments, rng)?;
        let study = GraphStudy::new(candidates, map, Label::Level(0), Label::Level(1), &config.decompose)?;
        let rule = decompose_design_assisted(&design, rng)?;
        Ok(ClusteredStudy { dgp, design, rule, study, config })
    }

    pub fn study(&self) -> &GraphStudy {
        &self.study
    }

    pub fn dgp(&self) -> &ClusteredDgp {
        &self.dgp
    }

    /// Biclique test power with spillover effect `tau`.
    pub fn power(&self, tau: f64, reps: usize, alpha: f64, rng: &mut Rng) -> Result<PowerEstimate> {
        check_reps(reps)?;
        let dgp = self.dgp.clone().with_spillover(tau);
        let out = replicate(reps, rng, |r| {
            self.study
                .replication(&self.config.test, alpha, r, |labels, r| gen_clustered_outcomes(&dgp, r)?.realize(labels))
                .map(|(o, _)| o)
        })?;
        Ok(PowerEstimate::from_outcomes(&out))
    }

    /// Design-assisted test power with spillover effect `tau`; observed
    /// assignments come from the full design.
    pub fn design_assisted_power(&self, tau: f64, reps: usize, alpha: f64, rng: &mut Rng) -> Result<PowerEstimate> {
        check_reps(reps)?;
        let dgp = self.dgp.clone().with_spillover(tau);
        let full = Design::TwoStageCluster(self.design.clone());
        let stat = TestStatistic::diff_in_means(Label::Level(0), Label::Level(1))?;
        let map = self.study.map();
        let out = replicate(reps, rng, |r| {
            let z = full.sample_one(r);
            let y = gen_clustered_outcomes(&dgp, r)?.realize(&map.exposures(&z)?)?;
            let p = run_design_assisted_test(&self.design, &self.rule, map, &z, &y, &stat, &self.config.test, r);
            classify(p.map(|rep| rep.pval), alpha)
        })?;
        Ok(PowerEstimate::from_outcomes(&out))
    }
}

/// Spatial hotspot experiment on a fixed network.
#[derive(Clone, Debug)]
pub struct SpatialScenario {
    pub network: Arc<SpatialNetwork>,
    pub hotspots: HotspotDesign,
    pub control_radius: f64,
    pub config: StudyConfig,
}

impl SpatialScenario {
    pub fn new(network: SpatialNetwork, hotspots: HotspotDesign, config: StudyConfig) -> Self {
        SpatialScenario { network: Arc::new(network), hotspots, control_radius: DEFAULT_CONTROL_RADIUS, config }
    }

    /// Graph and decomposition for the pure-control versus spillover-`r`
    /// contrast.
    pub fn study(&self, r: f64, rng: &mut Rng) -> Result<GraphStudy> {
        let design = self.hotspots.design(self.network.n_units())?;
        let candidates = GraphStudy::sample_candidates(&design, self.config.n_assignments, rng)?;
        let map = ExposureMap::Spatial(biclique_core::exposure::SpatialExposure::new(
            self.network.clone(),
            r,
            self.control_radius,
        )?);
        GraphStudy::new(candidates, map, Label::PureControl, Label::spillover(r), &self.config.decompose)
    }
}

/// Power at one radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusPoint {
    pub radius: f64,
    pub tau: f64,
    pub estimate: PowerEstimate,
    /// Average focal units of the conditioning biclique.
    pub mean_focals: f64,
}

/// Power of the spillover test at every radius of `dgp`.
pub fn radius_profile(
    scenario: &SpatialScenario,
    dgp: &SpatialDgp,
    reps: usize,
    alpha: f64,
    rng: &mut Rng,
) -> Result<Vec<RadiusPoint>> {
    check_reps(reps)?;
    dgp.radii.iter().map(|&r| spatial_power(scenario, dgp, r, reps, alpha, rng)).collect()
}

pub fn spatial_power(
    scenario: &SpatialScenario,
    dgp: &SpatialDgp,
    r: f64,
    reps: usize,
    alpha: f64,
    rng: &mut Rng,
) -> Result<RadiusPoint> {
    check_reps(reps)?;
    let study = scenario.study(r, rng)?;
    spatial_power_on(&study, scenario, dgp, r, reps, alpha, rng)
}

/// [`spatial_power`] on a prebuilt study for radius `r`.
pub fn spatial_power_on(
    study: &GraphStudy,
    scenario: &SpatialScenario,
    dgp: &SpatialDgp,
    r: f64,
    reps: usize,
    alpha: f64,
    rng: &mut Rng,
) -> Result<RadiusPoint> {
    check_reps(reps)?;
    let n = scenario.network.n_units();
    let out = replicate(reps, rng, |g| {
        study.replication(&scenario.config.test, alpha, g, |labels, g| gen_spatial_outcomes(dgp, r, n, g)?.realize(labels))
    })?;
    let outcomes: Vec<RepOutcome> = out.iter().map(|(o, _)| *o).collect();
    let focals: Vec<f64> = out.iter().filter_map(|(_, f)| f.map(|v| v as f64)).collect();
    let mean_focals = if focals.is_empty() { 0.0 } else { focals.iter().sum::<f64>() / focals.len() as f64 };
    Ok(RadiusPoint { radius: r, tau: dgp.tau(r), estimate: PowerEstimate::from_outcomes(&outcomes), mean_focals })
}
