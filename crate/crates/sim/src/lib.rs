//! Simulation studies for biclique randomization tests: outcome models,
//! synthetic networks, Monte Carlo power and coverage, design grids.

pub mod coverage;
pub mod design_grid;
pub mod dgp;
pub mod network;
pub mod output;
pub mod power;
pub mod stats;
pub mod theory;

pub use coverage::{ci_coverage, CoverageConfig, CoverageResult};
pub use design_grid::{design_power_grid, DesignGridConfig, GridCell};
pub use dgp::{gen_clustered_outcomes, gen_spatial_outcomes, ClusteredDgp, ClusteredOutcomes, SpatialDgp, SpatialOutcomes};
pub use network::{central_zone, GaussianCloud, HotspotDesign};
pub use power::{
    classify, radius_profile, replicate, spatial_power, spatial_power_on, ClusteredStudy, GraphStudy, PowerEstimate, RadiusPoint,
    RepOutcome, SpatialScenario, StudyConfig,
};
pub use stats::{decomposition_stats, spearman, DecompositionStats};
pub use theory::{empirical_quantile, null_quantile, theorem_bound, theory_power, theory_power_curve, PowerModel, TheoryPoint};
