//! Units, assignments, experimental designs and exposure mappings.

mod assignment;
mod design;
mod label;
mod map;
mod network;

pub use assignment::Assignment;
pub use design::{
    design_sample, subsample_support, BernoulliTwoZone, CompleteRandomization, Design, EnumeratedDesign,
    TwoStageCluster,
};
pub use label::{parse_label_list, Label, Radius};
pub use map::{CustomExposure, ExposureMap, KHopExposure, SpatialExposure, DEFAULT_CONTROL_RADIUS};
pub use network::{ClusterStructure, HopNetwork, SpatialNetwork};
