//! Null exposure graphs.

mod bound;
mod multi_null;
mod null_graph;
mod snapshot;
mod table;

pub use bound::{biclique_existence_bound, ExistenceBound};
pub use multi_null::{build_multi_null_graph, ExposureFamily, MultiNullGraph};
pub(crate) use multi_null::multi_null_rows;
pub use null_graph::{GraphSummary, NullExposureGraph};
pub(crate) use null_graph::check_distinct;
pub use snapshot::{load_snapshot, read_snapshot, save_snapshot, write_snapshot, Snapshot};
pub use table::ExposureTable;
