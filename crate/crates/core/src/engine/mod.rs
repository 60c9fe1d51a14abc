//! Biclique search and decompositions of null exposure graphs.

mod athey;
mod biclique;
mod decompose;
mod design_assisted;
mod exact;
mod matrix;

pub use athey::{focal_degree_weights, induced_biclique_from_focals, sample_focal_units};
pub use biclique::{compare_bicliques, is_biclique, Biclique};
pub use decompose::{
    decompose_greedy, decompose_multi_null, decompose_multi_null_table, enumerate_bicliques,
    enumerate_bicliques_with_budget, initial_candidates, max_edge_biclique, validation_counts, DecomposeConfig,
    Decomposition, DecompositionKind, DEFAULT_NODE_BUDGET,
};
pub use design_assisted::{decompose_design_assisted, ConditioningSet, DesignAssistedRule};
pub use exact::{exists_biclique, max_edge_biclique_exact, EXACT_LIMIT};
