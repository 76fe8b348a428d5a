//! Uhlmann fidelity, Bures distance and the distance pipelines built on them.

mod distances;
mod fidelity;

pub use distances::{
    coherent_cutoff, coherent_mqs_distance, coherent_mqs_distance_closed, coherent_mqs_distance_exact,
    component_distance_coherent, component_distance_numeric, pc_distance, pc_distance_factorized, pc_factor_cutoff,
    universal_distance, universal_distance_via, UniversalRoute,
};
pub use fidelity::{
    bures, fidelity, fidelity_dense, fidelity_pure, DistanceResult, Method, CLIPPED_MASS_LIMIT, TRACE_TOLERANCE,
};
