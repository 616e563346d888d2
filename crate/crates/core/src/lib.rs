//! Road-network robustness toolkit.
//!
//! Builds simplified intersection graphs from path-based map extracts, runs
//! bond-percolation experiments under random failure (`Error`) and
//! betweenness-targeted attack (`Attack`), detects percolation thresholds
//! from the second-largest-component peak, and measures how reachable
//! categorized city services remain in the surviving giant component.
//!
//! The `parallel` feature (default) runs error ensembles and betweenness
//! source loops on rayon; results are bitwise identical either way.

pub mod artifacts;
pub mod error;
pub mod geo;
pub mod graph;
pub mod percolation;
pub mod services;
pub mod synth;

pub use error::{Error, Result};
pub use geo::{haversine_km, GeoPoint, PathRecord, VenueRecord};
pub use graph::{
    build_edges, compute_metrics, extract_gcc, identify_relevant_nodes, prune_degree_two, EdgeId,
    NetworkMetrics, NodeId, RoadNetwork,
};
pub use percolation::{
    component_sizes, detect_threshold, edge_betweenness, pearson, run_attack, run_error,
    run_error_ensemble, Checkpoint, PercolationEnsemble, PercolationRun,
};
pub use services::{
    assign_venues, availability_at_threshold, average_availability, AvailabilityReport, Category,
    ServiceAssignment,
};

/// Builds the simplified giant-component road network from parsed paths:
/// relevant nodes, edge wiring, degree-2 pruning, then GCC extraction.
pub fn build_road_network(paths: &[PathRecord]) -> Result<RoadNetwork> {
    let relevant = identify_relevant_nodes(paths);
    let raw = build_edges(paths, &relevant);
    let pruned = prune_degree_two(&raw);
    extract_gcc(&pruned)
}
