//! Road networks, vehicle missions, shortest paths and instance generation.

mod generate;
mod graph;
mod instance;

use thiserror::Error;

pub use generate::{
    derive_seed, generate_distributed, generate_two_cluster, pairwise_distances, rng_for, spread_nodes,
    synthetic_grid, DistributedConfig, GridConfig, TwoClusterConfig,
};
pub use graph::{candidate_edge_set, shortest_path, Edge, EdgeId, Node, NodeId, Path, RoadNetwork, Weight};
pub use instance::{
    instance_from_json, instance_to_json, load_instance, save_instance, GenerationMeta, ProblemInstance,
    SavingsParams, VehicleId, VehicleMission,
};

#[derive(Debug, Error)]
pub enum NetError {
    #[error("node {1} is unreachable from node {0}")]
    Unreachable(NodeId, NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("city {0} has no other node within the urban radius")]
    NoNodeInRadius(NodeId),
    #[error("no node pair satisfies the hub distance condition")]
    NoHubPair,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid instance: {0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
