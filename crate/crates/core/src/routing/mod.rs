//! Route design: the routing model that presumes every edge-sharing group
//! platoons, its hull inequalities and the iteration-adjusted objectives.

mod assignment;
mod costs;
mod rdp;

use thiserror::Error;

use crate::mip::MipError;
use crate::netmodel::{NetError, VehicleId};

pub use assignment::RouteAssignment;
pub use costs::EdgeCostTable;
pub use rdp::{
    build_rdp, build_rdp_with, evaluate_rdp_objective, extract_route_assignment, extract_routes, hull_inequalities,
    order_path, point_for_routes, routes_from_values, shortest_path_assignment, solve_rdp, EdgeVars, RdpModelHandle,
    RdpOptions, RdpOutcome,
};

#[derive(Debug, Error)]
pub enum RoutingError {
    #[error("vehicle {0} has no time-feasible candidate route")]
    InfeasibleMission(VehicleId),
    #[error("vehicle {0}: solution is not a simple path ({1})")]
    NonPathSolution(VehicleId, String),
    #[error("routing model returned no solution: {0}")]
    NoSolution(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Mip(#[from] MipError),
}
