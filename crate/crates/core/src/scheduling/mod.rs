//! Scheduling on fixed routes: time bounds, pair pruning, edge contraction,
//! the scheduling model, platoon extraction and fuel accounting.

mod bounds;
mod contract;
mod platoons;
mod sp;

use thiserror::Error;

use crate::mip::MipError;
use crate::netmodel::{NodeId, VehicleId};

pub use bounds::{platoonable_and_big_m, time_bounds, PairTable, TimeBounds, PLATOONABLE_TOL};
pub use contract::{contract, uncontracted, ContractedRoutes, Segment, SegmentId};
pub use platoons::{total_fuel, total_fuel_by_savings, Platoon, PlatoonConfiguration};
pub use sp::{
    build_sp, build_sp_for_routes, extract_platoons, solve_sp, CutMode, SpModelHandle, SpOptions, SpOutcome,
    SpSolveOptions, ENTRY_TOL,
};

#[derive(Debug, Error)]
pub enum SchedulingError {
    #[error("vehicle {0} cannot pass node {1} within its time window")]
    InfeasibleRoute(VehicleId, NodeId),
    #[error("invalid routes: {0}")]
    InvalidRoutes(String),
    #[error("inconsistent platoon: {0}")]
    InconsistentPlatoon(String),
    #[error("scheduling model returned no solution: {0}")]
    NoSolution(String),
    #[error(transparent)]
    Mip(#[from] MipError),
}
