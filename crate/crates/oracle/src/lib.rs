//! Brute-force reference implementations for the platooning library.
//!
//! Everything here enumerates instead of optimizing, shares no model
//! builders with the library, and refuses inputs beyond small caps. The
//! test suites compare library results against these functions.

mod cvpp;
pub mod fixtures;
mod rank;
mod rdp_points;
mod sp;
mod star;

use thiserror::Error;

use platoon::mip::MipError;
use platoon::netmodel::{NetError, VehicleId};

pub use cvpp::{brute_force_cvpp, brute_force_routing, simple_paths, OptimumReport, DEFAULT_PATH_CAP};
pub use rank::affine_rank;
pub use rdp_points::{enum_rdp_edge_points, recount_rdp_edge_points, RdpEdgePoint};
pub use sp::{brute_force_sp, SpOptimum, MAX_SP_GROUPS, MAX_SP_VEHICLES};
pub use star::{enum_star_partitions, pair_list, partitions_of};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("input too large for enumeration: {0}")]
    TooLarge(String),
    #[error("vehicle {0} cannot make its window on the given route")]
    InfeasibleRoute(VehicleId),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Mip(#[from] MipError),
}
