//! The repeated route-then-schedule heuristic.

mod plat;
mod run;
mod state;

use thiserror::Error;

use crate::netmodel::{EdgeId, VehicleId};
use crate::routing::RoutingError;
use crate::scheduling::SchedulingError;

pub use plat::{c_plat, c_plat_tilde};
pub use run::{fuel_0, run, RshmOptions, RshmResult, Termination, TraceRow};
pub use state::{
    gap_bound, gap_term, similarity_index, update_cost_table, Incumbent, IterationRecord, RshmState,
};

#[derive(Debug, Error)]
pub enum SubproblemError {
    #[error("routing: {0}")]
    Routing(RoutingError),
    #[error("scheduling: {0}")]
    Scheduling(SchedulingError),
}

#[derive(Debug, Error)]
pub enum RshmError {
    #[error("iteration {iteration}: {source}")]
    SubproblemFailure {
        iteration: usize,
        #[source]
        source: SubproblemError,
    },
    #[error("cost table of iteration {iteration} has no entry for vehicle {vehicle} on edge {edge}")]
    MissingHistory {
        iteration: usize,
        vehicle: VehicleId,
        edge: EdgeId,
    },
    #[error("gap bound not applicable: {0}")]
    NotApplicable(String),
    #[error("{0}")]
    Invalid(String),
}
