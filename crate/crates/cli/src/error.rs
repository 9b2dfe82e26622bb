use std::path::PathBuf;

use platoon::cuts::CutError;
use platoon::mip::MipError;
use platoon::netmodel::NetError;
use platoon::routing::RoutingError;
use platoon::rshm::{RshmError, SubproblemError};
use platoon::scheduling::SchedulingError;
use serde::Serialize;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const INFEASIBLE: u8 = 2;
    pub const LIMIT: u8 = 3;
    pub const USAGE: u8 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Instance {
        path: PathBuf,
        #[source]
        source: NetError,
    },
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error(transparent)]
    Scheduling(#[from] SchedulingError),
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error(transparent)]
    Rshm(#[from] RshmError),
    #[error(transparent)]
    Mip(#[from] MipError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn routing_infeasible(e: &RoutingError) -> bool {
    match e {
        RoutingError::InfeasibleMission(_) => true,
        RoutingError::NoSolution(s) => s.contains("Infeasible"),
        RoutingError::Net(n) => net_infeasible(n),
        _ => false,
    }
}

fn scheduling_infeasible(e: &SchedulingError) -> bool {
    match e {
        SchedulingError::InfeasibleRoute(..) => true,
        SchedulingError::NoSolution(s) => s.contains("Infeasible"),
        _ => false,
    }
}

fn net_infeasible(e: &NetError) -> bool {
    matches!(e, NetError::Unreachable(..))
}

impl CliError {
    /// Short machine-readable name of the failure class.
    pub fn kind(&self) -> &'static str {
        if self.is_infeasible() {
            return "infeasible";
        }
        match self {
            CliError::Usage(_) => "usage",
            CliError::Infeasible(_) => "infeasible",
            CliError::Schema { .. } => "schema",
            CliError::Instance { .. } => "instance",
            CliError::Net(_) => "network",
            CliError::Routing(_) => "routing",
            CliError::Scheduling(_) => "scheduling",
            CliError::Cut(_) => "cuts",
            CliError::Rshm(_) => "heuristic",
            CliError::Mip(_) => "solver",
            CliError::Io { .. } => "io",
            CliError::Csv(_) | CliError::Json(_) => "output",
        }
    }

    pub fn is_infeasible(&self) -> bool {
        match self {
            CliError::Infeasible(_) => true,
            CliError::Net(e) => net_infeasible(e),
            CliError::Routing(e) => routing_infeasible(e),
            CliError::Scheduling(e) => scheduling_infeasible(e),
            CliError::Cut(CutError::Scheduling(e)) => scheduling_infeasible(e),
            CliError::Rshm(RshmError::SubproblemFailure { source, .. }) => match source {
                SubproblemError::Routing(e) => routing_infeasible(e),
                SubproblemError::Scheduling(e) => scheduling_infeasible(e),
            },
            _ => false,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            _ if self.is_infeasible() => exit::INFEASIBLE,
            CliError::Usage(_) => exit::USAGE,
            _ => exit::FAILURE,
        }
    }

    /// One-line JSON object for stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            error: &'a str,
            message: String,
        }
        serde_json::to_string(&Report {
            error: self.kind(),
            message: self.to_string(),
        })
        .expect("error report serializes")
    }
}

pub fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
