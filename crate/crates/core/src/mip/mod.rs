//! MILP substrate: model representation, bounded simplex, branch-and-bound
//! with a root cut callback, and MPS/LP export.

mod bnb;
mod export;
mod model;
mod simplex;

use thiserror::Error;

pub use bnb::{
    gap, solve_mip, solve_mip_with_hook, CutRoundLog, MipOptions, MipSolution, MipStatus, RootCutHook, INT_TOL,
};
pub use export::{fmt_num, to_lp, to_mps, write_model, ModelFormat};
pub use model::{Constraint, Cut, CutSource, LinearModel, ObjSense, Sense, VarKind, Variable};
pub use simplex::{
    solve_lp, solve_lp_with_bounds, solve_lp_with_options, BasisStatus, LpOptions, LpSolution, LpStatus,
};

#[derive(Debug, Error)]
pub enum MipError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("cut callback failed: {0}")]
    Hook(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
