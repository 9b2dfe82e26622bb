//! Valid inequalities for the scheduling model: star-partition rows,
//! platoon-size rows, and disjunctive cuts derived from active constraints.

mod disjunctive;
mod root;
mod star;

use thiserror::Error;

use crate::mip::MipError;
use crate::scheduling::SchedulingError;

pub use disjunctive::{
    build_cglp, collect_active_sets, collect_for_pair, cut_from_sets, disjunctive_system, separate_all_disjunctive,
    separate_disjunctive, tight_fractional_pairs, ActiveSets, Cglp, Collection, DisjRow, DisjSystem, DisjunctiveCut,
    NoActiveSets, TightSide, ACTIVE_TOL,
};
pub use root::{root_bound_study, RootBoundReport, SpRootCuts};
pub use star::{
    platoon_size_facets, separate_size_facets, star_partition_constraints, FollowCol, DEFAULT_FACET_CAP,
};

#[derive(Debug, Error)]
pub enum CutError {
    #[error("cut system assembly failed: {0}")]
    Assembly(String),
    #[error("cut-generating LP failed: {0}")]
    Cglp(String),
    #[error(transparent)]
    Mip(#[from] MipError),
    #[error(transparent)]
    Scheduling(#[from] SchedulingError),
}
