//! Coordinated vehicle platooning: road networks, the routing and scheduling
//! MILPs, their valid inequalities, and the repeated route-then-schedule
//! heuristic that ties them together.
//!
//! Everything runs on an embedded bounded simplex with a small
//! branch-and-bound on top (see [`mip`]), so results are reproducible
//! bit-for-bit on a given platform.

pub mod cuts;
pub mod mip;
pub mod netmodel;
pub mod routing;
pub mod rshm;
pub mod scheduling;
