use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::netmodel::{NodeId, ProblemInstance, VehicleId};
use crate::routing::RouteAssignment;

use super::{ContractedRoutes, SchedulingError, SegmentId};

/// Earliest and latest possible passage time of each vehicle at each node of
/// its route, given no waiting after departure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeBounds {
    /// `(lower, upper, offset)` where `offset` is the travel time from the
    /// origin to the node.
    entries: BTreeMap<(VehicleId, NodeId), (f64, f64, f64)>,
}

impl TimeBounds {
    pub fn lower(&self, v: VehicleId, i: NodeId) -> Option<f64> {
        self.entries.get(&(v, i)).map(|e| e.0)
    }

    pub fn upper(&self, v: VehicleId, i: NodeId) -> Option<f64> {
        self.entries.get(&(v, i)).map(|e| e.1)
    }

    /// Travel time from `v`'s origin to node `i`.
    pub fn offset(&self, v: VehicleId, i: NodeId) -> Option<f64> {
        self.entries.get(&(v, i)).map(|e| e.2)
    }

    pub fn entries(&self) -> impl Iterator<Item = ((VehicleId, NodeId), (f64, f64))> + '_ {
        self.entries.iter().map(|(&k, &(lo, hi, _))| (k, (lo, hi)))
    }
}

pub fn time_bounds(inst: &ProblemInstance, routes: &RouteAssignment) -> Result<TimeBounds, SchedulingError> {
    let net = &inst.network;
    let mut entries = BTreeMap::new();
    for m in &inst.missions {
        let r = routes.route(m.id);
        if r.is_empty() {
            return Err(SchedulingError::InvalidRoutes(format!("vehicle {} has no route", m.id)));
        }
        let total: f64 = r.iter().map(|&e| net.edge(e).time).sum();
        let nodes = routes.node_sequence(net, m.id);
        let mut prefix = 0.0;
        for (k, &i) in nodes.iter().enumerate() {
            if k > 0 {
                prefix += net.edge(r[k - 1]).time;
            }
            let lo = m.t_earliest + prefix;
            let hi = m.t_latest - (total - prefix);
            if lo > hi + 1e-9 {
                return Err(SchedulingError::InfeasibleRoute(m.id, i));
            }
            entries.insert((m.id, i), (lo, hi, prefix));
        }
    }
    Ok(TimeBounds { entries })
}

/// Tolerance of the platoonable test. A pair is dropped only when its
/// windows at the tail node miss each other by more than this.
pub const PLATOONABLE_TOL: f64 = 1e-9;

/// Big-M values for platoonable pairs on each shared segment, plus the pairs
/// whose windows cannot meet.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PairTable {
    /// `(u, v, segment) -> M` with `u > v`.
    pub big_m: BTreeMap<(VehicleId, VehicleId, SegmentId), f64>,
    pub pruned: Vec<(VehicleId, VehicleId, SegmentId)>,
}

pub fn platoonable_and_big_m(routes: &ContractedRoutes, bounds: &TimeBounds) -> PairTable {
    let mut out = PairTable::default();
    for (s, seg) in routes.segments.iter().enumerate() {
        for (a, &v) in seg.vehicles.iter().enumerate() {
            for &u in &seg.vehicles[a + 1..] {
                let i = seg.tail;
                let (lo_u, hi_u) = (bounds.lower(u, i).expect("bound"), bounds.upper(u, i).expect("bound"));
                let (lo_v, hi_v) = (bounds.lower(v, i).expect("bound"), bounds.upper(v, i).expect("bound"));
                let d1 = hi_u - lo_v;
                let d2 = hi_v - lo_u;
                if d1 < -PLATOONABLE_TOL || d2 < -PLATOONABLE_TOL {
                    out.pruned.push((u, v, s));
                } else {
                    out.big_m.insert((u, v, s), d1.max(0.0).max(d2.max(0.0)));
                }
            }
        }
    }
    out
}
