use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::netmodel::{EdgeId, RoadNetwork, VehicleId};

/// Per-vehicle edge costs fed to the routing model of one iteration.
///
/// Edges outside `explored` are charged their base cost with the usual
/// platoon-discount terms; explored edges carry a per-vehicle adjusted cost
/// learned from earlier schedules.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeCostTable {
    /// Iteration whose routing model this table parameterizes.
    pub iteration: usize,
    base: Vec<f64>,
    explored: BTreeSet<EdgeId>,
    adjusted: BTreeMap<(VehicleId, EdgeId), f64>,
}

impl EdgeCostTable {
    /// Table for the first iteration: nothing explored yet.
    pub fn initial(net: &RoadNetwork) -> Self {
        EdgeCostTable {
            iteration: 1,
            base: net.edges().iter().map(|e| e.fuel).collect(),
            explored: BTreeSet::new(),
            adjusted: BTreeMap::new(),
        }
    }

    pub fn with_adjustments(
        iteration: usize,
        base: Vec<f64>,
        explored: BTreeSet<EdgeId>,
        adjusted: BTreeMap<(VehicleId, EdgeId), f64>,
    ) -> Self {
        EdgeCostTable {
            iteration,
            base,
            explored,
            adjusted,
        }
    }

    pub fn base(&self, e: EdgeId) -> f64 {
        self.base[e]
    }

    pub fn base_costs(&self) -> &[f64] {
        &self.base
    }

    pub fn is_explored(&self, e: EdgeId) -> bool {
        self.explored.contains(&e)
    }

    pub fn explored(&self) -> &BTreeSet<EdgeId> {
        &self.explored
    }

    /// Adjusted cost of `v` on an explored edge; `None` elsewhere.
    pub fn adjusted(&self, v: VehicleId, e: EdgeId) -> Option<f64> {
        self.adjusted.get(&(v, e)).copied()
    }

    pub fn adjusted_entries(&self) -> &BTreeMap<(VehicleId, EdgeId), f64> {
        &self.adjusted
    }

    /// Cost the routing objective charges `v` per traversal of `e`, before
    /// any platoon discount on unexplored edges.
    pub fn cost(&self, v: VehicleId, e: EdgeId) -> f64 {
        if self.is_explored(e) {
            self.adjusted(v, e).unwrap_or(self.base[e])
        } else {
            self.base[e]
        }
    }
}
