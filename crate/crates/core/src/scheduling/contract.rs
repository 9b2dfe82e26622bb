use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::netmodel::{EdgeId, NodeId, RoadNetwork, VehicleId};
use crate::routing::RouteAssignment;

pub type SegmentId = usize;

/// A run of consecutive original edges shared by exactly the same vehicles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub tail: NodeId,
    pub head: NodeId,
    pub edges: Vec<EdgeId>,
    pub time: f64,
    pub cost: f64,
    /// Ascending.
    pub vehicles: Vec<VehicleId>,
}

impl Segment {
    /// Stable name that keeps parallel segments between one node pair apart.
    pub fn label(&self, id: SegmentId) -> String {
        format!("{}_{}_{}", self.tail, self.head, id)
    }
}

/// Routes written over segments. Segments are ordered by their first
/// original edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractedRoutes {
    pub routes: BTreeMap<VehicleId, Vec<SegmentId>>,
    pub segments: Vec<Segment>,
}

impl ContractedRoutes {
    pub fn route(&self, v: VehicleId) -> &[SegmentId] {
        self.routes.get(&v).map_or(&[], |r| r.as_slice())
    }

    /// Segment holding each original edge.
    pub fn segment_of_edge(&self) -> BTreeMap<EdgeId, SegmentId> {
        let mut out = BTreeMap::new();
        for (s, seg) in self.segments.iter().enumerate() {
            for &e in &seg.edges {
                out.insert(e, s);
            }
        }
        out
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    /// Nodes of `v`'s contracted route, origin first.
    pub fn node_sequence(&self, v: VehicleId) -> Vec<NodeId> {
        let r = self.route(v);
        let mut out = Vec::with_capacity(r.len() + 1);
        if let Some(&s) = r.first() {
            out.push(self.segments[s].tail);
        }
        out.extend(r.iter().map(|&s| self.segments[s].head));
        out
    }
}

/// One segment per original edge.
pub fn uncontracted(net: &RoadNetwork, routes: &RouteAssignment) -> ContractedRoutes {
    build(net, routes, false)
}

/// Merges consecutive edges whose vehicle sets coincide, to a fixpoint.
pub fn contract(net: &RoadNetwork, routes: &RouteAssignment) -> ContractedRoutes {
    build(net, routes, true)
}

fn build(net: &RoadNetwork, routes: &RouteAssignment, merge: bool) -> ContractedRoutes {
    let users = routes.edge_vehicles();
    // A maximal run starting at a given edge is the same for every vehicle
    // on it: any vehicle entering the run's tail by an edge with the same
    // vehicle set would force the others onto that edge too.
    let mut runs: BTreeMap<EdgeId, Vec<EdgeId>> = BTreeMap::new();
    let mut per_vehicle: BTreeMap<VehicleId, Vec<EdgeId>> = BTreeMap::new();
    for (&v, r) in routes.routes() {
        let mut starts = Vec::new();
        let mut k = 0;
        while k < r.len() {
            let mut run = vec![r[k]];
            while merge && k + 1 < r.len() && users[&r[k + 1]] == users[&r[k]] {
                k += 1;
                run.push(r[k]);
            }
            starts.push(run[0]);
            runs.entry(run[0]).or_insert(run);
            k += 1;
        }
        per_vehicle.insert(v, starts);
    }
    let mut index = BTreeMap::new();
    let mut segments = Vec::with_capacity(runs.len());
    for (start, edges) in runs {
        index.insert(start, segments.len());
        segments.push(Segment {
            tail: net.edge(edges[0]).from,
            head: net.edge(*edges.last().expect("nonempty run")).to,
            time: edges.iter().map(|&e| net.edge(e).time).sum(),
            cost: edges.iter().map(|&e| net.edge(e).fuel).sum(),
            vehicles: users[&start].clone(),
            edges,
        });
    }
    let routes = per_vehicle
        .into_iter()
        .map(|(v, starts)| (v, starts.iter().map(|s| index[s]).collect()))
        .collect();
    ContractedRoutes { routes, segments }
}
