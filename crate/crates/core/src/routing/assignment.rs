use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::netmodel::{EdgeId, ProblemInstance, RoadNetwork, VehicleId};

use super::RoutingError;

/// One route per vehicle, each an ordered list of edges from origin to
/// destination.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteAssignment {
    routes: BTreeMap<VehicleId, Vec<EdgeId>>,
}

impl RouteAssignment {
    pub fn new(routes: BTreeMap<VehicleId, Vec<EdgeId>>) -> Self {
        RouteAssignment { routes }
    }

    pub fn from_vec(routes: Vec<Vec<EdgeId>>) -> Self {
        RouteAssignment {
            routes: routes.into_iter().enumerate().map(|(k, r)| (k + 1, r)).collect(),
        }
    }

    pub fn route(&self, v: VehicleId) -> &[EdgeId] {
        self.routes.get(&v).map_or(&[], |r| r.as_slice())
    }

    pub fn routes(&self) -> &BTreeMap<VehicleId, Vec<EdgeId>> {
        &self.routes
    }

    pub fn vehicles(&self) -> impl Iterator<Item = VehicleId> + '_ {
        self.routes.keys().copied()
    }

    pub fn uses(&self, v: VehicleId, e: EdgeId) -> bool {
        self.route(v).contains(&e)
    }

    /// Vehicles on each used edge, ascending.
    pub fn edge_vehicles(&self) -> BTreeMap<EdgeId, Vec<VehicleId>> {
        let mut out: BTreeMap<EdgeId, Vec<VehicleId>> = BTreeMap::new();
        for (&v, r) in &self.routes {
            for &e in r {
                out.entry(e).or_default().push(v);
            }
        }
        out
    }

    pub fn vehicles_on(&self, e: EdgeId) -> Vec<VehicleId> {
        self.routes
            .iter()
            .filter(|(_, r)| r.contains(&e))
            .map(|(&v, _)| v)
            .collect()
    }

    pub fn route_fuel(&self, net: &RoadNetwork, v: VehicleId) -> f64 {
        self.route(v).iter().map(|&e| net.edge(e).fuel).sum()
    }

    pub fn route_time(&self, net: &RoadNetwork, v: VehicleId) -> f64 {
        self.route(v).iter().map(|&e| net.edge(e).time).sum()
    }

    pub fn node_sequence(&self, net: &RoadNetwork, v: VehicleId) -> Vec<usize> {
        let r = self.route(v);
        let mut nodes = Vec::with_capacity(r.len() + 1);
        if let Some(&e) = r.first() {
            nodes.push(net.edge(e).from);
        }
        nodes.extend(r.iter().map(|&e| net.edge(e).to));
        nodes
    }

    /// Whitespace-free encoding: vehicles ascending, each route as its node
    /// sequence, e.g. `1:0-1-5;2:3-4`.
    pub fn canonical_key(&self, net: &RoadNetwork) -> String {
        let mut s = String::new();
        for (k, &v) in self.routes.keys().enumerate() {
            if k > 0 {
                s.push(';');
            }
            let _ = write!(s, "{v}:");
            let nodes = self.node_sequence(net, v);
            for (i, n) in nodes.iter().enumerate() {
                if i > 0 {
                    s.push('-');
                }
                let _ = write!(s, "{n}");
            }
        }
        s
    }

    /// Checks that every route is a simple origin-destination path that
    /// fits the vehicle's time window.
    pub fn validate(&self, inst: &ProblemInstance) -> Result<(), RoutingError> {
        let net = &inst.network;
        for m in &inst.missions {
            let r = self.route(m.id);
            let bad = |why: &str| RoutingError::NonPathSolution(m.id, why.to_string());
            if r.is_empty() {
                return Err(bad("empty route"));
            }
            let nodes = self.node_sequence(net, m.id);
            if nodes[0] != m.origin || *nodes.last().expect("nonempty") != m.dest {
                return Err(bad("route does not join origin to destination"));
            }
            for w in r.windows(2) {
                if net.edge(w[0]).to != net.edge(w[1]).from {
                    return Err(bad("consecutive edges do not connect"));
                }
            }
            let mut sorted = nodes.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != nodes.len() {
                return Err(bad("route repeats a node"));
            }
            if self.route_time(net, m.id) > m.t_latest - m.t_earliest + 1e-9 {
                return Err(bad("route misses the time window"));
            }
        }
        Ok(())
    }
}
