use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::netmodel::{EdgeId, RoadNetwork, SavingsParams, VehicleId};
use crate::routing::RouteAssignment;
use crate::rshm::c_plat;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Platoon {
    pub leader: VehicleId,
    /// Ascending; empty for a vehicle travelling alone.
    pub followers: Vec<VehicleId>,
}

impl Platoon {
    pub fn size(&self) -> usize {
        1 + self.followers.len()
    }

    pub fn members(&self) -> impl Iterator<Item = VehicleId> + '_ {
        std::iter::once(self.leader).chain(self.followers.iter().copied())
    }
}

/// Platoons on every used edge, lone vehicles included as platoons of one,
/// plus the departure times that realize them.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlatoonConfiguration {
    /// Per edge, sorted by leader.
    pub platoons: BTreeMap<EdgeId, Vec<Platoon>>,
    pub departures: BTreeMap<VehicleId, f64>,
}

impl PlatoonConfiguration {
    /// Every vehicle alone on every edge of its route.
    pub fn solo(routes: &RouteAssignment, departures: BTreeMap<VehicleId, f64>) -> Self {
        let mut platoons: BTreeMap<EdgeId, Vec<Platoon>> = BTreeMap::new();
        for (e, vs) in routes.edge_vehicles() {
            platoons.insert(
                e,
                vs.into_iter()
                    .map(|v| Platoon {
                        leader: v,
                        followers: vec![],
                    })
                    .collect(),
            );
        }
        PlatoonConfiguration { platoons, departures }
    }

    pub fn on_edge(&self, e: EdgeId) -> &[Platoon] {
        self.platoons.get(&e).map_or(&[], |p| p.as_slice())
    }

    /// The platoon holding `v` on `e`.
    pub fn platoon_of(&self, v: VehicleId, e: EdgeId) -> Option<&Platoon> {
        self.on_edge(e).iter().find(|p| p.members().any(|m| m == v))
    }

    /// Size of `v`'s platoon on `e`; 0 when `v` does not use `e`.
    pub fn size(&self, v: VehicleId, e: EdgeId) -> usize {
        self.platoon_of(v, e).map_or(0, Platoon::size)
    }

    /// Platoons on `e` as a set of member sets, for order-free comparison.
    pub fn platoon_sets(&self, e: EdgeId) -> BTreeSet<BTreeSet<VehicleId>> {
        self.on_edge(e).iter().map(|p| p.members().collect()).collect()
    }

    /// Vehicles heading a platoon on `e`, lone vehicles included.
    pub fn leaders(&self, e: EdgeId) -> Vec<VehicleId> {
        self.on_edge(e).iter().map(|p| p.leader).collect()
    }

    /// Fuel saved against everybody driving alone.
    pub fn savings(&self, net: &RoadNetwork, p: &SavingsParams) -> f64 {
        let mut s = 0.0;
        for (&e, ps) in &self.platoons {
            let c = net.edge(e).fuel;
            for pl in ps {
                if !pl.followers.is_empty() {
                    s += p.sigma_l * c + p.sigma_f * c * pl.followers.len() as f64;
                }
            }
        }
        s
    }
}

/// Total fuel as the sum of platoon costs over all edges.
pub fn total_fuel(net: &RoadNetwork, p: &SavingsParams, config: &PlatoonConfiguration) -> f64 {
    let mut z = 0.0;
    for (&e, ps) in &config.platoons {
        let c = net.edge(e).fuel;
        for pl in ps {
            z += c_plat(pl.size(), c, p);
        }
    }
    z
}

/// Total fuel as route costs less platoon savings.
pub fn total_fuel_by_savings(
    net: &RoadNetwork,
    p: &SavingsParams,
    routes: &RouteAssignment,
    config: &PlatoonConfiguration,
) -> f64 {
    let base: f64 = routes.vehicles().map(|v| routes.route_fuel(net, v)).sum();
    base - config.savings(net, p)
}
