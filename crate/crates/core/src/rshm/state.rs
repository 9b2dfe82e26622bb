use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{c_plat, RshmError};
use crate::netmodel::{EdgeId, ProblemInstance, RoadNetwork, SavingsParams, VehicleId};
use crate::routing::{EdgeCostTable, RouteAssignment};
use crate::scheduling::PlatoonConfiguration;

/// What one route-then-schedule iteration produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub routes: RouteAssignment,
    pub route_key: String,
    pub platoons: PlatoonConfiguration,
    /// Realized total fuel of the schedule.
    pub z: f64,
    /// Objective of the routing model that produced `routes`.
    pub rdp_objective: f64,
    pub rdp_time_s: f64,
    pub sp_time_s: f64,
    /// A subproblem stopped on its time or node limit.
    pub limit_hit: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Incumbent {
    pub iteration: usize,
    pub routes: RouteAssignment,
    pub platoons: PlatoonConfiguration,
    pub z: f64,
}

/// History of a heuristic run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RshmState {
    /// Iterations completed.
    pub n: usize,
    /// `records[k - 1]` holds iteration `k`.
    pub records: Vec<IterationRecord>,
    /// Cost table fed to the routing model of each iteration, every one kept.
    pub tables: BTreeMap<usize, EdgeCostTable>,
    /// Edges used by some route in some completed iteration.
    pub explored: BTreeSet<EdgeId>,
    /// Canonical route-assignment key to the number of iterations that produced it.
    pub routes_freq: BTreeMap<String, usize>,
    pub best: Option<Incumbent>,
}

impl RshmState {
    pub fn new(net: &RoadNetwork) -> Self {
        let mut tables = BTreeMap::new();
        tables.insert(1, EdgeCostTable::initial(net));
        RshmState {
            n: 0,
            records: Vec::new(),
            tables,
            explored: BTreeSet::new(),
            routes_freq: BTreeMap::new(),
            best: None,
        }
    }

    pub fn record(&self, k: usize) -> Option<&IterationRecord> {
        k.checked_sub(1).and_then(|i| self.records.get(i))
    }

    /// Appends the next iteration and updates counts, explored edges and
    /// the incumbent (replaced only on strict improvement).
    pub fn push(&mut self, rec: IterationRecord) {
        debug_assert_eq!(rec.iteration, self.n + 1);
        self.n += 1;
        *self.routes_freq.entry(rec.route_key.clone()).or_default() += 1;
        for (e, _) in rec.routes.edge_vehicles() {
            self.explored.insert(e);
        }
        if self.best.as_ref().is_none_or(|b| rec.z < b.z) {
            self.best = Some(Incumbent {
                iteration: rec.iteration,
                routes: rec.routes.clone(),
                platoons: rec.platoons.clone(),
                z: rec.z,
            });
        }
        self.records.push(rec);
    }

    /// Largest number of times any single route assignment was produced.
    pub fn max_freq(&self) -> usize {
        self.routes_freq.values().copied().max().unwrap_or(0)
    }

    pub fn z_hat(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.z)
    }

    /// Whether the last two iterations produced the same routes.
    pub fn repeated(&self) -> bool {
        self.n >= 2 && self.records[self.n - 1].routes == self.records[self.n - 2].routes
    }
}

/// Most recent earlier iteration `k <= n - 2` whose platoons on `e` match
/// iteration `n`'s and after which `v` was routed over `e`.
pub fn similarity_index(state: &RshmState, n: usize, v: VehicleId, e: EdgeId) -> Option<usize> {
    if n < 3 || n > state.n {
        return None;
    }
    let now = state.record(n)?.platoons.platoon_sets(e);
    (1..=n - 2).rev().find(|&k| {
        let (Some(rk), Some(next)) = (state.record(k), state.record(k + 1)) else {
            return false;
        };
        !rk.routes.vehicles_on(e).is_empty() && next.routes.uses(v, e) && rk.platoons.platoon_sets(e) == now
    })
}

/// Cost table for the routing model of iteration `n + 1`, learned from the
/// schedule of iteration `n`.
pub fn update_cost_table(state: &RshmState, inst: &ProblemInstance, n: usize) -> Result<EdgeCostTable, RshmError> {
    let rec = state
        .record(n)
        .ok_or_else(|| RshmError::Invalid(format!("iteration {n} not recorded")))?;
    let explored: BTreeSet<EdgeId> = state.records[..n]
        .iter()
        .flat_map(|r| r.routes.edge_vehicles().into_keys())
        .collect();
    let net = &inst.network;
    let p = &inst.params;
    let mut adjusted = BTreeMap::new();
    for m in &inst.missions {
        let v = m.id;
        for &e in &explored {
            let c = net.edge(e).fuel;
            let value = if rec.routes.uses(v, e) {
                let size = rec.platoons.size(v, e).max(1);
                c_plat(size, c, p) / size as f64
            } else {
                match similarity_index(state, n, v, e) {
                    None => (1.0 - p.sigma_f) * c,
                    Some(k) => state
                        .tables
                        .get(&(k + 2))
                        .and_then(|t| t.adjusted(v, e))
                        .ok_or(RshmError::MissingHistory {
                            iteration: k + 2,
                            vehicle: v,
                            edge: e,
                        })?,
                }
            };
            adjusted.insert((v, e), value);
        }
    }
    let base = net.edges().iter().map(|e| e.fuel).collect();
    Ok(EdgeCostTable::with_adjustments(n + 1, base, explored, adjusted))
}

/// Bracket of the a-posteriori gap bound for one platoon of `size` vehicles.
pub fn gap_term(size: usize, c: f64, p: &SavingsParams) -> f64 {
    let fill = 1.0 - size as f64 / p.lambda as f64;
    let lone = if size == 1 { p.sigma_l } else { 0.0 };
    (fill * (p.sigma_f - p.sigma_l) + lone) * c
}

/// Upper bound on `z(n) - z*` for a run whose last two route assignments
/// coincide and whose similarity sets at iteration `n - 1` are all empty.
pub fn gap_bound(state: &RshmState, inst: &ProblemInstance) -> Result<f64, RshmError> {
    let n = state.n;
    if !state.repeated() {
        return Err(RshmError::NotApplicable("last two route assignments differ".into()));
    }
    for m in &inst.missions {
        for &e in &state.explored {
            if let Some(k) = similarity_index(state, n - 1, m.id, e) {
                return Err(RshmError::NotApplicable(format!(
                    "vehicle {} on edge {e} resembles iteration {k}",
                    m.id
                )));
            }
        }
    }
    let rec = &state.records[n - 1];
    let mut total = 0.0;
    for (&e, platoons) in &rec.platoons.platoons {
        let c = inst.network.edge(e).fuel;
        for pl in platoons {
            total += gap_term(pl.size(), c, &inst.params);
        }
    }
    Ok(total)
}
