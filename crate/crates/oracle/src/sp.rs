use std::collections::{BTreeMap, BTreeSet};

use platoon::mip::{solve_lp, LinearModel, LpStatus, ObjSense, Sense};
use platoon::netmodel::{EdgeId, RoadNetwork, SavingsParams, VehicleId, VehicleMission};
use platoon::routing::RouteAssignment;

use crate::star::partitions_of;
use crate::OracleError;

pub const MAX_SP_VEHICLES: usize = 4;
pub const MAX_SP_GROUPS: usize = 8;

/// Best platoon schedule for fixed routes.
#[derive(Clone, Debug, PartialEq)]
pub struct SpOptimum {
    pub savings: f64,
    /// Member sets of every platoon on every used edge, lone vehicles included.
    pub platoons: BTreeMap<EdgeId, BTreeSet<BTreeSet<VehicleId>>>,
    pub departures: BTreeMap<VehicleId, f64>,
}

/// A run of shared edges crossed back to back by the same vehicles. The
/// vehicles enter every edge of the run with the same relative offsets, so
/// one partition choice serves the whole run.
struct Group {
    first: EdgeId,
    edges: Vec<EdgeId>,
    vehicles: Vec<VehicleId>,
    weight: f64,
}

/// Saving rate of a partition per unit of edge cost.
fn score(blocks: &[Vec<VehicleId>], p: &SavingsParams) -> f64 {
    blocks
        .iter()
        .filter(|b| b.len() > 1)
        .map(|b| p.sigma_l + p.sigma_f * (b.len() - 1) as f64)
        .sum()
}

fn groups(routes: &RouteAssignment, net: &RoadNetwork) -> Vec<Group> {
    let mut users: BTreeMap<EdgeId, Vec<VehicleId>> = BTreeMap::new();
    for (&v, r) in routes.routes() {
        for &e in r {
            users.entry(e).or_default().push(v);
        }
    }
    // Edge that every user of `e` takes next, when they all agree.
    let next = |e: EdgeId| -> Option<EdgeId> {
        let mut common = None;
        for &v in &users[&e] {
            let r = routes.route(v);
            let k = r.iter().position(|&x| x == e)?;
            let n = *r.get(k + 1)?;
            if common.is_some_and(|c| c != n) {
                return None;
            }
            common = Some(n);
        }
        common
    };
    let shared: Vec<EdgeId> = users.iter().filter(|(_, u)| u.len() > 1).map(|(&e, _)| e).collect();
    let mut has_pred = BTreeSet::new();
    for &e in &shared {
        if let Some(n) = next(e) {
            if users[&n] == users[&e] {
                has_pred.insert(n);
            }
        }
    }
    let mut out = Vec::new();
    for &e in &shared {
        if has_pred.contains(&e) {
            continue;
        }
        let mut edges = vec![e];
        let mut cur = e;
        while let Some(n) = next(cur).filter(|n| users[n] == users[&e]) {
            edges.push(n);
            cur = n;
        }
        let mut vehicles = users[&e].clone();
        vehicles.sort_unstable();
        out.push(Group {
            first: e,
            weight: edges.iter().map(|&x| net.edge(x).fuel).sum(),
            edges,
            vehicles,
        });
    }
    out
}

struct Search<'a> {
    groups: &'a [Group],
    options: Vec<Vec<(f64, Vec<Vec<VehicleId>>)>>,
    offset: &'a BTreeMap<(VehicleId, EdgeId), f64>,
    window: &'a BTreeMap<VehicleId, (f64, f64)>,
    best: f64,
    best_choice: Vec<usize>,
    best_departures: BTreeMap<VehicleId, f64>,
    choice: Vec<usize>,
}

impl Search<'_> {
    /// Departure times meeting every window with all chosen platoons
    /// entering their edges together, or `None` when none exist.
    fn feasible(&self) -> Result<Option<BTreeMap<VehicleId, f64>>, OracleError> {
        let mut m = LinearModel::new("oracle_sp", ObjSense::Minimize);
        let mut col = BTreeMap::new();
        for (&v, &(lo, hi)) in self.window {
            col.insert(v, m.add_continuous(format!("t{v}"), lo, hi));
        }
        for (g, &k) in self.choice.iter().enumerate() {
            let e = self.groups[g].first;
            for block in &self.options[g][k].1 {
                let lead = block[0];
                for &u in &block[1..] {
                    // t_u + offset_u(e) = t_lead + offset_lead(e)
                    let rhs = self.offset[&(lead, e)] - self.offset[&(u, e)];
                    m.add_constraint(format!("eq_{u}_{lead}_{e}"), vec![(col[&u], 1.0), (col[&lead], -1.0)], Sense::Eq, rhs);
                }
            }
        }
        let lp = solve_lp(&m)?;
        Ok((lp.status == LpStatus::Optimal).then(|| col.iter().map(|(&v, &c)| (v, lp.values[c])).collect()))
    }

    fn dfs(&mut self, g: usize, value: f64) -> Result<(), OracleError> {
        let optimistic: f64 = (g..self.groups.len())
            .map(|h| self.groups[h].weight * self.options[h][0].0)
            .sum();
        if value + optimistic <= self.best + 1e-12 {
            return Ok(());
        }
        let Some(dep) = self.feasible()? else {
            return Ok(());
        };
        if g == self.groups.len() {
            self.best = value;
            self.best_choice = self.choice.clone();
            self.best_departures = dep;
            return Ok(());
        }
        for k in 0..self.options[g].len() {
            let gain = self.groups[g].weight * self.options[g][k].0;
            self.choice.push(k);
            self.dfs(g + 1, value + gain)?;
            self.choice.pop();
        }
        Ok(())
    }
}

/// Maximum platoon savings for fixed routes, by enumerating a star
/// partition per run of shared edges and testing each combination's
/// equal-entry-time system for a solution inside the windows.
pub fn brute_force_sp(
    net: &RoadNetwork,
    missions: &[VehicleMission],
    routes: &RouteAssignment,
    params: &SavingsParams,
) -> Result<SpOptimum, OracleError> {
    if missions.len() > MAX_SP_VEHICLES {
        return Err(OracleError::TooLarge(format!("{} vehicles", missions.len())));
    }
    let mut offset = BTreeMap::new();
    let mut window = BTreeMap::new();
    for m in missions {
        let mut t = 0.0;
        for &e in routes.route(m.id) {
            offset.insert((m.id, e), t);
            t += net.edge(e).time;
        }
        let latest = m.t_latest - t;
        if latest < m.t_earliest - 1e-9 {
            return Err(OracleError::InfeasibleRoute(m.id));
        }
        window.insert(m.id, (m.t_earliest, latest.max(m.t_earliest)));
    }
    let groups = groups(routes, net);
    if groups.len() > MAX_SP_GROUPS {
        return Err(OracleError::TooLarge(format!("{} shared edge runs", groups.len())));
    }
    let options: Vec<Vec<(f64, Vec<Vec<VehicleId>>)>> = groups
        .iter()
        .map(|g| {
            let mut opts: Vec<(f64, Vec<Vec<VehicleId>>)> = partitions_of(&g.vehicles, Some(params.lambda))
                .into_iter()
                .map(|b| (score(&b, params), b))
                .collect();
            // Most profitable first, so good schedules are found early.
            opts.sort_by(|a, b| b.0.total_cmp(&a.0));
            opts
        })
        .collect();
    let mut search = Search {
        groups: &groups,
        options,
        offset: &offset,
        window: &window,
        best: -1.0,
        best_choice: vec![],
        best_departures: BTreeMap::new(),
        choice: vec![],
    };
    search.dfs(0, 0.0)?;

    let mut platoons: BTreeMap<EdgeId, BTreeSet<BTreeSet<VehicleId>>> = BTreeMap::new();
    for (&v, r) in routes.routes() {
        for &e in r {
            platoons.entry(e).or_default().insert(BTreeSet::from([v]));
        }
    }
    for (i, (g, &k)) in groups.iter().zip(&search.best_choice).enumerate() {
        let sets: BTreeSet<BTreeSet<VehicleId>> = search.options[i][k].1.iter().map(|b| b.iter().copied().collect()).collect();
        for &e in &g.edges {
            platoons.insert(e, sets.clone());
        }
    }
    Ok(SpOptimum {
        savings: search.best,
        platoons,
        departures: search.best_departures,
    })
}
