use std::collections::{BTreeMap, BTreeSet};

use platoon::netmodel::{candidate_edge_set, EdgeId, NodeId, ProblemInstance, RoadNetwork, SavingsParams, VehicleId};
use platoon::routing::RouteAssignment;

use crate::sp::brute_force_sp;
use crate::OracleError;

pub const DEFAULT_PATH_CAP: usize = 50;
const MAX_CVPP_VEHICLES: usize = 3;

/// Exhaustive optimum of the joint routing and scheduling problem, plus the
/// optimum when every group sharing an edge is presumed to platoon.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimumReport {
    pub z_star: f64,
    pub routes: RouteAssignment,
    /// Platoon member sets per used edge, lone vehicles included.
    pub platoons: BTreeMap<EdgeId, BTreeSet<BTreeSet<VehicleId>>>,
    /// Lowest-numbered member of each platoon, per edge.
    pub leaders: BTreeMap<EdgeId, Vec<VehicleId>>,
    pub departures: BTreeMap<VehicleId, f64>,
    /// Optimum when all users of an edge share one platoon, size cap ignored.
    pub presumed_z: f64,
    pub presumed_routes: RouteAssignment,
    pub combinations: usize,
}

/// Simple `o -> d` paths over `allowed` edges taking at most `max_time`,
/// in depth-first order. Fails once more than `cap` are found.
pub fn simple_paths(
    net: &RoadNetwork,
    o: NodeId,
    d: NodeId,
    allowed: &BTreeSet<EdgeId>,
    max_time: f64,
    cap: usize,
) -> Result<Vec<Vec<EdgeId>>, OracleError> {
    fn walk(
        net: &RoadNetwork,
        at: NodeId,
        d: NodeId,
        allowed: &BTreeSet<EdgeId>,
        budget: f64,
        seen: &mut Vec<NodeId>,
        path: &mut Vec<EdgeId>,
        out: &mut Vec<Vec<EdgeId>>,
        cap: usize,
    ) -> Result<(), OracleError> {
        if at == d {
            if out.len() == cap {
                return Err(OracleError::TooLarge(format!("more than {cap} paths")));
            }
            out.push(path.clone());
            return Ok(());
        }
        for &e in net.out_edges(at) {
            let edge = net.edge(e);
            if !allowed.contains(&e) || seen.contains(&edge.to) || edge.time > budget + 1e-9 {
                continue;
            }
            seen.push(edge.to);
            path.push(e);
            walk(net, edge.to, d, allowed, budget - edge.time, seen, path, out, cap)?;
            path.pop();
            seen.pop();
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(net, o, d, allowed, max_time, &mut vec![o], &mut vec![], &mut out, cap)?;
    Ok(out)
}

/// Fuel on one edge when `m` vehicles use it and all of them platoon.
fn presumed_edge_cost(m: usize, c: f64, p: &SavingsParams) -> f64 {
    if m <= 1 {
        m as f64 * c
    } else {
        c - p.sigma_l * c + (m - 1) as f64 * (1.0 - p.sigma_f) * c
    }
}

fn presumed_cost(net: &RoadNetwork, p: &SavingsParams, routes: &[&Vec<EdgeId>]) -> f64 {
    let mut count: BTreeMap<EdgeId, usize> = BTreeMap::new();
    for r in routes {
        for &e in r.iter() {
            *count.entry(e).or_default() += 1;
        }
    }
    count.iter().map(|(&e, &m)| presumed_edge_cost(m, net.edge(e).fuel, p)).sum()
}

fn route_options(inst: &ProblemInstance, path_cap: usize) -> Result<Vec<Vec<Vec<EdgeId>>>, OracleError> {
    if inst.missions.len() > MAX_CVPP_VEHICLES {
        return Err(OracleError::TooLarge(format!("{} vehicles", inst.missions.len())));
    }
    let mut options = Vec::new();
    for m in &inst.missions {
        let allowed: BTreeSet<EdgeId> =
            candidate_edge_set(&inst.network, m.origin, m.dest, inst.params.sigma_f)?.into_iter().collect();
        let paths = simple_paths(&inst.network, m.origin, m.dest, &allowed, m.t_latest - m.t_earliest, path_cap)?;
        if paths.is_empty() {
            return Err(OracleError::InfeasibleRoute(m.id));
        }
        options.push(paths);
    }
    Ok(options)
}

/// Every combination of one path per vehicle, as index vectors.
fn combinations(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &n in sizes {
        out = out
            .into_iter()
            .flat_map(|c| {
                (0..n).map(move |k| {
                    let mut c = c.clone();
                    c.push(k);
                    c
                })
            })
            .collect();
    }
    out
}

fn assignment(inst: &ProblemInstance, options: &[Vec<Vec<EdgeId>>], combo: &[usize]) -> RouteAssignment {
    RouteAssignment::new(
        inst.missions
            .iter()
            .zip(combo)
            .enumerate()
            .map(|(i, (m, &k))| (m.id, options[i][k].clone()))
            .collect(),
    )
}

/// Optimum of the routing problem alone, with every edge-sharing group
/// presumed to platoon, by enumerating time-feasible candidate paths.
pub fn brute_force_routing(inst: &ProblemInstance, path_cap: usize) -> Result<(f64, RouteAssignment), OracleError> {
    let options = route_options(inst, path_cap)?;
    let sizes: Vec<usize> = options.iter().map(Vec::len).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for combo in combinations(&sizes) {
        let rs: Vec<&Vec<EdgeId>> = combo.iter().enumerate().map(|(i, &k)| &options[i][k]).collect();
        let z = presumed_cost(&inst.network, &inst.params, &rs);
        if best.as_ref().is_none_or(|b| z < b.0) {
            best = Some((z, combo));
        }
    }
    let (z, combo) = best.expect("at least one combination");
    Ok((z, assignment(inst, &options, &combo)))
}

/// Exhaustive optimum over all combinations of time-feasible candidate
/// paths, each scheduled by [`brute_force_sp`].
pub fn brute_force_cvpp(inst: &ProblemInstance, path_cap: usize) -> Result<OptimumReport, OracleError> {
    let options = route_options(inst, path_cap)?;
    let sizes: Vec<usize> = options.iter().map(Vec::len).collect();
    let net = &inst.network;
    let p = &inst.params;
    let mut scored: Vec<(f64, f64, Vec<usize>)> = combinations(&sizes)
        .into_iter()
        .map(|combo| {
            let rs: Vec<&Vec<EdgeId>> = combo.iter().enumerate().map(|(i, &k)| &options[i][k]).collect();
            let base: f64 = rs.iter().flat_map(|r| r.iter()).map(|&e| net.edge(e).fuel).sum();
            (presumed_cost(net, p, &rs), base, combo)
        })
        .collect();
    // Presumed cost never exceeds the scheduled cost, so it orders the
    // search and bounds it.
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let combinations = scored.len();
    let (presumed_z, _, presumed_combo) = scored[0].clone();

    let mut best: Option<(f64, RouteAssignment, crate::sp::SpOptimum)> = None;
    for (presumed, base, combo) in scored {
        if best.as_ref().is_some_and(|b| presumed >= b.0 - 1e-12) {
            break;
        }
        let ra = assignment(inst, &options, &combo);
        let sp = brute_force_sp(net, &inst.missions, &ra, p)?;
        let z = base - sp.savings;
        if best.as_ref().is_none_or(|b| z < b.0 - 1e-12) {
            best = Some((z, ra, sp));
        }
    }
    let (z_star, routes, sp) = best.expect("at least one combination");
    let leaders = sp
        .platoons
        .iter()
        .map(|(&e, ps)| (e, ps.iter().map(|s| *s.first().expect("nonempty platoon")).collect()))
        .collect();
    Ok(OptimumReport {
        z_star,
        routes,
        platoons: sp.platoons,
        leaders,
        departures: sp.departures,
        presumed_z,
        presumed_routes: assignment(inst, &options, &presumed_combo),
        combinations,
    })
}
