use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::cmp::Ordering;
use std::time::Duration;

use crate::mip::{solve_mip, Constraint, LinearModel, MipOptions, MipSolution, MipStatus, ObjSense, Sense};
use crate::netmodel::{candidate_edge_set, shortest_path, EdgeId, ProblemInstance, VehicleId, Weight};

use super::{EdgeCostTable, RouteAssignment, RoutingError};

/// Column indices of one edge's variables.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeVars {
    /// `x_v` for each vehicle that may use the edge.
    pub x: Vec<usize>,
    pub y: usize,
    pub y_multi: usize,
    pub w: usize,
}

/// Rows linking one edge's usage variables: the base system, plus
/// `sum x >= y + y'` when at least three vehicles may use the edge.
pub fn hull_inequalities(vars: &EdgeVars, tag: &str) -> Vec<Constraint> {
    let sum_x: Vec<(usize, f64)> = vars.x.iter().map(|&j| (j, 1.0)).collect();
    let mut rows = Vec::with_capacity(vars.x.len() + 4);
    let mut two = sum_x.clone();
    two.push((vars.y_multi, -2.0));
    rows.push(row(format!("multi_{tag}"), two, Sense::Ge, 0.0));
    let mut extra = vec![(vars.w, 1.0), (vars.y, 1.0)];
    extra.extend(vars.x.iter().map(|&j| (j, -1.0)));
    rows.push(row(format!("extra_{tag}"), extra, Sense::Le, 0.0));
    for (k, &j) in vars.x.iter().enumerate() {
        rows.push(row(format!("used_{tag}_{k}"), vec![(j, 1.0), (vars.y, -1.0)], Sense::Le, 0.0));
    }
    rows.push(row(format!("nest_{tag}"), vec![(vars.y_multi, 1.0), (vars.y, -1.0)], Sense::Le, 0.0));
    if vars.x.len() >= 3 {
        let mut hull = sum_x;
        hull.push((vars.y, -1.0));
        hull.push((vars.y_multi, -1.0));
        rows.push(row(format!("hull_{tag}"), hull, Sense::Ge, 0.0));
    }
    rows
}

fn row(name: String, mut coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> Constraint {
    coeffs.sort_by_key(|e| e.0);
    Constraint {
        name,
        coeffs,
        sense,
        rhs,
    }
}

#[derive(Clone, Debug)]
pub struct RdpOptions {
    /// Also add `sum x >= y + y'` on edges that at most two vehicles may
    /// use. The row is valid there too, it just is not facet-defining.
    pub small_edge_hull: bool,
}

impl Default for RdpOptions {
    fn default() -> Self {
        RdpOptions { small_edge_hull: true }
    }
}

#[derive(Clone, Debug)]
pub struct RdpModelHandle {
    pub model: LinearModel,
    pub iteration: usize,
    pub x: BTreeMap<(VehicleId, EdgeId), usize>,
    pub y: BTreeMap<EdgeId, usize>,
    pub y_multi: BTreeMap<EdgeId, usize>,
    pub w: BTreeMap<EdgeId, usize>,
    /// Candidate edges per vehicle, ascending.
    pub candidates: BTreeMap<VehicleId, Vec<EdgeId>>,
    pub costs: EdgeCostTable,
    /// Instance the model was built for.
    pub instance: ProblemInstance,
}

pub fn build_rdp(inst: &ProblemInstance, costs: &EdgeCostTable, iteration: usize) -> Result<RdpModelHandle, RoutingError> {
    build_rdp_with(inst, costs, iteration, &RdpOptions::default())
}

pub fn build_rdp_with(
    inst: &ProblemInstance,
    costs: &EdgeCostTable,
    iteration: usize,
    opts: &RdpOptions,
) -> Result<RdpModelHandle, RoutingError> {
    if iteration == 0 {
        return Err(RoutingError::Invalid("iterations are numbered from 1".into()));
    }
    let net = &inst.network;
    let p = inst.params;
    let mut model = LinearModel::new(format!("rdp_{iteration}"), ObjSense::Minimize);
    let mut candidates = BTreeMap::new();
    let mut x = BTreeMap::new();
    let mut per_edge: BTreeMap<EdgeId, Vec<(VehicleId, usize)>> = BTreeMap::new();

    for m in &inst.missions {
        let cand = candidate_edge_set(net, m.origin, m.dest, p.sigma_f)?;
        if fastest_within(inst, m.id, &cand) > m.t_latest - m.t_earliest + 1e-9 {
            return Err(RoutingError::InfeasibleMission(m.id));
        }
        for &e in &cand {
            let ed = net.edge(e);
            let j = model.add_binary(format!("x_{}_{}_{}", m.id, ed.from, ed.to));
            x.insert((m.id, e), j);
            per_edge.entry(e).or_default().push((m.id, j));
        }
        candidates.insert(m.id, cand);
    }

    let mut y = BTreeMap::new();
    let mut y_multi = BTreeMap::new();
    let mut w = BTreeMap::new();
    for &e in per_edge.keys() {
        let ed = net.edge(e);
        y.insert(e, model.add_binary(format!("y_{}_{}", ed.from, ed.to)));
        y_multi.insert(e, model.add_binary(format!("yp_{}_{}", ed.from, ed.to)));
        w.insert(e, model.add_continuous(format!("w_{}_{}", ed.from, ed.to), 0.0, f64::INFINITY));
    }

    // Objective.
    for (&(v, e), &j) in &x {
        let c = if iteration >= 2 && costs.is_explored(e) {
            costs.cost(v, e)
        } else {
            costs.base(e)
        };
        model.set_obj_coeff(j, c);
    }
    for &e in per_edge.keys() {
        if iteration >= 2 && costs.is_explored(e) {
            continue;
        }
        let c = costs.base(e);
        model.set_obj_coeff(y_multi[&e], -p.sigma_l * c);
        model.set_obj_coeff(w[&e], -p.sigma_f * c);
    }

    // Flow conservation and travel time per vehicle.
    for m in &inst.missions {
        let cand = &candidates[&m.id];
        let mut balance: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
        for &e in cand {
            let ed = net.edge(e);
            let j = x[&(m.id, e)];
            balance.entry(ed.from).or_default().push((j, 1.0));
            balance.entry(ed.to).or_default().push((j, -1.0));
        }
        for (node, terms) in balance {
            let rhs = if node == m.origin {
                1.0
            } else if node == m.dest {
                -1.0
            } else {
                0.0
            };
            model.add_constraint(format!("flow_{}_{}", m.id, node), terms, Sense::Eq, rhs);
        }
        let time: Vec<(usize, f64)> = cand.iter().map(|&e| (x[&(m.id, e)], net.edge(e).time)).collect();
        model.add_constraint(format!("time_{}", m.id), time, Sense::Le, m.t_latest - m.t_earliest);
    }

    // Per-edge linking rows.
    for (&e, users) in &per_edge {
        let ed = net.edge(e);
        let vars = EdgeVars {
            x: users.iter().map(|u| u.1).collect(),
            y: y[&e],
            y_multi: y_multi[&e],
            w: w[&e],
        };
        let tag = format!("{}_{}", ed.from, ed.to);
        for r in hull_inequalities(&vars, &tag) {
            model.add_constraint(r.name, r.coeffs, r.sense, r.rhs);
        }
        if opts.small_edge_hull && vars.x.len() < 3 {
            let mut hull: Vec<(usize, f64)> = vars.x.iter().map(|&j| (j, 1.0)).collect();
            hull.push((vars.y, -1.0));
            hull.push((vars.y_multi, -1.0));
            model.add_constraint(format!("hull_{tag}"), hull, Sense::Ge, 0.0);
        }
    }

    Ok(RdpModelHandle {
        model,
        iteration,
        x,
        y,
        y_multi,
        w,
        candidates,
        costs: costs.clone(),
        instance: inst.clone(),
    })
}

#[derive(Clone, Copy)]
struct Item(f64, usize);
impl PartialEq for Item {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

/// Shortest travel time from origin to destination using only `edges`.
fn fastest_within(inst: &ProblemInstance, v: VehicleId, edges: &[EdgeId]) -> f64 {
    let net = &inst.network;
    let m = inst.mission(v);
    let mut out: BTreeMap<usize, Vec<EdgeId>> = BTreeMap::new();
    for &e in edges {
        out.entry(net.edge(e).from).or_default().push(e);
    }
    let mut dist: BTreeMap<usize, f64> = BTreeMap::new();
    dist.insert(m.origin, 0.0);
    let mut heap = BinaryHeap::new();
    heap.push(Item(0.0, m.origin));
    while let Some(Item(d, n)) = heap.pop() {
        if d > dist[&n] {
            continue;
        }
        if n == m.dest {
            return d;
        }
        for &e in out.get(&n).map_or(&[][..], |v| v.as_slice()) {
            let ed = net.edge(e);
            let nd = d + ed.time;
            if dist.get(&ed.to).is_none_or(|&cur| nd < cur) {
                dist.insert(ed.to, nd);
                heap.push(Item(nd, ed.to));
            }
        }
    }
    f64::INFINITY
}

/// Orders the edges with `x_v = 1` into a path for every vehicle.
pub fn extract_route_assignment(h: &RdpModelHandle, sol: &MipSolution) -> Result<RouteAssignment, RoutingError> {
    let values = sol
        .values
        .as_ref()
        .ok_or_else(|| RoutingError::NoSolution(format!("{:?}", sol.status)))?;
    extract_routes(&h.instance, h, values)
}

pub fn routes_from_values(h: &RdpModelHandle, values: &[f64]) -> Result<RouteAssignment, RoutingError> {
    let mut routes = BTreeMap::new();
    for (&v, cand) in &h.candidates {
        let chosen: Vec<EdgeId> = cand.iter().copied().filter(|&e| values[h.x[&(v, e)]] > 0.5).collect();
        routes.insert(v, chosen);
    }
    Ok(RouteAssignment::new(routes))
}

/// Chains an unordered edge set into an `o -> d` path, rejecting branches,
/// cycles and leftovers.
pub fn order_path(
    net: &crate::netmodel::RoadNetwork,
    v: VehicleId,
    o: usize,
    d: usize,
    edges: &[EdgeId],
) -> Result<Vec<EdgeId>, RoutingError> {
    let mut succ: BTreeMap<usize, EdgeId> = BTreeMap::new();
    for &e in edges {
        if succ.insert(net.edge(e).from, e).is_some() {
            return Err(RoutingError::NonPathSolution(v, format!("node {} has two outgoing edges", net.edge(e).from)));
        }
    }
    let mut path = Vec::with_capacity(edges.len());
    let mut seen = BTreeSet::new();
    let mut at = o;
    seen.insert(at);
    while at != d {
        let Some(&e) = succ.get(&at) else {
            return Err(RoutingError::NonPathSolution(v, format!("route stops at node {at}")));
        };
        path.push(e);
        at = net.edge(e).to;
        if !seen.insert(at) {
            return Err(RoutingError::NonPathSolution(v, format!("route revisits node {at}")));
        }
    }
    if path.len() != edges.len() {
        return Err(RoutingError::NonPathSolution(v, "edges left over after reaching the destination".into()));
    }
    Ok(path)
}

/// Extracts and orders routes, validating each against its mission.
pub fn extract_routes(inst: &ProblemInstance, h: &RdpModelHandle, values: &[f64]) -> Result<RouteAssignment, RoutingError> {
    let raw = routes_from_values(h, values)?;
    let mut routes = BTreeMap::new();
    for m in &inst.missions {
        routes.insert(m.id, order_path(&inst.network, m.id, m.origin, m.dest, raw.route(m.id))?);
    }
    let ra = RouteAssignment::new(routes);
    ra.validate(inst)?;
    Ok(ra)
}

/// The integral point of `h` that realizes `routes` with every shared edge
/// fully platooned.
pub fn point_for_routes(h: &RdpModelHandle, routes: &RouteAssignment) -> Result<Vec<f64>, RoutingError> {
    let mut xv = vec![0.0; h.model.num_vars()];
    let mut counts: BTreeMap<EdgeId, usize> = BTreeMap::new();
    for (&v, r) in routes.routes() {
        for &e in r {
            let Some(&j) = h.x.get(&(v, e)) else {
                return Err(RoutingError::Invalid(format!("edge {e} is not a candidate for vehicle {v}")));
            };
            xv[j] = 1.0;
            *counts.entry(e).or_default() += 1;
        }
    }
    for (e, m) in counts {
        xv[h.y[&e]] = 1.0;
        if m >= 2 {
            xv[h.y_multi[&e]] = 1.0;
        }
        xv[h.w[&e]] = (m as f64 - 1.0).max(0.0);
    }
    Ok(xv)
}

/// Routing objective of `h` evaluated at `routes`.
pub fn evaluate_rdp_objective(h: &RdpModelHandle, routes: &RouteAssignment) -> Result<f64, RoutingError> {
    let xv = point_for_routes(h, routes)?;
    Ok(h.model.objective_value(&xv))
}

/// Every vehicle on its shortest fuel path, when that path is a candidate
/// route and fits the window.
pub fn shortest_path_assignment(inst: &ProblemInstance) -> Result<RouteAssignment, RoutingError> {
    let mut routes = BTreeMap::new();
    for m in &inst.missions {
        let p = shortest_path(&inst.network, m.origin, m.dest, Weight::Fuel)?;
        routes.insert(m.id, p.edges);
    }
    let ra = RouteAssignment::new(routes);
    ra.validate(inst)?;
    Ok(ra)
}

#[derive(Clone, Debug)]
pub struct RdpOutcome {
    pub routes: RouteAssignment,
    pub objective: f64,
    pub solution: MipSolution,
    pub handle: RdpModelHandle,
}

pub fn solve_rdp(
    inst: &ProblemInstance,
    costs: &EdgeCostTable,
    iteration: usize,
    time_limit: Option<Duration>,
) -> Result<RdpOutcome, RoutingError> {
    let handle = build_rdp(inst, costs, iteration)?;
    let warm = shortest_path_assignment(inst)
        .ok()
        .and_then(|ra| point_for_routes(&handle, &ra).ok());
    let opts = MipOptions {
        time_limit,
        initial_incumbent: warm,
        ..Default::default()
    };
    let solution = solve_mip(&handle.model, &opts)?;
    if !matches!(solution.status, MipStatus::Optimal | MipStatus::Feasible) {
        return Err(RoutingError::NoSolution(format!("{:?}", solution.status)));
    }
    let values = solution.values.clone().expect("incumbent present");
    let routes = extract_routes(inst, &handle, &values)?;
    Ok(RdpOutcome {
        routes,
        objective: solution.objective,
        solution,
        handle,
    })
}
