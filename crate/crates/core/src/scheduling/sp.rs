use std::collections::BTreeMap;
use std::time::Duration;

use crate::cuts::{platoon_size_facets, star_partition_constraints, SpRootCuts, DEFAULT_FACET_CAP};
use crate::mip::{solve_mip, solve_mip_with_hook, LinearModel, MipOptions, MipSolution, MipStatus, ObjSense, Sense};
use crate::netmodel::{NodeId, ProblemInstance, SavingsParams, VehicleId};
use crate::routing::RouteAssignment;

use super::{
    contract, platoonable_and_big_m, time_bounds, uncontracted, ContractedRoutes, PairTable, Platoon,
    PlatoonConfiguration, SchedulingError, SegmentId, TimeBounds,
};

/// Equal-entry tolerance for co-platooned vehicles, hours.
pub const ENTRY_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SpOptions {
    /// Append the star-partition rows on every shared segment.
    pub star_partition: bool,
    /// Append platoon-size facet rows, at most `facet_cap` per segment.
    pub size_facets: bool,
    pub facet_cap: usize,
    /// Keep one time column per route node instead of only departures.
    pub keep_intermediate_times: bool,
}

impl Default for SpOptions {
    fn default() -> Self {
        SpOptions {
            star_partition: true,
            size_facets: false,
            facet_cap: DEFAULT_FACET_CAP,
            keep_intermediate_times: false,
        }
    }
}

/// The scheduling model and the column maps needed to read it.
#[derive(Clone, Debug)]
pub struct SpModelHandle {
    pub model: LinearModel,
    pub routes: ContractedRoutes,
    pub bounds: TimeBounds,
    pub params: SavingsParams,
    /// Departure-time column per vehicle.
    pub departure: BTreeMap<VehicleId, usize>,
    /// Passage-time columns per route node; empty when times are substituted.
    pub node_time: BTreeMap<(VehicleId, NodeId), usize>,
    /// `(u, v, segment) -> column` of "u follows v", `u > v`.
    pub follow: BTreeMap<(VehicleId, VehicleId, SegmentId), usize>,
    /// `(v, segment) -> column` of "v leads".
    pub lead: BTreeMap<(VehicleId, SegmentId), usize>,
    pub pairs: PairTable,
}

impl SpModelHandle {
    /// `t_{v,i}` as `x[col] + offset`.
    pub fn time_at(&self, v: VehicleId, i: NodeId) -> (usize, f64) {
        if let Some(&c) = self.node_time.get(&(v, i)) {
            (c, 0.0)
        } else {
            (self.departure[&v], self.bounds.offset(v, i).expect("node on route"))
        }
    }

    pub fn time_value(&self, x: &[f64], v: VehicleId, i: NodeId) -> f64 {
        let (c, off) = self.time_at(v, i);
        x[c] + off
    }

    pub fn big_m(&self, u: VehicleId, v: VehicleId, s: SegmentId) -> Option<f64> {
        self.pairs.big_m.get(&(u, v, s)).copied()
    }

    /// Point with nobody platooning and everybody leaving as early as allowed.
    pub fn solo_point(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.model.num_vars()];
        for (&v, &c) in &self.departure {
            x[c] = self.model.vars[c].lb;
            for (&(w, i), &ci) in &self.node_time {
                if w == v {
                    x[ci] = self.bounds.lower(v, i).expect("node on route");
                }
            }
        }
        x
    }
}

pub fn build_sp(
    inst: &ProblemInstance,
    routes: &ContractedRoutes,
    bounds: &TimeBounds,
    opts: &SpOptions,
) -> Result<SpModelHandle, SchedulingError> {
    let p = inst.params;
    let pairs = platoonable_and_big_m(routes, bounds);
    let mut model = LinearModel::new("sp", ObjSense::Maximize);
    let mut departure = BTreeMap::new();
    let mut node_time = BTreeMap::new();

    for m in &inst.missions {
        let nodes = routes.node_sequence(m.id);
        if nodes.first() != Some(&m.origin) || nodes.last() != Some(&m.dest) {
            return Err(SchedulingError::InvalidRoutes(format!("vehicle {} route does not match its mission", m.id)));
        }
        let lo = bounds.lower(m.id, m.origin).expect("origin bound");
        let hi = bounds.upper(m.id, m.origin).expect("origin bound");
        if opts.keep_intermediate_times {
            let last = nodes.len() - 1;
            for (k, &i) in nodes.iter().enumerate() {
                let (lb, ub) = match k {
                    0 => (m.t_earliest, f64::INFINITY),
                    _ if k == last => (f64::NEG_INFINITY, m.t_latest),
                    _ => (f64::NEG_INFINITY, f64::INFINITY),
                };
                let c = model.add_continuous(format!("t_{}_{}", m.id, i), lb, ub);
                node_time.insert((m.id, i), c);
                if k == 0 {
                    departure.insert(m.id, c);
                }
            }
            for (k, &s) in routes.route(m.id).iter().enumerate() {
                let a = node_time[&(m.id, nodes[k])];
                let b = node_time[&(m.id, nodes[k + 1])];
                model.add_constraint(
                    format!("travel_{}_{}", m.id, routes.segments[s].label(s)),
                    vec![(b, 1.0), (a, -1.0)],
                    Sense::Eq,
                    routes.segments[s].time,
                );
            }
        } else {
            departure.insert(m.id, model.add_continuous(format!("t_{}", m.id), lo, hi));
        }
    }

    let mut follow = BTreeMap::new();
    let mut lead = BTreeMap::new();
    for (s, seg) in routes.segments.iter().enumerate() {
        if seg.vehicles.len() < 2 {
            continue;
        }
        let label = seg.label(s);
        for &v in &seg.vehicles {
            let c = model.add_binary(format!("l_{v}_{label}"));
            model.set_obj_coeff(c, p.sigma_l * seg.cost);
            lead.insert((v, s), c);
        }
        for (a, &v) in seg.vehicles.iter().enumerate() {
            for &u in &seg.vehicles[a + 1..] {
                if pairs.big_m.contains_key(&(u, v, s)) {
                    let c = model.add_binary(format!("f_{u}_{v}_{label}"));
                    model.set_obj_coeff(c, p.sigma_f * seg.cost);
                    follow.insert((u, v, s), c);
                }
            }
        }
    }

    let mut handle = SpModelHandle {
        model,
        routes: routes.clone(),
        bounds: bounds.clone(),
        params: p,
        departure,
        node_time,
        follow,
        lead,
        pairs,
    };
    add_platoon_rows(&mut handle, opts);
    Ok(handle)
}

fn add_platoon_rows(h: &mut SpModelHandle, opts: &SpOptions) {
    let lambda = h.params.lambda as f64;
    let mut rows = Vec::new();
    for (s, seg) in h.routes.segments.iter().enumerate() {
        if seg.vehicles.len() < 2 {
            continue;
        }
        let label = seg.label(s);
        let i = seg.tail;
        for (a, &v) in seg.vehicles.iter().enumerate() {
            for &u in &seg.vehicles[a + 1..] {
                let Some(&f) = h.follow.get(&(u, v, s)) else { continue };
                let m = h.pairs.big_m[&(u, v, s)];
                let (cu, ou) = h.time_at(u, i);
                let (cv, ov) = h.time_at(v, i);
                rows.push((
                    format!("sync_hi_{u}_{v}_{label}"),
                    vec![(cu, 1.0), (cv, -1.0), (f, m)],
                    Sense::Le,
                    m - ou + ov,
                ));
                rows.push((
                    format!("sync_lo_{u}_{v}_{label}"),
                    vec![(cu, 1.0), (cv, -1.0), (f, -m)],
                    Sense::Ge,
                    -m - ou + ov,
                ));
            }
        }
        for &v in &seg.vehicles {
            let l = h.lead[&(v, s)];
            let mut follows: Vec<(usize, f64)> = seg
                .vehicles
                .iter()
                .filter(|&&w| w < v)
                .filter_map(|&w| h.follow.get(&(v, w, s)).map(|&c| (c, 1.0)))
                .collect();
            follows.push((l, 1.0));
            rows.push((format!("one_role_{v}_{label}"), follows, Sense::Le, 1.0));
            let followers: Vec<(usize, f64)> = seg
                .vehicles
                .iter()
                .filter(|&&u| u > v)
                .filter_map(|&u| h.follow.get(&(u, v, s)).map(|&c| (c, 1.0)))
                .collect();
            let mut cap = followers.clone();
            cap.push((l, -(lambda - 1.0)));
            rows.push((format!("cap_{v}_{label}"), cap, Sense::Le, 0.0));
            let mut some = followers;
            some.push((l, -1.0));
            rows.push((format!("has_follower_{v}_{label}"), some, Sense::Ge, 0.0));
        }
        let col = |u: VehicleId, v: VehicleId| h.follow.get(&(u, v, s)).copied();
        if opts.star_partition {
            for c in star_partition_constraints(&seg.vehicles, &col, &label) {
                rows.push((c.name, c.coeffs, c.sense, c.rhs));
            }
        }
        if opts.size_facets {
            for c in platoon_size_facets(&seg.vehicles, h.params.lambda, opts.facet_cap, &col, &label) {
                rows.push((c.name, c.coeffs, c.sense, c.rhs));
            }
        }
    }
    for (name, coeffs, sense, rhs) in rows {
        h.model.add_constraint(name, coeffs, sense, rhs);
    }
}

/// Reads platoons off an integral solution and maps them back to original
/// edges.
pub fn extract_platoons(h: &SpModelHandle, values: &[f64]) -> Result<PlatoonConfiguration, SchedulingError> {
    let bad = |msg: String| Err(SchedulingError::InconsistentPlatoon(msg));
    let lambda = h.params.lambda;
    let mut config = PlatoonConfiguration::default();
    for &v in h.departure.keys() {
        config.departures.insert(v, h.time_value(values, v, h.routes.node_sequence(v)[0]));
    }
    for (s, seg) in h.routes.segments.iter().enumerate() {
        let on = |c: usize| values[c] > 0.5;
        let mut leader_of: BTreeMap<VehicleId, VehicleId> = BTreeMap::new();
        for (&(u, v, s2), &c) in &h.follow {
            if s2 != s || !on(c) {
                continue;
            }
            if leader_of.insert(u, v).is_some() {
                return bad(format!("vehicle {u} follows two vehicles on segment {}", seg.label(s)));
            }
        }
        let mut platoons = Vec::new();
        for &v in &seg.vehicles {
            let leads = h.lead.get(&(v, s)).is_some_and(|&c| on(c));
            let followers: Vec<VehicleId> =
                leader_of.iter().filter(|(_, &l)| l == v).map(|(&u, _)| u).collect();
            if leads && leader_of.contains_key(&v) {
                return bad(format!("vehicle {v} both leads and follows on segment {}", seg.label(s)));
            }
            if leads && followers.is_empty() {
                return bad(format!("vehicle {v} leads nobody on segment {}", seg.label(s)));
            }
            if !leads && !followers.is_empty() {
                return bad(format!("vehicle {v} is followed without leading on segment {}", seg.label(s)));
            }
            if followers.len() + 1 > lambda {
                return bad(format!("platoon of {v} exceeds the size limit on segment {}", seg.label(s)));
            }
            let t_v = h.time_value(values, v, seg.tail);
            for &u in &followers {
                if (h.time_value(values, u, seg.tail) - t_v).abs() > ENTRY_TOL {
                    return bad(format!("vehicles {u} and {v} enter segment {} apart", seg.label(s)));
                }
            }
            if !leader_of.contains_key(&v) {
                platoons.push(Platoon { leader: v, followers });
            }
        }
        for &e in &seg.edges {
            config.platoons.insert(e, platoons.clone());
        }
    }
    Ok(config)
}

#[derive(Clone, Debug)]
pub struct SpSolveOptions {
    pub contract: bool,
    pub model: SpOptions,
    /// Separate disjunctive cuts at the root.
    pub disjunctive: bool,
    /// Separate violated platoon-size facets at the root.
    pub facet_separation: bool,
    pub max_cut_rounds: usize,
    pub time_limit: Option<Duration>,
    pub node_limit: Option<usize>,
}

impl Default for SpSolveOptions {
    fn default() -> Self {
        SpSolveOptions {
            contract: true,
            model: SpOptions::default(),
            disjunctive: false,
            facet_separation: false,
            max_cut_rounds: 20,
            time_limit: None,
            node_limit: None,
        }
    }
}

/// Cut families for the scheduling model, cumulative from left to right.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutMode {
    None,
    Star,
    StarDisj,
    StarDisjFacets,
}

impl CutMode {
    pub fn parse(s: &str) -> Option<CutMode> {
        match s {
            "none" => Some(CutMode::None),
            "star" => Some(CutMode::Star),
            "star+disj" => Some(CutMode::StarDisj),
            "star+disj+facets" => Some(CutMode::StarDisjFacets),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CutMode::None => "none",
            CutMode::Star => "star",
            CutMode::StarDisj => "star+disj",
            CutMode::StarDisjFacets => "star+disj+facets",
        }
    }

    pub fn apply(self, opts: &mut SpSolveOptions) {
        opts.model.star_partition = self != CutMode::None;
        opts.disjunctive = matches!(self, CutMode::StarDisj | CutMode::StarDisjFacets);
        opts.model.size_facets = self == CutMode::StarDisjFacets;
        opts.facet_separation = self == CutMode::StarDisjFacets;
    }
}

#[derive(Clone, Debug)]
pub struct SpOutcome {
    pub handle: SpModelHandle,
    pub solution: MipSolution,
    pub platoons: PlatoonConfiguration,
    pub savings: f64,
    pub total_fuel: f64,
}

pub fn build_sp_for_routes(
    inst: &ProblemInstance,
    routes: &RouteAssignment,
    contract_edges: bool,
    opts: &SpOptions,
) -> Result<SpModelHandle, SchedulingError> {
    let bounds = time_bounds(inst, routes)?;
    let cr = if contract_edges {
        contract(&inst.network, routes)
    } else {
        uncontracted(&inst.network, routes)
    };
    build_sp(inst, &cr, &bounds, opts)
}

pub fn solve_sp(inst: &ProblemInstance, routes: &RouteAssignment, opts: &SpSolveOptions) -> Result<SpOutcome, SchedulingError> {
    let handle = build_sp_for_routes(inst, routes, opts.contract, &opts.model)?;
    let mip_opts = MipOptions {
        time_limit: opts.time_limit,
        node_limit: opts.node_limit,
        max_cut_rounds: opts.max_cut_rounds,
        initial_incumbent: Some(handle.solo_point()),
        ..Default::default()
    };
    let solution = if opts.disjunctive || opts.facet_separation {
        let mut hook = SpRootCuts::new(&handle, opts.disjunctive, opts.facet_separation);
        solve_mip_with_hook(&handle.model, &mip_opts, Some(&mut hook))?
    } else {
        solve_mip(&handle.model, &mip_opts)?
    };
    if !matches!(solution.status, MipStatus::Optimal | MipStatus::Feasible) {
        return Err(SchedulingError::NoSolution(format!("{:?}", solution.status)));
    }
    let values = solution.values.as_ref().expect("incumbent present");
    let platoons = extract_platoons(&handle, values)?;
    let total_fuel = super::total_fuel(&inst.network, &inst.params, &platoons);
    Ok(SpOutcome {
        savings: solution.objective,
        total_fuel,
        platoons,
        solution,
        handle,
    })
}
