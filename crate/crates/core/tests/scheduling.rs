mod common;

use std::collections::BTreeMap;

use common::*;
use platoon::mip::*;
use platoon::netmodel::*;
use platoon::routing::*;
use platoon::rshm::c_plat;
use platoon::scheduling::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn seg_by_nodes(cr: &ContractedRoutes, a: char, b: char) -> SegmentId {
    cr.segments
        .iter()
        .position(|s| s.tail == letter(a) && s.head == letter(b))
        .unwrap()
}

#[test]
fn worked_example_time_bounds() {
    let (inst, routes) = worked_example();
    let tb = time_bounds(&inst, &routes).unwrap();
    assert_eq!(tb.upper(3, letter('B')), Some(5.0));
    assert_eq!(tb.lower(3, letter('B')), Some(4.0));
    assert_eq!(tb.lower(1, letter('B')), Some(1.0));
    assert_eq!(tb.upper(4, letter('L')), Some(4.0));
    assert_eq!(tb.offset(2, letter('D')), Some(2.0));
    assert_eq!(tb.lower(1, letter('Z')), None);
}

#[test]
fn worked_example_big_m() {
    let (inst, routes) = worked_example();
    let tb = time_bounds(&inst, &routes).unwrap();
    let cr = uncontracted(&inst.network, &routes);
    let pt = platoonable_and_big_m(&cr, &tb);
    assert!(pt.pruned.is_empty());
    assert_eq!(pt.big_m.len(), 3);
    assert_eq!(pt.big_m[&(3, 1, seg_by_nodes(&cr, 'B', 'C'))], 4.0);
    assert_eq!(pt.big_m[&(2, 1, seg_by_nodes(&cr, 'C', 'D'))], 4.0);
    assert_eq!(pt.big_m[&(4, 2, seg_by_nodes(&cr, 'D', 'G'))], 4.0);
}

#[test]
fn zero_flexibility_pins_times() {
    let net = RoadNetwork::new(
        (0..4).map(node).collect(),
        vec![edge(0, 1, 1.0, 1.0), edge(1, 2, 1.0, 2.0), edge(2, 3, 1.0, 0.5)],
    )
    .unwrap();
    let inst = ProblemInstance::new(net, vec![mission(1, 0, 3, 2.0, 5.5)], SavingsParams::default(), None).unwrap();
    let routes = RouteAssignment::from_vec(vec![vec![0, 1, 2]]);
    let tb = time_bounds(&inst, &routes).unwrap();
    for ((_, _), (lo, hi)) in tb.entries() {
        assert!((lo - hi).abs() < 1e-12);
    }
    assert_eq!(tb.lower(1, 3), Some(5.5));
}

#[test]
fn lower_bound_at_destination_is_total_time() {
    for seed in 0..5 {
        let (inst, routes) = routed_instance(5, seed, 5);
        let tb = time_bounds(&inst, &routes).unwrap();
        for m in &inst.missions {
            let total = routes.route_time(&inst.network, m.id);
            assert!((tb.lower(m.id, m.dest).unwrap() - (m.t_earliest + total)).abs() < 1e-9);
            assert!((tb.upper(m.id, m.origin).unwrap() - (m.t_latest - total)).abs() < 1e-9);
        }
    }
}

/// Two vehicles over one shared edge of fuel 10, with given windows.
fn shared_pair(w1: (f64, f64), w2: (f64, f64)) -> (ProblemInstance, RouteAssignment) {
    let net = RoadNetwork::new(
        (0..4).map(node).collect(),
        vec![edge(0, 1, 1.0, 1.0), edge(3, 1, 1.0, 1.0), edge(1, 2, 10.0, 1.0)],
    )
    .unwrap();
    let inst = ProblemInstance::new(
        net,
        vec![mission(1, 0, 2, w1.0, w1.1), mission(2, 3, 2, w2.0, w2.1)],
        SavingsParams::default(),
        None,
    )
    .unwrap();
    let id = |a, b| inst.network.edge_between(a, b).unwrap();
    let routes = RouteAssignment::from_vec(vec![vec![id(0, 1), id(1, 2)], vec![id(3, 1), id(1, 2)]]);
    (inst, routes)
}

#[test]
fn disjoint_windows_are_pruned() {
    let (inst, routes) = shared_pair((0.0, 2.0), (5.0, 7.0));
    let tb = time_bounds(&inst, &routes).unwrap();
    let cr = contract(&inst.network, &routes);
    let pt = platoonable_and_big_m(&cr, &tb);
    assert_eq!(pt.pruned.len(), 1);
    assert!(pt.big_m.is_empty());
    let out = solve_sp(&inst, &routes, &SpSolveOptions::default()).unwrap();
    assert_eq!(out.handle.follow.len(), 0);
    assert_eq!(out.savings, 0.0);
}

#[test]
fn touching_windows_are_kept() {
    // Vehicle 1 can reach node 1 at the latest at 1, vehicle 2 at the earliest at 1.
    let (inst, routes) = shared_pair((0.0, 2.0), (0.0, 2.0));
    let tb = time_bounds(&inst, &routes).unwrap();
    let cr = contract(&inst.network, &routes);
    let pt = platoonable_and_big_m(&cr, &tb);
    assert!(pt.pruned.is_empty());
    assert_eq!(pt.big_m.values().copied().collect::<Vec<_>>(), vec![0.0]);
    let out = solve_sp(&inst, &routes, &SpSolveOptions::default()).unwrap();
    assert!((out.savings - 1.2).abs() < 1e-9);
}

#[test]
fn two_vehicle_platoon_saves_lead_and_follow_share() {
    let (inst, routes) = shared_pair((0.0, 5.0), (1.0, 6.0));
    let out = solve_sp(&inst, &routes, &SpSolveOptions::default()).unwrap();
    assert!((out.savings - (0.02 * 10.0 + 0.1 * 10.0)).abs() < 1e-9);
    let shared = inst.network.edge_between(1, 2).unwrap();
    assert_eq!(out.platoons.size(1, shared), 2);
    assert_eq!(out.platoons.size(2, shared), 2);
    assert_eq!(out.platoons.leaders(shared), vec![1]);
    let c = out.platoons.departures[&1] + 1.0;
    assert!((out.platoons.departures[&2] + 1.0 - c).abs() < ENTRY_TOL);
    // One size-2 platoon on the cost-10 edge.
    assert!((c_plat(2, 10.0, &inst.params) - 18.8).abs() < 1e-12);
    assert!((out.total_fuel - (1.0 + 1.0 + 18.8)).abs() < 1e-9);
}

#[test]
fn single_vehicle_has_empty_schedule_model() {
    let net = RoadNetwork::new((0..3).map(node).collect(), vec![edge(0, 1, 3.0, 1.0), edge(1, 2, 4.0, 1.0)]).unwrap();
    let inst = ProblemInstance::new(net, vec![mission(1, 0, 2, 0.0, 4.0)], SavingsParams::default(), None).unwrap();
    let routes = RouteAssignment::from_vec(vec![vec![0, 1]]);
    let out = solve_sp(&inst, &routes, &SpSolveOptions::default()).unwrap();
    assert!(out.handle.follow.is_empty() && out.handle.lead.is_empty());
    assert_eq!(out.savings, 0.0);
    assert_eq!(out.total_fuel, 7.0);
    assert_eq!(out.handle.routes.num_segments(), 1);
    let seg = &out.handle.routes.segments[0];
    assert_eq!((seg.time, seg.cost), (2.0, 7.0));
}

#[test]
fn contraction_merges_identical_runs() {
    // Two vehicles share C->D->E; the merged segment keeps summed time and cost.
    let (a, b, c, d, e, f, g) = (0, 1, 2, 3, 4, 5, 6);
    let net = RoadNetwork::new(
        (0..7).map(node).collect(),
        vec![
            edge(a, b, 1.0, 1.0),
            edge(b, c, 2.0, 1.0),
            edge(c, d, 3.0, 1.5),
            edge(d, e, 4.0, 0.5),
            edge(f, c, 1.0, 1.0),
            edge(e, g, 1.0, 1.0),
        ],
    )
    .unwrap();
    let id = |x, y| net.edge_between(x, y).unwrap();
    let routes = RouteAssignment::from_vec(vec![
        vec![id(a, b), id(b, c), id(c, d), id(d, e)],
        vec![id(f, c), id(c, d), id(d, e), id(e, g)],
    ]);
    let cr = contract(&net, &routes);
    assert_eq!(cr.route(1).len(), 2);
    assert_eq!(cr.route(2).len(), 3);
    let shared = &cr.segments[cr.route(1)[1]];
    assert_eq!((shared.tail, shared.head), (c, e));
    assert_eq!(shared.vehicles, vec![1, 2]);
    assert_eq!((shared.time, shared.cost), (2.0, 7.0));
    assert_eq!(cr.route(2)[1], cr.route(1)[1]);
    // No two consecutive segments on any route carry the same vehicles.
    for v in [1, 2] {
        for w in cr.route(v).windows(2) {
            assert_ne!(cr.segments[w[0]].vehicles, cr.segments[w[1]].vehicles);
        }
    }
    let raw = uncontracted(&net, &routes);
    assert_eq!(raw.num_segments(), 6);
}

#[test]
fn contraction_preserves_optimum_and_shrinks_model() {
    for seed in 0..12 {
        let (inst, routes) = routed_instance(4, seed, 4);
        let mut raw_opts = SpSolveOptions::default();
        raw_opts.contract = false;
        let raw = solve_sp(&inst, &routes, &raw_opts).unwrap();
        let con = solve_sp(&inst, &routes, &SpSolveOptions::default()).unwrap();
        assert!((raw.savings - con.savings).abs() < 1e-6, "seed {seed}");
        assert!((raw.total_fuel - con.total_fuel).abs() < 1e-6);
        let (rm, cm) = (&raw.handle.model, &con.handle.model);
        assert!(cm.num_vars() <= rm.num_vars() && cm.num_cons() <= rm.num_cons());
        assert!(con.handle.routes.num_segments() <= raw.handle.routes.num_segments());
    }
}

#[test]
fn intermediate_times_give_same_optimum() {
    for seed in 0..6 {
        let (inst, routes) = routed_instance(4, seed, 4);
        let sub = solve_sp(&inst, &routes, &SpSolveOptions::default()).unwrap();
        let mut full = SpSolveOptions::default();
        full.model.keep_intermediate_times = true;
        let full = solve_sp(&inst, &routes, &full).unwrap();
        assert!((sub.savings - full.savings).abs() < 1e-6, "seed {seed}");
        assert!(!full.handle.node_time.is_empty());
    }
}

#[test]
fn extracted_platoons_respect_structure() {
    for seed in 0..10 {
        let (inst, routes) = routed_instance(5, seed, 4);
        let out = solve_sp(&inst, &routes, &SpSolveOptions::default()).unwrap();
        let net = &inst.network;
        let p = &inst.params;
        assert!((out.platoons.savings(net, p) - out.savings).abs() < 1e-6);
        let by_savings = total_fuel_by_savings(net, p, &routes, &out.platoons);
        assert!((by_savings - out.total_fuel).abs() < 1e-6);
        for (e, users) in routes.edge_vehicles() {
            let mut members: Vec<VehicleId> = out.platoons.on_edge(e).iter().flat_map(|pl| pl.members()).collect();
            members.sort_unstable();
            assert_eq!(members, users, "platoons partition the edge's vehicles");
            for pl in out.platoons.on_edge(e) {
                assert!(pl.size() <= p.lambda);
                assert!(pl.followers.iter().all(|&f| f > pl.leader));
                let tail = net.edge(e).from;
                let t = |v: VehicleId| out.platoons.departures[&v] + out.handle.bounds.offset(v, tail).unwrap();
                for &f in &pl.followers {
                    assert!((t(f) - t(pl.leader)).abs() <= ENTRY_TOL);
                }
            }
        }
    }
}

#[test]
fn solo_configuration_costs_route_fuel() {
    let (inst, routes) = routed_instance(4, 1, 4);
    let solo = PlatoonConfiguration::solo(&routes, BTreeMap::new());
    let z = total_fuel(&inst.network, &inst.params, &solo);
    let base: f64 = routes.vehicles().map(|v| routes.route_fuel(&inst.network, v)).sum();
    assert!((z - base).abs() < 1e-9);
}

#[test]
fn fuel_formulas_agree_on_random_configurations() {
    let (inst, routes) = routed_instance(6, 2, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let mut cfg = PlatoonConfiguration::default();
        for (e, users) in routes.edge_vehicles() {
            let mut rest = users.clone();
            let mut ps = Vec::new();
            while let Some(&leader) = rest.first() {
                rest.remove(0);
                let k = rng.gen_range(0..=rest.len());
                let followers: Vec<VehicleId> = rest.drain(..k).collect();
                ps.push(Platoon { leader, followers });
            }
            cfg.platoons.insert(e, ps);
        }
        let a = total_fuel(&inst.network, &inst.params, &cfg);
        let b = total_fuel_by_savings(&inst.network, &inst.params, &routes, &cfg);
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn inconsistent_solution_is_rejected() {
    let (inst, routes) = shared_pair((0.0, 5.0), (1.0, 6.0));
    let h = build_sp_for_routes(&inst, &routes, true, &SpOptions::default()).unwrap();
    let mut x = h.solo_point();
    // A leader with no follower.
    let (&_, &l) = h.lead.iter().next().unwrap();
    x[l] = 1.0;
    assert!(matches!(extract_platoons(&h, &x), Err(SchedulingError::InconsistentPlatoon(_))));
    // A follower entering at a different time.
    let mut x = h.solo_point();
    let (&(u, v, s), &f) = h.follow.iter().next().unwrap();
    x[f] = 1.0;
    x[h.lead[&(v, s)]] = 1.0;
    x[h.departure[&u]] += 0.5;
    assert!(matches!(extract_platoons(&h, &x), Err(SchedulingError::InconsistentPlatoon(_))));
}

#[test]
fn sp_never_beats_presumed_routing_savings() {
    for seed in 0..6 {
        let (inst, _) = routed_instance(5, seed, 4);
        let rdp = solve_rdp(&inst, &EdgeCostTable::initial(&inst.network), 1, None).unwrap();
        let sp = solve_sp(&inst, &rdp.routes, &SpSolveOptions::default()).unwrap();
        let base: f64 = rdp.routes.vehicles().map(|v| rdp.routes.route_fuel(&inst.network, v)).sum();
        assert!(base - sp.savings >= rdp.objective - 1e-6, "seed {seed}");
    }
}

#[test]
fn cut_modes_parse() {
    for m in [CutMode::None, CutMode::Star, CutMode::StarDisj, CutMode::StarDisjFacets] {
        assert_eq!(CutMode::parse(m.as_str()), Some(m));
    }
    assert_eq!(CutMode::parse("all"), None);
    let mut o = SpSolveOptions::default();
    CutMode::None.apply(&mut o);
    assert!(!o.model.star_partition && !o.disjunctive);
    CutMode::StarDisjFacets.apply(&mut o);
    assert!(o.model.star_partition && o.disjunctive && o.model.size_facets);
}

#[test]
fn sp_model_is_maximization_over_binaries() {
    let (inst, routes) = worked_example();
    let h = build_sp_for_routes(&inst, &routes, true, &SpOptions::default()).unwrap();
    assert_eq!(h.model.obj_sense, ObjSense::Maximize);
    for &c in h.follow.values().chain(h.lead.values()) {
        assert_eq!(h.model.vars[c].kind, VarKind::Binary);
    }
    assert_eq!(h.departure.len(), 4);
}
