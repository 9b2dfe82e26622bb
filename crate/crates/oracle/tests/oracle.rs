use std::collections::{BTreeMap, BTreeSet};

use oracle::fixtures::*;
use oracle::*;
use platoon::netmodel::*;
use platoon::routing::{EdgeCostTable, RouteAssignment};
use platoon::scheduling::{solve_sp, SpSolveOptions};

#[test]
fn star_partition_counts() {
    assert_eq!(enum_star_partitions(2, None).len(), 2);
    assert_eq!(enum_star_partitions(3, None).len(), 5);
    assert_eq!(enum_star_partitions(4, None).len(), 15);
    // A cap of two forbids the three stars with two followers.
    assert_eq!(enum_star_partitions(3, Some(2)).len(), 4);
    assert_eq!(pair_list(3), vec![(2, 1), (3, 1), (3, 2)]);
}

#[test]
fn partitions_lead_with_lowest_member() {
    let parts = partitions_of(&[1, 2, 3], None);
    assert_eq!(parts.len(), 5);
    for p in &parts {
        for b in p {
            assert!(b.windows(2).all(|w| w[0] < w[1]));
        }
    }
    let capped = partitions_of(&[1, 2, 3, 4], Some(2));
    assert!(capped.iter().all(|p| p.iter().all(|b| b.len() <= 2)));
    assert_eq!(capped.len(), 10);
}

#[test]
fn affine_rank_examples() {
    assert_eq!(affine_rank(&[]), 0);
    assert_eq!(affine_rank(&[vec![1, 2, 3]]), 1);
    assert_eq!(affine_rank(&[vec![0, 0], vec![1, 1], vec![2, 2]]), 2);
    assert_eq!(affine_rank(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![5, 7]]), 3);
    let unit: Vec<Vec<i64>> = (0..5)
        .map(|k| (0..5).map(|j| i64::from(j == k)).collect())
        .collect();
    assert_eq!(affine_rank(&unit), 5);
}

#[test]
fn rdp_edge_point_counts_agree() {
    for n in 1..=6 {
        assert_eq!(enum_rdp_edge_points(n).len(), recount_rdp_edge_points(n), "n = {n}");
    }
    assert_eq!(recount_rdp_edge_points(3), 1 + 3 + 3 * 2 * 2 + 3 * 2);
}

#[test]
fn rdp_edge_points_span_full_dimension() {
    for n in 2..=4 {
        let pts: Vec<Vec<i64>> = enum_rdp_edge_points(n).iter().map(|p| p.coords()).collect();
        assert_eq!(affine_rank(&pts), n + 4);
    }
}

/// Two vehicles sharing one long edge with a short feeder each.
fn shared_edge_instance(window: f64) -> ProblemInstance {
    let net = RoadNetwork::new(
        (0..4).map(node).collect(),
        vec![edge(0, 2, 1.0, 1.0), edge(1, 2, 1.0, 1.0), edge(2, 3, 10.0, 2.0)],
    )
    .unwrap();
    let missions = vec![mission(1, 0, 3, 0.0, 3.0 + window), mission(2, 1, 3, 0.5, 3.5 + window)];
    ProblemInstance::new(net, missions, SavingsParams::default(), None).unwrap()
}

#[test]
fn sp_oracle_two_vehicles_shared_edge() {
    let inst = shared_edge_instance(1.0);
    let routes = RouteAssignment::from_vec(vec![vec![0, 2], vec![1, 2]]);
    let sp = brute_force_sp(&inst.network, &inst.missions, &routes, &inst.params).unwrap();
    assert!((sp.savings - 1.2).abs() < 1e-12);
    assert_eq!(sp.platoons[&2], BTreeSet::from([BTreeSet::from([1, 2])]));
    assert!((sp.departures[&1] - sp.departures[&2]).abs() < 1e-9);

    // Windows that cannot meet give no savings.
    let tight = shared_edge_instance(0.0);
    let sp = brute_force_sp(&tight.network, &tight.missions, &routes, &tight.params).unwrap();
    assert_eq!(sp.savings, 0.0);
    assert_eq!(sp.platoons[&2].len(), 2);
}

#[test]
fn cvpp_oracle_two_vehicles() {
    let inst = shared_edge_instance(1.0);
    let rep = brute_force_cvpp(&inst, DEFAULT_PATH_CAP).unwrap();
    let fuel0 = inst.fuel_zero().unwrap();
    assert!((fuel0 - 22.0).abs() < 1e-12);
    assert!((rep.z_star - (fuel0 - 1.2)).abs() < 1e-12);
    assert!((rep.presumed_z - rep.z_star).abs() < 1e-12);
    assert_eq!(rep.leaders[&2], vec![1]);
    let (z, _) = brute_force_routing(&inst, DEFAULT_PATH_CAP).unwrap();
    assert!((z - rep.presumed_z).abs() < 1e-12);
}

#[test]
fn too_many_vehicles_rejected() {
    let (inst, routes) = worked_example();
    assert!(matches!(brute_force_cvpp(&inst, DEFAULT_PATH_CAP), Err(OracleError::TooLarge(_))));
    assert!(brute_force_sp(&inst.network, &inst.missions, &routes, &inst.params).is_ok());
}

#[test]
fn path_cap_enforced() {
    let inst = clustered_instance(1, 3, 6, 4.0);
    let m = &inst.missions[0];
    let all: BTreeSet<EdgeId> = (0..inst.network.num_edges()).collect();
    let r = simple_paths(&inst.network, m.origin, m.dest, &all, f64::INFINITY, 1);
    assert!(matches!(r, Err(OracleError::TooLarge(_))) || r.unwrap().len() <= 1);
}

#[test]
fn sp_oracle_matches_worked_example_milp() {
    let (inst, routes) = worked_example();
    let sp = brute_force_sp(&inst.network, &inst.missions, &routes, &inst.params).unwrap();
    let milp = solve_sp(&inst, &routes, &SpSolveOptions::default()).unwrap();
    assert!((sp.savings - milp.savings).abs() < 1e-6, "{} vs {}", sp.savings, milp.savings);
}

#[test]
fn cvpp_oracle_bounds_and_routing_agreement() {
    for seed in 0..4 {
        let inst = clustered_instance(2, seed, 5, 2.0);
        let rep = brute_force_cvpp(&inst, DEFAULT_PATH_CAP).unwrap();
        let fuel0 = inst.fuel_zero().unwrap();
        assert!(rep.z_star <= fuel0 + 1e-9);
        assert!(rep.presumed_z <= rep.z_star + 1e-9);
        let out = platoon::routing::solve_rdp(&inst, &EdgeCostTable::initial(&inst.network), 1, None).unwrap();
        assert!((out.objective - rep.presumed_z).abs() < 1e-6, "seed {seed}");
        let users: BTreeMap<EdgeId, Vec<VehicleId>> = rep.routes.edge_vehicles();
        for (e, sets) in &rep.platoons {
            let members: usize = sets.iter().map(BTreeSet::len).sum();
            assert_eq!(members, users[e].len());
        }
    }
}
