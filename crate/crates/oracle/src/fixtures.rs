//! Hand-built and seeded instances shared by the test suites.

use std::collections::BTreeMap;

use platoon::netmodel::*;
use platoon::routing::RouteAssignment;

pub fn node(id: NodeId) -> Node {
    Node {
        id,
        x: id as f64,
        y: (id * 7 % 5) as f64,
    }
}

/// Edge whose length equals its fuel cost.
pub fn edge(from: NodeId, to: NodeId, fuel: f64, time: f64) -> Edge {
    Edge {
        from,
        to,
        length: fuel,
        time,
        fuel,
    }
}

pub fn mission(id: VehicleId, o: NodeId, d: NodeId, t0: f64, t1: f64) -> VehicleMission {
    VehicleMission {
        id,
        origin: o,
        dest: d,
        t_earliest: t0,
        t_latest: t1,
    }
}

/// Node id of a lettered node in the worked example.
pub fn letter(c: char) -> NodeId {
    (c as u8 - b'A') as NodeId
}

/// Four vehicles on fixed routes through a 12-node network: v1 A-B-C-D-E,
/// v2 F-C-D-G-H, v3 I-B-C-J, v4 L-D-G-K. Every edge takes one hour except
/// C->J, which takes two, and burns one unit of fuel.
pub fn worked_example() -> (ProblemInstance, RouteAssignment) {
    let pairs = ["AB", "BC", "CD", "DE", "FC", "DG", "GH", "IB", "CJ", "LD", "GK"];
    let edges: Vec<Edge> = pairs
        .iter()
        .map(|p| {
            let b = p.as_bytes();
            let t = if *p == "CJ" { 2.0 } else { 1.0 };
            edge(letter(b[0] as char), letter(b[1] as char), 1.0, t)
        })
        .collect();
    let net = RoadNetwork::new((0..12).map(node).collect(), edges).expect("valid network");
    let missions = vec![
        mission(1, letter('A'), letter('E'), 0.0, 8.0),
        mission(2, letter('F'), letter('H'), 1.0, 9.0),
        mission(3, letter('I'), letter('J'), 3.0, 8.0),
        mission(4, letter('L'), letter('K'), 2.0, 7.0),
    ];
    let inst = ProblemInstance::new(net, missions, SavingsParams::default(), None).expect("valid instance");
    let route = |s: &str| -> Vec<EdgeId> {
        s.as_bytes()
            .windows(2)
            .map(|w| inst.network.edge_between(letter(w[0] as char), letter(w[1] as char)).expect("edge"))
            .collect()
    };
    let mut routes = BTreeMap::new();
    routes.insert(1, route("ABCDE"));
    routes.insert(2, route("FCDGH"));
    routes.insert(3, route("IBCJ"));
    routes.insert(4, route("LDGK"));
    (inst.clone(), RouteAssignment::new(routes))
}

/// Moves every window start from a 24-hour day into the first `day_h`
/// hours, keeping window widths, so that vehicles can meet.
pub fn squeeze_windows(inst: &mut ProblemInstance, day_h: f64) {
    for m in &mut inst.missions {
        let width = m.t_latest - m.t_earliest;
        m.t_earliest = m.t_earliest / 24.0 * day_h;
        m.t_latest = m.t_earliest + width;
    }
}

fn grid(rows: usize, seed: u64) -> RoadNetwork {
    let cfg = GridConfig {
        rows,
        cols: rows,
        ..Default::default()
    };
    synthetic_grid(&cfg, seed).expect("grid")
}

/// Seeded instance on a `rows x rows` jittered grid with every trip running
/// between the neighbourhoods of two far-apart cities, so that vehicles
/// tend to share roads. Windows start within the first `day_h` hours.
pub fn clustered_instance(n: usize, seed: u64, rows: usize, day_h: f64) -> ProblemInstance {
    let net = grid(rows, seed);
    let cities = spread_nodes(&net, 2, seed);
    let mut dc = DistributedConfig::new(cities);
    dc.urban_share = 1.0;
    let mut inst = generate_distributed(&net, n, seed, &dc).expect("instance");
    squeeze_windows(&mut inst, day_h);
    inst.validate().expect("still valid");
    inst
}

/// Seeded two-cluster instance on a `rows x rows` jittered grid, with
/// windows starting within the first `day_h` hours.
pub fn two_cluster_instance(n: usize, seed: u64, rows: usize, day_h: f64) -> ProblemInstance {
    let net = grid(rows, seed);
    let mut inst = generate_two_cluster(&net, n, seed, &TwoClusterConfig::default()).expect("instance");
    squeeze_windows(&mut inst, day_h);
    inst.validate().expect("still valid");
    inst
}
