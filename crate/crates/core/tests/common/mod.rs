#![allow(dead_code)]

use std::collections::BTreeMap;

use platoon::netmodel::*;
use platoon::routing::*;

pub fn node(id: NodeId) -> Node {
    Node {
        id,
        x: id as f64,
        y: (id * 7 % 5) as f64,
    }
}

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

/// Node ids of the four-vehicle worked example, by letter.
pub fn letter(c: char) -> NodeId {
    (c as u8 - b'A') as NodeId
}

/// Four vehicles on fixed routes through a 12-node network. Every edge takes
/// one hour except C->J, which takes two; every edge burns one unit of fuel.
pub fn worked_example() -> (ProblemInstance, RouteAssignment) {
    let pairs = ["AB", "BC", "CD", "DE", "FC", "DG", "GH", "IB", "CJ", "LD", "GK"];
    let edges: Vec<Edge> = pairs
        .iter()
        .map(|p| {
            let mut it = p.chars();
            let (a, b) = (it.next().unwrap(), it.next().unwrap());
            let t = if *p == "CJ" { 2.0 } else { 1.0 };
            edge(letter(a), letter(b), 1.0, t)
        })
        .collect();
    let net = RoadNetwork::new((0..12).map(node).collect(), edges).unwrap();
    let missions = vec![
        mission(1, letter('A'), letter('E'), 0.0, 8.0),
        mission(2, letter('F'), letter('H'), 1.0, 9.0),
        mission(3, letter('I'), letter('J'), 3.0, 8.0),
        mission(4, letter('L'), letter('K'), 2.0, 7.0),
    ];
    let inst = ProblemInstance::new(net, missions, SavingsParams::default(), None).unwrap();
    let route = |s: &str| -> Vec<EdgeId> {
        let cs: Vec<char> = s.chars().collect();
        cs.windows(2)
            .map(|w| inst.network.edge_between(letter(w[0]), letter(w[1])).unwrap())
            .collect()
    };
    let mut routes = BTreeMap::new();
    routes.insert(1, route("ABCDE"));
    routes.insert(2, route("FCDGH"));
    routes.insert(3, route("IBCJ"));
    routes.insert(4, route("LDGK"));
    (inst.clone(), RouteAssignment::new(routes))
}

/// Small random instance on a jittered grid, routed by the first routing
/// model so that vehicles share edges.
pub fn routed_instance(n: usize, seed: u64, rows: usize) -> (ProblemInstance, RouteAssignment) {
    let cfg = GridConfig {
        rows,
        cols: rows,
        ..Default::default()
    };
    let net = synthetic_grid(&cfg, seed).unwrap();
    let cities = spread_nodes(&net, 2, seed);
    let mut dc = DistributedConfig::new(cities);
    dc.urban_share = 1.0;
    let inst = generate_distributed(&net, n, seed, &dc).unwrap();
    let out = solve_rdp(&inst, &EdgeCostTable::initial(&inst.network), 1, None).unwrap();
    (inst, out.routes)
}
