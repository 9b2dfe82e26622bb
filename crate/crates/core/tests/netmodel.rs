use std::collections::BTreeSet;

use platoon::netmodel::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn edge(from: NodeId, to: NodeId, len: f64) -> Edge {
    Edge {
        from,
        to,
        length: len,
        time: len / 80.0,
        fuel: len,
    }
}

fn nodes(n: usize) -> Vec<Node> {
    (0..n)
        .map(|i| Node {
            id: i,
            x: i as f64,
            y: 0.0,
        })
        .collect()
}

fn triangle() -> RoadNetwork {
    // A = 0, B = 1, C = 2
    RoadNetwork::new(nodes(3), vec![edge(0, 1, 10.0), edge(0, 2, 6.0), edge(2, 1, 6.0)]).unwrap()
}

#[test]
fn single_edge_path() {
    let net = RoadNetwork::new(nodes(2), vec![edge(0, 1, 5.0)]).unwrap();
    let p = shortest_path(&net, 0, 1, Weight::Length).unwrap();
    assert_eq!(p.nodes, vec![0, 1]);
    assert_eq!(p.length, 5.0);
    assert!(matches!(shortest_path(&net, 1, 0, Weight::Length), Err(NetError::Unreachable(1, 0))));
}

#[test]
fn triangle_direct_edge_wins() {
    let p = shortest_path(&triangle(), 0, 1, Weight::Length).unwrap();
    assert_eq!(p.nodes, vec![0, 1]);
    assert_eq!(p.length, 10.0);
}

fn unit_grid(k: usize) -> RoadNetwork {
    synthetic_grid(
        &GridConfig {
            rows: k,
            cols: k,
            spacing_km: 1.0,
            jitter_km: 0.0,
            diagonals: false,
            speed_kmh: 80.0,
            fuel_per_km: 1.0,
        },
        0,
    )
    .unwrap()
}

fn bellman_ford(net: &RoadNetwork, src: NodeId) -> Vec<f64> {
    let mut d = vec![f64::INFINITY; net.num_nodes()];
    d[src] = 0.0;
    for _ in 0..net.num_nodes() {
        for e in net.edges() {
            if d[e.from] + e.length < d[e.to] {
                d[e.to] = d[e.from] + e.length;
            }
        }
    }
    d
}

fn all_shortest(net: &RoadNetwork, at: NodeId, target: NodeId, dist: &[f64], prefix: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
    if at == target {
        out.push(prefix.clone());
        return;
    }
    for &e in net.out_edges(at) {
        let ed = net.edge(e);
        if (dist[at] + ed.length - dist[ed.to]).abs() < 1e-9 && !prefix.contains(&ed.to) {
            prefix.push(ed.to);
            all_shortest(net, ed.to, target, dist, prefix, out);
            prefix.pop();
        }
    }
}

#[test]
fn grid_corner_to_corner_lexicographic_tie_break() {
    let net = unit_grid(5);
    let dist = bellman_ford(&net, 0);
    assert_eq!(dist[24], 8.0);
    let p = shortest_path(&net, 0, 24, Weight::Length).unwrap();
    assert_eq!(p.length, 8.0);
    let mut paths = Vec::new();
    all_shortest(&net, 0, 24, &dist, &mut vec![0], &mut paths);
    assert_eq!(paths.len(), 70);
    let best = paths.iter().min().unwrap();
    assert_eq!(&p.nodes, best);
}

#[test]
fn candidate_set_zero_detour_is_shortest_path_edges() {
    let net = unit_grid(4);
    let set = candidate_edge_set(&net, 0, 15, 0.0).unwrap();
    let d0 = bellman_ford(&net, 0);
    let mut expected = Vec::new();
    for (k, e) in net.edges().iter().enumerate() {
        let back = bellman_ford(&net, e.to)[15];
        if (d0[e.from] + e.length + back - d0[15]).abs() < 1e-9 {
            expected.push(k);
        }
    }
    assert_eq!(set, expected);
}

#[test]
fn candidate_set_triangle_excludes_long_detour() {
    let net = triangle();
    let set = candidate_edge_set(&net, 0, 1, 0.1).unwrap();
    assert_eq!(set, vec![net.edge_between(0, 1).unwrap()]);
    // at sigma_f = 1/6 the bound is 12 and the detour qualifies
    let set = candidate_edge_set(&net, 0, 1, 1.0 / 6.0 + 1e-9).unwrap();
    assert_eq!(set.len(), 3);
}

fn random_net(seed: u64, n: usize) -> RoadNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ns: Vec<Node> = (0..n)
        .map(|i| Node {
            id: i,
            x: rng.gen_range(0.0..100.0),
            y: rng.gen_range(0.0..100.0),
        })
        .collect();
    let mut es = Vec::new();
    let mut seen = BTreeSet::new();
    for i in 0..n {
        // a ring keeps everything strongly connected
        let j = (i + 1) % n;
        seen.insert((i, j));
        es.push(edge(i, j, rng.gen_range(1.0..30.0)));
    }
    for _ in 0..3 * n {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b && seen.insert((a, b)) {
            es.push(edge(a, b, rng.gen_range(1.0..30.0)));
        }
    }
    RoadNetwork::new(ns, es).unwrap()
}

fn floyd(net: &RoadNetwork) -> Vec<Vec<f64>> {
    let n = net.num_nodes();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in net.edges() {
        d[e.from][e.to] = d[e.from][e.to].min(e.length);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

#[test]
fn candidate_set_matches_triple_loop() {
    for seed in 0..5 {
        let net = random_net(seed, 30);
        let d = floyd(&net);
        for (o, t) in [(0, 17), (5, 29), (12, 3)] {
            let bound = d[o][t] / 0.9;
            let expected: Vec<EdgeId> = net
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, e)| d[o][e.from] + d[e.from][e.to] + d[e.to][t] <= bound + 1e-9)
                .map(|(k, _)| k)
                .collect();
            assert_eq!(candidate_edge_set(&net, o, t, 0.1).unwrap(), expected);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn candidate_set_monotone_in_sigma(seed in 0u64..500, a in 0.0f64..0.5, b in 0.0f64..0.5) {
        let net = random_net(seed, 20);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let s1: BTreeSet<_> = candidate_edge_set(&net, 0, 11, lo).unwrap().into_iter().collect();
        let s2: BTreeSet<_> = candidate_edge_set(&net, 0, 11, hi).unwrap().into_iter().collect();
        prop_assert!(s1.is_subset(&s2));
    }

    #[test]
    fn shortest_fuel_path_inside_candidates(seed in 0u64..200) {
        let net = synthetic_grid(&GridConfig::default(), seed).unwrap();
        let cities = spread_nodes(&net, 4, seed);
        let inst = generate_distributed(&net, 6, seed, &DistributedConfig::new(cities)).unwrap();
        for m in &inst.missions {
            let set: BTreeSet<_> = candidate_edge_set(&net, m.origin, m.dest, 0.1).unwrap().into_iter().collect();
            let p = shortest_path(&net, m.origin, m.dest, Weight::Fuel).unwrap();
            prop_assert!(p.edges.iter().all(|e| set.contains(e)));
        }
    }
}

#[test]
fn synthetic_grid_costs_are_proportional() {
    let net = synthetic_grid(&GridConfig::default(), 3).unwrap();
    assert_eq!(net.num_nodes(), 49);
    for e in net.edges() {
        assert!((e.fuel - e.length).abs() < 1e-12);
        assert!((e.time - e.length / 80.0).abs() < 1e-12);
    }
}

#[test]
fn distributed_generator_contracts() {
    let net = synthetic_grid(&GridConfig::default(), 1).unwrap();
    let cfg = DistributedConfig::new(spread_nodes(&net, 5, 1));
    let empty = generate_distributed(&net, 0, 9, &cfg).unwrap();
    assert!(empty.missions.is_empty());

    let inst = generate_distributed(&net, 20, 9, &cfg).unwrap();
    for m in &inst.missions {
        let sp = shortest_path(&net, m.origin, m.dest, Weight::Time).unwrap();
        let w = m.t_latest - m.t_earliest;
        assert!((w - 2.0 * sp.time).abs() <= 1e-12 * w.max(1.0));
        assert!((0.0..24.0).contains(&m.t_earliest));
    }
    // urban vehicles start close to some city
    for m in inst.missions.iter().take(15) {
        assert!(cfg.cities.iter().any(|&c| net.euclid(c, m.origin) <= 50.0));
    }
    let again = generate_distributed(&net, 20, 9, &cfg).unwrap();
    assert_eq!(instance_to_json(&inst), instance_to_json(&again));
    let other = generate_distributed(&net, 20, 10, &cfg).unwrap();
    assert_ne!(instance_to_json(&inst), instance_to_json(&other));
}

#[test]
fn two_cluster_degenerate_net() {
    let net = RoadNetwork::new(nodes(2), vec![edge(0, 1, 5.0), edge(1, 0, 5.0)]).unwrap();
    assert!(matches!(
        generate_two_cluster(&net, 3, 0, &TwoClusterConfig::default()),
        Err(NetError::NoHubPair)
    ));
}

#[test]
fn two_cluster_hub_and_radius_conditions() {
    for seed in 0..10 {
        let net = synthetic_grid(&GridConfig::default(), seed).unwrap();
        let inst = generate_two_cluster(&net, 10, seed, &TwoClusterConfig::default()).unwrap();
        let meta = inst.meta.clone().unwrap();
        let (h1, h2) = meta.hubs.unwrap();
        let r0 = meta.radius_km.unwrap();
        // recompute L and its percentiles independently
        let ns = net.nodes();
        let mut l = Vec::new();
        for a in ns {
            for b in ns {
                if a.id < b.id {
                    l.push(((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt());
                }
            }
        }
        let dh = net.euclid(h1, h2);
        let below = l.iter().filter(|&&x| x < dh).count();
        assert!(below as f64 >= 0.7 * l.len() as f64);
        let below_r = l.iter().filter(|&&x| x < r0).count();
        assert!(below_r as f64 >= 0.2 * l.len() as f64 - 1.0);
        for m in &inst.missions {
            assert!(net.euclid(h1, m.origin) <= r0);
            assert!(net.euclid(h2, m.dest) <= r0);
        }
    }
}

#[test]
fn minimal_instance_file() {
    let text = r#"{
      "nodes": [{"id": 0, "x": 0.0, "y": 0.0}, {"id": 1, "x": 1.0, "y": 0.0}],
      "edges": [{"from": 0, "to": 1, "length": 1.0, "time": 0.5, "fuel": 1.0}],
      "vehicles": [{"id": 1, "origin": 0, "dest": 1, "t_earliest": 0.0, "t_latest": 2.0}],
      "params": {"sigma_l": 0.02, "sigma_f": 0.1, "lambda": 10}
    }"#;
    let inst = instance_from_json(text).unwrap();
    assert_eq!(inst.num_vehicles(), 1);
    assert_eq!(inst.fuel_zero().unwrap(), 1.0);
}

#[test]
fn sigma_ordering_rejected() {
    let text = r#"{
      "nodes": [{"id": 0, "x": 0.0, "y": 0.0}, {"id": 1, "x": 1.0, "y": 0.0}],
      "edges": [{"from": 0, "to": 1, "length": 1.0, "time": 0.5, "fuel": 1.0}],
      "vehicles": [{"id": 1, "origin": 0, "dest": 1, "t_earliest": 0.0, "t_latest": 2.0}],
      "params": {"sigma_l": 0.2, "sigma_f": 0.1, "lambda": 10}
    }"#;
    match instance_from_json(text) {
        Err(NetError::Validation(msg)) => assert!(msg.contains("sigma ordering")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn parse_error_reports_position() {
    let text = "{\n  \"nodes\": [\n    {\"id\": \"zero\"}\n  ]\n}";
    match instance_from_json(text) {
        Err(NetError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn infeasible_window_rejected() {
    let text = r#"{
      "nodes": [{"id": 0, "x": 0.0, "y": 0.0}, {"id": 1, "x": 1.0, "y": 0.0}],
      "edges": [{"from": 0, "to": 1, "length": 1.0, "time": 0.5, "fuel": 1.0}],
      "vehicles": [{"id": 1, "origin": 0, "dest": 1, "t_earliest": 0.0, "t_latest": 0.4}],
      "params": {"sigma_l": 0.02, "sigma_f": 0.1, "lambda": 10}
    }"#;
    assert!(matches!(instance_from_json(text), Err(NetError::Validation(_))));
}

#[test]
fn round_trip_generated_instance() {
    let net = synthetic_grid(&GridConfig::default(), 4).unwrap();
    let inst = generate_distributed(&net, 50, 4, &DistributedConfig::new(spread_nodes(&net, 6, 4))).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("inst.json");
    save_instance(&inst, &p).unwrap();
    let back = load_instance(&p).unwrap();
    assert_eq!(back, inst);
}

#[test]
fn derived_seeds_differ_by_label() {
    assert_ne!(derive_seed(1, "a"), derive_seed(1, "b"));
    assert_ne!(derive_seed(1, "a"), derive_seed(2, "a"));
    assert_eq!(derive_seed(5, "grid"), derive_seed(5, "grid"));
}
