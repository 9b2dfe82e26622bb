//! Synthetic networks and the two mission generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::graph::{shortest_path, Edge, Node, NodeId, RoadNetwork, Weight};
use super::instance::{GenerationMeta, ProblemInstance, SavingsParams, VehicleMission};
use super::NetError;

/// Mixes a run seed with a stream label so independent components never
/// share random draws.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    // FNV-1a over the label, then a splitmix64 finalizer over the mix.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ h.rotate_left(17);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn rng_for(seed: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, label))
}

#[derive(Clone, Debug)]
pub struct GridConfig {
    pub rows: usize,
    pub cols: usize,
    pub spacing_km: f64,
    /// Uniform coordinate noise in `[-jitter, jitter]`, km.
    pub jitter_km: f64,
    pub diagonals: bool,
    pub speed_kmh: f64,
    pub fuel_per_km: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            rows: 7,
            cols: 7,
            spacing_km: 25.0,
            jitter_km: 5.0,
            diagonals: true,
            speed_kmh: 80.0,
            fuel_per_km: 1.0,
        }
    }
}

/// Planar grid with optional diagonals; ids are 0-based row-major. Every
/// road is two-way and each edge's fuel and time are proportional to its
/// length.
pub fn synthetic_grid(cfg: &GridConfig, seed: u64) -> Result<RoadNetwork, NetError> {
    if cfg.rows == 0 || cfg.cols == 0 || cfg.speed_kmh <= 0.0 || cfg.fuel_per_km <= 0.0 {
        return Err(NetError::Validation("grid needs positive size, speed and fuel rate".into()));
    }
    let mut rng = rng_for(seed, "grid");
    let mut nodes = Vec::with_capacity(cfg.rows * cfg.cols);
    for r in 0..cfg.rows {
        for c in 0..cfg.cols {
            let (dx, dy) = if cfg.jitter_km > 0.0 {
                (
                    rng.gen_range(-cfg.jitter_km..=cfg.jitter_km),
                    rng.gen_range(-cfg.jitter_km..=cfg.jitter_km),
                )
            } else {
                (0.0, 0.0)
            };
            nodes.push(Node {
                id: r * cfg.cols + c,
                x: c as f64 * cfg.spacing_km + dx,
                y: r as f64 * cfg.spacing_km + dy,
            });
        }
    }
    let mut edges = Vec::new();
    let mut link = |a: usize, b: usize| {
        let len = ((nodes[a].x - nodes[b].x).powi(2) + (nodes[a].y - nodes[b].y).powi(2)).sqrt();
        for (p, q) in [(a, b), (b, a)] {
            edges.push(Edge {
                from: p,
                to: q,
                length: len,
                time: len / cfg.speed_kmh,
                fuel: cfg.fuel_per_km * len,
            });
        }
    };
    for r in 0..cfg.rows {
        for c in 0..cfg.cols {
            let k = r * cfg.cols + c;
            if c + 1 < cfg.cols {
                link(k, k + 1);
            }
            if r + 1 < cfg.rows {
                link(k, k + cfg.cols);
            }
            if cfg.diagonals && r + 1 < cfg.rows && c + 1 < cfg.cols {
                link(k, k + cfg.cols + 1);
                link(k + 1, k + cfg.cols);
            }
        }
    }
    RoadNetwork::new(nodes, edges)
}

#[derive(Clone, Debug)]
pub struct DistributedConfig {
    pub cities: Vec<NodeId>,
    pub urban_radius_km: f64,
    pub urban_share: f64,
    /// Time-flexibility rate r: the window is `(1 + r)` shortest-path times.
    pub flexibility: f64,
    pub params: SavingsParams,
}

impl DistributedConfig {
    pub fn new(cities: Vec<NodeId>) -> Self {
        DistributedConfig {
            cities,
            urban_radius_km: 50.0,
            urban_share: 0.75,
            flexibility: 1.0,
            params: SavingsParams::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TwoClusterConfig {
    pub flexibility: f64,
    /// Hubs must be farther apart than this share of all node pairs.
    pub hub_quantile: f64,
    /// The cluster radius is the pairwise distance at this quantile.
    pub radius_quantile: f64,
    pub params: SavingsParams,
}

impl Default for TwoClusterConfig {
    fn default() -> Self {
        TwoClusterConfig {
            flexibility: 1.0,
            hub_quantile: 0.7,
            radius_quantile: 0.2,
            params: SavingsParams::default(),
        }
    }
}

const MAX_DRAWS: usize = 10_000;

fn window(rng: &mut ChaCha8Rng, net: &RoadNetwork, o: NodeId, d: NodeId, r: f64) -> Option<(f64, f64)> {
    let sp = shortest_path(net, o, d, Weight::Time).ok()?;
    let t0 = rng.gen_range(0.0..24.0);
    Some((t0, t0 + (1.0 + r) * sp.time))
}

fn nodes_within(net: &RoadNetwork, center: NodeId, radius: f64) -> Vec<NodeId> {
    net.nodes()
        .iter()
        .filter(|n| net.euclid(center, n.id) <= radius)
        .map(|n| n.id)
        .collect()
}

fn nearest_other(net: &RoadNetwork, center: NodeId) -> Option<NodeId> {
    net.nodes()
        .iter()
        .filter(|n| n.id != center)
        .min_by(|a, b| net.euclid(center, a.id).total_cmp(&net.euclid(center, b.id)))
        .map(|n| n.id)
}

/// Missions split between urban trips (between neighbourhoods of two
/// distinct cities) and uniformly drawn trips.
pub fn generate_distributed(
    net: &RoadNetwork,
    n_vehicles: usize,
    seed: u64,
    cfg: &DistributedConfig,
) -> Result<ProblemInstance, NetError> {
    cfg.params.validate()?;
    let mut meta = GenerationMeta {
        model: "distributed".into(),
        seed,
        radius_km: Some(cfg.urban_radius_km),
        ..Default::default()
    };
    let mut rng = rng_for(seed, "distributed");
    let n_urban = ((cfg.urban_share * n_vehicles as f64).round() as usize).min(n_vehicles);
    if n_urban > 0 && cfg.cities.len() < 2 {
        return Err(NetError::Validation("distributed model needs at least two city nodes".into()));
    }
    let mut around = Vec::with_capacity(cfg.cities.len());
    for &c in &cfg.cities {
        if !net.contains(c) {
            return Err(NetError::UnknownNode(c));
        }
        let mut near = nodes_within(net, c, cfg.urban_radius_km);
        if near.len() <= 1 {
            let Some(fallback) = nearest_other(net, c) else {
                return Err(NetError::NoNodeInRadius(c));
            };
            meta.notes.push(format!("city {c}: no node within radius, using nearest node {fallback}"));
            near.push(fallback);
            near.sort_unstable();
        }
        around.push(near);
    }
    let all: Vec<NodeId> = net.nodes().iter().map(|n| n.id).collect();
    if all.len() < 2 && n_vehicles > 0 {
        return Err(NetError::Validation("network needs at least two nodes".into()));
    }

    let mut missions = Vec::with_capacity(n_vehicles);
    for v in 1..=n_vehicles {
        let mut draws = 0;
        loop {
            draws += 1;
            if draws > MAX_DRAWS {
                return Err(NetError::Validation(format!("could not draw a reachable trip for vehicle {v}")));
            }
            let (o, d) = if v <= n_urban {
                let picks: Vec<usize> = (0..cfg.cities.len()).collect::<Vec<_>>().choose_multiple(&mut rng, 2).copied().collect();
                let o = *around[picks[0]].choose(&mut rng).expect("nonempty");
                let d = *around[picks[1]].choose(&mut rng).expect("nonempty");
                (o, d)
            } else {
                (*all.choose(&mut rng).expect("nonempty"), *all.choose(&mut rng).expect("nonempty"))
            };
            if o == d {
                continue;
            }
            if let Some((t0, t1)) = window(&mut rng, net, o, d, cfg.flexibility) {
                missions.push(VehicleMission {
                    id: v,
                    origin: o,
                    dest: d,
                    t_earliest: t0,
                    t_latest: t1,
                });
                break;
            }
        }
    }
    ProblemInstance::new(net.clone(), missions, cfg.params, Some(meta))
}

/// Sorted Euclidean distances over all unordered node pairs.
pub fn pairwise_distances(net: &RoadNetwork) -> Vec<f64> {
    let ns = net.nodes();
    let mut l = Vec::with_capacity(ns.len() * ns.len().saturating_sub(1) / 2);
    for a in 0..ns.len() {
        for b in a + 1..ns.len() {
            l.push(net.euclid(ns[a].id, ns[b].id));
        }
    }
    l.sort_by(f64::total_cmp);
    l
}

/// All vehicles start near one hub and end near another, far-apart hub.
pub fn generate_two_cluster(
    net: &RoadNetwork,
    n_vehicles: usize,
    seed: u64,
    cfg: &TwoClusterConfig,
) -> Result<ProblemInstance, NetError> {
    cfg.params.validate()?;
    let l = pairwise_distances(net);
    if l.is_empty() {
        return Err(NetError::NoHubPair);
    }
    let need = (cfg.hub_quantile * l.len() as f64).ceil() as usize;
    // A pair qualifies when at least `need` pairwise distances are strictly smaller.
    let threshold = if need == 0 { f64::NEG_INFINITY } else { l[need - 1] };
    let ns = net.nodes();
    let mut pairs = Vec::new();
    for a in 0..ns.len() {
        for b in a + 1..ns.len() {
            if net.euclid(ns[a].id, ns[b].id) > threshold {
                pairs.push((ns[a].id, ns[b].id));
            }
        }
    }
    let mut rng = rng_for(seed, "two-cluster");
    let Some(&(a, b)) = pairs.choose(&mut rng) else {
        return Err(NetError::NoHubPair);
    };
    let (h1, h2) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
    let r0 = l[((cfg.radius_quantile * l.len() as f64).ceil() as usize).min(l.len() - 1)];
    let near1 = nodes_within(net, h1, r0);
    let near2 = nodes_within(net, h2, r0);

    let mut missions = Vec::with_capacity(n_vehicles);
    for v in 1..=n_vehicles {
        let mut draws = 0;
        loop {
            draws += 1;
            if draws > MAX_DRAWS {
                return Err(NetError::Validation(format!("could not draw a reachable trip for vehicle {v}")));
            }
            let o = *near1.choose(&mut rng).expect("hub is within its own radius");
            let d = *near2.choose(&mut rng).expect("hub is within its own radius");
            if o == d {
                continue;
            }
            if let Some((t0, t1)) = window(&mut rng, net, o, d, cfg.flexibility) {
                missions.push(VehicleMission {
                    id: v,
                    origin: o,
                    dest: d,
                    t_earliest: t0,
                    t_latest: t1,
                });
                break;
            }
        }
    }
    let meta = GenerationMeta {
        model: "two-cluster".into(),
        seed,
        hubs: Some((h1, h2)),
        radius_km: Some(r0),
        ..Default::default()
    };
    ProblemInstance::new(net.clone(), missions, cfg.params, Some(meta))
}

/// `k` well-spread nodes by farthest-point sampling from a seeded start.
pub fn spread_nodes(net: &RoadNetwork, k: usize, seed: u64) -> Vec<NodeId> {
    let ids: Vec<NodeId> = net.nodes().iter().map(|n| n.id).collect();
    if ids.is_empty() || k == 0 {
        return Vec::new();
    }
    let mut rng = rng_for(seed, "cities");
    let mut chosen = vec![*ids.choose(&mut rng).expect("nonempty")];
    while chosen.len() < k.min(ids.len()) {
        let next = ids
            .iter()
            .filter(|id| !chosen.contains(id))
            .max_by(|&&a, &&b| {
                let da = chosen.iter().map(|&c| net.euclid(a, c)).fold(f64::INFINITY, f64::min);
                let db = chosen.iter().map(|&c| net.euclid(b, c)).fold(f64::INFINITY, f64::min);
                da.total_cmp(&db).then(b.cmp(&a))
            })
            .copied()
            .expect("remaining nodes");
        chosen.push(next);
    }
    chosen
}
