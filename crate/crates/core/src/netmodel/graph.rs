use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use super::NetError;

pub type NodeId = usize;
/// Index into [`RoadNetwork::edges`].
pub type EdgeId = usize;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    /// Kilometres.
    pub length: f64,
    /// Hours.
    pub time: f64,
    /// Fuel units.
    pub fuel: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weight {
    Fuel,
    Time,
    Length,
}

impl Edge {
    pub fn weight(&self, w: Weight) -> f64 {
        match w {
            Weight::Fuel => self.fuel,
            Weight::Time => self.time,
            Weight::Length => self.length,
        }
    }
}

/// Directed road graph. Nodes are kept sorted by id and edges by
/// `(from, to)`; at most one edge joins an ordered node pair.
#[derive(Clone, Debug)]
pub struct RoadNetwork {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<NodeId, usize>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
    by_pair: HashMap<(NodeId, NodeId), EdgeId>,
}

impl PartialEq for RoadNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub fuel: f64,
    pub time: f64,
    pub length: f64,
}

impl Path {
    pub fn from_edges(net: &RoadNetwork, edges: Vec<EdgeId>) -> Path {
        let mut nodes = Vec::with_capacity(edges.len() + 1);
        if let Some(&e) = edges.first() {
            nodes.push(net.edge(e).from);
        }
        let (mut fuel, mut time, mut length) = (0.0, 0.0, 0.0);
        for &e in &edges {
            let ed = net.edge(e);
            nodes.push(ed.to);
            fuel += ed.fuel;
            time += ed.time;
            length += ed.length;
        }
        Path {
            nodes,
            edges,
            fuel,
            time,
            length,
        }
    }

    pub fn cost(&self, w: Weight) -> f64 {
        match w {
            Weight::Fuel => self.fuel,
            Weight::Time => self.time,
            Weight::Length => self.length,
        }
    }
}

impl RoadNetwork {
    pub fn new(mut nodes: Vec<Node>, mut edges: Vec<Edge>) -> Result<RoadNetwork, NetError> {
        nodes.sort_by_key(|n| n.id);
        for w in nodes.windows(2) {
            if w[0].id == w[1].id {
                return Err(NetError::Validation(format!("duplicate node id {}", w[0].id)));
            }
        }
        let index: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(k, n)| (n.id, k)).collect();
        edges.sort_by_key(|e| (e.from, e.to));
        let mut by_pair = HashMap::with_capacity(edges.len());
        let mut out_edges = vec![Vec::new(); nodes.len()];
        let mut in_edges = vec![Vec::new(); nodes.len()];
        for (k, e) in edges.iter().enumerate() {
            let (Some(&a), Some(&b)) = (index.get(&e.from), index.get(&e.to)) else {
                return Err(NetError::Validation(format!(
                    "edge endpoint missing: ({}, {})",
                    e.from, e.to
                )));
            };
            if e.from == e.to {
                return Err(NetError::Validation(format!("self-loop at node {}", e.from)));
            }
            if !(e.fuel > 0.0 && e.time > 0.0 && e.length >= 0.0) || !(e.fuel.is_finite() && e.time.is_finite()) {
                return Err(NetError::Validation(format!(
                    "edge ({}, {}) needs positive fuel and time",
                    e.from, e.to
                )));
            }
            if by_pair.insert((e.from, e.to), k).is_some() {
                return Err(NetError::Validation(format!("parallel edge ({}, {})", e.from, e.to)));
            }
            out_edges[a].push(k);
            in_edges[b].push(k);
        }
        // Neighbour order by head id keeps searches deterministic.
        for list in out_edges.iter_mut() {
            list.sort_by_key(|&k| edges[k].to);
        }
        for list in in_edges.iter_mut() {
            list.sort_by_key(|&k| edges[k].from);
        }
        Ok(RoadNetwork {
            nodes,
            edges,
            index,
            out_edges,
            in_edges,
            by_pair,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.index.get(&id).map(|&k| &self.nodes[k])
    }

    pub fn edge_between(&self, from: NodeId, to: NodeId) -> Option<EdgeId> {
        self.by_pair.get(&(from, to)).copied()
    }

    pub fn out_edges(&self, id: NodeId) -> &[EdgeId] {
        self.index.get(&id).map_or(&[], |&k| &self.out_edges[k])
    }

    pub fn in_edges(&self, id: NodeId) -> &[EdgeId] {
        self.index.get(&id).map_or(&[], |&k| &self.in_edges[k])
    }

    pub fn euclid(&self, a: NodeId, b: NodeId) -> f64 {
        match (self.node(a), self.node(b)) {
            (Some(p), Some(q)) => ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt(),
            _ => f64::INFINITY,
        }
    }

    fn require(&self, id: NodeId) -> Result<usize, NetError> {
        self.index.get(&id).copied().ok_or(NetError::UnknownNode(id))
    }

    /// Single-source distances; `reverse` walks edges backwards, giving
    /// distances *to* `src`. Unreachable nodes get infinity.
    pub fn distances(&self, src: NodeId, w: Weight, reverse: bool) -> Result<Vec<f64>, NetError> {
        let s = self.require(src)?;
        let mut dist = vec![f64::INFINITY; self.nodes.len()];
        dist[s] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Entry { d: 0.0, k: s });
        while let Some(Entry { d, k }) = heap.pop() {
            if d > dist[k] {
                continue;
            }
            let list = if reverse { &self.in_edges[k] } else { &self.out_edges[k] };
            for &e in list {
                let ed = &self.edges[e];
                let other = self.index[&if reverse { ed.from } else { ed.to }];
                let nd = d + ed.weight(w);
                if nd < dist[other] {
                    dist[other] = nd;
                    heap.push(Entry { d: nd, k: other });
                }
            }
        }
        Ok(dist)
    }

    /// Distance lookup keyed by node id, on top of [`RoadNetwork::distances`].
    pub fn dist_of(&self, dist: &[f64], id: NodeId) -> f64 {
        self.index.get(&id).map_or(f64::INFINITY, |&k| dist[k])
    }
}

#[derive(Clone, Copy)]
struct Entry {
    d: f64,
    k: usize,
}

impl PartialEq for Entry {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        o.d.total_cmp(&self.d).then_with(|| o.k.cmp(&self.k))
    }
}

const TIE_EPS: f64 = 1e-9;

/// Minimum-weight path from `o` to `d`. Among paths whose weights agree to
/// within 1e-9 the lexicographically smallest node sequence wins.
pub fn shortest_path(net: &RoadNetwork, o: NodeId, d: NodeId, w: Weight) -> Result<Path, NetError> {
    let s = net.require(o)?;
    let t = net.require(d)?;
    let n = net.nodes.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut label: Vec<Option<Vec<NodeId>>> = vec![None; n];
    let mut done = vec![false; n];
    dist[s] = 0.0;
    label[s] = Some(vec![o]);
    let mut heap = BinaryHeap::new();
    heap.push(Entry { d: 0.0, k: s });
    while let Some(Entry { d: du, k }) = heap.pop() {
        if done[k] || du > dist[k] {
            continue;
        }
        done[k] = true;
        if k == t {
            break;
        }
        let here = label[k].clone().expect("settled node has a label");
        for &e in &net.out_edges[k] {
            let ed = &net.edges[e];
            let j = net.index[&ed.to];
            if done[j] {
                continue;
            }
            let nd = du + ed.weight(w);
            let better = if nd < dist[j] - TIE_EPS {
                true
            } else if nd <= dist[j] + TIE_EPS {
                let mut cand = here.clone();
                cand.push(ed.to);
                label[j].as_ref().is_none_or(|cur| cand < *cur)
            } else {
                false
            };
            if better {
                dist[j] = if nd < dist[j] { nd } else { dist[j].min(nd) };
                let mut p = here.clone();
                p.push(ed.to);
                label[j] = Some(p);
                heap.push(Entry { d: dist[j], k: j });
            }
        }
    }
    let Some(nodes) = label[t].clone() else {
        return Err(NetError::Unreachable(o, d));
    };
    let edges = nodes
        .windows(2)
        .map(|p| net.edge_between(p[0], p[1]).expect("consecutive nodes are adjacent"))
        .collect();
    Ok(Path::from_edges(net, edges))
}

/// Edges `(i, j)` with `d(O,i) + d(i,j) + d(j,D) <= d(O,D) / (1 - sigma_f)`,
/// all distances being shortest lengths. Every such detour bound holds for
/// any route whose length exceeds the shortest by no more than the
/// follower saving could recover.
pub fn candidate_edge_set(net: &RoadNetwork, o: NodeId, d: NodeId, sigma_f: f64) -> Result<Vec<EdgeId>, NetError> {
    let from_o = net.distances(o, Weight::Length, false)?;
    let to_d = net.distances(d, Weight::Length, true)?;
    let base = net.dist_of(&from_o, d);
    if !base.is_finite() {
        return Err(NetError::Unreachable(o, d));
    }
    let bound = base / (1.0 - sigma_f);
    let slack = 1e-9 * bound.max(1.0);
    let mut tail_dist: HashMap<NodeId, Vec<f64>> = HashMap::new();
    let mut out = Vec::new();
    for (k, e) in net.edges.iter().enumerate() {
        let a = net.dist_of(&from_o, e.from);
        let c = net.dist_of(&to_d, e.to);
        if a + c > bound + slack {
            continue;
        }
        // d(i,j) never exceeds the edge length, so most edges need no search.
        if a + e.length + c <= bound + slack {
            out.push(k);
            continue;
        }
        let dl = match tail_dist.get(&e.from) {
            Some(v) => v,
            None => {
                let v = net.distances(e.from, Weight::Length, false)?;
                tail_dist.entry(e.from).or_insert(v)
            }
        };
        if a + net.dist_of(dl, e.to) + c <= bound + slack {
            out.push(k);
        }
    }
    Ok(out)
}
