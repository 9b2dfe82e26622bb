use std::collections::BTreeSet;

use crate::mip::{Constraint, Sense};
use crate::netmodel::VehicleId;

/// Per-segment cap on enumerated platoon-size rows.
pub const DEFAULT_FACET_CAP: usize = 200;

/// Maps an ordered pair `(u, v)`, `u > v`, to the column of "u follows v";
/// `None` when the pair cannot platoon.
pub type FollowCol<'a> = &'a dyn Fn(VehicleId, VehicleId) -> Option<usize>;

fn row(name: String, mut coeffs: Vec<(usize, f64)>, rhs: f64) -> Constraint {
    coeffs.sort_by_key(|c| c.0);
    Constraint {
        name,
        coeffs,
        sense: Sense::Le,
        rhs,
    }
}

/// Rows whose 0/1 solutions are exactly the star partitions of `vehicles`
/// (ascending): the largest vehicle follows at most one other, and nobody
/// follows a vehicle that itself follows. Rows left with no column, because
/// every pair in them was pruned, are dropped.
pub fn star_partition_constraints(vehicles: &[VehicleId], col: FollowCol, tag: &str) -> Vec<Constraint> {
    let n = vehicles.len();
    if n < 2 {
        return vec![];
    }
    let mut out = Vec::new();
    let vmax = vehicles[n - 1];
    let top: Vec<(usize, f64)> = vehicles[..n - 1].iter().filter_map(|&v| col(vmax, v)).map(|c| (c, 1.0)).collect();
    if !top.is_empty() {
        out.push(row(format!("star_top_{tag}"), top, 1.0));
    }
    for (a, &v) in vehicles.iter().enumerate().skip(1) {
        let below: Vec<(usize, f64)> = vehicles[..a].iter().filter_map(|&w| col(v, w)).map(|c| (c, 1.0)).collect();
        for &u in &vehicles[a + 1..] {
            let mut coeffs = below.clone();
            if let Some(c) = col(u, v) {
                coeffs.push((c, 1.0));
            }
            if !coeffs.is_empty() {
                out.push(row(format!("star_{u}_{v}_{tag}"), coeffs, 1.0));
            }
        }
    }
    out
}

fn size_row(subset: &[VehicleId], lambda: usize, col: FollowCol, tag: &str) -> Option<Constraint> {
    let mut coeffs = Vec::new();
    for (a, &v) in subset.iter().enumerate() {
        for &u in &subset[a + 1..] {
            if let Some(c) = col(u, v) {
                coeffs.push((c, 1.0));
            }
        }
    }
    // With fewer than lambda columns the row can never bind.
    if coeffs.len() < lambda {
        return None;
    }
    let ids: Vec<String> = subset.iter().map(|v| v.to_string()).collect();
    Some(row(format!("size_{}_{tag}", ids.join("_")), coeffs, lambda as f64 - 1.0))
}

/// Platoon-size rows `sum f <= lambda - 1` over subsets of `lambda + 1`
/// vehicles, in lexicographic order, at most `cap` of them.
pub fn platoon_size_facets(
    vehicles: &[VehicleId],
    lambda: usize,
    cap: usize,
    col: FollowCol,
    tag: &str,
) -> Vec<Constraint> {
    let k = lambda + 1;
    let n = vehicles.len();
    let mut out = Vec::new();
    if n < k || cap == 0 {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let subset: Vec<VehicleId> = idx.iter().map(|&i| vehicles[i]).collect();
        if let Some(r) = size_row(&subset, lambda, col, tag) {
            out.push(r);
            if out.len() >= cap {
                return out;
            }
        }
        // Next combination.
        let mut p = k;
        while p > 0 && idx[p - 1] == n - k + p - 1 {
            p -= 1;
        }
        if p == 0 {
            return out;
        }
        idx[p - 1] += 1;
        for q in p..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Greedy search for violated platoon-size rows at `x`: grow a subset from
/// each vehicle by repeatedly adding the vehicle with the largest total
/// follow weight to it.
pub fn separate_size_facets(
    vehicles: &[VehicleId],
    lambda: usize,
    x: &[f64],
    col: FollowCol,
    tag: &str,
    tol: f64,
) -> Vec<Constraint> {
    let k = lambda + 1;
    if vehicles.len() < k {
        return vec![];
    }
    let weight = |a: VehicleId, b: VehicleId| {
        let (u, v) = if a > b { (a, b) } else { (b, a) };
        col(u, v).map_or(0.0, |c| x[c])
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &seed in vehicles {
        let mut set = vec![seed];
        while set.len() < k {
            let best = vehicles
                .iter()
                .filter(|v| !set.contains(v))
                .map(|&v| (set.iter().map(|&w| weight(v, w)).sum::<f64>(), v))
                .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
            match best {
                Some((_, v)) => set.push(v),
                None => break,
            }
        }
        set.sort_unstable();
        if !seen.insert(set.clone()) {
            continue;
        }
        if let Some(r) = size_row(&set, lambda, col, tag) {
            let lhs: f64 = r.coeffs.iter().map(|&(c, a)| a * x[c]).sum();
            if lhs > r.rhs + tol {
                out.push(r);
            }
        }
    }
    out
}
