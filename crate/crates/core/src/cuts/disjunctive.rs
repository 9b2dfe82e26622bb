use std::collections::{BTreeMap, BTreeSet};

use crate::mip::{solve_lp, Cut, CutSource, LinearModel, LpStatus, ObjSense, Sense};
use crate::netmodel::VehicleId;
use crate::scheduling::{SegmentId, SpModelHandle};

use super::CutError;

/// Tolerance for "equal", "at a bound" and "integral" tests on LP values.
pub const ACTIVE_TOL: f64 = 1e-7;

/// Which big-M row of the separated pair is tight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TightSide {
    /// `t_u - t_v = M (1 - f)`.
    Upper,
    /// `t_u - t_v = -M (1 - f)`.
    Lower,
}

/// Vehicles whose constraints pin down a fractional follow value.
#[derive(Clone, Debug, PartialEq)]
pub struct ActiveSets {
    /// Insertion order: the follower of the fractional pair comes first.
    pub first: Vec<VehicleId>,
    /// Insertion order: the leader of the fractional pair comes first.
    pub second: Vec<VehicleId>,
    /// `(u*, v*, segment)` with fractional follow value.
    pub pair: (VehicleId, VehicleId, SegmentId),
    pub side: TightSide,
    /// Vehicles of both sets departing at their earliest time.
    pub at_lower: Vec<VehicleId>,
    /// Vehicles of both sets departing at their latest time.
    pub at_upper: Vec<VehicleId>,
    /// Pairs inside one set with follow value 1.
    pub platooned: Vec<(VehicleId, VehicleId, SegmentId)>,
}

impl ActiveSets {
    pub fn vehicles(&self) -> BTreeSet<VehicleId> {
        self.first.iter().chain(&self.second).copied().collect()
    }
}

/// Why no active sets were returned.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoActiveSets {
    /// No fractional follow value has a tight big-M row.
    NoTightFractionalPair,
    /// The search from the follower ran out of platooned neighbours before
    /// reaching a vehicle at a departure bound.
    FirstSearchStalled,
    /// Same, from the leader.
    SecondSearchStalled,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Collection {
    Found(ActiveSets),
    None(NoActiveSets),
}

impl Collection {
    pub fn found(self) -> Option<ActiveSets> {
        match self {
            Collection::Found(a) => Some(a),
            Collection::None(_) => None,
        }
    }
}

fn departure_state(h: &SpModelHandle, x: &[f64], v: VehicleId) -> (bool, bool) {
    let c = h.departure[&v];
    let origin = h.routes.node_sequence(v)[0];
    let t = x[c];
    let lo = h.bounds.lower(v, origin).expect("origin bound");
    let hi = h.bounds.upper(v, origin).expect("origin bound");
    ((t - lo).abs() <= ACTIVE_TOL, (t - hi).abs() <= ACTIVE_TOL)
}

fn at_bound(h: &SpModelHandle, x: &[f64], v: VehicleId) -> bool {
    let (a, b) = departure_state(h, x, v);
    a || b
}

/// Fractional pairs whose big-M row is tight, in `(u, v, tail, head,
/// segment)` order.
pub fn tight_fractional_pairs(h: &SpModelHandle, x: &[f64]) -> Vec<((VehicleId, VehicleId, SegmentId), TightSide)> {
    let mut out = Vec::new();
    for (&(u, v, s), &c) in &h.follow {
        let f = x[c];
        if f <= ACTIVE_TOL || f >= 1.0 - ACTIVE_TOL {
            continue;
        }
        let m = h.pairs.big_m[&(u, v, s)];
        let tail = h.routes.segments[s].tail;
        let d = h.time_value(x, u, tail) - h.time_value(x, v, tail);
        let slack = m * (1.0 - f);
        if d.abs() <= ACTIVE_TOL || (d.abs() - slack).abs() > ACTIVE_TOL * (1.0 + m) {
            continue;
        }
        let side = if d > 0.0 { TightSide::Upper } else { TightSide::Lower };
        out.push(((u, v, s), side));
    }
    let seg_key = |s: SegmentId| (h.routes.segments[s].tail, h.routes.segments[s].head, s);
    out.sort_by_key(|&((u, v, s), _)| (u, v, seg_key(s)));
    out
}

/// Grows `set` along follow values equal to one until it reaches a vehicle
/// departing at a bound. Returns false when it runs out of such links.
fn deep_search(h: &SpModelHandle, x: &[f64], set: &mut Vec<VehicleId>) -> bool {
    loop {
        let next = h
            .follow
            .iter()
            .filter(|(_, &c)| x[c] >= 1.0 - ACTIVE_TOL)
            .find_map(|(&(u, v, _), _)| match (set.contains(&u), set.contains(&v)) {
                (true, false) => Some(v),
                (false, true) => Some(u),
                _ => None,
            });
        let Some(w) = next else { return false };
        set.push(w);
        if at_bound(h, x, w) {
            return true;
        }
    }
}

/// Active-constraint collection for the first tight fractional pair.
pub fn collect_active_sets(h: &SpModelHandle, x: &[f64]) -> Collection {
    match tight_fractional_pairs(h, x).first() {
        None => Collection::None(NoActiveSets::NoTightFractionalPair),
        Some(&(pair, side)) => collect_for_pair(h, x, pair, side),
    }
}

/// Active-constraint collection starting from a given tight pair.
pub fn collect_for_pair(
    h: &SpModelHandle,
    x: &[f64],
    pair: (VehicleId, VehicleId, SegmentId),
    side: TightSide,
) -> Collection {
    let (u, v, _) = pair;
    let mut first = vec![u];
    let mut second = vec![v];
    if !at_bound(h, x, u) && !deep_search(h, x, &mut first) {
        return Collection::None(NoActiveSets::FirstSearchStalled);
    }
    if !at_bound(h, x, v) && !deep_search(h, x, &mut second) {
        return Collection::None(NoActiveSets::SecondSearchStalled);
    }
    let all: BTreeSet<VehicleId> = first.iter().chain(&second).copied().collect();
    let mut at_lower = Vec::new();
    let mut at_upper = Vec::new();
    for &w in &all {
        let (lo, hi) = departure_state(h, x, w);
        if lo {
            at_lower.push(w);
        }
        if hi {
            at_upper.push(w);
        }
    }
    let mut platooned = Vec::new();
    for group in [&first, &second] {
        for (&(a, b, s), &c) in &h.follow {
            if x[c] >= 1.0 - ACTIVE_TOL && group.contains(&a) && group.contains(&b) && (a, b, s) != pair {
                platooned.push((a, b, s));
            }
        }
    }
    platooned.sort_unstable();
    platooned.dedup();
    Collection::Found(ActiveSets {
        first,
        second,
        pair,
        side,
        at_lower,
        at_upper,
        platooned,
    })
}

/// One row `a . omega + p f* >= b` of the system the disjunction acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct DisjRow {
    pub name: String,
    /// Coefficients over positions in `omega`.
    pub a: Vec<(usize, f64)>,
    pub p: f64,
    pub b: f64,
}

/// The system and the variables it ranges over.
#[derive(Clone, Debug, PartialEq)]
pub struct DisjSystem {
    /// Model columns of `omega`: departures of the involved vehicles, then
    /// the follow columns of the platooned pairs.
    pub omega: Vec<usize>,
    /// Model column of the fractional follow variable.
    pub f_star: usize,
    /// Rows of the collected active constraints, as `>=`.
    pub active: Vec<DisjRow>,
    /// All rows handed to the cut-generating LP.
    pub rows: Vec<DisjRow>,
}

/// Assembles the active rows plus both big-M rows of the separated pair,
/// departure bounds and follow bounds, all in `>=` form.
pub fn disjunctive_system(h: &SpModelHandle, sets: &ActiveSets) -> Result<DisjSystem, CutError> {
    let vehicles: Vec<VehicleId> = sets.vehicles().into_iter().collect();
    let mut omega = Vec::new();
    let mut pos: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in &vehicles {
        let c = *h.departure.get(&v).ok_or_else(|| CutError::Assembly(format!("no departure column for {v}")))?;
        pos.insert(c, omega.len());
        omega.push(c);
    }
    for key in &sets.platooned {
        let c = *h.follow.get(key).ok_or_else(|| CutError::Assembly(format!("no follow column for {key:?}")))?;
        pos.insert(c, omega.len());
        omega.push(c);
    }
    let f_star = *h
        .follow
        .get(&sets.pair)
        .ok_or_else(|| CutError::Assembly(format!("no follow column for {:?}", sets.pair)))?;

    let dep = |v: VehicleId| pos[&h.departure[&v]];
    let origin_bounds = |v: VehicleId| {
        let o = h.routes.node_sequence(v)[0];
        (h.bounds.lower(v, o).expect("bound"), h.bounds.upper(v, o).expect("bound"))
    };
    // t_u,i - t_v,i = dep_u - dep_v + (off_u - off_v).
    let sync = |u: VehicleId, v: VehicleId, s: SegmentId| -> Result<(f64, f64), CutError> {
        let m = h
            .big_m(u, v, s)
            .ok_or_else(|| CutError::Assembly(format!("no big-M for ({u}, {v}, {s})")))?;
        let tail = h.routes.segments[s].tail;
        let off = |w: VehicleId| h.bounds.offset(w, tail).expect("tail on route");
        Ok((m, off(u) - off(v)))
    };

    let mut active = Vec::new();
    for &v in &sets.at_lower {
        active.push(DisjRow {
            name: format!("dep_lo_{v}"),
            a: vec![(dep(v), 1.0)],
            p: 0.0,
            b: origin_bounds(v).0,
        });
    }
    for &v in &sets.at_upper {
        active.push(DisjRow {
            name: format!("dep_hi_{v}"),
            a: vec![(dep(v), -1.0)],
            p: 0.0,
            b: -origin_bounds(v).1,
        });
    }
    for &(u, v, s) in &sets.platooned {
        let (m, d) = sync(u, v, s)?;
        let fc = pos[&h.follow[&(u, v, s)]];
        // t_u - t_v <= M (1 - f)  ->  -t_u + t_v - M f >= -M + d
        active.push(DisjRow {
            name: format!("sync_hi_{u}_{v}_{s}"),
            a: vec![(dep(u), -1.0), (dep(v), 1.0), (fc, -m)],
            p: 0.0,
            b: -m + d,
        });
        // t_u - t_v >= -M (1 - f)  ->  t_u - t_v - M f >= -M - d
        active.push(DisjRow {
            name: format!("sync_lo_{u}_{v}_{s}"),
            a: vec![(dep(u), 1.0), (dep(v), -1.0), (fc, -m)],
            p: 0.0,
            b: -m - d,
        });
    }

    let mut rows = active.clone();
    let (us, vs, ss) = sets.pair;
    let (m, d) = sync(us, vs, ss)?;
    rows.push(DisjRow {
        name: "star_sync_hi".into(),
        a: vec![(dep(us), -1.0), (dep(vs), 1.0)],
        p: -m,
        b: -m + d,
    });
    rows.push(DisjRow {
        name: "star_sync_lo".into(),
        a: vec![(dep(us), 1.0), (dep(vs), -1.0)],
        p: -m,
        b: -m - d,
    });
    for &v in &vehicles {
        let (lo, hi) = origin_bounds(v);
        rows.push(DisjRow {
            name: format!("bound_lo_{v}"),
            a: vec![(dep(v), 1.0)],
            p: 0.0,
            b: lo,
        });
        rows.push(DisjRow {
            name: format!("bound_hi_{v}"),
            a: vec![(dep(v), -1.0)],
            p: 0.0,
            b: -hi,
        });
    }
    for key in &sets.platooned {
        let fc = pos[&h.follow[key]];
        rows.push(DisjRow {
            name: format!("f_lo_{}_{}_{}", key.0, key.1, key.2),
            a: vec![(fc, 1.0)],
            p: 0.0,
            b: 0.0,
        });
        rows.push(DisjRow {
            name: format!("f_hi_{}_{}_{}", key.0, key.1, key.2),
            a: vec![(fc, -1.0)],
            p: 0.0,
            b: -1.0,
        });
    }
    rows.push(DisjRow {
        name: "f_star_lo".into(),
        a: vec![],
        p: 1.0,
        b: 0.0,
    });
    rows.push(DisjRow {
        name: "f_star_hi".into(),
        a: vec![],
        p: -1.0,
        b: -1.0,
    });
    Ok(DisjSystem {
        omega,
        f_star,
        active,
        rows,
    })
}

/// Column layout of the cut-generating LP.
#[derive(Clone, Debug)]
pub struct Cglp {
    pub model: LinearModel,
    pub alpha: Vec<usize>,
    pub beta0: Vec<usize>,
    pub beta1: Vec<usize>,
    pub gamma0: usize,
    pub gamma1: usize,
}

/// Cut-generating LP over the two sides `f* = 0` and `f* = 1` of the
/// disjunction. The multipliers are normalized to sum to at most one, since
/// the objective is positively homogeneous and would otherwise be unbounded
/// whenever a violated cut exists.
pub fn build_cglp(sys: &DisjSystem, omega_hat: &[f64], f_hat: f64) -> Cglp {
    let mut m = LinearModel::new("cglp", ObjSense::Minimize);
    let alpha: Vec<usize> = (0..sys.omega.len())
        .map(|k| m.add_continuous(format!("alpha_{k}"), f64::NEG_INFINITY, f64::INFINITY))
        .collect();
    let beta0: Vec<usize> = (0..sys.rows.len()).map(|r| m.add_continuous(format!("beta0_{r}"), 0.0, f64::INFINITY)).collect();
    let beta1: Vec<usize> = (0..sys.rows.len()).map(|r| m.add_continuous(format!("beta1_{r}"), 0.0, f64::INFINITY)).collect();
    let gamma0 = m.add_continuous("gamma0", 0.0, f64::INFINITY);
    let gamma1 = m.add_continuous("gamma1", 0.0, 1.0);

    for (k, &a) in alpha.iter().enumerate() {
        m.set_obj_coeff(a, omega_hat[k]);
    }
    for (r, row) in sys.rows.iter().enumerate() {
        m.set_obj_coeff(beta0[r], row.b * f_hat - row.b);
        m.set_obj_coeff(beta1[r], (row.p - row.b) * f_hat);
    }
    m.set_obj_coeff(gamma0, f_hat);
    m.set_obj_coeff(gamma1, 1.0 - f_hat);

    for (k, &a) in alpha.iter().enumerate() {
        for (tag, beta) in [("0", &beta0), ("1", &beta1)] {
            let mut coeffs = vec![(a, -1.0)];
            for (r, row) in sys.rows.iter().enumerate() {
                for &(pos, v) in &row.a {
                    if pos == k {
                        coeffs.push((beta[r], v));
                    }
                }
            }
            m.add_constraint(format!("match{tag}_{k}"), coeffs, Sense::Eq, 0.0);
        }
    }
    let mut norm: Vec<(usize, f64)> = beta0.iter().chain(&beta1).map(|&c| (c, 1.0)).collect();
    norm.push((gamma0, 1.0));
    norm.push((gamma1, 1.0));
    m.add_constraint("normalize", norm, Sense::Le, 1.0);
    Cglp {
        model: m,
        alpha,
        beta0,
        beta1,
        gamma0,
        gamma1,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisjunctiveCut {
    /// `coeffs . x >= rhs` over model columns.
    pub cut: Cut,
    pub violation: f64,
    pub alpha: Vec<f64>,
    pub beta0: Vec<f64>,
    pub beta1: Vec<f64>,
    pub gamma0: f64,
    pub gamma1: f64,
    pub sets: ActiveSets,
}

/// Cut for one collected set of active constraints, when the cut-generating
/// LP finds one violated by more than `ACTIVE_TOL`.
pub fn cut_from_sets(h: &SpModelHandle, x: &[f64], sets: ActiveSets) -> Result<Option<DisjunctiveCut>, CutError> {
    let sys = disjunctive_system(h, &sets)?;
    let omega_hat: Vec<f64> = sys.omega.iter().map(|&c| x[c]).collect();
    let f_hat = x[sys.f_star];
    let cg = build_cglp(&sys, &omega_hat, f_hat);
    let lp = solve_lp(&cg.model)?;
    if lp.status != LpStatus::Optimal {
        return Err(CutError::Cglp(format!("{:?}", lp.status)));
    }
    if lp.objective >= -ACTIVE_TOL {
        return Ok(None);
    }
    let val = |c: usize| lp.values[c];
    let alpha: Vec<f64> = cg.alpha.iter().map(|&c| val(c)).collect();
    let beta0: Vec<f64> = cg.beta0.iter().map(|&c| val(c)).collect();
    let beta1: Vec<f64> = cg.beta1.iter().map(|&c| val(c)).collect();
    let (g0, g1) = (val(cg.gamma0), val(cg.gamma1));
    let b0: f64 = sys.rows.iter().zip(&beta0).map(|(r, &b)| r.b * b).sum();
    let b1: f64 = sys.rows.iter().zip(&beta1).map(|(r, &b)| r.b * b).sum();
    let p1: f64 = sys.rows.iter().zip(&beta1).map(|(r, &b)| r.p * b).sum();
    let mut coeffs: Vec<(usize, f64)> = sys.omega.iter().zip(&alpha).map(|(&c, &a)| (c, a)).collect();
    coeffs.push((sys.f_star, b0 - b1 + p1 + g0 - g1));
    coeffs.retain(|c| c.1.abs() > 1e-12);
    coeffs.sort_by_key(|c| c.0);
    let cut = Cut {
        coeffs,
        sense: Sense::Ge,
        rhs: b0 - g1,
        source: CutSource::Disjunctive,
    };
    let violation = cut.violation(x);
    if violation <= ACTIVE_TOL {
        return Ok(None);
    }
    Ok(Some(DisjunctiveCut {
        cut,
        violation,
        alpha,
        beta0,
        beta1,
        gamma0: g0,
        gamma1: g1,
        sets,
    }))
}

/// Collects active sets for the first tight fractional pair and derives a
/// disjunctive cut from them.
pub fn separate_disjunctive(h: &SpModelHandle, x: &[f64]) -> Result<Option<DisjunctiveCut>, CutError> {
    match collect_active_sets(h, x) {
        Collection::Found(sets) => cut_from_sets(h, x, sets),
        Collection::None(_) => Ok(None),
    }
}

/// Tries every tight fractional pair in order and returns the cuts found,
/// plus how many pairs ended without active sets, by reason.
pub fn separate_all_disjunctive(
    h: &SpModelHandle,
    x: &[f64],
) -> Result<(Vec<DisjunctiveCut>, BTreeMap<&'static str, usize>), CutError> {
    let mut cuts = Vec::new();
    let mut misses: BTreeMap<&'static str, usize> = BTreeMap::new();
    let pairs = tight_fractional_pairs(h, x);
    if pairs.is_empty() {
        *misses.entry("no_tight_fractional_pair").or_default() += 1;
    }
    for (pair, side) in pairs {
        match collect_for_pair(h, x, pair, side) {
            Collection::Found(sets) => {
                if let Some(c) = cut_from_sets(h, x, sets)? {
                    if !cuts.iter().any(|d: &DisjunctiveCut| d.cut == c.cut) {
                        cuts.push(c);
                    }
                }
            }
            Collection::None(NoActiveSets::FirstSearchStalled) => *misses.entry("first_search_stalled").or_default() += 1,
            Collection::None(NoActiveSets::SecondSearchStalled) => {
                *misses.entry("second_search_stalled").or_default() += 1
            }
            Collection::None(NoActiveSets::NoTightFractionalPair) => unreachable!("pair given"),
        }
    }
    Ok((cuts, misses))
}
