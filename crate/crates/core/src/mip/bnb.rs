//! Best-bound branch-and-bound over the embedded simplex.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::model::{Cut, CutSource, LinearModel, ObjSense};
use super::simplex::{solve_lp_with_bounds, LpSolution, LpStatus};
use super::MipError;

pub const INT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MipStatus {
    Optimal,
    /// A limit was hit while an incumbent was available.
    Feasible,
    Infeasible,
    /// A limit was hit before any incumbent was found.
    TimeLimit,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CutRoundLog {
    pub round: usize,
    pub source: CutSource,
    pub violation: f64,
    pub nnz: usize,
    pub bound_before: f64,
    pub bound_after: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MipSolution {
    pub status: MipStatus,
    pub values: Option<Vec<f64>>,
    /// Incumbent objective in the model's sense; NaN without an incumbent.
    pub objective: f64,
    /// Proven bound in the model's sense.
    pub bound: f64,
    pub gap: f64,
    /// LP relaxations solved, root included.
    pub nodes: usize,
    pub wall_time: Duration,
    pub limit_reached: bool,
    /// Root LP bound before any hook cuts.
    pub root_bound: f64,
    /// Root LP bound after the last cut round.
    pub root_bound_after_cuts: f64,
    pub cut_log: Vec<CutRoundLog>,
    /// Cuts appended at the root, in order.
    pub root_cuts: Vec<Cut>,
}

impl MipSolution {
    pub fn has_incumbent(&self) -> bool {
        self.values.is_some()
    }
}

/// Called with each fractional root LP solution; the returned cuts are
/// appended to the model and the root is re-solved.
pub trait RootCutHook {
    fn separate(&mut self, model: &LinearModel, lp: &LpSolution, round: usize) -> Result<Vec<Cut>, MipError>;
}

#[derive(Clone, Debug)]
pub struct MipOptions {
    pub rel_gap: f64,
    pub time_limit: Option<Duration>,
    pub node_limit: Option<usize>,
    pub max_cut_rounds: usize,
    /// A known feasible point, used as the starting incumbent.
    pub initial_incumbent: Option<Vec<f64>>,
}

impl Default for MipOptions {
    fn default() -> Self {
        MipOptions {
            rel_gap: 1e-9,
            time_limit: None,
            node_limit: None,
            max_cut_rounds: 20,
            initial_incumbent: None,
        }
    }
}

pub fn gap(incumbent: f64, bound: f64) -> f64 {
    (incumbent - bound).abs() / incumbent.abs().max(1e-10)
}

pub fn solve_mip(model: &LinearModel, opts: &MipOptions) -> Result<MipSolution, MipError> {
    solve_mip_with_hook(model, opts, None)
}

struct Node {
    id: usize,
    /// Bound in minimization form.
    bound: f64,
    changes: Vec<(usize, f64, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap: the best node is the one with the smallest
    // bound, then the smallest id.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

fn most_fractional(ints: &[usize], x: &[f64]) -> Option<usize> {
    let mut best = None;
    let mut best_dist = f64::INFINITY;
    for &j in ints {
        let f = x[j] - x[j].floor();
        if f <= INT_TOL || f >= 1.0 - INT_TOL {
            continue;
        }
        let dist = (f - 0.5).abs();
        if dist < best_dist - 1e-12 {
            best_dist = dist;
            best = Some(j);
        }
    }
    best
}

fn rounded(ints: &[usize], x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    for &j in ints {
        v[j] = v[j].round();
    }
    v
}

pub fn solve_mip_with_hook(
    model: &LinearModel,
    opts: &MipOptions,
    hook: Option<&mut dyn RootCutHook>,
) -> Result<MipSolution, MipError> {
    model.validate()?;
    let start = Instant::now();
    let sign = match model.obj_sense {
        ObjSense::Minimize => 1.0,
        ObjSense::Maximize => -1.0,
    };
    let ints = model.integer_vars();
    let mut work = model.clone();
    let root_lb: Vec<f64> = model.vars.iter().map(|v| v.lb).collect();
    let root_ub: Vec<f64> = model.vars.iter().map(|v| v.ub).collect();

    let mut incumbent: Option<Vec<f64>> = None;
    let mut inc_val = f64::INFINITY; // minimization form
    if let Some(x0) = &opts.initial_incumbent {
        if x0.len() == model.vars.len() && model.is_feasible(x0, 1e-6) && ints.iter().all(|&j| (x0[j] - x0[j].round()).abs() <= INT_TOL) {
            inc_val = sign * model.objective_value(x0);
            incumbent = Some(x0.clone());
        }
    }

    let mut nodes = 0usize;
    let mut cut_log = Vec::new();
    let mut root_cuts = Vec::new();

    let finish = |status: MipStatus,
                  incumbent: Option<Vec<f64>>,
                  inc_val: f64,
                  bound_min: f64,
                  nodes: usize,
                  limit_reached: bool,
                  root: (f64, f64),
                  cut_log: Vec<CutRoundLog>,
                  root_cuts: Vec<Cut>| {
        let objective = if incumbent.is_some() { sign * inc_val } else { f64::NAN };
        let bound = sign * bound_min;
        let g = if incumbent.is_some() {
            if bound_min >= inc_val {
                0.0
            } else {
                gap(inc_val, bound_min)
            }
        } else {
            f64::INFINITY
        };
        MipSolution {
            status,
            values: incumbent,
            objective,
            bound,
            gap: g,
            nodes,
            wall_time: start.elapsed(),
            limit_reached,
            root_bound: root.0,
            root_bound_after_cuts: root.1,
            cut_log,
            root_cuts,
        }
    };

    // Root with cut rounds.
    let mut root = solve_lp_with_bounds(&work, &root_lb, &root_ub)?;
    nodes += 1;
    match root.status {
        LpStatus::Infeasible => {
            return Ok(finish(MipStatus::Infeasible, None, inc_val, f64::INFINITY, nodes, false, (f64::NAN, f64::NAN), cut_log, root_cuts));
        }
        LpStatus::Unbounded => {
            return Err(MipError::NumericalFailure("LP relaxation is unbounded".into()));
        }
        LpStatus::Optimal => {}
    }
    let root_bound = root.objective;
    if let Some(h) = hook {
        for round in 1..=opts.max_cut_rounds {
            if most_fractional(&ints, &root.values).is_none() {
                break;
            }
            if opts.time_limit.is_some_and(|tl| start.elapsed() >= tl) {
                break;
            }
            let cuts = h.separate(&work, &root, round)?;
            if cuts.is_empty() {
                break;
            }
            let before = root.objective;
            let point = root.values.clone();
            for cut in &cuts {
                let name = format!("cut{}", root_cuts.len() + 1);
                work.add_constraint(name, cut.coeffs.clone(), cut.sense, cut.rhs);
                root_cuts.push(cut.clone());
            }
            root = solve_lp_with_bounds(&work, &root_lb, &root_ub)?;
            if root.status != LpStatus::Optimal {
                return Err(MipError::NumericalFailure(format!(
                    "root LP became {:?} after cut round {round}",
                    root.status
                )));
            }
            for cut in &cuts {
                cut_log.push(CutRoundLog {
                    round,
                    source: cut.source,
                    violation: cut.violation(&point),
                    nnz: cut.coeffs.len(),
                    bound_before: before,
                    bound_after: root.objective,
                });
            }
        }
    }
    let root_pair = (root_bound, root.objective);

    let mut heap = BinaryHeap::new();
    let mut next_id = 1usize;
    let mut limit_reached = false;
    // Process the root solution directly, then children from the heap.
    let mut pending: Option<(Vec<(usize, f64, f64)>, LpSolution)> = Some((Vec::new(), root));
    let mut global_bound;

    loop {
        if let Some((changes, lp)) = pending.take() {
            let val = sign * lp.objective;
            if !inc_val.is_finite() || val < inc_val - 1e-9 * inc_val.abs().max(1.0) {
                match most_fractional(&ints, &lp.values) {
                    None => {
                        inc_val = val;
                        incumbent = Some(rounded(&ints, &lp.values));
                    }
                    Some(j) => {
                        let xj = lp.values[j];
                        let lo = xj.floor();
                        let mut down = changes.clone();
                        down.push((j, f64::NEG_INFINITY, lo));
                        let mut up = changes;
                        up.push((j, lo + 1.0, f64::INFINITY));
                        heap.push(Node { id: next_id, bound: val, changes: down });
                        heap.push(Node { id: next_id + 1, bound: val, changes: up });
                        next_id += 2;
                    }
                }
            }
        }

        // Drop nodes that cannot improve.
        global_bound = heap.peek().map_or(inc_val, |n| n.bound.min(inc_val));
        if incumbent.is_some() && (global_bound >= inc_val || gap(inc_val, global_bound) <= opts.rel_gap) {
            break;
        }
        let Some(node) = heap.pop() else {
            break;
        };
        if node.bound >= inc_val {
            continue;
        }
        if opts.time_limit.is_some_and(|tl| start.elapsed() >= tl) || opts.node_limit.is_some_and(|nl| nodes >= nl) {
            heap.push(node);
            limit_reached = true;
            break;
        }
        let mut lb = root_lb.clone();
        let mut ub = root_ub.clone();
        for &(j, l, u) in &node.changes {
            if l.is_finite() {
                lb[j] = lb[j].max(l);
            }
            if u.is_finite() {
                ub[j] = ub[j].min(u);
            }
        }
        let lp = solve_lp_with_bounds(&work, &lb, &ub)?;
        nodes += 1;
        match lp.status {
            LpStatus::Optimal => pending = Some((node.changes, lp)),
            LpStatus::Infeasible => {}
            LpStatus::Unbounded => {
                return Err(MipError::NumericalFailure("node LP is unbounded".into()));
            }
        }
    }

    global_bound = heap.peek().map_or(inc_val, |n| n.bound.min(inc_val));
    let status = match (&incumbent, limit_reached) {
        (Some(_), false) => MipStatus::Optimal,
        (Some(_), true) => MipStatus::Feasible,
        (None, false) => MipStatus::Infeasible,
        (None, true) => MipStatus::TimeLimit,
    };
    Ok(finish(status, incumbent, inc_val, global_bound, nodes, limit_reached, root_pair, cut_log, root_cuts))
}
