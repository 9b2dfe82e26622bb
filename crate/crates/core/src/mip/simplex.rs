//! Bounded primal simplex on a dense compact tableau.
//!
//! The tableau holds `B^-1 N` for the current nonbasic columns only, so its
//! footprint is rows x structural columns. Rows whose starting slack is out of
//! bounds get an artificial variable; phase one drives the artificials to zero
//! and drops each one as soon as it leaves the basis. Dantzig pricing is used
//! until the solver stalls on degenerate pivots, after which it switches to
//! Bland's rule for the rest of the phase.

use serde::{Deserialize, Serialize};

use super::model::{LinearModel, ObjSense, Sense};
use super::MipError;

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const HARRIS_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-13;
const FEAS_TOL: f64 = 1e-7;
const DEGENERATE_SWITCH: usize = 30;
const REFRESH_EVERY: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free column parked at zero.
    Free,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective in the model's own sense, offset included. Meaningful only
    /// when `status` is `Optimal`.
    pub objective: f64,
    pub values: Vec<f64>,
    /// Status of each structural column.
    pub basis: Vec<BasisStatus>,
    /// Status of each row's slack.
    pub row_basis: Vec<BasisStatus>,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LpOptions {
    /// Price with Bland's rule from the first pivot.
    pub bland_only: bool,
    /// Hard cap on pivots; zero picks a size-based default.
    pub max_iterations: usize,
}

pub fn solve_lp(model: &LinearModel) -> Result<LpSolution, MipError> {
    let lb: Vec<f64> = model.vars.iter().map(|v| v.lb).collect();
    let ub: Vec<f64> = model.vars.iter().map(|v| v.ub).collect();
    solve_lp_with_bounds(model, &lb, &ub)
}

/// Solves the relaxation of `model` with column bounds replaced by `lb`/`ub`.
pub fn solve_lp_with_bounds(model: &LinearModel, lb: &[f64], ub: &[f64]) -> Result<LpSolution, MipError> {
    model.validate()?;
    let first = solve_inner(model, lb, ub, LpOptions::default());
    match first {
        Ok(sol) => Ok(sol),
        Err(MipError::NumericalFailure(_)) => solve_inner(
            model,
            lb,
            ub,
            LpOptions {
                bland_only: true,
                max_iterations: 0,
            },
        ),
        Err(e) => Err(e),
    }
}

pub fn solve_lp_with_options(model: &LinearModel, opts: LpOptions) -> Result<LpSolution, MipError> {
    model.validate()?;
    let lb: Vec<f64> = model.vars.iter().map(|v| v.lb).collect();
    let ub: Vec<f64> = model.vars.iter().map(|v| v.ub).collect();
    solve_inner(model, &lb, &ub, opts)
}

fn infeasible(model: &LinearModel, lb: &[f64], ub: &[f64]) -> LpSolution {
    LpSolution {
        status: LpStatus::Infeasible,
        objective: f64::NAN,
        values: (0..model.vars.len())
            .map(|j| if lb[j].is_finite() { lb[j] } else { 0.0f64.min(ub[j]) })
            .collect(),
        basis: vec![BasisStatus::AtLower; model.vars.len()],
        row_basis: vec![BasisStatus::Basic; model.cons.len()],
        iterations: 0,
    }
}

fn solve_inner(model: &LinearModel, lb: &[f64], ub: &[f64], opts: LpOptions) -> Result<LpSolution, MipError> {
    if lb.iter().zip(ub).any(|(l, u)| l > u) {
        return Ok(infeasible(model, lb, ub));
    }
    let mut t = Tableau::new(model, lb, ub);
    let cap = if opts.max_iterations > 0 {
        opts.max_iterations
    } else {
        50_000 + 50 * (t.m + t.n)
    };
    t.bland = opts.bland_only;

    if t.num_artificial > 0 {
        t.set_phase_one_costs();
        match t.run(cap)? {
            PhaseEnd::Optimal => {}
            PhaseEnd::Unbounded => {
                return Err(MipError::NumericalFailure("phase one reported unbounded".into()));
            }
        }
        t.refresh_values();
        let infeas: f64 = t.artificial_sum();
        if infeas > FEAS_TOL {
            let mut sol = infeasible(model, lb, ub);
            sol.iterations = t.iterations;
            return Ok(sol);
        }
        for k in t.n + t.m..t.total {
            t.ub[k] = 0.0;
            t.lb[k] = 0.0;
        }
        t.bland = opts.bland_only;
        t.degenerate = 0;
    }

    t.load_objective(model);
    let end = t.run(cap)?;
    t.refresh_values();
    if end == PhaseEnd::Unbounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            objective: match model.obj_sense {
                ObjSense::Minimize => f64::NEG_INFINITY,
                ObjSense::Maximize => f64::INFINITY,
            },
            values: t.x[..t.n].to_vec(),
            basis: t.statuses(0, t.n),
            row_basis: t.statuses(t.n, t.n + t.m),
            iterations: t.iterations,
        });
    }

    let values = t.x[..t.n].to_vec();
    // Verify against the original rows; drift beyond tolerance means the
    // tableau has degraded and the caller should retry more conservatively.
    for (i, c) in model.cons.iter().enumerate() {
        let act = c.activity(&values);
        let scale = 1.0 + c.rhs.abs();
        let bad = match c.sense {
            Sense::Le => act - c.rhs > FEAS_TOL * scale,
            Sense::Ge => c.rhs - act > FEAS_TOL * scale,
            Sense::Eq => (act - c.rhs).abs() > FEAS_TOL * scale,
        };
        if bad {
            return Err(MipError::NumericalFailure(format!(
                "row {i} ({}) violated after solve: activity {act}, rhs {}",
                c.name, c.rhs
            )));
        }
    }
    for j in 0..t.n {
        if values[j] < lb[j] - FEAS_TOL * (1.0 + lb[j].abs()) || values[j] > ub[j] + FEAS_TOL * (1.0 + ub[j].abs()) {
            return Err(MipError::NumericalFailure(format!(
                "column {j} out of bounds after solve: {}",
                values[j]
            )));
        }
    }
    let objective = model.objective_value(&values);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective,
        values,
        basis: t.statuses(0, t.n),
        row_basis: t.statuses(t.n, t.n + t.m),
        iterations: t.iterations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Tableau {
    m: usize,
    n: usize,
    total: usize,
    num_artificial: usize,
    /// Row-major `m x nc` block of `B^-1 N`.
    d: Vec<f64>,
    nc: usize,
    /// `B^-1 b`, kept so basic values can be recomputed exactly.
    rhs: Vec<f64>,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    /// Row currently holding a basic variable, or `usize::MAX`.
    row_of: Vec<usize>,
    dead: Vec<bool>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    x: Vec<f64>,
    cost: Vec<f64>,
    dj: Vec<f64>,
    iterations: usize,
    degenerate: usize,
    bland: bool,
    since_refresh: usize,
}

impl Tableau {
    fn new(model: &LinearModel, lb_in: &[f64], ub_in: &[f64]) -> Tableau {
        let n = model.vars.len();
        let m = model.cons.len();
        let mut lb = lb_in.to_vec();
        let mut ub = ub_in.to_vec();
        let mut x = vec![0.0; n];
        for j in 0..n {
            x[j] = if lb[j].is_finite() {
                lb[j]
            } else if ub[j].is_finite() {
                ub[j]
            } else {
                0.0
            };
        }
        for c in &model.cons {
            let (l, u) = match c.sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lb.push(l);
            ub.push(u);
        }
        x.resize(n + m, 0.0);

        // Decide which rows need an artificial.
        let mut art_rows = Vec::new();
        let mut residual = vec![0.0; m];
        for (i, c) in model.cons.iter().enumerate() {
            let r = c.rhs - c.activity(&x[..n]);
            residual[i] = r;
            if r < lb[n + i] || r > ub[n + i] {
                art_rows.push(i);
            }
        }
        let num_artificial = art_rows.len();
        let total = n + m + num_artificial;
        lb.resize(total, 0.0);
        ub.resize(total, f64::INFINITY);
        x.resize(total, 0.0);

        let mut nonbasic: Vec<usize> = (0..n).collect();
        let mut slack_col = vec![usize::MAX; m];
        for &i in &art_rows {
            slack_col[i] = nonbasic.len();
            nonbasic.push(n + i);
        }
        let nc = nonbasic.len();
        let mut d = vec![0.0; m * nc];
        let mut rhs = vec![0.0; m];
        let mut basic = vec![0; m];
        let mut row_of = vec![usize::MAX; total];
        let mut art_of_row = vec![usize::MAX; m];
        for (k, &i) in art_rows.iter().enumerate() {
            art_of_row[i] = n + m + k;
        }
        for (i, c) in model.cons.iter().enumerate() {
            let g = if art_of_row[i] == usize::MAX {
                basic[i] = n + i;
                x[n + i] = residual[i];
                1.0
            } else {
                let s = n + i;
                let sb = residual[i].clamp(lb[s], ub[s]);
                x[s] = sb;
                let g = if residual[i] - sb >= 0.0 { 1.0 } else { -1.0 };
                let a = art_of_row[i];
                basic[i] = a;
                x[a] = (residual[i] - sb) / g;
                d[i * nc + slack_col[i]] = 1.0 / g;
                g
            };
            for &(j, a) in &c.coeffs {
                d[i * nc + j] = a / g;
            }
            rhs[i] = c.rhs / g;
            row_of[basic[i]] = i;
        }

        Tableau {
            m,
            n,
            total,
            num_artificial,
            d,
            nc,
            rhs,
            basic,
            nonbasic,
            row_of,
            dead: vec![false; nc],
            lb,
            ub,
            x,
            cost: vec![0.0; total],
            dj: vec![0.0; nc],
            iterations: 0,
            degenerate: 0,
            bland: false,
            since_refresh: 0,
        }
    }

    fn set_phase_one_costs(&mut self) {
        self.cost.iter_mut().for_each(|c| *c = 0.0);
        for k in self.n + self.m..self.total {
            self.cost[k] = 1.0;
        }
        self.recompute_dj();
    }

    fn recompute_dj(&mut self) {
        let nc = self.nc;
        for c in 0..nc {
            self.dj[c] = self.cost[self.nonbasic[c]];
        }
        for i in 0..self.m {
            let cb = self.cost[self.basic[i]];
            if cb != 0.0 {
                let row = &self.d[i * nc..(i + 1) * nc];
                for c in 0..nc {
                    self.dj[c] -= cb * row[c];
                }
            }
        }
    }

    fn artificial_sum(&self) -> f64 {
        (self.n + self.m..self.total).map(|k| self.x[k].abs()).sum()
    }

    fn refresh_values(&mut self) {
        let nc = self.nc;
        for i in 0..self.m {
            let row = &self.d[i * nc..(i + 1) * nc];
            let mut v = self.rhs[i];
            for c in 0..nc {
                let a = row[c];
                if a != 0.0 {
                    v -= a * self.x[self.nonbasic[c]];
                }
            }
            self.x[self.basic[i]] = v;
        }
        self.since_refresh = 0;
    }

    fn statuses(&self, from: usize, to: usize) -> Vec<BasisStatus> {
        (from..to)
            .map(|k| {
                if self.row_of[k] != usize::MAX {
                    BasisStatus::Basic
                } else if self.x[k] == self.lb[k] && self.lb[k].is_finite() {
                    BasisStatus::AtLower
                } else if self.x[k] == self.ub[k] && self.ub[k].is_finite() {
                    BasisStatus::AtUpper
                } else {
                    BasisStatus::Free
                }
            })
            .collect()
    }

    /// Picks the entering column and its direction (+1 up, -1 down).
    fn price(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        let mut best_var = usize::MAX;
        for c in 0..self.nc {
            if self.dead[c] {
                continue;
            }
            let k = self.nonbasic[c];
            let (l, u) = (self.lb[k], self.ub[k]);
            if l == u {
                continue;
            }
            let dj = self.dj[c];
            let xv = self.x[k];
            let dir = if dj < -OPT_TOL && xv < u {
                1.0
            } else if dj > OPT_TOL && xv > l {
                -1.0
            } else {
                continue;
            };
            if self.bland {
                if k < best_var {
                    best_var = k;
                    best = Some((c, dir));
                }
            } else if dj.abs() > best_score {
                best_score = dj.abs();
                best = Some((c, dir));
            }
        }
        best
    }

    fn run(&mut self, cap: usize) -> Result<PhaseEnd, MipError> {
        loop {
            if self.iterations >= cap {
                return Err(MipError::NumericalFailure(format!(
                    "simplex iteration cap {cap} reached"
                )));
            }
            let Some((c, dir)) = self.price() else {
                return Ok(PhaseEnd::Optimal);
            };
            let q = self.nonbasic[c];
            let nc = self.nc;

            // Ratio test.
            let flip = self.ub[q] - self.lb[q];
            let leave = if self.bland {
                self.ratio_bland(c, dir)
            } else {
                self.ratio_harris(c, dir)
            };
            let (theta, row) = match leave {
                Some((theta, r)) if theta < flip => (theta, Some(r)),
                _ if flip.is_finite() => (flip, None),
                Some((theta, r)) => (theta, Some(r)),
                None => return Ok(PhaseEnd::Unbounded),
            };
            self.iterations += 1;
            if theta <= 1e-12 {
                self.degenerate += 1;
                if self.degenerate > DEGENERATE_SWITCH {
                    self.bland = true;
                }
            } else {
                self.degenerate = 0;
            }

            // Move along the edge.
            if theta > 0.0 {
                self.x[q] += dir * theta;
                for i in 0..self.m {
                    let a = self.d[i * nc + c];
                    if a != 0.0 {
                        self.x[self.basic[i]] -= a * dir * theta;
                    }
                }
            }
            match row {
                None => {
                    self.x[q] = if dir > 0.0 { self.ub[q] } else { self.lb[q] };
                }
                Some(r) => {
                    let p = self.basic[r];
                    let alpha = self.d[r * nc + c] * dir;
                    self.x[p] = if alpha > 0.0 { self.lb[p] } else { self.ub[p] };
                    if !self.x[p].is_finite() {
                        // free basic variables never block; guard anyway
                        self.x[p] = 0.0;
                    }
                    self.pivot(r, c);
                }
            }
            self.since_refresh += 1;
            if self.since_refresh >= REFRESH_EVERY {
                self.refresh_values();
            }
        }
    }

    fn limit(&self, i: usize, alpha: f64, slack: f64) -> f64 {
        let k = self.basic[i];
        if alpha > 0.0 {
            (self.x[k] - self.lb[k] + slack) / alpha
        } else {
            (self.ub[k] - self.x[k] + slack) / -alpha
        }
    }

    fn ratio_harris(&self, c: usize, dir: f64) -> Option<(f64, usize)> {
        let nc = self.nc;
        let mut theta_max = f64::INFINITY;
        for i in 0..self.m {
            let alpha = self.d[i * nc + c] * dir;
            if alpha.abs() <= PIVOT_TOL {
                continue;
            }
            let t = self.limit(i, alpha, HARRIS_TOL);
            if t < theta_max {
                theta_max = t;
            }
        }
        if !theta_max.is_finite() {
            return None;
        }
        let mut best: Option<(f64, usize)> = None;
        let mut best_alpha = 0.0;
        for i in 0..self.m {
            let alpha = self.d[i * nc + c] * dir;
            if alpha.abs() <= PIVOT_TOL {
                continue;
            }
            let t = self.limit(i, alpha, 0.0);
            if t <= theta_max && alpha.abs() > best_alpha {
                best_alpha = alpha.abs();
                best = Some((t.max(0.0), i));
            }
        }
        best
    }

    fn ratio_bland(&self, c: usize, dir: f64) -> Option<(f64, usize)> {
        let nc = self.nc;
        let mut best: Option<(f64, usize)> = None;
        for i in 0..self.m {
            let alpha = self.d[i * nc + c] * dir;
            if alpha.abs() <= PIVOT_TOL {
                continue;
            }
            let t = self.limit(i, alpha, 0.0).max(0.0);
            best = match best {
                None => Some((t, i)),
                Some((bt, bi)) => {
                    if t < bt - 1e-12 || (t <= bt + 1e-12 && self.basic[i] < self.basic[bi]) {
                        Some((t.min(bt), i))
                    } else {
                        Some((bt, bi))
                    }
                }
            };
        }
        best
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let nc = self.nc;
        let a = self.d[r * nc + c];
        let p = self.basic[r];
        let q = self.nonbasic[c];

        // New pivot row.
        let inv = 1.0 / a;
        {
            let row = &mut self.d[r * nc..(r + 1) * nc];
            for v in row.iter_mut() {
                *v *= inv;
            }
            row[c] = inv;
        }
        self.rhs[r] *= inv;
        let nz: Vec<(usize, f64)> = self.d[r * nc..(r + 1) * nc]
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, v)| (j, *v))
            .collect();
        let rhs_r = self.rhs[r];

        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.d[i * nc + c];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.d[i * nc..(i + 1) * nc];
            row[c] = 0.0;
            for &(j, v) in &nz {
                let nv = row[j] - f * v;
                row[j] = if nv.abs() < DROP_TOL { 0.0 } else { nv };
            }
            self.rhs[i] -= f * rhs_r;
        }
        let f = self.dj[c];
        if f != 0.0 {
            self.dj[c] = 0.0;
            for &(j, v) in &nz {
                self.dj[j] -= f * v;
            }
        }

        self.basic[r] = q;
        self.nonbasic[c] = p;
        self.row_of[q] = r;
        self.row_of[p] = usize::MAX;

        if p >= self.n + self.m {
            // An artificial left the basis: retire its column for good.
            self.dead[c] = true;
            self.x[p] = 0.0;
            self.lb[p] = 0.0;
            self.ub[p] = 0.0;
            for i in 0..self.m {
                self.d[i * nc + c] = 0.0;
            }
            self.dj[c] = 0.0;
        }
    }
}

impl Tableau {
    fn load_objective(&mut self, model: &LinearModel) {
        let sign = match model.obj_sense {
            ObjSense::Minimize => 1.0,
            ObjSense::Maximize => -1.0,
        };
        self.cost.iter_mut().for_each(|c| *c = 0.0);
        for &(j, v) in &model.objective {
            self.cost[j] += sign * v;
        }
        self.recompute_dj();
    }
}
