use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::state::{update_cost_table, Incumbent, IterationRecord, RshmState};
use super::{RshmError, SubproblemError};
use crate::netmodel::ProblemInstance;
use crate::routing::solve_rdp;
use crate::scheduling::{solve_sp, SpSolveOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Two consecutive iterations produced the same routes.
    RepeatConsecutive,
    /// Some route assignment was produced `freq_threshold` times.
    FreqThreshold,
    TimeLimit,
    IterCap,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::RepeatConsecutive => "repeat_consecutive",
            Termination::FreqThreshold => "freq_threshold",
            Termination::TimeLimit => "time_limit",
            Termination::IterCap => "iter_cap",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct RshmOptions {
    pub freq_threshold: usize,
    /// Wall-clock limit for each routing or scheduling solve.
    pub per_solve: Option<Duration>,
    /// Wall-clock limit for the whole run, checked between iterations.
    pub total: Option<Duration>,
    /// Hard cap on iterations; `None` runs until a repeat.
    pub iter_cap: Option<usize>,
    /// Scheduling solve settings (contraction, cuts). Its time limit is
    /// overridden by `per_solve`.
    pub sp: SpSolveOptions,
}

impl Default for RshmOptions {
    fn default() -> Self {
        RshmOptions {
            freq_threshold: 3,
            per_solve: Some(Duration::from_secs(600)),
            total: Some(Duration::from_secs(3600)),
            iter_cap: None,
            sp: SpSolveOptions::default(),
        }
    }
}

/// One row of the iteration trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub z: f64,
    pub rdp_objective: f64,
    pub runtime_s: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RshmResult {
    pub best: Incumbent,
    pub z_hat: f64,
    /// Shortest-path fuel with nobody platooning.
    pub fuel_0: f64,
    pub trace: Vec<TraceRow>,
    pub termination: Termination,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub state: RshmState,
}

impl RshmResult {
    /// Iteration trace as CSV with a header row.
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("iteration,z,rdp_objective,runtime_s\n");
        for r in &self.trace {
            s.push_str(&format!("{},{},{},{}\n", r.iteration, r.z, r.rdp_objective, r.runtime_s));
        }
        s
    }

    pub fn saving_rate(&self) -> f64 {
        if self.fuel_0 > 0.0 {
            (self.fuel_0 - self.z_hat) / self.fuel_0
        } else {
            0.0
        }
    }
}

/// Fuel of every vehicle on its shortest fuel path, alone.
pub fn fuel_0(inst: &ProblemInstance) -> Result<f64, RshmError> {
    inst.fuel_zero().map_err(|e| RshmError::SubproblemFailure {
        iteration: 0,
        source: SubproblemError::Routing(e.into()),
    })
}

fn remaining(start: Instant, total: Option<Duration>) -> Option<Duration> {
    total.map(|t| t.saturating_sub(start.elapsed()))
}

fn limit(per: Option<Duration>, left: Option<Duration>) -> Option<Duration> {
    match (per, left) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Alternates routing and scheduling, feeding realized platoon costs back
/// into the next routing objective, until routes repeat back to back, some
/// assignment recurs `freq_threshold` times, or a limit is hit.
pub fn run(inst: &ProblemInstance, opts: &RshmOptions) -> Result<RshmResult, RshmError> {
    if opts.freq_threshold == 0 {
        return Err(RshmError::Invalid("freq_threshold must be positive".into()));
    }
    let start = Instant::now();
    let fuel_0 = fuel_0(inst)?;
    let mut state = RshmState::new(&inst.network);
    let termination = loop {
        let n = state.n + 1;
        if opts.iter_cap.is_some_and(|cap| n > cap) {
            break Termination::IterCap;
        }
        let left = remaining(start, opts.total);
        if left.is_some_and(|d| d.is_zero()) {
            break Termination::TimeLimit;
        }
        let table = &state.tables[&n];

        let t0 = Instant::now();
        let rdp = solve_rdp(inst, table, n, limit(opts.per_solve, left)).map_err(|e| RshmError::SubproblemFailure {
            iteration: n,
            source: SubproblemError::Routing(e),
        })?;
        let rdp_time = t0.elapsed();

        let t1 = Instant::now();
        let mut sp_opts = opts.sp.clone();
        sp_opts.time_limit = limit(opts.per_solve, remaining(start, opts.total));
        let sp = solve_sp(inst, &rdp.routes, &sp_opts).map_err(|e| RshmError::SubproblemFailure {
            iteration: n,
            source: SubproblemError::Scheduling(e),
        })?;
        let sp_time = t1.elapsed();

        state.push(IterationRecord {
            iteration: n,
            route_key: rdp.routes.canonical_key(&inst.network),
            routes: rdp.routes,
            platoons: sp.platoons,
            z: sp.total_fuel,
            rdp_objective: rdp.objective,
            rdp_time_s: rdp_time.as_secs_f64(),
            sp_time_s: sp_time.as_secs_f64(),
            limit_hit: rdp.solution.limit_reached || sp.solution.limit_reached,
        });
        let next = update_cost_table(&state, inst, n)?;
        state.tables.insert(n + 1, next);

        if state.repeated() {
            break Termination::RepeatConsecutive;
        }
        if state.max_freq() >= opts.freq_threshold {
            break Termination::FreqThreshold;
        }
    };
    let best = state
        .best
        .clone()
        .ok_or_else(|| RshmError::Invalid(format!("stopped by {termination} before any iteration")))?;
    let trace = state
        .records
        .iter()
        .map(|r| TraceRow {
            iteration: r.iteration,
            z: r.z,
            rdp_objective: r.rdp_objective,
            runtime_s: r.rdp_time_s + r.sp_time_s,
        })
        .collect();
    Ok(RshmResult {
        z_hat: best.z,
        best,
        fuel_0,
        trace,
        termination,
        iterations: state.n,
        wall_time_s: start.elapsed().as_secs_f64(),
        state,
    })
}
