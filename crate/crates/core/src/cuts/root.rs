use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::mip::{solve_lp, Cut, CutSource, LinearModel, LpSolution, LpStatus, MipError, RootCutHook};
use crate::netmodel::{ProblemInstance, VehicleId};
use crate::routing::RouteAssignment;
use crate::scheduling::{build_sp_for_routes, SpModelHandle, SpOptions};

use super::{separate_all_disjunctive, separate_size_facets, CutError, ACTIVE_TOL};

/// Root cut separation for the scheduling model.
pub struct SpRootCuts<'a> {
    handle: &'a SpModelHandle,
    disjunctive: bool,
    facets: bool,
    /// Tight fractional pairs that yielded no active sets, by reason.
    pub misses: BTreeMap<&'static str, usize>,
    /// Time spent generating disjunctive cuts.
    pub disjunctive_time: Duration,
}

impl<'a> SpRootCuts<'a> {
    pub fn new(handle: &'a SpModelHandle, disjunctive: bool, facets: bool) -> Self {
        SpRootCuts {
            handle,
            disjunctive,
            facets,
            misses: BTreeMap::new(),
            disjunctive_time: Duration::ZERO,
        }
    }

    pub fn separate_point(&mut self, x: &[f64]) -> Result<Vec<Cut>, CutError> {
        let mut out = Vec::new();
        if self.disjunctive {
            let t = Instant::now();
            let (cuts, misses) = separate_all_disjunctive(self.handle, x)?;
            self.disjunctive_time += t.elapsed();
            for (k, n) in misses {
                *self.misses.entry(k).or_default() += n;
            }
            out.extend(cuts.into_iter().map(|c| c.cut));
        }
        if self.facets {
            let h = self.handle;
            for (s, seg) in h.routes.segments.iter().enumerate() {
                let col = |u: VehicleId, v: VehicleId| h.follow.get(&(u, v, s)).copied();
                let tag = seg.label(s);
                for r in separate_size_facets(&seg.vehicles, h.params.lambda, x, &col, &tag, ACTIVE_TOL) {
                    out.push(Cut {
                        coeffs: r.coeffs,
                        sense: r.sense,
                        rhs: r.rhs,
                        source: CutSource::SizeFacet,
                    });
                }
            }
        }
        Ok(out)
    }
}

impl RootCutHook for SpRootCuts<'_> {
    fn separate(&mut self, _model: &LinearModel, lp: &LpSolution, _round: usize) -> Result<Vec<Cut>, MipError> {
        self.separate_point(&lp.values).map_err(|e| MipError::Hook(e.to_string()))
    }
}

/// Root LP bounds of the scheduling model under growing cut families.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RootBoundReport {
    /// No star-partition rows, no cuts.
    pub lpbd0: f64,
    /// Star-partition rows.
    pub lpbd1: f64,
    /// Star-partition rows and disjunctive cut rounds.
    pub lpbd2: f64,
    pub star_rows: usize,
    pub disjunctive_cuts: usize,
    pub rounds: usize,
    /// `(lpbd0 - lpbd1) / lpbd0`, 0 when `lpbd0` is 0.
    pub imp1: f64,
    /// `(lpbd0 - lpbd2) / lpbd0`, 0 when `lpbd0` is 0.
    pub imp2: f64,
    pub disjunctive_time_s: f64,
    pub misses: BTreeMap<String, usize>,
}

fn lp_bound(model: &LinearModel) -> Result<LpSolution, CutError> {
    let lp = solve_lp(model)?;
    if lp.status != LpStatus::Optimal {
        return Err(CutError::Cglp(format!("scheduling root LP is {:?}", lp.status)));
    }
    Ok(lp)
}

fn rel(base: f64, v: f64) -> f64 {
    if base.abs() < 1e-12 {
        0.0
    } else {
        (base - v) / base
    }
}

/// Solves the scheduling root relaxation without and with star-partition
/// rows, then runs up to `max_rounds` rounds of disjunctive cuts.
pub fn root_bound_study(
    inst: &ProblemInstance,
    routes: &RouteAssignment,
    contract_edges: bool,
    max_rounds: usize,
) -> Result<RootBoundReport, CutError> {
    let plain = SpOptions {
        star_partition: false,
        ..Default::default()
    };
    let h0 = build_sp_for_routes(inst, routes, contract_edges, &plain)?;
    let lpbd0 = lp_bound(&h0.model)?.objective;
    let h1 = build_sp_for_routes(inst, routes, contract_edges, &SpOptions::default())?;
    let star_rows = h1.model.num_cons() - h0.model.num_cons();
    let mut lp = lp_bound(&h1.model)?;
    let lpbd1 = lp.objective;

    let mut work = h1.model.clone();
    let mut sep = SpRootCuts::new(&h1, true, false);
    let mut n_cuts = 0;
    let mut rounds = 0;
    for _ in 0..max_rounds {
        let cuts = sep.separate_point(&lp.values)?;
        if cuts.is_empty() {
            break;
        }
        rounds += 1;
        for c in &cuts {
            n_cuts += 1;
            work.add_constraint(format!("disj{n_cuts}"), c.coeffs.clone(), c.sense, c.rhs);
        }
        lp = lp_bound(&work)?;
    }
    Ok(RootBoundReport {
        lpbd0,
        lpbd1,
        lpbd2: lp.objective,
        star_rows,
        disjunctive_cuts: n_cuts,
        rounds,
        imp1: rel(lpbd0, lpbd1),
        imp2: rel(lpbd0, lp.objective),
        disjunctive_time_s: sep.disjunctive_time.as_secs_f64(),
        misses: sep.misses.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    })
}
