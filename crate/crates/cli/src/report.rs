//! Result files written by the solve commands and the tables built from them.

use std::fs;
use std::io::Write;
use std::path::Path;

use platoon::cuts::RootBoundReport;
use platoon::netmodel::{shortest_path, ProblemInstance, Weight};
use platoon::routing::RouteAssignment;
use platoon::rshm::{Termination, TraceRow};
use platoon::scheduling::PlatoonConfiguration;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{Format, TableKind};
use crate::error::{io_err, CliError};

/// Slack above shortest-path fuel before a route counts as a detour.
pub const DETOUR_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "result", rename_all = "snake_case")]
pub enum ResultFile {
    Rdp(RdpRecord),
    Sp(SpRecord),
    Rshm(RshmRecord),
}

impl ResultFile {
    pub fn kind(&self) -> TableKind {
        match self {
            ResultFile::Rdp(_) => TableKind::Rdp,
            ResultFile::Sp(_) => TableKind::Sp,
            ResultFile::Rshm(_) => TableKind::Rshm,
        }
    }

    pub fn routes(&self) -> &RouteAssignment {
        match self {
            ResultFile::Rdp(r) => &r.routes,
            ResultFile::Sp(r) => &r.routes,
            ResultFile::Rshm(r) => &r.routes,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RdpRecord {
    pub instance: String,
    pub vehicles: usize,
    pub fuel_0: f64,
    pub objective: f64,
    pub cpu_s: f64,
    pub nodes: usize,
    pub limit_reached: bool,
    /// Fuel of each vehicle's assigned route, by vehicle id.
    pub route_fuel: Vec<f64>,
    /// Fuel of each vehicle's shortest path, by vehicle id.
    pub shortest_fuel: Vec<f64>,
    pub routes: RouteAssignment,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpRecord {
    pub instance: String,
    pub vehicles: usize,
    pub cuts: String,
    pub contract: bool,
    pub savings: f64,
    pub total_fuel: f64,
    /// Root LP bound of the model as built.
    pub lp_bound: f64,
    /// Root LP bound after cut rounds.
    pub lp_bound_cuts: f64,
    pub nodes: usize,
    pub vars: usize,
    pub cons: usize,
    pub cpu_s: f64,
    pub limit_reached: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<RootBoundReport>,
    pub routes: RouteAssignment,
    pub platoons: PlatoonConfiguration,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RshmRecord {
    pub instance: String,
    pub vehicles: usize,
    pub fuel_0: f64,
    /// Best realized fuel over all iterations.
    pub fuel_cost: f64,
    pub saving_rate: f64,
    pub rel_dev: f64,
    pub iterations: usize,
    pub termination: Termination,
    pub best_iteration: usize,
    pub cpu_s: f64,
    pub limit_hit: bool,
    pub trace: Vec<TraceRow>,
    pub routes: RouteAssignment,
    pub platoons: PlatoonConfiguration,
}

/// Population standard deviation over mean; 0 for an empty trace or a zero mean.
pub fn rel_dev(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if mean.abs() < f64::EPSILON {
        return 0.0;
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}

pub fn saving_rate(fuel_0: f64, fuel_cost: f64) -> f64 {
    if fuel_0 > 0.0 {
        (fuel_0 - fuel_cost) / fuel_0
    } else {
        0.0
    }
}

/// Vehicles whose route burns more than their shortest path.
pub fn detour_vs(route_fuel: &[f64], shortest_fuel: &[f64]) -> usize {
    route_fuel
        .iter()
        .zip(shortest_fuel)
        .filter(|(r, s)| **r > **s + DETOUR_TOL)
        .count()
}

/// Assigned-route and shortest-path fuel per vehicle, in id order.
pub fn route_fuels(inst: &ProblemInstance, routes: &RouteAssignment) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut assigned = Vec::with_capacity(inst.num_vehicles());
    let mut shortest = Vec::with_capacity(inst.num_vehicles());
    for m in &inst.missions {
        assigned.push(routes.route_fuel(&inst.network, m.id));
        shortest.push(shortest_path(&inst.network, m.origin, m.dest, Weight::Fuel)?.fuel);
    }
    Ok((assigned, shortest))
}

fn imp(base: f64, v: f64) -> f64 {
    if base.abs() < 1e-12 {
        0.0
    } else {
        (base - v) / base
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

fn pct(v: f64) -> Value {
    json!(v * 100.0)
}

impl Table {
    fn new(kind: TableKind) -> Table {
        let columns = match kind {
            TableKind::Rdp => vec!["Instance", "Vehicles", "Fuel_0", "Obj", "CPU(s)", "Nodes", "DetourVs"],
            TableKind::Sp => vec![
                "Instance", "Vehicles", "Cuts", "Contract", "Savings", "Fuel", "LPbd", "LPbdCuts", "Nodes", "Vars",
                "Cons", "CPU(s)",
            ],
            TableKind::Bounds => vec![
                "Instance", "Vehicles", "LPbd0", "LPbd1", "LPbd2", "StarRows", "DisjCuts", "Rounds", "IMP1(%)",
                "IMP2(%)", "DisjCPU(s)",
            ],
            TableKind::Rshm => vec![
                "Instance", "Vehicles", "Fuel_0", "Fuel Cost", "Saving Rate(%)", "RelDev(%)", "Iters",
                "Termination", "CPU(s)",
            ],
        };
        Table { columns, rows: Vec::new() }
    }

    /// Builds `kind` from `records`, recomputing derived columns.
    pub fn build(kind: TableKind, records: &[(String, ResultFile)]) -> Result<Table, CliError> {
        let mut t = Table::new(kind);
        for (path, rec) in records {
            let mismatch = || CliError::Schema {
                path: path.into(),
                message: format!("a {:?} result cannot go in the {:?} table", rec.kind(), kind),
            };
            let row = match (kind, rec) {
                (TableKind::Rdp, ResultFile::Rdp(r)) => {
                    if r.route_fuel.len() != r.shortest_fuel.len() {
                        return Err(CliError::Schema {
                            path: path.into(),
                            message: "route_fuel and shortest_fuel differ in length".into(),
                        });
                    }
                    vec![
                        json!(r.instance),
                        json!(r.vehicles),
                        json!(r.fuel_0),
                        json!(r.objective),
                        json!(r.cpu_s),
                        json!(r.nodes),
                        json!(detour_vs(&r.route_fuel, &r.shortest_fuel)),
                    ]
                }
                (TableKind::Sp, ResultFile::Sp(r)) => vec![
                    json!(r.instance),
                    json!(r.vehicles),
                    json!(r.cuts),
                    json!(if r.contract { "on" } else { "off" }),
                    json!(r.savings),
                    json!(r.total_fuel),
                    json!(r.lp_bound),
                    json!(r.lp_bound_cuts),
                    json!(r.nodes),
                    json!(r.vars),
                    json!(r.cons),
                    json!(r.cpu_s),
                ],
                (TableKind::Bounds, ResultFile::Sp(r)) => {
                    let b = r.bounds.as_ref().ok_or_else(|| CliError::Schema {
                        path: path.into(),
                        message: "no root bound study; rerun solve-sp with --bound-study".into(),
                    })?;
                    vec![
                        json!(r.instance),
                        json!(r.vehicles),
                        json!(b.lpbd0),
                        json!(b.lpbd1),
                        json!(b.lpbd2),
                        json!(b.star_rows),
                        json!(b.disjunctive_cuts),
                        json!(b.rounds),
                        pct(imp(b.lpbd0, b.lpbd1)),
                        pct(imp(b.lpbd0, b.lpbd2)),
                        json!(b.disjunctive_time_s),
                    ]
                }
                (TableKind::Rshm, ResultFile::Rshm(r)) => {
                    let zs: Vec<f64> = r.trace.iter().map(|t| t.z).collect();
                    vec![
                        json!(r.instance),
                        json!(r.vehicles),
                        json!(r.fuel_0),
                        json!(r.fuel_cost),
                        pct(saving_rate(r.fuel_0, r.fuel_cost)),
                        pct(rel_dev(&zs)),
                        json!(r.iterations),
                        json!(r.termination.as_str()),
                        json!(r.cpu_s),
                    ]
                }
                _ => return Err(mismatch()),
            };
            t.rows.push(row);
        }
        Ok(t)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(cell))?;
                }
                w.flush().map_err(io_err("<stdout>"))?;
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Object(self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
                    .collect();
                let text = serde_json::to_string_pretty(&json!({ "columns": self.columns, "rows": rows }))?;
                writeln!(out, "{text}").map_err(io_err("<stdout>"))?;
            }
        }
        Ok(())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn read_result(path: &Path) -> Result<ResultFile, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema {
        path: path.into(),
        message: e.to_string(),
    })
}

pub fn write_result(path: &Path, rec: &ResultFile) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(rec)?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// Picks the table for `report` when `--table` is absent.
pub fn infer_kind(records: &[(String, ResultFile)]) -> Result<TableKind, CliError> {
    let first = records.first().map(|(_, r)| r.kind()).ok_or_else(|| CliError::Usage("no result files".into()))?;
    if records.iter().all(|(_, r)| r.kind() == first) {
        Ok(first)
    } else {
        Err(CliError::Usage("result files of different kinds; pass --table".into()))
    }
}
