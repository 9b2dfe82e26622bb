use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use platoon::cuts::root_bound_study;
use platoon::mip::{write_model, ModelFormat};
use platoon::netmodel::{
    generate_distributed, generate_two_cluster, load_instance, save_instance, spread_nodes, synthetic_grid,
    DistributedConfig, GenerationMeta, GridConfig, ProblemInstance, RoadNetwork, SavingsParams, TwoClusterConfig,
};
use platoon::routing::{build_rdp, solve_rdp, EdgeCostTable, RouteAssignment};
use platoon::rshm::{self, RshmOptions, Termination};
use platoon::scheduling::{build_sp_for_routes, solve_sp, CutMode, SpSolveOptions};
use serde_json::json;

use crate::args::*;
use crate::error::{exit, io_err, CliError};
use crate::report::{
    infer_kind, read_result, rel_dev, route_fuels, write_result, RdpRecord, ResultFile, RshmRecord, SpRecord, Table,
};

/// Shared output settings.
pub struct Ctx<'a> {
    pub format: Format,
    pub no_timing: bool,
    pub out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn time(&self, secs: f64) -> f64 {
        if self.no_timing {
            0.0
        } else {
            secs
        }
    }
}

pub fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    let mut ctx = Ctx {
        format: cli.format,
        no_timing: cli.no_timing,
        out,
    };
    match cli.command {
        Command::Gen(a) => gen(&mut ctx, &a),
        Command::SolveRdp(a) => solve_rdp_cmd(&mut ctx, &a),
        Command::SolveSp(a) => solve_sp_cmd(&mut ctx, &a),
        Command::Rshm(a) => rshm_cmd(&mut ctx, &a),
        Command::ExportMps(a) => export(&mut ctx, &a),
        Command::Report(a) => report(&mut ctx, &a),
    }
}

fn status(limit_hit: bool) -> u8 {
    if limit_hit {
        exit::LIMIT
    } else {
        exit::OK
    }
}

fn seconds(flag: &str, v: f64) -> Result<Duration, CliError> {
    Duration::try_from_secs_f64(v).map_err(|_| CliError::Usage(format!("--{flag} must be a nonnegative number of seconds")))
}

fn cut_mode(s: &str) -> Result<CutMode, CliError> {
    CutMode::parse(s)
        .ok_or_else(|| CliError::Usage(format!("unknown cut mode {s:?}; use none, star, star+disj or star+disj+facets")))
}

fn sp_options(contract: Toggle, cuts: &str) -> Result<SpSolveOptions, CliError> {
    let mut opts = SpSolveOptions {
        contract: contract.is_on(),
        ..Default::default()
    };
    cut_mode(cuts)?.apply(&mut opts);
    Ok(opts)
}

fn read_instance(path: &Path) -> Result<ProblemInstance, CliError> {
    load_instance(path).map_err(|source| CliError::Instance {
        path: path.into(),
        source,
    })
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Replaces `key` in `template`; several outputs need the placeholder.
fn expand(template: &Path, key: &str, value: &str, many: bool) -> Result<PathBuf, CliError> {
    let t = template.to_string_lossy();
    if !t.contains(key) {
        return if many {
            Err(CliError::Usage(format!("{} needs a {key} placeholder for several outputs", template.display())))
        } else {
            Ok(template.to_path_buf())
        };
    }
    Ok(PathBuf::from(t.replace(key, value)))
}

/// Maps `f` over `items` on up to `jobs` threads, keeping input order.
fn par_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let jobs = jobs.clamp(1, items.len().max(1));
    if jobs == 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= items.len() {
                    break;
                }
                let r = f(&items[k]);
                *slots[k].lock().expect("slot lock") = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("slot lock").expect("every item mapped"))
        .collect()
}

fn gen_network(a: &GenArgs, seed: u64) -> Result<RoadNetwork, CliError> {
    if let Some(p) = &a.network {
        return Ok(read_instance(p)?.network);
    }
    let cfg = GridConfig {
        rows: a.rows,
        cols: a.cols,
        spacing_km: a.spacing_km,
        jitter_km: a.jitter_km,
        diagonals: a.diagonals.is_on(),
        ..Default::default()
    };
    Ok(synthetic_grid(&cfg, seed)?)
}

fn gen_one(a: &GenArgs, params: SavingsParams, seed: u64) -> Result<ProblemInstance, CliError> {
    let net = gen_network(a, seed)?;
    let inst = match a.model {
        GenModel::SyntheticNet => ProblemInstance::new(
            net,
            Vec::new(),
            params,
            Some(GenerationMeta {
                model: "synthetic-net".into(),
                seed,
                ..Default::default()
            }),
        )?,
        GenModel::Distributed => {
            let cfg = DistributedConfig {
                cities: spread_nodes(&net, a.cities, seed),
                urban_radius_km: a.urban_radius_km,
                urban_share: a.urban_share,
                flexibility: a.flex,
                params,
            };
            generate_distributed(&net, a.n, seed, &cfg)?
        }
        GenModel::TwoCluster => {
            let cfg = TwoClusterConfig {
                flexibility: a.flex,
                params,
                ..Default::default()
            };
            generate_two_cluster(&net, a.n, seed, &cfg)?
        }
    };
    Ok(inst)
}

fn gen(ctx: &mut Ctx, a: &GenArgs) -> Result<u8, CliError> {
    let params = SavingsParams {
        sigma_l: a.params.sigma_l,
        sigma_f: a.params.sigma_f,
        lambda: a.params.lambda,
    };
    params.validate()?;
    if a.count == 0 {
        return Err(CliError::Usage("--count must be positive".into()));
    }
    let seeds: Vec<u64> = (0..a.count as u64).map(|k| a.seed + k).collect();
    let paths = seeds
        .iter()
        .map(|s| expand(&a.out, "{seed}", &s.to_string(), a.count > 1))
        .collect::<Result<Vec<_>, _>>()?;
    let jobs: Vec<(u64, PathBuf)> = seeds.into_iter().zip(paths).collect();
    let done = par_map(&jobs, a.jobs, |(seed, path)| -> Result<_, CliError> {
        let inst = gen_one(a, params, *seed)?;
        save_instance(&inst, path).map_err(|source| CliError::Instance {
            path: path.clone(),
            source,
        })?;
        Ok((inst.num_vehicles(), inst.network.num_nodes(), inst.network.num_edges()))
    });
    let mut table = Table {
        columns: vec!["File", "Seed", "Vehicles", "Nodes", "Edges"],
        rows: Vec::new(),
    };
    for ((seed, path), r) in jobs.iter().zip(done) {
        let (v, n, e) = r?;
        table.rows.push(vec![json!(path.display().to_string()), json!(seed), json!(v), json!(n), json!(e)]);
    }
    table.write(ctx.format, ctx.out)?;
    Ok(exit::OK)
}

fn solve_rdp_cmd(ctx: &mut Ctx, a: &RdpArgs) -> Result<u8, CliError> {
    let inst = read_instance(&a.instance)?;
    let limit = a.time_limit.map(|t| seconds("time-limit", t)).transpose()?;
    let out = solve_rdp(&inst, &EdgeCostTable::initial(&inst.network), 1, limit)?;
    let (route_fuel, shortest_fuel) = route_fuels(&inst, &out.routes)?;
    let rec = RdpRecord {
        instance: stem(&a.instance),
        vehicles: inst.num_vehicles(),
        fuel_0: inst.fuel_zero()?,
        objective: out.objective,
        cpu_s: ctx.time(out.solution.wall_time.as_secs_f64()),
        nodes: out.solution.nodes,
        limit_reached: out.solution.limit_reached,
        route_fuel,
        shortest_fuel,
        routes: out.routes,
    };
    let limit_hit = rec.limit_reached;
    finish(ctx, TableKind::Rdp, vec![(a.instance.display().to_string(), ResultFile::Rdp(rec))], a.out.as_deref())?;
    Ok(status(limit_hit))
}

/// Routes from a result file or a bare route JSON, or the routing model's
/// optimum when no file is given.
fn load_routes(inst: &ProblemInstance, path: Option<&Path>) -> Result<RouteAssignment, CliError> {
    let routes = match path {
        None => solve_rdp(inst, &EdgeCostTable::initial(&inst.network), 1, None)?.routes,
        Some(p) => {
            let text = fs::read_to_string(p).map_err(io_err(p))?;
            match serde_json::from_str::<ResultFile>(&text) {
                Ok(r) => r.routes().clone(),
                Err(_) => serde_json::from_str::<RouteAssignment>(&text).map_err(|e| CliError::Schema {
                    path: p.into(),
                    message: format!("neither a result file nor a route assignment: {e}"),
                })?,
            }
        }
    };
    for m in &inst.missions {
        let need = routes.route_time(&inst.network, m.id);
        if need > m.t_latest - m.t_earliest + 1e-9 {
            return Err(CliError::Infeasible(format!(
                "vehicle {}: route takes {need} h but the window is {} h",
                m.id,
                m.t_latest - m.t_earliest
            )));
        }
    }
    routes.validate(inst)?;
    Ok(routes)
}

fn solve_sp_cmd(ctx: &mut Ctx, a: &SpArgs) -> Result<u8, CliError> {
    let inst = read_instance(&a.instance)?;
    let mut opts = sp_options(a.contract, &a.cuts)?;
    opts.time_limit = a.time_limit.map(|t| seconds("time-limit", t)).transpose()?;
    opts.max_cut_rounds = a.max_rounds;
    let routes = load_routes(&inst, a.routes.as_deref())?;
    let out = solve_sp(&inst, &routes, &opts)?;
    let bounds = if a.bound_study {
        let mut b = root_bound_study(&inst, &routes, opts.contract, a.max_rounds)?;
        b.disjunctive_time_s = ctx.time(b.disjunctive_time_s);
        Some(b)
    } else {
        None
    };
    let rec = SpRecord {
        instance: stem(&a.instance),
        vehicles: inst.num_vehicles(),
        cuts: cut_mode(&a.cuts)?.as_str().into(),
        contract: opts.contract,
        savings: out.savings,
        total_fuel: out.total_fuel,
        lp_bound: out.solution.root_bound,
        lp_bound_cuts: out.solution.root_bound_after_cuts,
        nodes: out.solution.nodes,
        vars: out.handle.model.num_vars(),
        cons: out.handle.model.num_cons(),
        cpu_s: ctx.time(out.solution.wall_time.as_secs_f64()),
        limit_reached: out.solution.limit_reached,
        bounds,
        routes,
        platoons: out.platoons,
    };
    let limit_hit = rec.limit_reached;
    let kind = if a.bound_study { TableKind::Bounds } else { TableKind::Sp };
    finish(ctx, kind, vec![(a.instance.display().to_string(), ResultFile::Sp(rec))], a.out.as_deref())?;
    Ok(status(limit_hit))
}

fn rshm_one(a: &RshmArgs, opts: &RshmOptions, no_timing: bool, path: &Path) -> Result<RshmRecord, CliError> {
    let inst = read_instance(path)?;
    let mut r = rshm::run(&inst, opts)?;
    if no_timing {
        r.trace.iter_mut().for_each(|t| t.runtime_s = 0.0);
        r.wall_time_s = 0.0;
    }
    let many = a.instance.len() > 1;
    if let Some(t) = &a.trace {
        let p = expand(t, "{stem}", &stem(path), many)?;
        fs::write(&p, r.trace_csv()).map_err(io_err(p))?;
    }
    let zs: Vec<f64> = r.trace.iter().map(|t| t.z).collect();
    Ok(RshmRecord {
        instance: stem(path),
        vehicles: inst.num_vehicles(),
        fuel_0: r.fuel_0,
        fuel_cost: r.z_hat,
        saving_rate: r.saving_rate(),
        rel_dev: rel_dev(&zs),
        iterations: r.iterations,
        termination: r.termination,
        best_iteration: r.best.iteration,
        cpu_s: r.wall_time_s,
        limit_hit: r.state.records.iter().any(|rec| rec.limit_hit),
        trace: r.trace,
        routes: r.best.routes,
        platoons: r.best.platoons,
    })
}

fn rshm_cmd(ctx: &mut Ctx, a: &RshmArgs) -> Result<u8, CliError> {
    let opts = RshmOptions {
        freq_threshold: a.freq_threshold,
        per_solve: Some(seconds("per-solve", a.per_solve)?),
        total: Some(seconds("total", a.total)?),
        iter_cap: a.iter_cap,
        sp: sp_options(a.contract, &a.cuts)?,
    };
    let many = a.instance.len() > 1;
    if let Some(o) = &a.out {
        expand(o, "{stem}", "", many)?;
    }
    let no_timing = ctx.no_timing;
    let results = par_map(&a.instance, a.jobs, |p| rshm_one(a, &opts, no_timing, p));
    let mut records = Vec::new();
    let mut limit_hit = false;
    for (path, r) in a.instance.iter().zip(results) {
        let rec = r?;
        limit_hit |= rec.limit_hit || matches!(rec.termination, Termination::TimeLimit | Termination::IterCap);
        if let Some(o) = &a.out {
            let p = expand(o, "{stem}", &stem(path), many)?;
            write_result(&p, &ResultFile::Rshm(rec.clone()))?;
        }
        records.push((path.display().to_string(), ResultFile::Rshm(rec)));
    }
    Table::build(TableKind::Rshm, &records)?.write(ctx.format, ctx.out)?;
    Ok(status(limit_hit))
}

fn export(ctx: &mut Ctx, a: &ExportArgs) -> Result<u8, CliError> {
    let inst = read_instance(&a.instance)?;
    let model = match a.model {
        ModelKind::Rdp => build_rdp(&inst, &EdgeCostTable::initial(&inst.network), 1)?.model,
        ModelKind::Sp => {
            let opts = sp_options(a.contract, &a.cuts)?;
            let routes = load_routes(&inst, a.routes.as_deref())?;
            build_sp_for_routes(&inst, &routes, opts.contract, &opts.model)?.model
        }
    };
    let format = match a.file_format {
        FileFormat::Mps => ModelFormat::Mps,
        FileFormat::Lp => ModelFormat::Lp,
    };
    write_model(&model, format, &a.out)?;
    let table = Table {
        columns: vec!["File", "Vars", "Cons"],
        rows: vec![vec![json!(a.out.display().to_string()), json!(model.num_vars()), json!(model.num_cons())]],
    };
    table.write(ctx.format, ctx.out)?;
    Ok(exit::OK)
}

fn report(ctx: &mut Ctx, a: &ReportArgs) -> Result<u8, CliError> {
    let records = a
        .files
        .iter()
        .map(|p| Ok((p.display().to_string(), read_result(p)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let kind = match a.table {
        Some(k) => k,
        None => infer_kind(&records)?,
    };
    Table::build(kind, &records)?.write(ctx.format, ctx.out)?;
    Ok(exit::OK)
}

fn finish(ctx: &mut Ctx, kind: TableKind, records: Vec<(String, ResultFile)>, out: Option<&Path>) -> Result<(), CliError> {
    if let Some(p) = out {
        for (_, r) in &records {
            write_result(p, r)?;
        }
    }
    Table::build(kind, &records)?.write(ctx.format, ctx.out)
}
