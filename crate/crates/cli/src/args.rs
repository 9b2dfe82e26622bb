use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "platoon", version, about = "Coordinated vehicle platooning: generate, route, schedule, report")]
pub struct Cli {
    /// Table format written to stdout.
    #[arg(long, value_enum, global = true, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write 0 for every time column so that repeated runs print identical bytes.
    #[arg(long, global = true)]
    pub no_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a network or a problem instance.
    Gen(GenArgs),
    /// Solve the routing model that presumes every shared edge is platooned.
    SolveRdp(RdpArgs),
    /// Schedule platoons for fixed routes.
    SolveSp(SpArgs),
    /// Run the route-then-schedule heuristic.
    Rshm(RshmArgs),
    /// Write a routing or scheduling model in MPS or LP format.
    ExportMps(ExportArgs),
    /// Tabulate result files written with `--out`.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenModel {
    Distributed,
    TwoCluster,
    SyntheticNet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

impl Toggle {
    pub fn is_on(self) -> bool {
        self == Toggle::On
    }
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Leader saving rate.
    #[arg(long, default_value_t = 0.02)]
    pub sigma_l: f64,
    /// Follower saving rate.
    #[arg(long, default_value_t = 0.1)]
    pub sigma_f: f64,
    /// Largest platoon size.
    #[arg(long, default_value_t = 10)]
    pub lambda: usize,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub model: GenModel,
    /// Number of vehicles.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Instances to generate, with seeds `seed, seed + 1, ...`. Needs `{seed}` in `--out`.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Worker threads for `--count` batches.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Take the road network from this instance file instead of a grid.
    #[arg(long)]
    pub network: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    pub rows: usize,
    #[arg(long, default_value_t = 7)]
    pub cols: usize,
    #[arg(long, default_value_t = 25.0)]
    pub spacing_km: f64,
    #[arg(long, default_value_t = 5.0)]
    pub jitter_km: f64,
    #[arg(long, value_enum, default_value_t = Toggle::On)]
    pub diagonals: Toggle,
    /// Time-flexibility rate: windows are `1 + r` shortest-path times long.
    #[arg(long, default_value_t = 1.0)]
    pub flex: f64,
    /// Cities for the distributed model.
    #[arg(long, default_value_t = 2)]
    pub cities: usize,
    /// Share of urban trips in the distributed model.
    #[arg(long, default_value_t = 0.75)]
    pub urban_share: f64,
    #[arg(long, default_value_t = 50.0)]
    pub urban_radius_km: f64,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Output instance file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RdpArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Result file for `report` and for `solve-sp --routes`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Routes from a `solve-rdp` or `rshm` result file, or a route JSON.
    /// Without it the instance is routed first.
    #[arg(long)]
    pub routes: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Toggle::On)]
    pub contract: Toggle,
    /// none, star, star+disj or star+disj+facets.
    #[arg(long, default_value = "star")]
    pub cuts: String,
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Also report root bounds without star rows, with them, and with disjunctive rounds.
    #[arg(long)]
    pub bound_study: bool,
    #[arg(long, default_value_t = 20)]
    pub max_rounds: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RshmArgs {
    /// One or more instance files; rows come out in the given order.
    #[arg(long, required = true, num_args = 1..)]
    pub instance: Vec<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub freq_threshold: usize,
    /// Seconds per routing or scheduling solve.
    #[arg(long, default_value_t = 600.0)]
    pub per_solve: f64,
    /// Seconds for the whole run.
    #[arg(long, default_value_t = 3600.0)]
    pub total: f64,
    #[arg(long)]
    pub iter_cap: Option<usize>,
    #[arg(long, value_enum, default_value_t = Toggle::On)]
    pub contract: Toggle,
    #[arg(long, default_value = "star")]
    pub cuts: String,
    /// Worker threads across instances.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Result file; with several instances, needs `{stem}` in the path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Iteration trace CSV; with several instances, needs `{stem}` in the path.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Rdp,
    Sp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Mps,
    Lp,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Routes for the scheduling model; the instance is routed when absent.
    #[arg(long)]
    pub routes: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Toggle::On)]
    pub contract: Toggle,
    #[arg(long, default_value = "star")]
    pub cuts: String,
    #[arg(long, value_enum, default_value_t = FileFormat::Mps)]
    pub file_format: FileFormat,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    /// Routing: Fuel_0, Obj, CPU, Nodes, DetourVs.
    Rdp,
    /// Scheduling solves.
    Sp,
    /// Root bounds: LPbd0/1/2, cut counts, IMP1/IMP2.
    Bounds,
    /// Heuristic: Fuel Cost, Saving Rate, RelDev, Iters, Termination, CPU.
    Rshm,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Result files written with `--out`.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Table to build; inferred when every file has the same kind.
    #[arg(long, value_enum)]
    pub table: Option<TableKind>,
}
