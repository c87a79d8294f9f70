use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use warehouse_mapf::ipp::{plan_orders, Plan, PlanError, PlanOptions};
use warehouse_mapf::layouts::{generate_layout, LayoutParams, Template};
use warehouse_mapf::metrics::{median, to_csv, InstanceReport, CSV_COLUMNS};
use warehouse_mapf::model::{orders_from_file, orders_to_file, Layout, LayoutFile, ScenarioFile};
use warehouse_mapf::routing::{DurationModel, RoutingConfig};
use warehouse_mapf::scenario::generate_scenario;
use warehouse_mapf::simulator::{execute, samples, CollisionEvent, NoiseModel, Sample, SimOptions};
use warehouse_mapf::vpstar::SearchOptions;
use warehouse_mapf::world::World;
use warehouse_mapf::Time;

mod svg;

#[derive(Parser)]
#[command(name = "whmapf", version, about = "Plan and simulate warehouse robot fleets")]
struct Cli {
    /// Directory for outputs given without an explicit path.
    #[arg(long, global = true, env = "WHMAPF_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated warehouse layout.
    GenerateLayout(GenerateLayout),
    /// Write random orders for a layout.
    GenerateScenario(GenerateScenario),
    /// Plan a scenario and write the plan.
    Plan(PlanCmd),
    /// Execute a plan, optionally under timing noise, and write times to failure.
    Simulate(Simulate),
    /// Summarize a directory of runs as CSV and SVG.
    Report(Report),
}

#[derive(Clone, Copy, ValueEnum)]
enum TemplateArg {
    #[value(name = "1row")]
    OneRow,
    #[value(name = "2row")]
    TwoRow,
    #[value(name = "3row")]
    ThreeRow,
    Large,
}

impl From<TemplateArg> for Template {
    fn from(t: TemplateArg) -> Template {
        match t {
            TemplateArg::OneRow => Template::OneRow,
            TemplateArg::TwoRow => Template::TwoRow,
            TemplateArg::ThreeRow => Template::ThreeRow,
            TemplateArg::Large => Template::Large,
        }
    }
}

#[derive(Args)]
struct GenerateLayout {
    #[arg(long, value_enum)]
    template: TemplateArg,
    /// Number of shelf racks.
    #[arg(long)]
    shelves: Option<usize>,
    #[arg(long)]
    workstations: Option<usize>,
    /// Waiting places, one robot each.
    #[arg(long)]
    waiting_places: Option<usize>,
    #[arg(long)]
    slots_per_aisle: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateScenario {
    #[arg(long)]
    layout: PathBuf,
    #[arg(long, default_value_t = 5)]
    orders: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Kinematic,
    NoInertia,
    ConstantTime,
}

#[derive(Args)]
struct PlanCmd {
    #[arg(long)]
    layout: PathBuf,
    #[arg(long)]
    scenario: PathBuf,
    /// Use the first N robots of the layout (all by default).
    #[arg(long)]
    robots: Option<usize>,
    /// Time margin around every reservation, seconds.
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Search without the per-via-point penalty.
    #[arg(long)]
    no_penalty: bool,
    /// Prefer less move time among arrivals in the same time bucket.
    #[arg(long)]
    two_criteria: bool,
    /// Search each leg between via points separately.
    #[arg(long)]
    sequential: bool,
    /// Do not reserve the way back to the waiting place.
    #[arg(long)]
    no_waiting_reservation: bool,
    /// Run every search to queue exhaustion.
    #[arg(long)]
    exhaustive: bool,
    /// Arrival times within this many seconds at the same state are duplicates.
    #[arg(long)]
    dedupe: Option<f64>,
    /// Bound remaining travel with the yaw each via point requires.
    #[arg(long)]
    orientation_heuristic: bool,
    /// Duration model the planner assumes.
    #[arg(long, value_enum, default_value = "kinematic")]
    model: ModelArg,
    /// Seconds per arc under the constant-time model.
    #[arg(long, default_value_t = 5.0)]
    edge_time: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum NoiseArg {
    None,
    Pert,
}

#[derive(Args)]
struct Simulate {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long, value_enum, default_value = "pert")]
    noise: NoiseArg,
    /// Expected planning margin; refuses plans made with another one.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 100)]
    seeds: u64,
    /// First noise seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seconds between collision checks.
    #[arg(long, default_value_t = 0.05)]
    dt: f64,
    /// Also write the first run's samples as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Report {
    #[arg(long)]
    runs: PathBuf,
    /// Where report.csv and the plots go; defaults to the runs directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A plan together with everything needed to replay it.
#[derive(Serialize, Deserialize)]
struct RunFile {
    layout: LayoutFile,
    scenario: ScenarioFile,
    robots: usize,
    plan: Plan,
}

impl RunFile {
    fn world(&self) -> Result<World> {
        let layout = Layout::from_file(&self.layout)?.with_robots(self.robots);
        Ok(World::new(layout, &self.plan.routing)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum TraceRecord {
    Sample(Sample),
    Collision(CollisionEvent),
}

/// The planner ran and found no plan.
#[derive(Debug)]
struct Infeasible(PlanError);

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "infeasible: {}", self.0)
    }
}

impl std::error::Error for Infeasible {}

fn output(out: Option<PathBuf>, out_dir: &Path, default: &str) -> Result<PathBuf> {
    let path = out.unwrap_or_else(|| out_dir.join(default));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    Ok(path)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn generate_layout_cmd(args: GenerateLayout, out_dir: &Path) -> Result<()> {
    let mut params = LayoutParams::new(args.template.into());
    params.shelves = args.shelves.unwrap_or(params.shelves);
    params.workstations = args.workstations.unwrap_or(params.workstations);
    params.waiting_places = args.waiting_places.unwrap_or(params.waiting_places);
    params.slots_per_aisle = args.slots_per_aisle.unwrap_or(params.slots_per_aisle);
    let file = generate_layout(&params).map_err(|e| anyhow::anyhow!("invalid layout parameters: {e}"))?;
    Layout::from_file(&file).context("generated layout failed validation")?;
    let path = output(args.out, out_dir, "layout.json")?;
    write(&path, &serde_json::to_string_pretty(&file)?)?;
    println!("# layout: {} nodes, {} arcs, {} robots -> {}", file.nodes.len(), file.arcs.len(), file.agents.len(), path.display());
    Ok(())
}

fn generate_scenario_cmd(args: GenerateScenario, out_dir: &Path) -> Result<()> {
    let layout = Layout::load(&args.layout)?;
    let orders = generate_scenario(&layout, args.orders, args.seed)?;
    let mut file = orders_to_file(&orders, &layout.graph);
    file.seed = Some(args.seed);
    let path = output(args.out, out_dir, "scenario.json")?;
    write(&path, &serde_json::to_string_pretty(&file)?)?;
    println!("# seed: {}", args.seed);
    println!("# scenario: {} orders -> {}", orders.len(), path.display());
    Ok(())
}

fn plan_cmd(args: PlanCmd, out_dir: &Path) -> Result<()> {
    let layout_file: LayoutFile = read_json(&args.layout)?;
    let scenario: ScenarioFile = read_json(&args.scenario)?;
    let full = Layout::from_file(&layout_file)?;
    let robots = args.robots.unwrap_or(full.agents.len());
    if robots == 0 || robots > full.agents.len() {
        bail!("--robots must be between 1 and {}", full.agents.len());
    }
    if !(args.delta >= 0.0 && args.delta.is_finite()) {
        bail!("--delta must be a non-negative number of seconds");
    }
    let orders = orders_from_file(&scenario, &full.graph)?;
    let duration_model = match args.model {
        ModelArg::Kinematic => DurationModel::Kinematic,
        ModelArg::NoInertia => DurationModel::NoInertia,
        ModelArg::ConstantTime => DurationModel::ConstantTime { seconds: args.edge_time },
    };
    let world = World::new(full.with_robots(robots), &RoutingConfig { duration_model, ..RoutingConfig::default() })?;

    let mut search = if args.exhaustive { SearchOptions::exhaustive() } else { SearchOptions::default() };
    search.penalty = !args.no_penalty;
    search.two_criteria = args.two_criteria;
    search.orientation_heuristic = args.orientation_heuristic;
    if let Some(q) = args.dedupe {
        if !(q > 0.0) {
            bail!("--dedupe must be positive");
        }
        search.dedupe_quantum = Time::from_secs(q);
    }
    let opts = PlanOptions {
        margin: Time::from_secs(args.delta),
        sequential: args.sequential,
        reserve_waiting: !args.no_waiting_reservation,
        search,
        ..PlanOptions::default()
    };
    let seed = scenario.seed;
    println!("# seed: {}", seed.map_or("none".to_string(), |s| s.to_string()));
    let plan = match plan_orders(&world, &orders, &opts) {
        Ok((_, plan)) => plan,
        Err(e) if e.is_infeasible() => return Err(Infeasible(e).into()),
        Err(e) => return Err(e.into()),
    };
    let path = output(args.out, out_dir, "plan.json")?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("plan").to_string();
    let report = InstanceReport::from_plan(&name, robots, seed.unwrap_or(0), &plan);
    let run = RunFile { layout: layout_file, scenario, robots, plan };
    write(&path, &serde_json::to_string_pretty(&run)?)?;
    print!("{}", to_csv(std::slice::from_ref(&report)).lines().take(2).map(|l| format!("{l}\n")).collect::<String>());
    Ok(())
}

fn simulate_cmd(args: Simulate, out_dir: &Path) -> Result<()> {
    let run: RunFile = read_json(&args.plan)?;
    let margin = run.plan.options.margin.secs();
    if let Some(d) = args.delta {
        if (d - margin).abs() > 1e-6 {
            bail!("plan was made with a {margin} s margin, not {d} s");
        }
    }
    if !(args.dt > 0.0) {
        bail!("--dt must be positive");
    }
    let world = run.world()?;
    let stem = args.plan.file_stem().and_then(|s| s.to_str()).unwrap_or("plan").to_string();
    let path = output(args.out, out_dir, &format!("{stem}.ttf.csv"))?;
    let seeds: Vec<u64> = match args.noise {
        NoiseArg::None => vec![args.seed],
        NoiseArg::Pert => (args.seed..args.seed + args.seeds.max(1)).collect(),
    };
    let mut csv = String::new();
    csv.push_str(&format!("# plan: {}\n# noise: {}\n# delta_s: {margin}\n# dt_s: {}\n# seeds: {}..={}\n", args.plan.display(), if args.noise == NoiseArg::Pert { "pert" } else { "none" }, args.dt, seeds[0], seeds[seeds.len() - 1]));
    csv.push_str("seed,ttf_s,robot_a,robot_b,end_s\n");
    let mut ttfs = Vec::new();
    for (i, &seed) in seeds.iter().enumerate() {
        let noise = match args.noise {
            NoiseArg::None => NoiseModel::None,
            NoiseArg::Pert => NoiseModel::pert(seed),
        };
        let opts = SimOptions { noise, dt: args.dt };
        let trace = execute(&world, &run.plan, &opts)?;
        let ttf = trace.time_to_failure();
        ttfs.push(ttf);
        let (a, b) = trace.collision.map_or((String::new(), String::new()), |c| (c.robots.0.to_string(), c.robots.1.to_string()));
        csv.push_str(&format!("{seed},{},{a},{b},{:.3}\n", if ttf.is_finite() { format!("{ttf:.3}") } else { "inf".into() }, trace.end));
        if i == 0 {
            if let Some(tp) = &args.trace {
                let tp = output(Some(tp.clone()), out_dir, "")?;
                let mut f = std::io::BufWriter::new(fs::File::create(&tp).with_context(|| format!("writing {}", tp.display()))?);
                for s in samples(&world, &run.plan, &trace, 0.5) {
                    writeln!(f, "{}", serde_json::to_string(&TraceRecord::Sample(s))?)?;
                }
                if let Some(c) = trace.collision {
                    writeln!(f, "{}", serde_json::to_string(&TraceRecord::Collision(c))?)?;
                }
            }
        }
    }
    write(&path, &csv)?;
    let collided = ttfs.iter().filter(|t| t.is_finite()).count();
    println!("# seeds: {}..={}", seeds[0], seeds[seeds.len() - 1]);
    println!("runs {}, collisions {collided}, median time to failure {} s -> {}", ttfs.len(), median(&ttfs), path.display());
    Ok(())
}

/// Times to failure from a simulate CSV, in seconds.
fn read_ttf(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("seed,"))
        .map(|l| {
            let field = l.split(',').nth(1).unwrap_or("");
            if field == "inf" {
                Ok(f64::INFINITY)
            } else {
                field.parse::<f64>().with_context(|| format!("bad time to failure {field:?} in {}", path.display()))
            }
        })
        .collect()
}

fn read_trace(path: &Path) -> Result<Vec<TraceRecord>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines().filter(|l| !l.trim().is_empty()).map(|l| serde_json::from_str(l).with_context(|| format!("parsing {}", path.display()))).collect()
}

fn report_cmd(args: Report) -> Result<()> {
    let out = args.out.unwrap_or_else(|| args.runs.clone());
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let mut entries: Vec<PathBuf> = fs::read_dir(&args.runs)
        .with_context(|| format!("reading {}", args.runs.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    entries.sort();
    let mut rows = Vec::new();
    let mut plots = 0;
    for path in entries {
        // Other JSON files (layouts, scenarios) are not runs.
        let Ok(run) = read_json::<RunFile>(&path) else { continue };
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run").to_string();
        let mut row = InstanceReport::from_plan(&stem, run.robots, run.scenario.seed.unwrap_or(0), &run.plan);
        let ttf_path = path.with_file_name(format!("{stem}.ttf.csv"));
        if ttf_path.exists() {
            row.ttf_min = Some(median(&read_ttf(&ttf_path)?) / 60.0);
        }
        rows.push(row);
        let trace_path = path.with_file_name(format!("{stem}.trace.jsonl"));
        let trace = if trace_path.exists() { read_trace(&trace_path)? } else { Vec::new() };
        let world = run.world()?;
        let (realized, collision) = trace.iter().fold((Vec::new(), None), |(mut s, c), r| match r {
            TraceRecord::Sample(x) => {
                s.push(*x);
                (s, c)
            }
            TraceRecord::Collision(e) => (s, Some(*e)),
        });
        write(&out.join(format!("{stem}.svg")), &svg::render(&world, &run.plan, &realized, collision.as_ref()))?;
        plots += 1;
    }
    let csv_path = out.join("report.csv");
    write(&csv_path, &to_csv(&rows))?;
    println!("# columns: {}", CSV_COLUMNS.join(","));
    println!("{} runs, {plots} plots -> {}", rows.len(), csv_path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenerateLayout(a) => generate_layout_cmd(a, &cli.out_dir),
        Command::GenerateScenario(a) => generate_scenario_cmd(a, &cli.out_dir),
        Command::Plan(a) => plan_cmd(a, &cli.out_dir),
        Command::Simulate(a) => simulate_cmd(a, &cli.out_dir),
        Command::Report(a) => report_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version are not errors; usage mistakes are.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Infeasible>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
