//! Command-line front end: instance generation, solving, validation,
//! model export and the benchmark harness.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mpplan::assignment;
use mpplan::bench::{self, Formulation, GroupKey, RunCell};
use mpplan::data::PlanAssignment;
use mpplan::generator::{self, GenSpec};
use mpplan::linmodel::{write_lp, write_mps};
use mpplan::netflow;
use mpplan::solver::{solve_lp, solve_mip_with, SolveConfig};
use mpplan::validate::{self, Variant};
use mpplan::{Instance, SizeClass, VesselProfile};

#[derive(Parser)]
#[command(name = "mpplan", version, about = "Container-vessel master planning toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one benchmark instance.
    Gen(GenArgs),
    /// Generate the full 162-instance benchmark grid.
    GenGrid(GenGridArgs),
    /// Solve one instance and optionally write the plan and report.
    Solve(SolveArgs),
    /// Validate a plan file against an instance.
    Validate(ValidateArgs),
    /// Export a model as MPS or LP text.
    Export(ExportArgs),
    /// Run and tabulate experiment suites.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Args)]
struct GenArgs {
    /// Vessel size class (S, M, L) for the built-in profiles.
    #[arg(long, default_value = "S")]
    class: SizeClass,
    /// Vessel profile JSON; overrides --class.
    #[arg(long)]
    vessel: Option<PathBuf>,
    #[arg(long)]
    ports: u32,
    /// Fraction of cargo already on board, e.g. 0.15.
    #[arg(long, default_value_t = 0.0)]
    rob: f64,
    /// Target vessel utilization on the long-haul leg, e.g. 0.7.
    #[arg(long)]
    util: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenGridArgs {
    /// Output directory for the instance files.
    #[arg(short, long)]
    out: PathBuf,
    /// Vessel profile JSON files (default: built-in S, M, L).
    #[arg(long, num_args = 1..)]
    vessels: Vec<PathBuf>,
}

#[derive(Args, Clone)]
struct SolveArgs {
    /// Instance JSON file.
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "assignment")]
    formulation: Formulation,
    #[arg(long, default_value = "full")]
    variant: Variant,
    /// Solve the LP relaxation instead of the MIP.
    #[arg(long)]
    relaxed: bool,
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    /// Write the extracted plan JSON here.
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Write the validation report JSON here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Makespan rows over onboard transports (as printed) instead of
    /// active (load/discharge) transports.
    #[arg(long)]
    makespan_onboard: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    plan: PathBuf,
    #[arg(long, default_value = "full")]
    variant: Variant,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Emit the report as JSON instead of the human table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "assignment")]
    formulation: Formulation,
    #[arg(long, default_value = "full")]
    variant: Variant,
    /// Export the LP relaxation instead of the integer model.
    #[arg(long)]
    relaxed: bool,
    /// Output format: mps or lp.
    #[arg(long, default_value = "mps")]
    format: String,
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Makespan rows over onboard transports (as printed) instead of
    /// active (load/discharge) transports.
    #[arg(long)]
    makespan_onboard: bool,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Solve a directory of instances over a run matrix.
    Run(BenchRunArgs),
    /// Aggregate a results CSV into a table.
    Table(BenchTableArgs),
}

#[derive(Args)]
struct BenchRunArgs {
    /// Directory of instance JSON files.
    #[arg(long)]
    instances: PathBuf,
    /// assignment, netflow or both.
    #[arg(long, default_value = "both")]
    formulation: String,
    #[arg(long, default_value = "reduced")]
    variant: Variant,
    #[arg(long)]
    relaxed: bool,
    #[arg(long, default_value_t = 3600.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Results CSV (stdout when omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchTableArgs {
    /// Results CSV produced by `bench run`.
    results: PathBuf,
    /// Comma-separated group keys: size, ports, formulation, variant,
    /// relaxed.
    #[arg(long, default_value = "size,ports")]
    group: String,
    /// Output format: md or csv.
    #[arg(long, default_value = "md")]
    format: String,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn load_vessel(path: &PathBuf) -> Result<VesselProfile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading vessel profile {}", path.display()))?;
    let spec = serde_json::from_str(&text).context("parsing vessel profile")?;
    Ok(VesselProfile::new(spec)?)
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

type PlanExtractor = Box<dyn Fn(&[f64], f64) -> Option<PlanAssignment>>;
type Heuristic = Box<dyn Fn(&[f64]) -> Option<Vec<f64>>>;

fn build_model(
    inst: &Instance,
    formulation: Formulation,
    variant: Variant,
    makespan_onboard: bool,
) -> Result<(mpplan::linmodel::LinearModel, PlanExtractor, Heuristic)> {
    match formulation {
        Formulation::Assignment => {
            let opts = assignment::BuildOptions {
                makespan: if makespan_onboard {
                    assignment::MakespanIndexing::OnboardTransports
                } else {
                    assignment::MakespanIndexing::ActiveTransports
                },
                ..Default::default()
            };
            let (model, index) = assignment::build(inst, variant, &opts)?;
            let heur = assignment::primal_heuristic(inst, &index);
            Ok((
                model,
                Box::new(move |sol, tol| index.extract_plan(sol, tol).ok()),
                Box::new(heur),
            ))
        }
        Formulation::NetFlow => {
            if variant == Variant::Full {
                bail!("the network-flow formulation has no full (stability) variant");
            }
            if makespan_onboard {
                bail!("--makespan-onboard applies to the assignment formulation only");
            }
            let (_, model, index) = netflow::build(inst)?;
            let heur = netflow::primal_heuristic(inst, &index);
            Ok((
                model,
                Box::new(move |sol, tol| index.extract_plan(sol, tol).ok()),
                Box::new(heur),
            ))
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let inst = Instance::load_json(&args.instance)?;
    let (model, extract, heuristic) =
        build_model(&inst, args.formulation, args.variant, args.makespan_onboard)?;
    let cfg = SolveConfig::with_time_limit(args.time_limit);
    let result = if args.relaxed {
        solve_lp(&model.relax(), &cfg)?
    } else {
        solve_mip_with(&model, &cfg, Some(&*heuristic))?
    };
    println!(
        "status: {}  objective: {}  bound: {:.6}  gap: {}  nodes: {}  iterations: {}  time: {:.3}s",
        result.status,
        result
            .objective
            .map(|o| format!("{o:.6}"))
            .unwrap_or_else(|| "-".into()),
        result.best_bound,
        result
            .mip_gap
            .map(|g| format!("{g:.2e}"))
            .unwrap_or_else(|| "-".into()),
        result.node_count,
        result.simplex_iterations,
        result.wall_time_s,
    );
    if let Some(solution) = &result.solution {
        if !args.relaxed {
            let plan = extract(solution, 1e-6)
                .context("extracting an integral plan from the solution")?;
            let report = validate::validate(&inst, &plan, args.variant, 1e-6)?;
            println!(
                "validator: {}  hatch overstows: {}  makespan total: {}",
                if report.feasible { "FEASIBLE" } else { "INFEASIBLE" },
                report.total_hatch_overstows(),
                report.total_makespan()
            );
            if let Some(path) = &args.plan {
                plan.save_json(path)?;
            }
            if let Some(path) = &args.report {
                std::fs::write(path, report.to_json())?;
            }
        } else if args.plan.is_some() || args.report.is_some() {
            bail!("relaxed solutions are fractional; no plan or report is written");
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen(args) => {
            let vessel = match &args.vessel {
                Some(path) => load_vessel(path)?,
                None => generator::synthetic_vessel(args.class),
            };
            let spec = GenSpec {
                vessel_class: vessel.size_class,
                num_ports: args.ports,
                rob_fraction: args.rob,
                utilization: args.util,
                seed: args.seed,
            };
            let inst = generator::generate(&spec, &vessel)?;
            write_or_print(&args.out, &inst.to_json()?)?;
        }
        Command::GenGrid(args) => {
            let vessels: Vec<VesselProfile> = if args.vessels.is_empty() {
                [SizeClass::S, SizeClass::M, SizeClass::L]
                    .into_iter()
                    .map(generator::synthetic_vessel)
                    .collect()
            } else {
                args.vessels
                    .iter()
                    .map(load_vessel)
                    .collect::<Result<_>>()?
            };
            std::fs::create_dir_all(&args.out)?;
            let instances = generator::generate_grid(&vessels)?;
            let count = instances.len();
            for inst in instances {
                inst.save_json(args.out.join(format!("{}.json", inst.name)))?;
            }
            eprintln!("wrote {count} instances to {}", args.out.display());
        }
        Command::Solve(args) => cmd_solve(args)?,
        Command::Validate(args) => {
            let inst = Instance::load_json(&args.instance)?;
            let plan = PlanAssignment::load_json(&args.plan)?;
            let report = validate::validate(&inst, &plan, args.variant, args.tol)?;
            if args.json {
                println!("{}", report.to_json());
            } else {
                print!("{report}");
            }
            if !report.feasible {
                std::process::exit(1);
            }
        }
        Command::Export(args) => {
            let inst = Instance::load_json(&args.instance)?;
            let (model, _, _) =
                build_model(&inst, args.formulation, args.variant, args.makespan_onboard)?;
            let model = if args.relaxed { model.relax() } else { model };
            let text = match args.format.as_str() {
                "mps" => write_mps(&model),
                "lp" => write_lp(&model),
                other => bail!("unknown export format `{other}` (use mps or lp)"),
            };
            write_or_print(&args.out, &text)?;
        }
        Command::Bench(BenchCommand::Run(args)) => {
            let (instances, mut skips) = bench::load_instance_dir(&args.instances);
            if instances.is_empty() && skips.is_empty() {
                bail!("no instances found in {}", args.instances.display());
            }
            let formulations: Vec<Formulation> = match args.formulation.as_str() {
                "both" => vec![Formulation::Assignment, Formulation::NetFlow],
                other => vec![other.parse().map_err(anyhow::Error::msg)?],
            };
            let cells: Vec<RunCell> = formulations
                .into_iter()
                .map(|formulation| RunCell {
                    formulation,
                    variant: args.variant,
                    relaxed: args.relaxed,
                })
                .collect();
            let cfg = SolveConfig::with_time_limit(args.time_limit);
            let report = bench::run_suite(&instances, &cells, &cfg, args.workers);
            skips.extend(report.skips);
            write_or_print(&args.out, &bench::records_to_csv(&report.records))?;
            for skip in &skips {
                eprintln!("skipped: {} ({})", skip.subject, skip.reason);
            }
        }
        Command::Bench(BenchCommand::Table(args)) => {
            let text = std::fs::read_to_string(&args.results)
                .with_context(|| format!("reading {}", args.results.display()))?;
            let records = bench::records_from_csv(&text)?;
            let keys: Vec<GroupKey> = args
                .group
                .split(',')
                .map(|k| k.trim().parse().map_err(anyhow::Error::msg))
                .collect::<Result<_>>()?;
            let rows = bench::aggregate(&records, &keys);
            let text = match args.format.as_str() {
                "md" => bench::table_to_markdown(&rows),
                "csv" => bench::table_to_csv(&rows),
                other => bail!("unknown table format `{other}` (use md or csv)"),
            };
            write_or_print(&args.out, &text)?;
        }
    }
    Ok(())
}
