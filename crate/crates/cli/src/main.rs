use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use faultloc_cli::compare::{compare_solvers, write_comparison};
use faultloc_cli::report::{create_file, write_json, write_report};
use faultloc_cli::{run_benchmark, CliError, Result, RunConfig};
use faultloc_core::fixtures::{self, Benchmark};
use faultloc_core::{
    locate_pipeline, scenario_to_injection, ErrorKind, FaultScenario, GroundTruth, MeasurementSet,
    SolverKind,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "faultloc",
    version,
    about = "Sparse-recovery fault location on transmission networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize measurements for one fault scenario and write them as CSV.
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Measurement CSV to write; the scenario is saved next to it as
        /// `<stem>.scenario.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Locate the fault from a measurement CSV.
    Locate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        measurements: PathBuf,
        /// Measurement column to use.
        #[arg(long, value_enum, default_value_t = Column::Corrupted)]
        column: Column,
        #[arg(long, default_value = "robust")]
        solver: SolverKind,
        /// Scenario JSON describing the true fault, for scoring.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Result JSON to write.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Objective trace CSV (iteration, objective) to write.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run the Monte-Carlo grid from the config's `benchmark` block.
    Benchmark {
        #[command(flatten)]
        input: InputArgs,
        /// Base seed, overriding the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Repetitions per grid cell, overriding the config.
        #[arg(long)]
        repetitions: Option<usize>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one corrupted scenario with every solver and dump the estimates.
    CompareSolvers {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Solvers to run (repeatable); all three by default.
        #[arg(long = "solver")]
        solvers: Vec<SolverKind>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Network JSON.
    #[arg(long, requires = "sensors")]
    network: Option<PathBuf>,
    /// Sensor placement JSON.
    #[arg(long, requires = "network")]
    sensors: Option<PathBuf>,
    /// Bundled network instead of files: six-bus, fourteen-bus, fourteen-bus-dense.
    #[arg(long, conflicts_with = "network")]
    fixture: Option<String>,
    /// Config JSON with `solver`, `solver_overrides`, `scenario` and `benchmark` blocks.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Faulted line id.
    #[arg(long)]
    line: Option<String>,
    /// Per-unit distance from the line's from-bus.
    #[arg(long)]
    x: Option<f64>,
    /// Relative noise amplitude.
    #[arg(long)]
    noise: Option<f64>,
    /// Fraction of measurements replaced by outliers.
    #[arg(long)]
    outliers: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Column {
    Clean,
    Noisy,
    Corrupted,
}

impl InputArgs {
    fn config(&self) -> Result<RunConfig> {
        self.config
            .as_deref()
            .map_or_else(|| Ok(RunConfig::default()), RunConfig::load)
    }

    fn benchmark(&self) -> Result<Benchmark> {
        load_benchmark(
            self.network.as_deref(),
            self.sensors.as_deref(),
            self.fixture.as_deref(),
        )
    }
}

fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn load_benchmark(
    network: Option<&Path>,
    sensors: Option<&Path>,
    fixture: Option<&str>,
) -> Result<Benchmark> {
    match (network, sensors, fixture) {
        (Some(network), Some(sensors), _) => {
            let net = faultloc_core::load_network(&read_input(network)?).map_err(|source| {
                CliError::Input {
                    path: network.to_owned(),
                    source,
                }
            })?;
            let placement =
                faultloc_core::load_sensors(&read_input(sensors)?, &net).map_err(|source| {
                    CliError::Input {
                        path: sensors.to_owned(),
                        source,
                    }
                })?;
            Ok(Benchmark::assemble(net, placement)?)
        }
        (None, None, Some(name)) => Ok(fixtures::by_name(name)?),
        _ => Err(CliError::Usage(
            "give --network and --sensors, or --fixture".into(),
        )),
    }
}

impl ScenarioArgs {
    fn resolve(&self, cfg: &RunConfig) -> Result<FaultScenario> {
        let mut scenario = match (&cfg.scenario, &self.line, self.x) {
            (_, Some(line), Some(x)) => FaultScenario {
                line_id: line.clone(),
                x,
                ..cfg
                    .scenario
                    .clone()
                    .unwrap_or_else(|| FaultScenario::new("", x))
            },
            (Some(base), _, _) => base.clone(),
            (None, _, _) => {
                return Err(CliError::Usage(
                    "no scenario: give --line and --x, or a `scenario` block in --config".into(),
                ))
            }
        };
        if let Some(line) = &self.line {
            scenario.line_id = line.clone();
        }
        if let Some(x) = self.x {
            scenario.x = x;
        }
        if let Some(noise) = self.noise {
            scenario.noise_rel = noise;
        }
        if let Some(outliers) = self.outliers {
            scenario.outlier_fraction = outliers;
        }
        if let Some(seed) = self.seed {
            scenario.seed = seed;
        }
        scenario.validate()?;
        Ok(scenario)
    }
}

fn scenario_path(csv: &Path) -> PathBuf {
    csv.with_extension("scenario.json")
}

fn simulate(input: &InputArgs, scenario: &ScenarioArgs, out: &Path) -> Result<()> {
    let cfg = input.config()?;
    let bench = input.benchmark()?;
    let scenario = scenario.resolve(&cfg)?;
    let (meas, _) = faultloc_core::generate_case(&scenario, &bench.network, &bench.sensing)?;
    meas.write_csv(create_file(out)?)?;
    write_json(&scenario_path(out), &scenario)?;
    println!(
        "wrote {} measurements ({} outliers) for line {} at x = {} to {}",
        meas.len(),
        meas.outlier_indices.len(),
        scenario.line_id,
        scenario.x,
        out.display()
    );
    Ok(())
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
enum LocateOutput<'a> {
    Ok {
        result: &'a faultloc_core::LocationResult,
        lambda: f64,
    },
    NoFault,
}

#[derive(Serialize)]
struct TracePoint {
    iteration: usize,
    objective: f64,
}

#[allow(clippy::too_many_arguments)]
fn locate(
    input: &InputArgs,
    measurements: &Path,
    column: Column,
    solver: SolverKind,
    truth: Option<&Path>,
    out: Option<&Path>,
    trace: Option<&Path>,
) -> Result<()> {
    let cfg = input.config()?;
    let bench = input.benchmark()?;
    let file = File::open(measurements).map_err(|e| CliError::io(measurements, e))?;
    let meas = MeasurementSet::read_csv(file).map_err(|source| CliError::Input {
        path: measurements.to_owned(),
        source,
    })?;
    let y = match column {
        Column::Clean => &meas.y_clean,
        Column::Noisy => &meas.y_noisy,
        Column::Corrupted => &meas.y_corrupted,
    };
    let truth = match truth {
        Some(path) => {
            let scenario: FaultScenario =
                serde_json::from_str(&read_input(path)?).map_err(|e| CliError::Input {
                    path: path.to_owned(),
                    source: e.into(),
                })?;
            let injection = scenario_to_injection(&scenario, &bench.network)?;
            Some(GroundTruth::new(&scenario, &injection))
        }
        None => None,
    };

    match locate_pipeline(
        &bench.network,
        &bench.sensing.real,
        y,
        solver,
        cfg.solver_config(solver),
        truth.as_ref(),
    ) {
        Ok((result, recovery)) => {
            match result.fault_at_bus {
                Some(bus) => println!("fault at bus {bus} (line {})", result.line_id),
                None => println!(
                    "fault on line {} at x = {:.6} p.u.",
                    result.line_id, result.x_hat
                ),
            }
            if !result.reliable {
                println!(
                    "warning: distance estimate unreliable (residual imaginary part {:.3e})",
                    result.residual_im
                );
            }
            println!(
                "solver {solver}: {} iterations, {}",
                recovery.iterations,
                if recovery.converged {
                    "converged"
                } else {
                    "iteration limit reached"
                }
            );
            if let (Some(err), Some(norm)) =
                (result.x_error_percent, result.normalized_recovery_error)
            {
                println!("location error {err:.6}%, normalized recovery error {norm:.6e}");
            }
            if let Some(path) = out {
                write_json(
                    path,
                    &LocateOutput::Ok {
                        result: &result,
                        lambda: recovery.lambda,
                    },
                )?;
            }
            if let Some(path) = trace {
                let points: Vec<TracePoint> = recovery
                    .objective_trace
                    .iter()
                    .enumerate()
                    .map(|(k, &objective)| TracePoint {
                        iteration: k + 1,
                        objective,
                    })
                    .collect();
                faultloc_cli::report::write_csv(path, &points)?;
            }
            Ok(())
        }
        Err(e) if e.kind() == ErrorKind::NoFault => {
            println!("{e}");
            if let Some(path) = out {
                write_json(path, &LocateOutput::NoFault)?;
            }
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}

fn benchmark(
    input: &InputArgs,
    seed: Option<u64>,
    repetitions: Option<usize>,
    workers: usize,
    out: &Path,
) -> Result<()> {
    let cfg = input.config()?;
    let mut spec = cfg
        .benchmark
        .clone()
        .ok_or_else(|| CliError::Usage("benchmark needs a `benchmark` block in --config".into()))?;
    if let Some(dir) = input.config.as_deref().and_then(Path::parent) {
        spec.resolve_paths(dir);
    }
    if let Some(seed) = seed {
        spec.base_seed = seed;
    }
    if let Some(reps) = repetitions {
        spec.repetitions = reps;
    }
    let bench = if input.network.is_some() || input.fixture.is_some() {
        input.benchmark()?
    } else {
        let fixture = spec
            .fixture
            .as_deref()
            .or(spec.network.is_none().then_some("six-bus"));
        load_benchmark(spec.network.as_deref(), spec.sensors.as_deref(), fixture)?
    };
    let report = run_benchmark(&bench, &spec, &cfg, workers)?;
    let files = write_report(out, &report)?;
    println!(
        "{} rows over {} scenarios in {:.2} s (workers: {})",
        report.rows.len(),
        report.runtime.scenarios,
        report.runtime.wall_seconds,
        report.runtime.workers
    );
    for cell in &report.cells {
        if cell.failed > 0 || cell.no_fault > 0 {
            println!(
                "  {} {} x={}: {} failed, {} no fault",
                cell.line_id, cell.solver, cell.x_true, cell.failed, cell.no_fault
            );
        }
    }
    println!("table: {}", files.table.display());
    Ok(())
}

fn compare(
    input: &InputArgs,
    scenario: &ScenarioArgs,
    solvers: &[SolverKind],
    out: &Path,
) -> Result<()> {
    let cfg = input.config()?;
    let bench = input.benchmark()?;
    let scenario = scenario.resolve(&cfg)?;
    let solvers = if solvers.is_empty() {
        &SolverKind::ALL[..]
    } else {
        solvers
    };
    let comparison = compare_solvers(&bench, &scenario, solvers, &cfg)?;
    write_comparison(out, &bench, &comparison)?;
    println!(
        "{:<8} {:>10} {:>12} {:>16}",
        "solver", "line", "error %", "normalized err"
    );
    for row in &comparison.rows {
        println!(
            "{:<8} {:>10} {:>12.6} {:>16.6e}",
            row.solver.name(),
            row.identified_line.as_deref().unwrap_or("-"),
            row.x_error_percent,
            row.normalized_error
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate {
            input,
            scenario,
            out,
        } => simulate(input, scenario, out),
        Command::Locate {
            input,
            measurements,
            column,
            solver,
            truth,
            out,
            trace,
        } => locate(
            input,
            measurements,
            *column,
            *solver,
            truth.as_deref(),
            out.as_deref(),
            trace.as_deref(),
        ),
        Command::Benchmark {
            input,
            seed,
            repetitions,
            workers,
            out,
        } => benchmark(input, *seed, *repetitions, *workers, out),
        Command::CompareSolvers {
            input,
            scenario,
            solvers,
            out,
        } => compare(input, scenario, solvers, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // Per-run distance warnings would flood a benchmark; its rows carry the flags.
    let filter = match cli.command {
        Command::Benchmark { .. } => "warn,faultloc_core::locator=error",
        _ => "warn",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(filter)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
