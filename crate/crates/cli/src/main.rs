//! Command-line surface for the pricing pipeline: ingest sessions, fit
//! demand models, optimize schedules, select solutions, emit baselines,
//! and run the full comparison report.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use evprice_core::baselines::{stationary, tou, TouSchedule};
use evprice_core::demand_model::{fit, models_to_json};
use evprice_core::harness::{
    load_scenario, run_experiment, write_report, ExperimentConfig, HarnessError,
};
use evprice_core::ingest::{load_sessions, slot_demand, DemandObservation, SlotGrid};
use evprice_core::mcdm::{select, ImportanceVector, SelectionReport};
use evprice_core::moo::{optimize_prices, run_log_csv, EngineKind};
use evprice_core::objectives::evaluate;
use evprice_core::{FitConfig, ParetoSet};

#[derive(Parser)]
#[command(
    name = "evprice",
    version,
    about = "Dynamic EV charging-station pricing: Bayesian demand fit, \
             NSGA-II/III schedule optimization, pseudo-weight selection, \
             and SP/ToU benchmarking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Nsga2,
    Nsga3,
}

impl From<EngineArg> for EngineKind {
    fn from(value: EngineArg) -> Self {
        match value {
            EngineArg::Nsga2 => EngineKind::Nsga2,
            EngineArg::Nsga3 => EngineKind::Nsga3,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineKind {
    Sp,
    Tou,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate a session file into per-station mean demand per slot.
    Ingest {
        /// Session file: JSON array or CSV with the ACN column names.
        sessions: PathBuf,
        #[arg(long, default_value_t = 96)]
        slots: usize,
        #[arg(long, default_value_t = 15)]
        slot_minutes: u32,
        /// Demand profile JSON to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit per-station demand models from (price, demand) observations.
    Fit {
        /// JSON array of {station_id, slot_index, price, demand}.
        observations: PathBuf,
        #[arg(long)]
        prior_log_a: Option<f64>,
        #[arg(long)]
        prior_elasticity: Option<f64>,
        #[arg(long)]
        prior_precision: Option<f64>,
        #[arg(long)]
        min_obs: Option<usize>,
        /// Models JSON to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evolve the Pareto front of price schedules for a scenario.
    Optimize {
        /// Scenario JSON path, or bundled:elastic.
        #[arg(long)]
        scenario: String,
        #[arg(long, value_enum)]
        engine: EngineArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Experiment config JSON (GA overrides, tariffs, runs).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        population: Option<usize>,
        #[arg(long)]
        generations: Option<usize>,
        /// Front JSON to write.
        #[arg(long, default_value = "front.json")]
        out: PathBuf,
        /// Per-generation run log CSV (defaults next to the front file).
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Select one member of a saved front by metric importance.
    Select {
        #[arg(long)]
        front: PathBuf,
        /// Comma-separated revenue,qos,par weights (default balanced).
        #[arg(long)]
        importance: Option<String>,
        /// Selection report JSON (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a benchmark schedule and its objective values.
    Baseline {
        #[arg(long)]
        scenario: String,
        #[arg(long, value_enum)]
        kind: BaselineKind,
        /// Stationary price (defaults to the scenario's p_ref).
        #[arg(long)]
        price: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full pipeline and write report.json, tables.csv,
    /// boxplot.csv, fronts/, and runlogs/ into a directory.
    Report {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        runs: Option<usize>,
        /// Comma-separated revenue,qos,par weights for the selection.
        #[arg(long)]
        importance: Option<String>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

enum CliError {
    User(String),
    Internal(String),
}

impl CliError {
    fn message(&self) -> &str {
        match self {
            CliError::User(m) | CliError::Internal(m) => m,
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        if e.is_user_error() {
            CliError::User(e.to_string())
        } else {
            CliError::Internal(e.to_string())
        }
    }
}

fn user(e: impl std::fmt::Display) -> CliError {
    CliError::User(e.to_string())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Ingest {
            sessions,
            slots,
            slot_minutes,
            out,
        } => cmd_ingest(&sessions, slots, slot_minutes, &out),
        Command::Fit {
            observations,
            prior_log_a,
            prior_elasticity,
            prior_precision,
            min_obs,
            out,
        } => cmd_fit(
            &observations,
            prior_log_a,
            prior_elasticity,
            prior_precision,
            min_obs,
            &out,
        ),
        Command::Optimize {
            scenario,
            engine,
            seed,
            config,
            population,
            generations,
            out,
            log,
        } => cmd_optimize(
            &scenario,
            engine.into(),
            seed,
            config.as_deref(),
            population,
            generations,
            &out,
            log.as_deref(),
        ),
        Command::Select {
            front,
            importance,
            out,
        } => cmd_select(&front, importance.as_deref(), out.as_deref()),
        Command::Baseline {
            scenario,
            kind,
            price,
            out,
        } => cmd_baseline(&scenario, kind, price, out.as_deref()),
        Command::Report {
            scenario,
            config,
            seed,
            runs,
            importance,
            out,
        } => cmd_report(
            &scenario,
            config.as_deref(),
            seed,
            runs,
            importance.as_deref(),
            &out,
        ),
    }
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("json serialize") + "\n";
    std::fs::write(path, text).map_err(|e| user(format!("cannot write {}: {e}", path.display())))
}

fn parse_importance(spec: Option<&str>) -> Result<ImportanceVector, CliError> {
    let Some(spec) = spec else {
        return Ok(ImportanceVector::balanced());
    };
    let parts: Vec<f64> = spec
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| user(format!("bad importance {spec:?}: {e}")))?;
    if parts.len() != 3 {
        return Err(user(format!(
            "importance needs 3 comma-separated weights (revenue,qos,par), got {}",
            parts.len()
        )));
    }
    ImportanceVector::new(parts[0], parts[1], parts[2]).map_err(user)
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, CliError> {
    match path {
        Some(p) => Ok(ExperimentConfig::from_file(p)?),
        None => Ok(ExperimentConfig::default()),
    }
}

fn cmd_ingest(
    sessions: &Path,
    slots: usize,
    slot_minutes: u32,
    out: &Path,
) -> Result<(), CliError> {
    let grid = SlotGrid::new(slots, slot_minutes).map_err(user)?;
    let load = load_sessions(sessions, &grid).map_err(user)?;
    for warning in &load.warnings {
        eprintln!("warning: {warning}");
    }
    if !load.warnings.is_empty() {
        eprintln!(
            "warning: skipped {} malformed row(s), kept {}",
            load.warnings.len(),
            load.records.len()
        );
    }
    let demand = slot_demand(&load.records, &grid).map_err(user)?;
    let value = serde_json::json!({
        "grid": grid,
        "demand": demand,
    });
    write_json(out, &value)?;
    println!(
        "wrote demand profile for {} station(s) to {}",
        demand.len(),
        out.display()
    );
    Ok(())
}

fn cmd_fit(
    observations: &Path,
    prior_log_a: Option<f64>,
    prior_elasticity: Option<f64>,
    prior_precision: Option<f64>,
    min_obs: Option<usize>,
    out: &Path,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(observations)
        .map_err(|e| user(format!("cannot read {}: {e}", observations.display())))?;
    let obs: Vec<DemandObservation> = serde_json::from_str(&text)
        .map_err(|e| user(format!("{}: {e}", observations.display())))?;
    let defaults = FitConfig::default();
    let cfg = FitConfig {
        prior_mean: [
            prior_log_a.unwrap_or(defaults.prior_mean[0]),
            prior_elasticity.unwrap_or(defaults.prior_mean[1]),
        ],
        prior_precision: prior_precision.unwrap_or(defaults.prior_precision),
        min_obs_per_station: min_obs.unwrap_or(defaults.min_obs_per_station),
    };
    let models = fit(&obs, &cfg).map_err(user)?;
    write_json(out, &models_to_json(&models))?;
    println!("fitted {} station model(s) to {}", models.len(), out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    scenario: &str,
    engine: EngineKind,
    seed: u64,
    config: Option<&Path>,
    population: Option<usize>,
    generations: Option<usize>,
    out: &Path,
    log: Option<&Path>,
) -> Result<(), CliError> {
    let scenario = load_scenario(scenario)?;
    let cfg = load_config(config)?;
    let mut ga = cfg.ga_for(engine);
    if let Some(p) = population {
        ga.population = p;
    }
    if let Some(g) = generations {
        ga.generations = g;
    }
    ga.seed = seed;
    let run = optimize_prices(&scenario, engine, &ga, Some(cfg.ref_partitions)).map_err(user)?;
    for note in &run.notes {
        eprintln!("note: {note}");
    }
    run.pareto.save(out).map_err(user)?;
    let log_path = log
        .map(Path::to_path_buf)
        .unwrap_or_else(|| out.with_extension("log.csv"));
    std::fs::write(&log_path, run_log_csv(&run.history))
        .map_err(|e| user(format!("cannot write {}: {e}", log_path.display())))?;
    println!(
        "{}: front of {} schedule(s) to {} (log: {})",
        engine.as_str(),
        run.pareto.len(),
        out.display(),
        log_path.display()
    );
    Ok(())
}

fn cmd_select(front: &Path, importance: Option<&str>, out: Option<&Path>) -> Result<(), CliError> {
    let pareto = ParetoSet::load(front).map_err(user)?;
    let importance = parse_importance(importance)?;
    let selection = select(&pareto, &importance).map_err(user)?;
    let report = SelectionReport::new(&selection, &importance);
    let value = serde_json::to_value(&report).expect("selection serialize");
    match out {
        Some(path) => write_json(path, &value)?,
        None => println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("selection json")
        ),
    }
    Ok(())
}

fn cmd_baseline(
    scenario: &str,
    kind: BaselineKind,
    price: Option<f64>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let scenario = load_scenario(scenario)?;
    let schedule = match kind {
        BaselineKind::Sp => {
            stationary(&scenario, price.unwrap_or(scenario.p_ref)).map_err(user)?
        }
        BaselineKind::Tou => {
            let sched = scenario
                .tou
                .clone()
                .unwrap_or_else(|| TouSchedule::default_for_grid(&scenario.grid));
            tou(&scenario, &sched).map_err(user)?
        }
    };
    let objectives = evaluate(&scenario, &schedule);
    let value = serde_json::json!({
        "schedule": schedule,
        "objectives": objectives,
    });
    match out {
        Some(path) => write_json(path, &value)?,
        None => println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("baseline json")
        ),
    }
    Ok(())
}

fn cmd_report(
    scenario: &str,
    config: Option<&Path>,
    seed: u64,
    runs: Option<usize>,
    importance: Option<&str>,
    out: &Path,
) -> Result<(), CliError> {
    let scenario = load_scenario(scenario)?;
    let mut cfg = load_config(config)?;
    if let Some(r) = runs {
        cfg.runs = r;
    }
    if importance.is_some() {
        cfg.importance = parse_importance(importance)?.weights;
    }
    let report = run_experiment(&scenario, &cfg, seed)?;
    write_report(out, &report)?;
    if let Some(elapsed) = report.wall_time {
        eprintln!("pipeline finished in {:.2}s", elapsed.as_secs_f64());
    }
    println!(
        "{:<12} {:>12} {:>8} {:>8}",
        "approach", "revenue", "qos", "par"
    );
    for row in &report.approaches {
        println!(
            "{:<12} {:>12.2} {:>8.3} {:>8.3}",
            row.approach, row.revenue, row.qos, row.par
        );
    }
    println!("report written to {}", out.display());
    Ok(())
}
