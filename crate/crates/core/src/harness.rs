//! End-to-end experiment pipeline: evaluate both baselines, run both
//! engines over several seeded repetitions, select with the pseudo-weight
//! method, and emit the comparison report plus plot-ready data.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::baselines::{stationary, tou, TouSchedule};
use crate::demand_model::FitConfig;
use crate::ingest::bundled_elastic_scenario;
use crate::mcdm::{improvement_pct, select, Direction, ImportanceVector, Selection};
use crate::moo::{optimize_prices, EngineKind, GaConfig, GenerationRecord, run_log_csv};
use crate::objectives::{evaluate, ObjectiveTriple, Scenario};
use crate::pareto::ParetoSet;

pub const APPROACH_SP: &str = "SP";
pub const APPROACH_TOU: &str = "ToU";

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad input or configuration; maps to a user-facing exit code.
    #[error("[{stage}] {message}")]
    Input { stage: &'static str, message: String },
    /// A stage failed on data the pipeline itself produced.
    #[error("[{stage}] {message}")]
    Internal { stage: &'static str, message: String },
}

impl HarnessError {
    pub fn is_user_error(&self) -> bool {
        matches!(self, HarnessError::Input { .. })
    }
}

fn input(stage: &'static str, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Input {
        stage,
        message: e.to_string(),
    }
}

fn internal(stage: &'static str, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Internal {
        stage,
        message: e.to_string(),
    }
}

/// Optional overrides applied on top of the per-engine GA defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GaOverrides {
    pub population: Option<usize>,
    pub generations: Option<usize>,
    pub crossover_prob: Option<f64>,
    pub sbx_eta: Option<f64>,
    pub mutation_prob: Option<f64>,
    pub mutation_eta: Option<f64>,
}

impl GaOverrides {
    pub fn apply(&self, mut base: GaConfig) -> GaConfig {
        if let Some(v) = self.population {
            base.population = v;
        }
        if let Some(v) = self.generations {
            base.generations = v;
        }
        if let Some(v) = self.crossover_prob {
            base.crossover_prob = v;
        }
        if let Some(v) = self.sbx_eta {
            base.sbx_eta = v;
        }
        if let Some(v) = self.mutation_prob {
            base.mutation_prob = Some(v);
        }
        if let Some(v) = self.mutation_eta {
            base.mutation_eta = v;
        }
        base
    }
}

fn default_runs() -> usize {
    5
}

fn default_partitions() -> usize {
    12
}

fn default_importance() -> [f64; 3] {
    [1.0 / 3.0; 3]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub ga: GaOverrides,
    #[serde(default = "default_partitions")]
    pub ref_partitions: usize,
    #[serde(default)]
    pub fit: FitConfig,
    /// ToU tariff override; falls back to the scenario's, then defaults.
    #[serde(default)]
    pub tou: Option<TouSchedule>,
    /// Stationary benchmark price; defaults to the scenario's p_ref.
    #[serde(default)]
    pub sp_price: Option<f64>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    /// Importance used for the headline selection.
    #[serde(default = "default_importance")]
    pub importance: [f64; 3],
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            ga: GaOverrides::default(),
            ref_partitions: default_partitions(),
            fit: FitConfig::default(),
            tou: None,
            sp_price: None,
            runs: default_runs(),
            importance: default_importance(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| input("config", format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| input("config", format!("{}: {e}", path.display())))
    }

    pub fn ga_for(&self, engine: EngineKind) -> GaConfig {
        let base = match engine {
            EngineKind::Nsga2 => GaConfig::nsga2_defaults(0),
            EngineKind::Nsga3 => GaConfig::nsga3_defaults(0),
        };
        self.ga.apply(base)
    }

    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serialize");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        hex_digest(&hasher.finalize())
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Stable seed mix for (master seed, run index, engine tag).
pub fn derive_seed(master: u64, run: u64, tag: &str) -> u64 {
    fn splitmix(state: &mut u64) -> u64 {
        *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    let mut state = master;
    let mut seed = splitmix(&mut state);
    state ^= run.wrapping_mul(0xA076_1D64_78BD_642F);
    seed ^= splitmix(&mut state);
    for byte in tag.bytes() {
        state ^= u64::from(byte);
        seed ^= splitmix(&mut state);
    }
    seed
}

/// One GA execution kept for selection, sweeps, and persistence.
#[derive(Debug, Clone)]
pub struct EngineRun {
    pub seed: u64,
    pub pareto: ParetoSet,
    pub history: Vec<GenerationRecord>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachAverages {
    pub approach: String,
    pub revenue: f64,
    pub qos: f64,
    pub par: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovementRow {
    pub approach: String,
    pub revenue_pct: f64,
    pub qos_pct: f64,
    pub par_pct: f64,
}

/// Raw selected values per run, for box-plot emission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSamples {
    pub approach: String,
    pub revenue: Vec<f64>,
    pub qos: Vec<f64>,
    pub par: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub seed: u64,
    pub config_hash: String,
    pub runs: usize,
    pub approaches: Vec<ApproachAverages>,
    pub improvement_over_sp: Vec<ImprovementRow>,
    pub improvement_over_tou: Vec<ImprovementRow>,
    pub samples: Vec<MetricSamples>,
    #[serde(skip)]
    pub engine_runs: BTreeMap<String, Vec<EngineRun>>,
    #[serde(skip)]
    pub wall_time: Option<Duration>,
}

impl ExperimentReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialize") + "\n"
    }

    pub fn averages_for(&self, approach: &str) -> Option<&ApproachAverages> {
        self.approaches.iter().find(|a| a.approach == approach)
    }
}

/// Resolve a scenario argument: a file path, or `bundled:elastic` for the
/// built-in synthetic benchmark.
pub fn load_scenario(spec: &str) -> Result<Scenario, HarnessError> {
    if spec == "bundled:elastic" {
        return Ok(bundled_elastic_scenario().0);
    }
    if let Some(rest) = spec.strip_prefix("bundled:") {
        return Err(input(
            "scenario",
            format!("unknown bundled scenario {rest:?} (available: elastic)"),
        ));
    }
    Scenario::from_file(Path::new(spec)).map_err(|e| input("scenario", e))
}

fn tou_for(scenario: &Scenario, cfg: &ExperimentConfig) -> TouSchedule {
    cfg.tou
        .clone()
        .or_else(|| scenario.tou.clone())
        .unwrap_or_else(|| TouSchedule::default_for_grid(&scenario.grid))
}

/// Run the full pipeline: both baselines, `runs` seeded repetitions of both
/// engines, pseudo-weight selection, and report assembly. Deterministic
/// given (scenario, config, seed).
pub fn run_experiment(
    scenario: &Scenario,
    cfg: &ExperimentConfig,
    master_seed: u64,
) -> Result<ExperimentReport, HarnessError> {
    let started = std::time::Instant::now();
    scenario.validate().map_err(|e| input("scenario", e))?;
    if cfg.runs == 0 {
        return Err(input("config", "runs must be >= 1"));
    }

    let mut engine_runs: BTreeMap<String, Vec<EngineRun>> = BTreeMap::new();
    for engine in [EngineKind::Nsga2, EngineKind::Nsga3] {
        let mut runs = Vec::with_capacity(cfg.runs);
        for run in 0..cfg.runs {
            let mut ga = cfg.ga_for(engine);
            ga.seed = derive_seed(master_seed, run as u64, engine.as_str());
            let result = optimize_prices(scenario, engine, &ga, Some(cfg.ref_partitions))
                .map_err(|e| input("optimize", e))?;
            runs.push(EngineRun {
                seed: ga.seed,
                pareto: result.pareto,
                history: result.history,
                notes: result.notes,
            });
        }
        engine_runs.insert(engine.as_str().to_string(), runs);
    }

    let mut report = assemble_report(scenario, cfg, master_seed, engine_runs)?;
    report.wall_time = Some(started.elapsed());
    Ok(report)
}

/// Build the report tables from already-available fronts. Shared by
/// [`run_experiment`] and regeneration from persisted fronts, so the two
/// paths cannot drift apart.
pub fn assemble_report(
    scenario: &Scenario,
    cfg: &ExperimentConfig,
    master_seed: u64,
    engine_runs: BTreeMap<String, Vec<EngineRun>>,
) -> Result<ExperimentReport, HarnessError> {
    let importance = ImportanceVector::new(cfg.importance[0], cfg.importance[1], cfg.importance[2])
        .map_err(|e| input("config", e))?;

    let sp_schedule = stationary(scenario, cfg.sp_price.unwrap_or(scenario.p_ref))
        .map_err(|e| input("baseline", e))?;
    let sp = evaluate(scenario, &sp_schedule);
    let tou_schedule = tou(scenario, &tou_for(scenario, cfg)).map_err(|e| input("baseline", e))?;
    let tou_triple = evaluate(scenario, &tou_schedule);

    let mut approaches = vec![
        averages_row(APPROACH_SP, &[sp]),
        averages_row(APPROACH_TOU, &[tou_triple]),
    ];
    let mut samples = vec![
        samples_row(APPROACH_SP, &[sp]),
        samples_row(APPROACH_TOU, &[tou_triple]),
    ];

    for engine in [EngineKind::Nsga2, EngineKind::Nsga3] {
        let runs = engine_runs.get(engine.as_str()).ok_or_else(|| {
            internal("report", format!("missing runs for engine {}", engine.as_str()))
        })?;
        let mut selected = Vec::with_capacity(runs.len());
        for run in runs {
            let selection = select(&run.pareto, &importance).map_err(|e| internal("select", e))?;
            selected.push(selection.objectives);
        }
        approaches.push(averages_row(engine.label(), &selected));
        samples.push(samples_row(engine.label(), &selected));
    }

    let improvement_over_sp = improvement_rows(&approaches, APPROACH_SP, &approaches[2..])
        .map_err(|e| internal("report", e))?;
    let improvement_with_tou_row = improvement_rows(&approaches, APPROACH_SP, &approaches[1..2])
        .map_err(|e| internal("report", e))?;
    let improvement_over_sp = [improvement_with_tou_row, improvement_over_sp].concat();
    let improvement_over_tou = improvement_rows(&approaches, APPROACH_TOU, &approaches[2..])
        .map_err(|e| internal("report", e))?;

    Ok(ExperimentReport {
        seed: master_seed,
        config_hash: cfg.hash(),
        runs: cfg.runs,
        approaches,
        improvement_over_sp,
        improvement_over_tou,
        samples,
        engine_runs,
        wall_time: None,
    })
}

fn averages_row(approach: &str, triples: &[ObjectiveTriple]) -> ApproachAverages {
    let n = triples.len() as f64;
    ApproachAverages {
        approach: approach.to_string(),
        revenue: triples.iter().map(|t| t.revenue).sum::<f64>() / n,
        qos: triples.iter().map(|t| t.qos).sum::<f64>() / n,
        par: triples.iter().map(|t| t.par).sum::<f64>() / n,
    }
}

fn samples_row(approach: &str, triples: &[ObjectiveTriple]) -> MetricSamples {
    MetricSamples {
        approach: approach.to_string(),
        revenue: triples.iter().map(|t| t.revenue).collect(),
        qos: triples.iter().map(|t| t.qos).collect(),
        par: triples.iter().map(|t| t.par).collect(),
    }
}

fn improvement_rows(
    all: &[ApproachAverages],
    baseline: &str,
    candidates: &[ApproachAverages],
) -> Result<Vec<ImprovementRow>, crate::mcdm::McdmError> {
    let base = all
        .iter()
        .find(|a| a.approach == baseline)
        .expect("baseline row present");
    candidates
        .iter()
        .map(|row| {
            Ok(ImprovementRow {
                approach: row.approach.clone(),
                revenue_pct: improvement_pct(row.revenue, base.revenue, Direction::Maximize)?,
                qos_pct: improvement_pct(row.qos, base.qos, Direction::Maximize)?,
                par_pct: improvement_pct(row.par, base.par, Direction::Minimize)?,
            })
        })
        .collect()
}

/// Re-selection of every run's front under a different importance vector,
/// with percentage deltas against the balanced selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineSweep {
    pub engine: String,
    pub selected: Vec<ObjectiveTriple>,
    pub averages: ApproachAverages,
    pub delta_vs_balanced: ImprovementRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub importance: [f64; 3],
    pub engines: Vec<EngineSweep>,
}

/// Re-run only the decision stage over the report's persisted fronts.
pub fn importance_sweep(
    report: &ExperimentReport,
    importance: &ImportanceVector,
) -> Result<SweepResult, HarnessError> {
    let balanced = ImportanceVector::balanced();
    let mut engines = Vec::new();
    for engine in [EngineKind::Nsga2, EngineKind::Nsga3] {
        let runs = report.engine_runs.get(engine.as_str()).ok_or_else(|| {
            input("select", format!("no persisted fronts for {}", engine.as_str()))
        })?;
        let mut steered = Vec::with_capacity(runs.len());
        let mut baseline = Vec::with_capacity(runs.len());
        for run in runs {
            if run.pareto.is_empty() {
                return Err(input("select", "empty front"));
            }
            steered.push(select(&run.pareto, importance).map_err(|e| internal("select", e))?);
            baseline.push(select(&run.pareto, &balanced).map_err(|e| internal("select", e))?);
        }
        let selected: Vec<ObjectiveTriple> = steered.iter().map(|s| s.objectives).collect();
        let averages = averages_row(engine.label(), &selected);
        let balanced_avg = averages_row(
            engine.label(),
            &baseline.iter().map(|s| s.objectives).collect::<Vec<_>>(),
        );
        let delta_vs_balanced = ImprovementRow {
            approach: engine.label().to_string(),
            revenue_pct: improvement_pct(averages.revenue, balanced_avg.revenue, Direction::Maximize)
                .map_err(|e| internal("select", e))?,
            qos_pct: improvement_pct(averages.qos, balanced_avg.qos, Direction::Maximize)
                .map_err(|e| internal("select", e))?,
            par_pct: improvement_pct(averages.par, balanced_avg.par, Direction::Minimize)
                .map_err(|e| internal("select", e))?,
        };
        engines.push(EngineSweep {
            engine: engine.label().to_string(),
            selected,
            averages,
            delta_vs_balanced,
        });
    }
    Ok(SweepResult {
        importance: importance.weights,
        engines,
    })
}

/// Per-run balanced vs steered selections, for the steering checks.
pub fn selections_per_run(
    report: &ExperimentReport,
    engine: EngineKind,
    importance: &ImportanceVector,
) -> Result<Vec<Selection>, HarnessError> {
    let runs = report
        .engine_runs
        .get(engine.as_str())
        .ok_or_else(|| input("select", format!("no persisted fronts for {}", engine.as_str())))?;
    runs.iter()
        .map(|run| select(&run.pareto, importance).map_err(|e| internal("select", e)))
        .collect()
}

fn quantiles(samples: &[f64]) -> [f64; 5] {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let q = |p: f64| -> f64 {
        let pos = p * (xs.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        xs[lo] + frac * (xs[hi] - xs[lo])
    };
    [xs[0], q(0.25), q(0.5), q(0.75), xs[xs.len() - 1]]
}

pub fn tables_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("table,approach,revenue,qos,par\n");
    for row in &report.approaches {
        out.push_str(&format!(
            "averages,{},{},{},{}\n",
            row.approach, row.revenue, row.qos, row.par
        ));
    }
    for (name, rows) in [
        ("improvement_over_sp_pct", &report.improvement_over_sp),
        ("improvement_over_tou_pct", &report.improvement_over_tou),
    ] {
        for row in rows {
            out.push_str(&format!(
                "{name},{},{},{},{}\n",
                row.approach, row.revenue_pct, row.qos_pct, row.par_pct
            ));
        }
    }
    out
}

pub fn boxplot_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("approach,metric,min,q1,median,q3,max\n");
    for row in &report.samples {
        for (metric, values) in [
            ("revenue", &row.revenue),
            ("qos", &row.qos),
            ("par", &row.par),
        ] {
            let q = quantiles(values);
            out.push_str(&format!(
                "{},{metric},{},{},{},{},{}\n",
                row.approach, q[0], q[1], q[2], q[3], q[4]
            ));
        }
    }
    out
}

/// Write report.json, tables.csv, boxplot.csv, plus the per-run fronts and
/// run logs the report was assembled from.
pub fn write_report(dir: &Path, report: &ExperimentReport) -> Result<(), HarnessError> {
    let io_err = |e: std::io::Error| internal("report", e);
    std::fs::create_dir_all(dir).map_err(io_err)?;
    std::fs::write(dir.join("report.json"), report.to_json_string()).map_err(io_err)?;
    std::fs::write(dir.join("tables.csv"), tables_csv(report)).map_err(io_err)?;
    std::fs::write(dir.join("boxplot.csv"), boxplot_csv(report)).map_err(io_err)?;

    let fronts = dir.join("fronts");
    let runlogs = dir.join("runlogs");
    std::fs::create_dir_all(&fronts).map_err(io_err)?;
    std::fs::create_dir_all(&runlogs).map_err(io_err)?;
    for (engine, runs) in &report.engine_runs {
        for (k, run) in runs.iter().enumerate() {
            run.pareto
                .save(&fronts.join(format!("{engine}_run{k}.json")))
                .map_err(|e| internal("report", e))?;
            if !run.history.is_empty() {
                std::fs::write(
                    runlogs.join(format!("{engine}_run{k}.csv")),
                    run_log_csv(&run.history),
                )
                .map_err(io_err)?;
            }
        }
    }
    Ok(())
}

/// Rebuild the report from fronts persisted by [`write_report`], without
/// re-running the optimizer. Byte-identical to the original report.
pub fn report_from_front_files(
    scenario: &Scenario,
    cfg: &ExperimentConfig,
    master_seed: u64,
    dir: &Path,
) -> Result<ExperimentReport, HarnessError> {
    let fronts = dir.join("fronts");
    let mut engine_runs = BTreeMap::new();
    for engine in [EngineKind::Nsga2, EngineKind::Nsga3] {
        let mut runs = Vec::with_capacity(cfg.runs);
        for k in 0..cfg.runs {
            let path = fronts.join(format!("{}_run{k}.json", engine.as_str()));
            let pareto = ParetoSet::load(&path).map_err(|e| input("report", e))?;
            runs.push(EngineRun {
                seed: derive_seed(master_seed, k as u64, engine.as_str()),
                pareto,
                history: Vec::new(),
                notes: Vec::new(),
            });
        }
        engine_runs.insert(engine.as_str().to_string(), runs);
    }
    assemble_report(scenario, cfg, master_seed, engine_runs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg() -> ExperimentConfig {
        ExperimentConfig {
            ga: GaOverrides {
                population: Some(24),
                generations: Some(12),
                ..GaOverrides::default()
            },
            runs: 2,
            ..ExperimentConfig::default()
        }
    }

    fn quick_report() -> ExperimentReport {
        let (scenario, _) = bundled_elastic_scenario();
        run_experiment(&scenario, &quick_cfg(), 7).unwrap()
    }

    #[test]
    fn report_populates_all_four_approaches() {
        let report = quick_report();
        let names: Vec<&str> = report.approaches.iter().map(|a| a.approach.as_str()).collect();
        assert_eq!(names, vec!["SP", "ToU", "BM+NSGA-II", "BM+NSGA-III"]);
        for row in &report.approaches {
            assert!(row.revenue > 0.0);
            assert!((0.0..=1.0).contains(&row.qos));
            assert!(row.par >= 1.0);
        }
        assert_eq!(report.improvement_over_sp.len(), 3);
        assert_eq!(report.improvement_over_tou.len(), 2);
        assert!(report.wall_time.is_some());
    }

    #[test]
    fn report_is_deterministic_per_seed() {
        let a = quick_report();
        let b = quick_report();
        assert_eq!(a.to_json_string(), b.to_json_string());
        let (scenario, _) = bundled_elastic_scenario();
        let c = run_experiment(&scenario, &quick_cfg(), 8).unwrap();
        assert_ne!(a.to_json_string(), c.to_json_string());
    }

    #[test]
    fn improvement_cells_recompute_from_averages() {
        let report = quick_report();
        let sp = report.averages_for(APPROACH_SP).unwrap().clone();
        for row in &report.improvement_over_sp {
            let avg = report.averages_for(&row.approach).unwrap();
            let rev = improvement_pct(avg.revenue, sp.revenue, Direction::Maximize).unwrap();
            let qos = improvement_pct(avg.qos, sp.qos, Direction::Maximize).unwrap();
            let par = improvement_pct(avg.par, sp.par, Direction::Minimize).unwrap();
            assert_eq!(rev, row.revenue_pct);
            assert_eq!(qos, row.qos_pct);
            assert_eq!(par, row.par_pct);
        }
    }

    #[test]
    fn selections_come_from_their_fronts() {
        let report = quick_report();
        for engine in [EngineKind::Nsga2, EngineKind::Nsga3] {
            let selections =
                selections_per_run(&report, engine, &ImportanceVector::balanced()).unwrap();
            let runs = &report.engine_runs[engine.as_str()];
            assert_eq!(selections.len(), runs.len());
            for (sel, run) in selections.iter().zip(runs) {
                assert!(sel.index < run.pareto.len());
                assert_eq!(sel.objectives, run.pareto.members[sel.index].objectives());
                assert!(run.pareto.is_mutually_non_dominated());
            }
        }
    }

    #[test]
    fn regenerated_report_is_bit_identical() {
        let (scenario, _) = bundled_elastic_scenario();
        let cfg = quick_cfg();
        let report = run_experiment(&scenario, &cfg, 11).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_report(dir.path(), &report).unwrap();
        let regenerated = report_from_front_files(&scenario, &cfg, 11, dir.path()).unwrap();
        assert_eq!(report.to_json_string(), regenerated.to_json_string());
        let on_disk = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
        assert_eq!(on_disk, regenerated.to_json_string());
    }

    #[test]
    fn balanced_sweep_is_idempotent() {
        let report = quick_report();
        let sweep = importance_sweep(&report, &ImportanceVector::balanced()).unwrap();
        for engine_sweep in &sweep.engines {
            let headline = report.averages_for(&engine_sweep.engine).unwrap();
            assert_eq!(engine_sweep.averages.revenue, headline.revenue);
            assert_eq!(engine_sweep.delta_vs_balanced.revenue_pct, 0.0);
            assert_eq!(engine_sweep.delta_vs_balanced.par_pct, 0.0);
        }
    }

    #[test]
    fn steering_moves_selection_in_the_asked_direction() {
        let (scenario, _) = bundled_elastic_scenario();
        let cfg = ExperimentConfig {
            ga: GaOverrides {
                population: Some(60),
                generations: Some(60),
                ..GaOverrides::default()
            },
            runs: 2,
            ..ExperimentConfig::default()
        };
        let report = run_experiment(&scenario, &cfg, 3).unwrap();
        for engine in [EngineKind::Nsga2, EngineKind::Nsga3] {
            let balanced =
                selections_per_run(&report, engine, &ImportanceVector::balanced()).unwrap();
            let revenue_led = selections_per_run(
                &report,
                engine,
                &ImportanceVector::new(1.0, 0.0, 0.0).unwrap(),
            )
            .unwrap();
            let par_led = selections_per_run(
                &report,
                engine,
                &ImportanceVector::new(0.0, 0.0, 1.0).unwrap(),
            )
            .unwrap();
            for ((b, r), p) in balanced.iter().zip(&revenue_led).zip(&par_led) {
                assert!(r.objectives.revenue >= b.objectives.revenue);
                assert!(p.objectives.par <= b.objectives.par);
            }
        }
    }

    #[test]
    fn derive_seed_separates_runs_and_engines() {
        let a = derive_seed(42, 0, "nsga2");
        assert_eq!(a, derive_seed(42, 0, "nsga2"));
        assert_ne!(a, derive_seed(42, 1, "nsga2"));
        assert_ne!(a, derive_seed(42, 0, "nsga3"));
        assert_ne!(a, derive_seed(43, 0, "nsga2"));
    }

    #[test]
    fn load_scenario_resolves_the_bundled_name() {
        assert!(load_scenario("bundled:elastic").is_ok());
        assert!(load_scenario("bundled:nope").unwrap_err().is_user_error());
        assert!(load_scenario("/no/such/file.json")
            .unwrap_err()
            .is_user_error());
    }

    #[test]
    fn quantiles_interpolate() {
        let q = quantiles(&[4.0, 1.0, 3.0, 2.0]);
        assert_eq!(q, [1.0, 1.75, 2.5, 3.25, 4.0]);
        assert_eq!(quantiles(&[5.0]), [5.0; 5]);
    }

    #[test]
    fn csv_outputs_have_fixed_headers() {
        let report = quick_report();
        assert!(tables_csv(&report).starts_with("table,approach,revenue,qos,par\n"));
        assert!(boxplot_csv(&report).starts_with("approach,metric,min,q1,median,q3,max\n"));
        // 4 approaches x 3 metrics + header.
        assert_eq!(boxplot_csv(&report).lines().count(), 13);
    }
}
