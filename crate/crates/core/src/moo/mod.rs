//! From-scratch NSGA-II and NSGA-III over box-bounded real genomes, plus
//! the glue that runs them over price schedules.
//!
//! Both engines share the same loop: random initialization within bounds,
//! binary-tournament parent selection on (rank, crowding), SBX crossover,
//! polynomial mutation, and elitist mu+lambda survivor selection. They
//! differ only in how the front that partially fits is truncated: crowding
//! distance for NSGA-II, reference-point niching for NSGA-III. All
//! stochastic decisions come from one sequential generator seeded by the
//! run's seed, so results are reproducible byte for byte.

pub mod crowding;
mod engine;
pub mod nsga2;
pub mod nsga3;
pub mod refpoints;
pub mod sorting;
pub mod variation;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use engine::{EvolutionResult, GenerationStat, Individual};
pub use nsga2::nsga2_run;
pub use nsga3::nsga3_run;
pub use refpoints::{das_dennis, ReferencePointSet};

use crate::objectives::{evaluate, ObjectiveTriple, PriceSchedule, Scenario};
use crate::pareto::{ParetoMember, ParetoSet};

#[derive(Debug, Error)]
pub enum MooError {
    #[error("invalid GA config: {0}")]
    InvalidConfig(String),
    #[error("genome length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("reference points are {0}-dimensional but the problem has {1} objectives")]
    ReferenceDimensionMismatch(usize, usize),
}

/// A box-bounded minimization problem.
pub trait Problem {
    fn n_vars(&self) -> usize;
    fn n_objectives(&self) -> usize;
    /// Uniform (lo, hi) bounds applied to every gene.
    fn bounds(&self) -> (f64, f64);
    /// Objective values in minimization space.
    fn evaluate(&self, genome: &[f64]) -> Vec<f64>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub sbx_eta: f64,
    /// Per-gene mutation probability; `None` means `1 / n_vars`.
    pub mutation_prob: Option<f64>,
    pub mutation_eta: f64,
    pub seed: u64,
}

impl GaConfig {
    pub fn nsga2_defaults(seed: u64) -> Self {
        Self {
            population: 100,
            generations: 200,
            crossover_prob: 0.9,
            sbx_eta: 15.0,
            mutation_prob: None,
            mutation_eta: 20.0,
            seed,
        }
    }

    /// NSGA-III default: population 92 pairs with the 91 reference points
    /// of the 12-partition lattice.
    pub fn nsga3_defaults(seed: u64) -> Self {
        Self {
            population: 92,
            ..Self::nsga2_defaults(seed)
        }
    }

    pub fn validate(&self) -> Result<(), MooError> {
        if self.population < 4 || self.population % 2 != 0 {
            return Err(MooError::InvalidConfig(format!(
                "population must be even and >= 4, got {}",
                self.population
            )));
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return Err(MooError::InvalidConfig(format!(
                "crossover_prob {} outside [0, 1]",
                self.crossover_prob
            )));
        }
        if let Some(pm) = self.mutation_prob {
            if !(0.0..=1.0).contains(&pm) {
                return Err(MooError::InvalidConfig(format!(
                    "mutation_prob {pm} outside [0, 1]"
                )));
            }
        }
        if self.sbx_eta < 0.0 || self.mutation_eta < 0.0 {
            return Err(MooError::InvalidConfig(
                "distribution indices must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Nsga2,
    Nsga3,
}

impl EngineKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EngineKind::Nsga2 => "nsga2",
            EngineKind::Nsga3 => "nsga3",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            EngineKind::Nsga2 => "BM+NSGA-II",
            EngineKind::Nsga3 => "BM+NSGA-III",
        }
    }
}

impl std::str::FromStr for EngineKind {
    type Err = MooError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nsga2" => Ok(EngineKind::Nsga2),
            "nsga3" => Ok(EngineKind::Nsga3),
            other => Err(MooError::InvalidConfig(format!(
                "unknown engine {other:?} (expected nsga2 or nsga3)"
            ))),
        }
    }
}

/// Price optimization as a 3-objective minimization problem
/// (-revenue, -qos, par) over the flattened schedule.
pub struct PricingProblem<'a> {
    pub scenario: &'a Scenario,
}

impl Problem for PricingProblem<'_> {
    fn n_vars(&self) -> usize {
        self.scenario.n_stations() * self.scenario.n_slots()
    }

    fn n_objectives(&self) -> usize {
        3
    }

    fn bounds(&self) -> (f64, f64) {
        (self.scenario.p_min, self.scenario.p_max)
    }

    fn evaluate(&self, genome: &[f64]) -> Vec<f64> {
        let schedule = PriceSchedule::from_genome(
            genome,
            self.scenario.n_stations(),
            self.scenario.n_slots(),
        );
        evaluate(self.scenario, &schedule).to_min_space().to_vec()
    }
}

/// One per-generation run-log row in reporting orientation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_revenue: f64,
    pub best_qos: f64,
    pub best_par: f64,
    pub front_size: usize,
}

#[derive(Debug, Clone)]
pub struct PricingRun {
    pub pareto: ParetoSet,
    pub history: Vec<GenerationRecord>,
    pub notes: Vec<String>,
}

/// Run the chosen engine over a scenario's price space. `partitions`
/// controls the NSGA-III reference lattice (12 when `None`) and is ignored
/// by NSGA-II.
pub fn optimize_prices(
    scenario: &Scenario,
    engine: EngineKind,
    cfg: &GaConfig,
    partitions: Option<usize>,
) -> Result<PricingRun, MooError> {
    let problem = PricingProblem { scenario };
    let result = match engine {
        EngineKind::Nsga2 => nsga2_run(&problem, cfg)?,
        EngineKind::Nsga3 => {
            let refs = das_dennis(partitions.unwrap_or(12), 3);
            nsga3_run(&problem, cfg, &refs)?
        }
    };
    Ok(pricing_run(result))
}

fn pricing_run(result: EvolutionResult) -> PricingRun {
    let members = result
        .front
        .iter()
        .map(|ind| {
            let triple = ObjectiveTriple::from_min_space([
                ind.objectives[0],
                ind.objectives[1],
                ind.objectives[2],
            ]);
            ParetoMember {
                genome: ind.genome.clone(),
                revenue: triple.revenue,
                qos: triple.qos,
                par: triple.par,
            }
        })
        .collect();
    let history = result
        .history
        .iter()
        .map(|s| GenerationRecord {
            generation: s.generation,
            best_revenue: -s.best[0],
            best_qos: -s.best[1],
            best_par: s.best[2],
            front_size: s.front_size,
        })
        .collect();
    PricingRun {
        pareto: ParetoSet { members },
        history,
        notes: result.notes,
    }
}

/// Render the per-generation run log as CSV.
pub fn run_log_csv(history: &[GenerationRecord]) -> String {
    let mut out = String::from("generation,best_revenue,best_qos,best_par,front_size\n");
    for row in history {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.generation, row.best_revenue, row.best_qos, row.best_par, row.front_size
        ));
    }
    out
}
