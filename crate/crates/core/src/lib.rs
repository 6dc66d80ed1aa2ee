//! Dynamic per-slot pricing for EV charging station fleets.
//!
//! The pipeline has three parts: a Bayesian log-log demand-price model
//! fitted from charging-session data, NSGA-II / NSGA-III multi-objective
//! optimization of revenue, quality of service, and peak-to-average ratio
//! over the price schedule, and pseudo-weight multi-criteria selection of
//! one schedule from the Pareto front. Stationary and time-of-use tariffs
//! serve as benchmarks, and the harness runs the whole comparison.

pub mod baselines;
pub mod demand_model;
pub mod harness;
pub mod ingest;
pub mod mcdm;
pub mod moo;
pub mod objectives;
pub mod pareto;

pub use demand_model::{fit, DemandModelPosterior, FitConfig};
pub use ingest::{DemandObservation, SessionRecord, SlotGrid};
pub use mcdm::{improvement_pct, pseudo_weights, select, Direction, ImportanceVector};
pub use moo::{EngineKind, GaConfig};
pub use objectives::{evaluate, ObjectiveTriple, PriceSchedule, Scenario};
pub use pareto::{ParetoMember, ParetoSet};
