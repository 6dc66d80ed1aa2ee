//! Objective evaluation for candidate price schedules: revenue, quality of
//! service, and peak-to-average ratio over one shared demand matrix.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::TouSchedule;
use crate::demand_model::DemandModelPosterior;
use crate::ingest::SlotGrid;

/// Floor for per-slot demand when it appears in a ratio denominator.
pub const DEMAND_FLOOR_KWH: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ObjectiveError {
    #[error("scenario invalid: {0}")]
    InvalidScenario(String),
    #[error("price schedule is {rows}x{cols}, scenario needs {want_rows}x{want_cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("price {price} at station {cs}, slot {t} outside [{min}, {max}]")]
    PriceOutOfBounds {
        cs: usize,
        t: usize,
        price: f64,
        min: f64,
        max: f64,
    },
    #[error("cannot read scenario {path}: {message}")]
    ScenarioFile { path: String, message: String },
}

/// Whether revenue bills capacity-capped deliveries (default) or the raw
/// model demand.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RevenueMode {
    #[default]
    Capped,
    Literal,
}

/// The full optimization instance.
#[derive(Debug, Clone, Serialize)]
pub struct Scenario {
    pub stations: Vec<String>,
    pub grid: SlotGrid,
    pub p_min: f64,
    pub p_max: f64,
    /// Reference price at which `base_profile` was observed.
    pub p_ref: f64,
    /// Deliverable energy per station and slot (kWh).
    pub capacity: Vec<Vec<f64>>,
    /// Historical per-slot mean demand at `p_ref` (kWh).
    pub base_profile: Vec<Vec<f64>>,
    /// Fitted demand models, aligned with `stations`.
    pub models: Vec<DemandModelPosterior>,
    #[serde(default)]
    pub revenue_mode: RevenueMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tou: Option<TouSchedule>,
}

pub fn default_p_min() -> f64 {
    0.01
}

impl Scenario {
    pub fn n_stations(&self) -> usize {
        self.stations.len()
    }

    pub fn n_slots(&self) -> usize {
        self.grid.slots_per_day
    }

    pub fn validate(&self) -> Result<(), ObjectiveError> {
        let bad = |m: String| Err(ObjectiveError::InvalidScenario(m));
        if self.stations.is_empty() {
            return bad("no stations".into());
        }
        self.grid
            .validate()
            .map_err(|e| ObjectiveError::InvalidScenario(e.to_string()))?;
        if !(0.0 < self.p_min && self.p_min < self.p_max) {
            return bad(format!("need 0 < p_min < p_max, got {} / {}", self.p_min, self.p_max));
        }
        if !(self.p_ref > 0.0) {
            return bad(format!("p_ref must be > 0, got {}", self.p_ref));
        }
        let n = self.n_stations();
        let t = self.n_slots();
        for (name, matrix) in [("capacity", &self.capacity), ("base_profile", &self.base_profile)]
        {
            if matrix.len() != n || matrix.iter().any(|row| row.len() != t) {
                return bad(format!("{name} is not {n}x{t}"));
            }
            if matrix.iter().flatten().any(|v| !v.is_finite() || *v < 0.0) {
                return bad(format!("{name} has negative or non-finite entries"));
            }
        }
        if self.models.len() != n {
            return bad(format!("{} models for {n} stations", self.models.len()));
        }
        for (station, model) in self.stations.iter().zip(&self.models) {
            if &model.station_id != station {
                return bad(format!(
                    "model order mismatch: expected {station}, found {}",
                    model.station_id
                ));
            }
        }
        if let Some(tou) = &self.tou {
            tou.validate(self.p_max)
                .map_err(|e| ObjectiveError::InvalidScenario(e.to_string()))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, ObjectiveError> {
        let text = std::fs::read_to_string(path).map_err(|e| ObjectiveError::ScenarioFile {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let file: ScenarioFile =
            serde_json::from_str(&text).map_err(|e| ObjectiveError::ScenarioFile {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
        let models_by_id = match (file.models, file.models_file) {
            (Some(value), _) => crate::demand_model::models_from_json(value).map_err(|e| {
                ObjectiveError::ScenarioFile {
                    path: path.display().to_string(),
                    message: format!("models: {e}"),
                }
            })?,
            (None, Some(rel)) => {
                let models_path = path.parent().unwrap_or(Path::new(".")).join(rel);
                crate::demand_model::load_models(&models_path).map_err(|e| {
                    ObjectiveError::ScenarioFile {
                        path: path.display().to_string(),
                        message: e.to_string(),
                    }
                })?
            }
            (None, None) => {
                return Err(ObjectiveError::ScenarioFile {
                    path: path.display().to_string(),
                    message: "neither \"models\" nor \"models_file\" present".into(),
                })
            }
        };
        let mut models = Vec::with_capacity(file.stations.len());
        for station in &file.stations {
            let model = models_by_id.get(station).cloned().ok_or_else(|| {
                ObjectiveError::ScenarioFile {
                    path: path.display().to_string(),
                    message: format!("no model for station {station}"),
                }
            })?;
            models.push(model);
        }
        let scenario = Scenario {
            stations: file.stations,
            grid: file.grid,
            p_min: file.p_min,
            p_max: file.p_max,
            p_ref: file.p_ref,
            capacity: file.capacity,
            base_profile: file.base_profile,
            models,
            revenue_mode: file.revenue_mode,
            tou: file.tou,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Serialize with models inlined under `"models"`.
    pub fn to_json(&self) -> serde_json::Value {
        let models: BTreeMap<String, DemandModelPosterior> = self
            .models
            .iter()
            .map(|m| (m.station_id.clone(), m.clone()))
            .collect();
        let mut value = serde_json::to_value(self).expect("scenario serialize");
        value["models"] = crate::demand_model::models_to_json(&models);
        value
    }
}

#[derive(Deserialize)]
struct ScenarioFile {
    stations: Vec<String>,
    grid: SlotGrid,
    #[serde(default = "default_p_min")]
    p_min: f64,
    p_max: f64,
    p_ref: f64,
    capacity: Vec<Vec<f64>>,
    base_profile: Vec<Vec<f64>>,
    #[serde(default)]
    models: Option<serde_json::Value>,
    #[serde(default)]
    models_file: Option<String>,
    #[serde(default)]
    revenue_mode: RevenueMode,
    #[serde(default)]
    tou: Option<TouSchedule>,
}

/// The decision variable: one price per station and slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSchedule {
    pub prices: Vec<Vec<f64>>,
}

impl PriceSchedule {
    pub fn uniform(n_stations: usize, n_slots: usize, price: f64) -> Self {
        Self {
            prices: vec![vec![price; n_slots]; n_stations],
        }
    }

    pub fn from_genome(genome: &[f64], n_stations: usize, n_slots: usize) -> Self {
        assert_eq!(genome.len(), n_stations * n_slots);
        Self {
            prices: genome.chunks(n_slots).map(|row| row.to_vec()).collect(),
        }
    }

    pub fn to_genome(&self) -> Vec<f64> {
        self.prices.iter().flatten().copied().collect()
    }

    pub fn n_stations(&self) -> usize {
        self.prices.len()
    }

    pub fn n_slots(&self) -> usize {
        self.prices.first().map_or(0, |row| row.len())
    }

    pub fn validate_bounds(&self, s: &Scenario) -> Result<(), ObjectiveError> {
        if self.n_stations() != s.n_stations()
            || self.prices.iter().any(|row| row.len() != s.n_slots())
        {
            return Err(ObjectiveError::DimensionMismatch {
                rows: self.n_stations(),
                cols: self.n_slots(),
                want_rows: s.n_stations(),
                want_cols: s.n_slots(),
            });
        }
        for (cs, row) in self.prices.iter().enumerate() {
            for (t, &price) in row.iter().enumerate() {
                if !(s.p_min..=s.p_max).contains(&price) {
                    return Err(ObjectiveError::PriceOutOfBounds {
                        cs,
                        t,
                        price,
                        min: s.p_min,
                        max: s.p_max,
                    });
                }
            }
        }
        Ok(())
    }
}

/// The three objective values in their natural (reporting) orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveTriple {
    pub revenue: f64,
    pub qos: f64,
    pub par: f64,
}

impl ObjectiveTriple {
    /// Map into minimization space: (-revenue, -qos, par).
    pub fn to_min_space(&self) -> [f64; 3] {
        [-self.revenue, -self.qos, self.par]
    }

    pub fn from_min_space(v: [f64; 3]) -> Self {
        Self {
            revenue: -v[0],
            qos: -v[1],
            par: v[2],
        }
    }
}

/// Model demand per station and slot at the scheduled prices: the station's
/// base profile scaled by its model's relative response to price,
/// `base * predict(p) / predict(p_ref)`.
pub fn demand_matrix(s: &Scenario, p: &PriceSchedule) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(s.n_stations());
    for (cs, model) in s.models.iter().enumerate() {
        let at_ref = model.predictive_mean(s.p_ref);
        let row: Vec<f64> = s.base_profile[cs]
            .iter()
            .zip(&p.prices[cs])
            .map(|(&base, &price)| {
                debug_assert!(price > 0.0);
                base * model.predictive_mean(price) / at_ref
            })
            .collect();
        out.push(row);
    }
    out
}

/// Entry-wise minimum of demand and capacity.
pub fn delivered(s: &Scenario, demand: &[Vec<f64>]) -> Vec<Vec<f64>> {
    demand
        .iter()
        .zip(&s.capacity)
        .map(|(drow, crow)| drow.iter().zip(crow).map(|(&d, &c)| d.min(c)).collect())
        .collect()
}

fn revenue_from(s: &Scenario, p: &PriceSchedule, demand: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for cs in 0..s.n_stations() {
        for t in 0..s.n_slots() {
            let billed = match s.revenue_mode {
                RevenueMode::Capped => demand[cs][t].min(s.capacity[cs][t]),
                RevenueMode::Literal => demand[cs][t],
            };
            total += p.prices[cs][t] * billed;
        }
    }
    total
}

fn par_from(demand: &[Vec<f64>]) -> f64 {
    let n = demand.len();
    let t = demand[0].len();
    let mut sum = 0.0;
    for row in demand {
        let peak = row.iter().cloned().fold(0.0, f64::max);
        for &d in row {
            sum += peak / d.max(DEMAND_FLOOR_KWH);
        }
    }
    sum / (n * t) as f64
}

fn qos_from(s: &Scenario, demand: &[Vec<f64>]) -> f64 {
    let n = demand.len();
    let t = demand[0].len();
    let mut sum = 0.0;
    for (cs, row) in demand.iter().enumerate() {
        for (slot, &d) in row.iter().enumerate() {
            if d <= DEMAND_FLOOR_KWH {
                // Nothing requested, nothing denied.
                sum += 1.0;
            } else {
                sum += d.min(s.capacity[cs][slot]) / d;
            }
        }
    }
    sum / (n * t) as f64
}

/// Total revenue for the schedule.
pub fn f_revenue(s: &Scenario, p: &PriceSchedule) -> f64 {
    revenue_from(s, p, &demand_matrix(s, p))
}

/// Average peak-to-average ratio: each station's day peak divided by its
/// per-slot demand, averaged over stations and slots.
pub fn f_par(s: &Scenario, p: &PriceSchedule) -> f64 {
    par_from(&demand_matrix(s, p))
}

/// Average fraction of requested demand actually delivered.
pub fn f_qos(s: &Scenario, p: &PriceSchedule) -> f64 {
    qos_from(s, &demand_matrix(s, p))
}

/// All three objectives from one shared demand matrix.
pub fn evaluate(s: &Scenario, p: &PriceSchedule) -> ObjectiveTriple {
    let demand = demand_matrix(s, p);
    ObjectiveTriple {
        revenue: revenue_from(s, p, &demand),
        qos: qos_from(s, &demand),
        par: par_from(&demand),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn model(station: &str, a: f64, c: f64) -> DemandModelPosterior {
        DemandModelPosterior {
            station_id: station.into(),
            log_a_mean: a.ln(),
            c_mean: c,
            covariance: [[0.0; 2]; 2],
            noise_variance: 0.0,
            n_obs: 10,
        }
    }

    /// A toy scenario with explicit base profile, capacity, and elasticity.
    fn scenario(base: Vec<Vec<f64>>, capacity: Vec<Vec<f64>>, c: f64) -> Scenario {
        let n = base.len();
        let t = base[0].len();
        let grid = SlotGrid::new(t, (1440 / t) as u32).unwrap();
        Scenario {
            stations: (0..n).map(|i| format!("CS{i}")).collect(),
            grid,
            p_min: 0.01,
            p_max: 10.0,
            p_ref: 0.2,
            capacity,
            base_profile: base,
            models: (0..n).map(|i| model(&format!("CS{i}"), 5.0, c)).collect(),
            revenue_mode: RevenueMode::Capped,
            tou: None,
        }
    }

    #[test]
    fn demand_matrix_at_reference_price_is_base_profile() {
        let s = scenario(
            vec![vec![4.0, 2.0, 1.0, 3.0]],
            vec![vec![100.0; 4]],
            -1.0,
        );
        let p = PriceSchedule::uniform(1, 4, s.p_ref);
        let d = demand_matrix(&s, &p);
        for (got, want) in d[0].iter().zip(&s.base_profile[0]) {
            assert!((got - want).abs() <= 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn demand_matrix_ignores_price_when_inelastic() {
        let s = scenario(vec![vec![4.0, 2.0]], vec![vec![100.0; 2]], 0.0);
        let p = PriceSchedule {
            prices: vec![vec![0.05, 5.0]],
        };
        let d = demand_matrix(&s, &p);
        assert_eq!(d[0], vec![4.0, 2.0]);
    }

    #[test]
    fn demand_matrix_halves_when_price_doubles_at_unit_elasticity() {
        let s = scenario(vec![vec![4.0]], vec![vec![100.0]], -1.0);
        let p = PriceSchedule {
            prices: vec![vec![0.4]],
        };
        let d = demand_matrix(&s, &p);
        assert!((d[0][0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn delivered_caps_at_capacity() {
        let s = scenario(vec![vec![1.0, 1.0, 1.0]], vec![vec![3.0, 3.0, 0.0]], 0.0);
        let demand = vec![vec![5.0, 2.0, 4.0]];
        assert_eq!(delivered(&s, &demand), vec![vec![3.0, 2.0, 0.0]]);
    }

    #[test]
    fn revenue_sums_price_times_delivered() {
        // Inelastic demand [5, 4], huge capacity, prices [2, 3] -> 22.
        let s = scenario(vec![vec![5.0, 4.0]], vec![vec![100.0; 2]], 0.0);
        let p = PriceSchedule {
            prices: vec![vec![2.0, 3.0]],
        };
        assert!((f_revenue(&s, &p) - 22.0).abs() < 1e-12);
    }

    #[test]
    fn capped_revenue_bills_capacity_not_demand() {
        let mut s = scenario(vec![vec![5.0]], vec![vec![3.0]], 0.0);
        let p = PriceSchedule {
            prices: vec![vec![2.0]],
        };
        assert!((f_revenue(&s, &p) - 6.0).abs() < 1e-12);
        s.revenue_mode = RevenueMode::Literal;
        assert!((f_revenue(&s, &p) - 10.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn capped_revenue_never_exceeds_literal(
            base in proptest::collection::vec(0.0f64..20.0, 6),
            cap in proptest::collection::vec(0.0f64..10.0, 6),
            price in 0.05f64..5.0,
        ) {
            let mut s = scenario(vec![base], vec![cap], -1.2);
            let p = PriceSchedule::uniform(1, 6, price);
            let capped = f_revenue(&s, &p);
            s.revenue_mode = RevenueMode::Literal;
            let literal = f_revenue(&s, &p);
            prop_assert!(capped <= literal + 1e-12);
        }
    }

    #[test]
    fn par_of_uneven_demand() {
        let s = scenario(vec![vec![4.0, 2.0]], vec![vec![100.0; 2]], 0.0);
        let p = PriceSchedule::uniform(1, 2, 1.0);
        assert!((f_par(&s, &p) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn par_of_flat_demand_is_one() {
        let s = scenario(vec![vec![3.0, 3.0, 3.0]], vec![vec![100.0; 3]], 0.0);
        let p = PriceSchedule::uniform(1, 3, 1.0);
        assert!((f_par(&s, &p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn par_is_invariant_to_duplicated_stations() {
        let s = scenario(
            vec![vec![4.0, 2.0], vec![4.0, 2.0]],
            vec![vec![100.0; 2]; 2],
            0.0,
        );
        let p = PriceSchedule::uniform(2, 2, 1.0);
        assert!((f_par(&s, &p) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn qos_is_one_when_capacity_never_binds() {
        let s = scenario(vec![vec![4.0, 2.0]], vec![vec![100.0; 2]], 0.0);
        let p = PriceSchedule::uniform(1, 2, 1.0);
        assert!((f_qos(&s, &p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qos_single_binding_slot() {
        let s = scenario(vec![vec![4.0]], vec![vec![1.0]], 0.0);
        let p = PriceSchedule::uniform(1, 1, 1.0);
        assert!((f_qos(&s, &p) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn qos_averages_over_slots() {
        let s = scenario(vec![vec![4.0, 2.0]], vec![vec![2.0, 2.0]], 0.0);
        let p = PriceSchedule::uniform(1, 2, 1.0);
        assert!((f_qos(&s, &p) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn evaluate_bundles_the_three_objectives() {
        let s = scenario(vec![vec![3.0, 3.0]], vec![vec![100.0; 2]], 0.0);
        let p = PriceSchedule {
            prices: vec![vec![2.0, 3.0]],
        };
        let triple = evaluate(&s, &p);
        assert!((triple.qos - 1.0).abs() < 1e-12);
        assert!((triple.par - 1.0).abs() < 1e-12);
        assert!((triple.revenue - 15.0).abs() < 1e-12);
    }

    #[test]
    fn evaluate_embeds_par_example() {
        let s = scenario(vec![vec![4.0, 2.0]], vec![vec![100.0; 2]], 0.0);
        let p = PriceSchedule::uniform(1, 2, 1.0);
        assert!((evaluate(&s, &p).par - 1.5).abs() < 1e-12);
    }

    #[test]
    fn evaluate_is_deterministic() {
        let s = scenario(vec![vec![4.0, 2.0]], vec![vec![3.0, 1.0]], -1.2);
        let p = PriceSchedule {
            prices: vec![vec![0.3, 0.7]],
        };
        assert_eq!(evaluate(&s, &p), evaluate(&s, &p));
    }

    #[test]
    fn uniform_price_keeps_qos_and_par_constant_when_unbound() {
        // With one station, uniform prices, c < 0, and slack capacity the
        // demand scales uniformly: QoS stays 1 and PAR does not move.
        let s = scenario(vec![vec![4.0, 2.0, 1.0]], vec![vec![1e9; 3]], -1.3);
        let mut pars = Vec::new();
        for price in [s.p_min, s.p_ref, s.p_max] {
            let p = PriceSchedule::uniform(1, 3, price);
            let triple = evaluate(&s, &p);
            assert!((triple.qos - 1.0).abs() < 1e-12);
            pars.push(triple.par);
        }
        assert!((pars[0] - pars[1]).abs() < 1e-9);
        assert!((pars[1] - pars[2]).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn qos_in_unit_interval_and_par_at_least_one(
            base in proptest::collection::vec(0.1f64..20.0, 8),
            cap in proptest::collection::vec(0.0f64..10.0, 8),
            price in 0.05f64..5.0,
        ) {
            let s = scenario(vec![base], vec![cap], -1.2);
            let p = PriceSchedule::uniform(1, 8, price);
            let triple = evaluate(&s, &p);
            prop_assert!((0.0..=1.0).contains(&triple.qos));
            // Every demand entry is > the floor here, so PAR >= 1.
            prop_assert!(triple.par >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn bounds_validation_rejects_out_of_range_prices() {
        let s = scenario(vec![vec![1.0]], vec![vec![1.0]], 0.0);
        let p = PriceSchedule {
            prices: vec![vec![10.01]],
        };
        assert!(matches!(
            p.validate_bounds(&s),
            Err(ObjectiveError::PriceOutOfBounds { .. })
        ));
        let p = PriceSchedule {
            prices: vec![vec![10.0]],
        };
        assert!(p.validate_bounds(&s).is_ok());
    }

    #[test]
    fn genome_round_trip() {
        let p = PriceSchedule {
            prices: vec![vec![0.1, 0.2, 0.3], vec![0.4, 0.5, 0.6]],
        };
        let genome = p.to_genome();
        assert_eq!(genome, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        assert_eq!(PriceSchedule::from_genome(&genome, 2, 3), p);
    }

    #[test]
    fn scenario_file_round_trip_with_inline_models() {
        let s = scenario(vec![vec![4.0, 2.0]], vec![vec![3.0, 1.0]], -1.2);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scenario.json");
        std::fs::write(&path, serde_json::to_string_pretty(&s.to_json()).unwrap()).unwrap();
        let loaded = Scenario::from_file(&path).unwrap();
        assert_eq!(loaded.stations, s.stations);
        assert_eq!(loaded.base_profile, s.base_profile);
        assert_eq!(loaded.models, s.models);
    }

    #[test]
    fn scenario_file_with_models_reference() {
        let s = scenario(vec![vec![4.0, 2.0]], vec![vec![3.0, 1.0]], -1.2);
        let dir = tempfile::tempdir().unwrap();
        let models: BTreeMap<String, DemandModelPosterior> = s
            .models
            .iter()
            .map(|m| (m.station_id.clone(), m.clone()))
            .collect();
        std::fs::write(
            dir.path().join("models.json"),
            serde_json::to_string(&crate::demand_model::models_to_json(&models)).unwrap(),
        )
        .unwrap();
        let mut value = serde_json::to_value(&s).unwrap();
        value.as_object_mut().unwrap().remove("models");
        value["models_file"] = serde_json::json!("models.json");
        let path = dir.path().join("scenario.json");
        std::fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();
        let loaded = Scenario::from_file(&path).unwrap();
        assert_eq!(loaded.models, s.models);
    }
}
