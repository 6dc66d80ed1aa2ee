//! Charging-session ingestion and synthetic scenario generation.
//!
//! Raw sessions are aggregated onto a fixed slot grid: each session's energy
//! is spread over the slots it overlaps in proportion to overlap minutes,
//! then averaged across the distinct days present in the data. The synthetic
//! path draws demand from a known constant-elasticity model so downstream
//! fits can be checked against ground truth.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use chrono::NaiveDateTime;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demand_model::{fit, DemandModelPosterior, FitConfig};
use crate::objectives::{PriceSchedule, Scenario};

pub const MINUTES_PER_DAY: u32 = 1440;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read session file {path}: {source}")]
    Unreadable {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: zero valid rows ({skipped} skipped)")]
    ZeroValidRows { path: String, skipped: usize },
    #[error("invalid slot grid: {slots} slots x {minutes} min != 1440")]
    BadGrid { slots: usize, minutes: u32 },
    #[error("no sessions to aggregate")]
    NoSessions,
    #[error("price schedule does not match demand map: {0}")]
    StationMismatch(String),
    #[error("no (price, demand) pair is strictly positive")]
    NoObservations,
}

/// Partition of one day into equal slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotGrid {
    pub slots_per_day: usize,
    pub slot_minutes: u32,
}

impl Default for SlotGrid {
    fn default() -> Self {
        Self {
            slots_per_day: 96,
            slot_minutes: 15,
        }
    }
}

impl SlotGrid {
    pub fn new(slots_per_day: usize, slot_minutes: u32) -> Result<Self, IngestError> {
        let grid = Self {
            slots_per_day,
            slot_minutes,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        if self.slots_per_day as u64 * self.slot_minutes as u64 != MINUTES_PER_DAY as u64 {
            return Err(IngestError::BadGrid {
                slots: self.slots_per_day,
                minutes: self.slot_minutes,
            });
        }
        Ok(())
    }
}

/// One raw charging session, placed on the day of its connect time.
///
/// `disconnect_min` is measured from the same day start as `connect_min`
/// and may exceed 1440 when the session crosses midnight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub station_id: String,
    pub day: i64,
    pub connect_min: f64,
    pub disconnect_min: f64,
    pub energy_kwh: f64,
}

/// Loaded sessions plus one warning per malformed row that was skipped.
#[derive(Debug, Clone)]
pub struct SessionLoad {
    pub records: Vec<SessionRecord>,
    pub warnings: Vec<String>,
}

/// One (price, demand) training pair for the demand-price fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandObservation {
    pub station_id: String,
    pub slot_index: usize,
    pub price: f64,
    pub demand: f64,
}

#[derive(Deserialize)]
struct RawSession {
    #[serde(rename = "stationID")]
    station_id: String,
    #[serde(rename = "connectionTime")]
    connection_time: String,
    #[serde(rename = "disconnectTime")]
    disconnect_time: String,
    #[serde(rename = "kWhDelivered")]
    kwh_delivered: f64,
}

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    if let Ok(dt) = chrono::DateTime::parse_from_rfc3339(s) {
        return Some(dt.naive_utc());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt);
        }
    }
    None
}

fn session_from_raw(raw: RawSession, row: usize) -> Result<SessionRecord, String> {
    let connect = parse_timestamp(&raw.connection_time)
        .ok_or_else(|| format!("row {row}: bad connectionTime {:?}", raw.connection_time))?;
    let disconnect = parse_timestamp(&raw.disconnect_time)
        .ok_or_else(|| format!("row {row}: bad disconnectTime {:?}", raw.disconnect_time))?;
    if disconnect <= connect {
        return Err(format!(
            "row {row}: disconnect does not follow connect ({} <= {})",
            raw.disconnect_time, raw.connection_time
        ));
    }
    if !raw.kwh_delivered.is_finite() || raw.kwh_delivered < 0.0 {
        return Err(format!(
            "row {row}: kWhDelivered {} is negative or not finite",
            raw.kwh_delivered
        ));
    }
    let start_sec = connect.and_utc().timestamp();
    let day = start_sec.div_euclid(86_400);
    let connect_min = start_sec.rem_euclid(86_400) as f64 / 60.0;
    let duration_min = (disconnect - connect).num_seconds() as f64 / 60.0;
    Ok(SessionRecord {
        station_id: raw.station_id,
        day,
        connect_min,
        disconnect_min: connect_min + duration_min,
        energy_kwh: raw.kwh_delivered,
    })
}

/// Load sessions from a JSON array or a CSV file with the same column names.
///
/// Malformed rows are skipped and reported in [`SessionLoad::warnings`];
/// a file with no valid rows at all is an error.
pub fn load_sessions(path: &Path, grid: &SlotGrid) -> Result<SessionLoad, IngestError> {
    grid.validate()?;
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Unreadable {
        path: path.display().to_string(),
        source,
    })?;
    let display = path.display().to_string();
    if text.trim().is_empty() {
        return Err(IngestError::ZeroValidRows {
            path: display,
            skipped: 0,
        });
    }

    let is_csv = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("csv"))
        .unwrap_or(false);

    let mut records = Vec::new();
    let mut warnings = Vec::new();
    if is_csv {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        for (row, item) in reader.deserialize::<RawSession>().enumerate() {
            match item {
                Ok(raw) => match session_from_raw(raw, row) {
                    Ok(rec) => records.push(rec),
                    Err(w) => warnings.push(w),
                },
                Err(e) => warnings.push(format!("row {row}: {e}")),
            }
        }
    } else {
        let rows: Vec<serde_json::Value> =
            serde_json::from_str(&text).map_err(|e| IngestError::Parse {
                path: display.clone(),
                message: e.to_string(),
            })?;
        for (row, value) in rows.into_iter().enumerate() {
            match serde_json::from_value::<RawSession>(value) {
                Ok(raw) => match session_from_raw(raw, row) {
                    Ok(rec) => records.push(rec),
                    Err(w) => warnings.push(w),
                },
                Err(e) => warnings.push(format!("row {row}: {e}")),
            }
        }
    }

    if records.is_empty() {
        return Err(IngestError::ZeroValidRows {
            path: display,
            skipped: warnings.len(),
        });
    }
    Ok(SessionLoad { records, warnings })
}

/// Aggregate sessions into per-station mean demand per slot of day.
///
/// Each session's energy is prorated over the slots it overlaps by overlap
/// minutes; buckets are then divided by the number of distinct days in the
/// data, so the output is one representative day per station.
pub fn slot_demand(
    sessions: &[SessionRecord],
    grid: &SlotGrid,
) -> Result<BTreeMap<String, Vec<f64>>, IngestError> {
    grid.validate()?;
    if sessions.is_empty() {
        return Err(IngestError::NoSessions);
    }
    let t = grid.slots_per_day;
    let slot_min = grid.slot_minutes as f64;
    let days: BTreeSet<i64> = sessions.iter().map(|s| s.day).collect();
    let n_days = days.len() as f64;

    let mut demand: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for s in sessions {
        let start = s.day as f64 * MINUTES_PER_DAY as f64 + s.connect_min;
        let end = s.day as f64 * MINUTES_PER_DAY as f64 + s.disconnect_min;
        debug_assert!(end > start);
        let rate = s.energy_kwh / (end - start);
        let bucket = demand
            .entry(s.station_id.clone())
            .or_insert_with(|| vec![0.0; t]);
        let first = (start / slot_min).floor() as i64;
        let last = (end / slot_min).ceil() as i64;
        for abs_slot in first..last {
            let lo = abs_slot as f64 * slot_min;
            let hi = lo + slot_min;
            let overlap = end.min(hi) - start.max(lo);
            if overlap > 0.0 {
                let slot_of_day = abs_slot.rem_euclid(t as i64) as usize;
                bucket[slot_of_day] += rate * overlap;
            }
        }
    }
    for vec in demand.values_mut() {
        for v in vec.iter_mut() {
            *v /= n_days;
        }
    }
    Ok(demand)
}

/// Pair per-slot demand with a historical price schedule, keeping only the
/// strictly positive pairs the log-log model can use.
///
/// `stations` fixes the row order of `prices` and must cover exactly the
/// stations present in `demand`.
pub fn pair_with_prices(
    demand: &BTreeMap<String, Vec<f64>>,
    stations: &[String],
    prices: &PriceSchedule,
) -> Result<Vec<DemandObservation>, IngestError> {
    let demand_keys: BTreeSet<&String> = demand.keys().collect();
    let station_keys: BTreeSet<&String> = stations.iter().collect();
    if demand_keys != station_keys || prices.n_stations() != stations.len() {
        return Err(IngestError::StationMismatch(format!(
            "{} stations priced, {} stations with demand",
            prices.n_stations(),
            demand.len()
        )));
    }
    let mut observations = Vec::new();
    for (cs, station) in stations.iter().enumerate() {
        let station_demand = &demand[station];
        if station_demand.len() != prices.n_slots() {
            return Err(IngestError::StationMismatch(format!(
                "station {station}: {} demand slots vs {} price slots",
                station_demand.len(),
                prices.n_slots()
            )));
        }
        for (t, (&d, &p)) in station_demand
            .iter()
            .zip(prices.prices[cs].iter())
            .enumerate()
        {
            if p > 0.0 && d > 0.0 {
                observations.push(DemandObservation {
                    station_id: station.clone(),
                    slot_index: t,
                    price: p,
                    demand: d,
                });
            }
        }
    }
    if observations.is_empty() {
        return Err(IngestError::NoObservations);
    }
    Ok(observations)
}

/// Ground-truth demand parameters for one synthetic station.
#[derive(Debug, Clone, Copy)]
pub struct StationTruth {
    /// Demand level `a` of `D = a * P^c`.
    pub a: f64,
    /// Price elasticity `c`.
    pub c: f64,
    /// Log-space noise standard deviation.
    pub noise_sigma: f64,
}

fn gaussian_bump(t: f64, center: f64, width: f64) -> f64 {
    (-((t - center) * (t - center)) / (2.0 * width * width)).exp()
}

/// Daily demand shape with traffic peaks near slots 34 and 72, a deep
/// overnight valley, and mean 1. The late-evening tail stays near-empty so
/// fixed tariff windows cannot flatten it.
fn traffic_shape(t_slots: usize) -> Vec<f64> {
    let scale = t_slots as f64 / 96.0;
    let raw: Vec<f64> = (0..t_slots)
        .map(|t| {
            let x = t as f64;
            0.06 + 2.6
                * (gaussian_bump(x, 34.0 * scale, 5.0 * scale)
                    + gaussian_bump(x, 72.0 * scale, 5.0 * scale))
        })
        .collect();
    let mean = raw.iter().sum::<f64>() / t_slots as f64;
    raw.into_iter().map(|v| v / mean).collect()
}

/// Generate a synthetic scenario with known ground truth.
///
/// Observations are drawn as `exp(log a + c*log P + eps)` with
/// `eps ~ Normal(0, sigma^2)` from a generator seeded by `seed`, so the
/// output is fully deterministic per seed. The returned scenario embeds the
/// truth parameters as exact posteriors; callers exercising the fit path
/// replace them with posteriors fitted from the returned observations.
pub fn synth_scenario(
    truth: &[StationTruth],
    grid: &SlotGrid,
    price_history: &PriceSchedule,
    seed: u64,
) -> (Scenario, Vec<DemandObservation>) {
    assert!(!truth.is_empty(), "need at least one station");
    grid.validate().expect("valid slot grid");
    let n = truth.len();
    let t = grid.slots_per_day;
    assert_eq!(price_history.n_stations(), n, "price history station count");
    assert_eq!(price_history.n_slots(), t, "price history slot count");
    for row in &price_history.prices {
        assert!(row.iter().all(|&p| p > 0.0), "history prices must be > 0");
    }
    for st in truth {
        assert!(st.a > 0.0, "demand level a must be > 0");
        assert!(st.noise_sigma >= 0.0, "noise sigma must be >= 0");
    }

    let stations: Vec<String> = (1..=n).map(|i| format!("CS{i:02}")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut observations = Vec::with_capacity(n * t);
    for (cs, st) in truth.iter().enumerate() {
        let noise = if st.noise_sigma > 0.0 {
            Some(Normal::new(0.0, st.noise_sigma).expect("valid normal"))
        } else {
            None
        };
        for slot in 0..t {
            let price = price_history.prices[cs][slot];
            let eps = noise.map_or(0.0, |n| n.sample(&mut rng));
            let demand = (st.a.ln() + st.c * price.ln() + eps).exp();
            observations.push(DemandObservation {
                station_id: stations[cs].clone(),
                slot_index: slot,
                price,
                demand,
            });
        }
    }

    let all_prices: Vec<f64> = price_history.prices.iter().flatten().copied().collect();
    let p_ref = all_prices.iter().sum::<f64>() / all_prices.len() as f64;
    let p_min = (0.5 * all_prices.iter().cloned().fold(f64::INFINITY, f64::min)).max(0.01);
    let p_max = 2.0 * all_prices.iter().cloned().fold(0.0, f64::max);

    let shape = traffic_shape(t);
    let mut base_profile = Vec::with_capacity(n);
    let mut capacity = Vec::with_capacity(n);
    let mut models = Vec::with_capacity(n);
    for (cs, st) in truth.iter().enumerate() {
        let level = st.a * p_ref.powf(st.c);
        base_profile.push(shape.iter().map(|s| level * s).collect::<Vec<f64>>());
        // Constant per-station capacity at 1.25x the mean demand level, so
        // the traffic peaks bind at the reference price.
        capacity.push(vec![1.25 * level; t]);
        models.push(DemandModelPosterior {
            station_id: stations[cs].clone(),
            log_a_mean: st.a.ln(),
            c_mean: st.c,
            covariance: [[0.0, 0.0], [0.0, 0.0]],
            noise_variance: st.noise_sigma * st.noise_sigma,
            n_obs: t,
        });
    }

    let scenario = Scenario {
        stations,
        grid: *grid,
        p_min,
        p_max,
        p_ref,
        capacity,
        base_profile,
        models,
        revenue_mode: Default::default(),
        tou: None,
    };
    (scenario, observations)
}

pub const BUNDLED_SCENARIO_SEED: u64 = 20_240_601;

/// The bundled elastic benchmark scenario: 4 stations, 96 slots, elasticity
/// -1.2, capacity binding at the traffic peaks. Models are fitted from the
/// bundled synthetic observations, so the scenario reflects the full
/// fit-then-optimize pipeline. Also reachable from the CLI as the scenario
/// path `bundled:elastic`.
pub fn bundled_elastic_scenario() -> (Scenario, Vec<DemandObservation>) {
    let grid = SlotGrid::default();
    let truth = [
        StationTruth {
            a: 9.0,
            c: -1.2,
            noise_sigma: 0.05,
        },
        StationTruth {
            a: 11.0,
            c: -1.2,
            noise_sigma: 0.05,
        },
        StationTruth {
            a: 13.0,
            c: -1.2,
            noise_sigma: 0.05,
        },
        StationTruth {
            a: 10.0,
            c: -1.2,
            noise_sigma: 0.05,
        },
    ];
    // A three-level price history mirroring the default ToU windows gives
    // the fit distinct prices to identify elasticity from.
    let tou = crate::baselines::TouSchedule::default_for_grid(&grid);
    let history: Vec<Vec<f64>> = (0..truth.len())
        .map(|_| {
            (0..grid.slots_per_day)
                .map(|t| {
                    if tou.peak_slots.contains(&t) {
                        0.55
                    } else if tou.offpeak_slots.contains(&t) {
                        0.18
                    } else {
                        0.32
                    }
                })
                .collect()
        })
        .collect();
    let history = PriceSchedule { prices: history };
    let (mut scenario, observations) =
        synth_scenario(&truth, &grid, &history, BUNDLED_SCENARIO_SEED);
    scenario.p_min = 0.05;
    scenario.p_max = 1.0;

    let fitted = fit(&observations, &FitConfig::default()).expect("bundled fit");
    scenario.models = scenario
        .stations
        .iter()
        .map(|s| fitted[s].clone())
        .collect();
    (scenario, observations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn grid() -> SlotGrid {
        SlotGrid::default()
    }

    fn write_temp(contents: &str, ext: &str) -> tempfile::TempPath {
        let mut f = tempfile::Builder::new()
            .suffix(&format!(".{ext}"))
            .tempfile()
            .unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f.into_temp_path()
    }

    const VALID_ROW: &str = r#"{"stationID": "CS01", "connectionTime": "2024-05-01T08:00:00Z",
        "disconnectTime": "2024-05-01T10:00:00Z", "kWhDelivered": 6.0}"#;

    #[test]
    fn load_single_valid_row() {
        let path = write_temp(&format!("[{VALID_ROW}]"), "json");
        let load = load_sessions(&path, &grid()).unwrap();
        assert_eq!(load.records.len(), 1);
        assert!(load.warnings.is_empty());
        assert_eq!(load.records[0].station_id, "CS01");
        assert_eq!(load.records[0].connect_min, 480.0);
        assert_eq!(load.records[0].disconnect_min, 600.0);
    }

    #[test]
    fn load_counts_malformed_rows() {
        let bad = r#"{"stationID": "CS01", "connectionTime": "2024-05-01T10:00:00Z",
            "disconnectTime": "2024-05-01T08:00:00Z", "kWhDelivered": 6.0}"#;
        let path = write_temp(&format!("[{VALID_ROW},{bad}]"), "json");
        let load = load_sessions(&path, &grid()).unwrap();
        assert_eq!(load.records.len(), 1);
        assert_eq!(load.warnings.len(), 1);
    }

    #[test]
    fn load_empty_file_is_error() {
        let path = write_temp("", "json");
        let err = load_sessions(&path, &grid()).unwrap_err();
        assert!(matches!(err, IngestError::ZeroValidRows { .. }));
    }

    #[test]
    fn load_all_malformed_is_error() {
        let bad = r#"{"stationID": "CS01", "connectionTime": "nope",
            "disconnectTime": "2024-05-01T08:00:00Z", "kWhDelivered": 6.0}"#;
        let path = write_temp(&format!("[{bad}]"), "json");
        let err = load_sessions(&path, &grid()).unwrap_err();
        match err {
            IngestError::ZeroValidRows { skipped, .. } => assert_eq!(skipped, 1),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn load_missing_file_is_error() {
        let err = load_sessions(Path::new("/nonexistent/sessions.json"), &grid()).unwrap_err();
        assert!(matches!(err, IngestError::Unreadable { .. }));
    }

    #[test]
    fn load_csv_variant() {
        let csv = "stationID,connectionTime,disconnectTime,kWhDelivered\n\
                   CS01,2024-05-01T08:00:00Z,2024-05-01T10:00:00Z,6.0\n";
        let path = write_temp(csv, "csv");
        let load = load_sessions(&path, &grid()).unwrap();
        assert_eq!(load.records.len(), 1);
    }

    fn session(station: &str, day: i64, from_min: f64, to_min: f64, kwh: f64) -> SessionRecord {
        SessionRecord {
            station_id: station.into(),
            day,
            connect_min: from_min,
            disconnect_min: to_min,
            energy_kwh: kwh,
        }
    }

    #[test]
    fn slot_demand_uniform_split() {
        // Slots 4..=7 span minutes 60..120.
        let sessions = vec![session("A", 0, 60.0, 120.0, 8.0)];
        let demand = slot_demand(&sessions, &grid()).unwrap();
        let a = &demand["A"];
        for t in 4..8 {
            assert!((a[t] - 2.0).abs() < 1e-12);
        }
        assert_eq!(a.iter().filter(|&&v| v != 0.0).count(), 4);
    }

    #[test]
    fn slot_demand_prorates_partial_overlap() {
        // Half of slot 0 (minutes 7.5..15) plus all of slot 1 (15..30).
        let sessions = vec![session("A", 0, 7.5, 30.0, 3.0)];
        let demand = slot_demand(&sessions, &grid()).unwrap();
        let a = &demand["A"];
        assert!((a[0] - 1.0).abs() < 1e-12);
        assert!((a[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn slot_demand_averages_over_days() {
        let one_day = vec![session("A", 0, 60.0, 120.0, 8.0)];
        let two_days = vec![
            session("A", 0, 60.0, 120.0, 8.0),
            session("A", 1, 60.0, 120.0, 8.0),
        ];
        assert_eq!(
            slot_demand(&one_day, &grid()).unwrap(),
            slot_demand(&two_days, &grid()).unwrap()
        );
    }

    #[test]
    fn slot_demand_session_within_one_slot() {
        let sessions = vec![session("A", 0, 16.0, 29.0, 5.0)];
        let demand = slot_demand(&sessions, &grid()).unwrap();
        assert!((demand["A"][1] - 5.0).abs() < 1e-12);
        assert_eq!(demand["A"].iter().sum::<f64>(), 5.0);
    }

    #[test]
    fn slot_demand_crosses_midnight() {
        // 23:30 to 00:30 next day: half lands on slots 94/95, half on 0/1.
        let sessions = vec![session("A", 0, 1410.0, 1470.0, 4.0)];
        let demand = slot_demand(&sessions, &grid()).unwrap();
        let a = &demand["A"];
        assert!((a[94] - 1.0).abs() < 1e-12);
        assert!((a[95] - 1.0).abs() < 1e-12);
        assert!((a[0] - 1.0).abs() < 1e-12);
        assert!((a[1] - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn slot_demand_conserves_energy(
            starts in proptest::collection::vec(0.0f64..1200.0, 1..12),
            durations in proptest::collection::vec(1.0f64..400.0, 12),
            energies in proptest::collection::vec(0.0f64..50.0, 12),
        ) {
            let sessions: Vec<SessionRecord> = starts
                .iter()
                .enumerate()
                .map(|(i, &s)| session("A", 0, s, s + durations[i], energies[i]))
                .collect();
            let total: f64 = sessions.iter().map(|s| s.energy_kwh).sum();
            let demand = slot_demand(&sessions, &grid()).unwrap();
            let summed: f64 = demand["A"].iter().sum();
            prop_assert!((summed - total).abs() <= 1e-9 * total.max(1.0));
        }
    }

    fn two_slot_prices(p0: f64, p1: f64) -> PriceSchedule {
        PriceSchedule {
            prices: vec![vec![p0, p1]],
        }
    }

    #[test]
    fn pair_filters_non_positive_demand() {
        let mut demand = BTreeMap::new();
        demand.insert("A".to_string(), vec![2.0, 0.0]);
        let obs =
            pair_with_prices(&demand, &["A".to_string()], &two_slot_prices(0.30, 0.40)).unwrap();
        assert_eq!(obs.len(), 1);
        assert_eq!(obs[0].slot_index, 0);
    }

    #[test]
    fn pair_keeps_all_positive_pairs() {
        let mut demand = BTreeMap::new();
        demand.insert("A".to_string(), vec![2.0, 3.0]);
        let obs =
            pair_with_prices(&demand, &["A".to_string()], &two_slot_prices(0.30, 0.40)).unwrap();
        assert_eq!(obs.len(), 2);
    }

    #[test]
    fn pair_all_zero_demand_is_error() {
        let mut demand = BTreeMap::new();
        demand.insert("A".to_string(), vec![0.0, 0.0]);
        let err = pair_with_prices(&demand, &["A".to_string()], &two_slot_prices(0.30, 0.40))
            .unwrap_err();
        assert!(matches!(err, IngestError::NoObservations));
    }

    #[test]
    fn pair_output_bounded_by_station_slots() {
        let mut demand = BTreeMap::new();
        demand.insert("A".to_string(), vec![2.0, 3.0]);
        demand.insert("B".to_string(), vec![1.0, 0.0]);
        let prices = PriceSchedule {
            prices: vec![vec![0.3, 0.4], vec![0.3, 0.4]],
        };
        let obs = pair_with_prices(&demand, &["A".to_string(), "B".to_string()], &prices).unwrap();
        assert!(obs.len() <= 4);
    }

    fn unit_history(n: usize, t: usize, price: f64) -> PriceSchedule {
        PriceSchedule {
            prices: vec![vec![price; t]; n],
        }
    }

    #[test]
    fn synth_noiseless_at_unit_price() {
        let truth = [StationTruth {
            a: 10.0,
            c: -1.5,
            noise_sigma: 0.0,
        }];
        let (_, obs) = synth_scenario(&truth, &grid(), &unit_history(1, 96, 1.0), 7);
        assert!(obs.iter().all(|o| (o.demand - 10.0).abs() < 1e-12));
    }

    #[test]
    fn synth_noiseless_matches_power_law() {
        let truth = [StationTruth {
            a: 10.0,
            c: -1.5,
            noise_sigma: 0.0,
        }];
        let (_, obs) = synth_scenario(&truth, &grid(), &unit_history(1, 96, 4.0), 7);
        // 10 * 4^-1.5 = 1.25
        assert!(obs.iter().all(|o| (o.demand - 1.25).abs() < 1e-12));
    }

    #[test]
    fn synth_is_deterministic_per_seed() {
        let truth = [StationTruth {
            a: 10.0,
            c: -1.5,
            noise_sigma: 0.3,
        }];
        let history = unit_history(1, 96, 0.5);
        let (_, obs1) = synth_scenario(&truth, &grid(), &history, 99);
        let (_, obs2) = synth_scenario(&truth, &grid(), &history, 99);
        assert_eq!(obs1, obs2);
        let (_, obs3) = synth_scenario(&truth, &grid(), &history, 100);
        assert_ne!(obs1, obs3);
    }

    #[test]
    fn bundled_scenario_is_consistent() {
        let (scenario, observations) = bundled_elastic_scenario();
        scenario.validate().unwrap();
        assert_eq!(scenario.stations.len(), 4);
        assert_eq!(scenario.grid.slots_per_day, 96);
        assert_eq!(observations.len(), 4 * 96);
        // Fitted elasticity should sit near the ground truth of -1.2.
        for model in &scenario.models {
            assert!((model.c_mean - (-1.2)).abs() < 0.1, "c={}", model.c_mean);
        }
        // Peak base demand exceeds station capacity at the reference price.
        for (cs, profile) in scenario.base_profile.iter().enumerate() {
            let peak = profile.iter().cloned().fold(0.0, f64::max);
            assert!(peak > scenario.capacity[cs][0]);
        }
    }
}
