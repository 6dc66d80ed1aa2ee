//! Stationary and time-of-use benchmark price schedules.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::objectives::{PriceSchedule, Scenario};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("stationary price {price} outside [{min}, {max}]")]
    PriceOutOfBounds { price: f64, min: f64, max: f64 },
    #[error("invalid ToU schedule: {0}")]
    InvalidTou(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TouPrices {
    pub peak: f64,
    pub normal: f64,
    pub offpeak: f64,
}

/// Three-state time-of-use tariff keyed to traffic windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TouSchedule {
    pub peak_slots: BTreeSet<usize>,
    pub offpeak_slots: BTreeSet<usize>,
    pub prices: TouPrices,
}

impl TouSchedule {
    /// Defaults: peak windows within 4 slots of the traffic peaks at slots
    /// 34 and 72, off-peak overnight (slots 0-24), prices 0.50/0.30/0.15.
    pub fn default_for_grid(grid: &crate::ingest::SlotGrid) -> Self {
        let t = grid.slots_per_day;
        let scale = t as f64 / 96.0;
        let window = |center: usize| -> BTreeSet<usize> {
            let c = (center as f64 * scale).round() as i64;
            let w = (4.0 * scale).round() as i64;
            (c - w..=c + w)
                .filter(|&s| s >= 0 && (s as usize) < t)
                .map(|s| s as usize)
                .collect()
        };
        let mut peak_slots = window(34);
        peak_slots.extend(window(72));
        let offpeak_slots = (0..=(24.0 * scale).round() as usize)
            .filter(|&s| s < t)
            .collect();
        Self {
            peak_slots,
            offpeak_slots,
            prices: TouPrices {
                peak: 0.50,
                normal: 0.30,
                offpeak: 0.15,
            },
        }
    }

    pub fn validate(&self, p_max: f64) -> Result<(), BaselineError> {
        if !self.peak_slots.is_disjoint(&self.offpeak_slots) {
            return Err(BaselineError::InvalidTou(
                "peak and off-peak slot sets overlap".into(),
            ));
        }
        for (name, price) in [
            ("peak", self.prices.peak),
            ("normal", self.prices.normal),
            ("offpeak", self.prices.offpeak),
        ] {
            if !(price > 0.0 && price <= p_max) {
                return Err(BaselineError::InvalidTou(format!(
                    "{name} price {price} outside (0, {p_max}]"
                )));
            }
        }
        Ok(())
    }

    pub fn price_at(&self, slot: usize) -> f64 {
        if self.peak_slots.contains(&slot) {
            self.prices.peak
        } else if self.offpeak_slots.contains(&slot) {
            self.prices.offpeak
        } else {
            self.prices.normal
        }
    }
}

impl Default for TouSchedule {
    fn default() -> Self {
        Self::default_for_grid(&crate::ingest::SlotGrid::default())
    }
}

/// One constant price across all stations and slots.
pub fn stationary(s: &Scenario, price: f64) -> Result<PriceSchedule, BaselineError> {
    if !(s.p_min..=s.p_max).contains(&price) {
        return Err(BaselineError::PriceOutOfBounds {
            price,
            min: s.p_min,
            max: s.p_max,
        });
    }
    Ok(PriceSchedule::uniform(s.n_stations(), s.n_slots(), price))
}

/// Time-of-use schedule, identical across stations.
pub fn tou(s: &Scenario, sched: &TouSchedule) -> Result<PriceSchedule, BaselineError> {
    sched.validate(s.p_max)?;
    for (name, price) in [
        ("peak", sched.prices.peak),
        ("normal", sched.prices.normal),
        ("offpeak", sched.prices.offpeak),
    ] {
        if price < s.p_min {
            return Err(BaselineError::InvalidTou(format!(
                "{name} price {price} below scenario p_min {}",
                s.p_min
            )));
        }
    }
    let row: Vec<f64> = (0..s.n_slots()).map(|t| sched.price_at(t)).collect();
    Ok(PriceSchedule {
        prices: vec![row; s.n_stations()],
    })
}
