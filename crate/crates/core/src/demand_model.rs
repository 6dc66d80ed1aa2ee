//! Demand-price quantification: conjugate Bayesian linear regression of
//! log demand on log price.
//!
//! The model is `E[D|P] = a * P^c`, linear in log-log space, fitted per
//! station with a Gaussian prior of mean `prior_mean` and isotropic
//! precision `lambda` (in noise-precision units, so `lambda = 0` recovers
//! ordinary least squares and large `lambda` pins the posterior to the
//! prior). Stations with too few observations fall back to a posterior
//! pooled over all stations.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::DemandObservation;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("station {0}: all observations share one price and prior precision is zero; elasticity is unidentifiable")]
    SingularDesign(String),
    #[error("need at least 2 observations to fit a line, got {0}")]
    TooFewObservations(usize),
    #[error("station {station}: observation with non-positive price or demand")]
    NonPositive { station: String },
    #[error("price must be > 0, got {0}")]
    NonPositivePrice(f64),
    #[error("cannot read models file {path}: {message}")]
    ModelsFile { path: String, message: String },
}

/// Fitted per-station parameters of the log-log demand model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandModelPosterior {
    pub station_id: String,
    /// Posterior mean of `log a`.
    pub log_a_mean: f64,
    /// Posterior mean of the price elasticity `c`.
    pub c_mean: f64,
    /// Posterior covariance over (log a, c).
    pub covariance: [[f64; 2]; 2],
    /// Residual variance of log demand.
    pub noise_variance: f64,
    pub n_obs: usize,
}

impl DemandModelPosterior {
    /// Expected demand at `price`: the log-normal predictive mean
    /// `exp(log_a + c*log p + sigma^2 / 2)`.
    pub fn predict_demand(&self, price: f64) -> Result<f64, FitError> {
        if !(price > 0.0) {
            return Err(FitError::NonPositivePrice(price));
        }
        Ok(self.predictive_mean(price))
    }

    /// Price elasticity of demand (the fitted exponent).
    pub fn elasticity(&self) -> f64 {
        self.c_mean
    }

    pub(crate) fn predictive_mean(&self, price: f64) -> f64 {
        (self.log_a_mean + self.c_mean * price.ln() + self.noise_variance / 2.0).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Prior mean for (log a, c).
    pub prior_mean: [f64; 2],
    /// Isotropic prior precision `lambda` >= 0.
    pub prior_precision: f64,
    /// Stations with fewer observations than this receive the pooled fit.
    pub min_obs_per_station: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            prior_mean: [0.0, -1.0],
            prior_precision: 0.01,
            min_obs_per_station: 20,
        }
    }
}

/// Fit one posterior per station.
///
/// Stations with at least `min_obs_per_station` observations get their own
/// conjugate fit; the rest share the posterior fitted on all observations
/// pooled together.
pub fn fit(
    observations: &[DemandObservation],
    cfg: &FitConfig,
) -> Result<BTreeMap<String, DemandModelPosterior>, FitError> {
    assert!(cfg.prior_precision >= 0.0, "prior precision must be >= 0");
    let mut by_station: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    let mut pooled: Vec<(f64, f64)> = Vec::with_capacity(observations.len());
    for obs in observations {
        if !(obs.price > 0.0 && obs.demand > 0.0) {
            return Err(FitError::NonPositive {
                station: obs.station_id.clone(),
            });
        }
        let pair = (obs.price.ln(), obs.demand.ln());
        by_station
            .entry(obs.station_id.as_str())
            .or_default()
            .push(pair);
        pooled.push(pair);
    }
    if pooled.len() < 2 {
        return Err(FitError::TooFewObservations(pooled.len()));
    }

    let mut pooled_posterior: Option<DemandModelPosterior> = None;
    let mut models = BTreeMap::new();
    for (station, pairs) in &by_station {
        let posterior = if pairs.len() >= cfg.min_obs_per_station.max(2) {
            fit_pairs(station, pairs, cfg)?
        } else {
            let pooled = match &pooled_posterior {
                Some(p) => p.clone(),
                None => {
                    let p = fit_pairs("(pooled)", &pooled, cfg)?;
                    pooled_posterior = Some(p.clone());
                    p
                }
            };
            DemandModelPosterior {
                station_id: station.to_string(),
                ..pooled
            }
        };
        models.insert(station.to_string(), posterior);
    }
    Ok(models)
}

/// Conjugate posterior for pairs (x, y) = (log price, log demand).
fn fit_pairs(
    station: &str,
    pairs: &[(f64, f64)],
    cfg: &FitConfig,
) -> Result<DemandModelPosterior, FitError> {
    let n = pairs.len();
    if n < 2 {
        return Err(FitError::TooFewObservations(n));
    }
    let nf = n as f64;
    let lambda = cfg.prior_precision;
    let sx: f64 = pairs.iter().map(|p| p.0).sum();
    let sy: f64 = pairs.iter().map(|p| p.1).sum();
    let sxx: f64 = pairs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pairs.iter().map(|p| p.0 * p.1).sum();

    let x_mean = sx / nf;
    let x_var: f64 = pairs.iter().map(|p| (p.0 - x_mean) * (p.0 - x_mean)).sum();
    if lambda == 0.0 && x_var <= 1e-12 * sxx.abs().max(1.0) {
        return Err(FitError::SingularDesign(station.to_string()));
    }

    // A = lambda*I + X'X, b = lambda*m0 + X'y; posterior mean = A^-1 b.
    let a00 = lambda + nf;
    let a01 = sx;
    let a11 = lambda + sxx;
    let b0 = lambda * cfg.prior_mean[0] + sy;
    let b1 = lambda * cfg.prior_mean[1] + sxy;
    let det = a00 * a11 - a01 * a01;
    if det <= 0.0 {
        return Err(FitError::SingularDesign(station.to_string()));
    }
    let log_a_mean = (a11 * b0 - a01 * b1) / det;
    let c_mean = (a00 * b1 - a01 * b0) / det;

    let rss: f64 = pairs
        .iter()
        .map(|&(x, y)| {
            let r = y - (log_a_mean + c_mean * x);
            r * r
        })
        .sum();
    let dof = (nf - 2.0).max(1.0);
    let noise_variance = (rss / dof).max(0.0);

    let inv = [
        [a11 / det, -a01 / det],
        [-a01 / det, a00 / det],
    ];
    let covariance = [
        [noise_variance * inv[0][0], noise_variance * inv[0][1]],
        [noise_variance * inv[1][0], noise_variance * inv[1][1]],
    ];

    Ok(DemandModelPosterior {
        station_id: station.to_string(),
        log_a_mean,
        c_mean,
        covariance,
        noise_variance,
        n_obs: n,
    })
}

#[derive(Serialize, Deserialize)]
struct ModelRecord {
    log_a_mean: f64,
    c_mean: f64,
    covariance: [[f64; 2]; 2],
    noise_variance: f64,
    n_obs: usize,
}

/// Serialize fitted models as a JSON object keyed by station id.
pub fn models_to_json(models: &BTreeMap<String, DemandModelPosterior>) -> serde_json::Value {
    let map: BTreeMap<&str, ModelRecord> = models
        .iter()
        .map(|(id, m)| {
            (
                id.as_str(),
                ModelRecord {
                    log_a_mean: m.log_a_mean,
                    c_mean: m.c_mean,
                    covariance: m.covariance,
                    noise_variance: m.noise_variance,
                    n_obs: m.n_obs,
                },
            )
        })
        .collect();
    serde_json::to_value(map).expect("models serialize")
}

pub fn models_from_json(
    value: serde_json::Value,
) -> Result<BTreeMap<String, DemandModelPosterior>, serde_json::Error> {
    let map: BTreeMap<String, ModelRecord> = serde_json::from_value(value)?;
    Ok(map
        .into_iter()
        .map(|(id, r)| {
            let m = DemandModelPosterior {
                station_id: id.clone(),
                log_a_mean: r.log_a_mean,
                c_mean: r.c_mean,
                covariance: r.covariance,
                noise_variance: r.noise_variance,
                n_obs: r.n_obs,
            };
            (id, m)
        })
        .collect())
}

pub fn load_models(path: &Path) -> Result<BTreeMap<String, DemandModelPosterior>, FitError> {
    let text = std::fs::read_to_string(path).map_err(|e| FitError::ModelsFile {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| FitError::ModelsFile {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    models_from_json(value).map_err(|e| FitError::ModelsFile {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
