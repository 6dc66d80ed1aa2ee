//! Real-coded variation: simulated binary crossover and polynomial
//! mutation, both clipping children into the box bounds.

use rand::Rng;

use super::{GaConfig, MooError};

/// Simulated binary crossover. With probability `1 - crossover_prob` the
/// parents are returned unchanged; otherwise each gene recombines with
/// probability 1/2 using the spread factor derived from `sbx_eta`.
pub fn sbx_crossover<R: Rng>(
    a: &[f64],
    b: &[f64],
    cfg: &GaConfig,
    bounds: (f64, f64),
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>), MooError> {
    if a.len() != b.len() {
        return Err(MooError::LengthMismatch(a.len(), b.len()));
    }
    let (lo, hi) = bounds;
    let mut c1 = a.to_vec();
    let mut c2 = b.to_vec();
    if rng.gen::<f64>() > cfg.crossover_prob {
        return Ok((c1, c2));
    }
    let exponent = 1.0 / (cfg.sbx_eta + 1.0);
    for i in 0..a.len() {
        if rng.gen::<f64>() > 0.5 || (a[i] - b[i]).abs() <= 1e-14 {
            continue;
        }
        let u: f64 = rng.gen();
        let beta = if u <= 0.5 {
            (2.0 * u).powf(exponent)
        } else {
            (1.0 / (2.0 * (1.0 - u))).powf(exponent)
        };
        let x1 = 0.5 * ((1.0 + beta) * a[i] + (1.0 - beta) * b[i]);
        let x2 = 0.5 * ((1.0 - beta) * a[i] + (1.0 + beta) * b[i]);
        c1[i] = x1.clamp(lo, hi);
        c2[i] = x2.clamp(lo, hi);
    }
    Ok((c1, c2))
}

/// Polynomial mutation with per-gene probability
/// `mutation_prob.unwrap_or(1 / len)`.
pub fn polynomial_mutation<R: Rng>(
    genome: &[f64],
    cfg: &GaConfig,
    bounds: (f64, f64),
    rng: &mut R,
) -> Vec<f64> {
    let (lo, hi) = bounds;
    let span = hi - lo;
    let pm = cfg
        .mutation_prob
        .unwrap_or(1.0 / genome.len().max(1) as f64);
    let mut_pow = 1.0 / (cfg.mutation_eta + 1.0);
    let mut out = genome.to_vec();
    for x in out.iter_mut() {
        if rng.gen::<f64>() >= pm {
            continue;
        }
        if span <= 0.0 {
            continue;
        }
        let d1 = (*x - lo) / span;
        let d2 = (hi - *x) / span;
        let u: f64 = rng.gen();
        let delta = if u < 0.5 {
            let v = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(cfg.mutation_eta + 1.0);
            v.powf(mut_pow) - 1.0
        } else {
            let v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(cfg.mutation_eta + 1.0);
            1.0 - v.powf(mut_pow)
        };
        *x = (*x + delta * span).clamp(lo, hi);
    }
    out
}
