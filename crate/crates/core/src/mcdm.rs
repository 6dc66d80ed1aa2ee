//! Pseudo-weight decision making over a Pareto front.
//!
//! Each member's pseudo-weight in objective i is its normalized distance
//! from the front's worst value in i, renormalized so the weights sum to 1.
//! A preference (importance vector) picks the member whose pseudo-weight
//! vector is nearest in Euclidean distance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::objectives::ObjectiveTriple;
use crate::pareto::ParetoSet;

#[derive(Debug, Error)]
pub enum McdmError {
    #[error("cannot select from an empty front")]
    EmptyFront,
    #[error("importance vector needs non-negative weights with at least one positive")]
    InvalidImportance,
    #[error("improvement percentage undefined for a zero baseline")]
    ZeroBaseline,
}

/// Metric importance over (revenue, qos, par), normalized to sum 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImportanceVector {
    pub weights: [f64; 3],
}

impl ImportanceVector {
    pub fn new(revenue: f64, qos: f64, par: f64) -> Result<Self, McdmError> {
        let raw = [revenue, qos, par];
        if raw.iter().any(|w| !w.is_finite() || *w < 0.0) || raw.iter().sum::<f64>() <= 0.0 {
            return Err(McdmError::InvalidImportance);
        }
        let sum: f64 = raw.iter().sum();
        Ok(Self {
            weights: [raw[0] / sum, raw[1] / sum, raw[2] / sum],
        })
    }

    pub fn balanced() -> Self {
        Self {
            weights: [1.0 / 3.0; 3],
        }
    }
}

/// Pseudo-weight vectors for every front member, in member order.
///
/// Computed in minimization space; an objective with zero range across the
/// front contributes 0 before renormalization. A single-member front (or a
/// front with no spread at all) gets uniform weights.
pub fn pseudo_weights(front: &ParetoSet) -> Vec<[f64; 3]> {
    let mins_objs: Vec<[f64; 3]> = front.members.iter().map(|m| m.min_space()).collect();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for obj in &mins_objs {
        for i in 0..3 {
            lo[i] = lo[i].min(obj[i]);
            hi[i] = hi[i].max(obj[i]);
        }
    }
    mins_objs
        .iter()
        .map(|obj| {
            let mut w = [0.0f64; 3];
            for i in 0..3 {
                let range = hi[i] - lo[i];
                if range > 0.0 {
                    w[i] = (hi[i] - obj[i]) / range;
                }
            }
            let sum: f64 = w.iter().sum();
            if sum <= 0.0 {
                [1.0 / 3.0; 3]
            } else {
                [w[0] / sum, w[1] / sum, w[2] / sum]
            }
        })
        .collect()
}

/// The selected member and its decision context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub index: usize,
    pub pseudo_weight: [f64; 3],
    pub objectives: ObjectiveTriple,
}

/// Pick the member whose pseudo-weight vector is closest to the importance
/// vector. Distance ties break by higher revenue, then by lower index.
pub fn select(front: &ParetoSet, importance: &ImportanceVector) -> Result<Selection, McdmError> {
    if front.is_empty() {
        return Err(McdmError::EmptyFront);
    }
    let weights = pseudo_weights(front);
    let distance = |w: &[f64; 3]| -> f64 {
        w.iter()
            .zip(&importance.weights)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    let best_distance = weights.iter().map(distance).fold(f64::INFINITY, f64::min);
    let mut chosen = None;
    for (i, w) in weights.iter().enumerate() {
        if distance(w) > best_distance + 1e-12 {
            continue;
        }
        let revenue = front.members[i].revenue;
        match chosen {
            None => chosen = Some((i, revenue)),
            Some((_, best_rev)) if revenue > best_rev => chosen = Some((i, revenue)),
            _ => {}
        }
    }
    let (index, _) = chosen.expect("front is non-empty");
    Ok(Selection {
        index,
        pseudo_weight: weights[index],
        objectives: front.members[index].objectives(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Maximize,
    Minimize,
}

/// Percentage improvement of `new` over `old` in the metric's natural
/// direction: gains are positive for maximization and reductions positive
/// for minimization.
pub fn improvement_pct(new: f64, old: f64, direction: Direction) -> Result<f64, McdmError> {
    if old == 0.0 {
        return Err(McdmError::ZeroBaseline);
    }
    Ok(match direction {
        Direction::Maximize => 100.0 * (new - old) / old,
        Direction::Minimize => 100.0 * (old - new) / old,
    })
}

/// Selection report for the external JSON interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub selected_index: usize,
    pub pseudo_weights: [f64; 3],
    pub importance: [f64; 3],
    pub objectives_raw: ObjectiveTriple,
}

impl SelectionReport {
    pub fn new(selection: &Selection, importance: &ImportanceVector) -> Self {
        Self {
            selected_index: selection.index,
            pseudo_weights: selection.pseudo_weight,
            importance: importance.weights,
            objectives_raw: selection.objectives,
        }
    }
}
