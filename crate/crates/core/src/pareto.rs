//! Pareto fronts over price schedules.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moo::sorting::dominates;
use crate::objectives::ObjectiveTriple;

#[derive(Debug, Error)]
pub enum ParetoError {
    #[error("cannot read front file {path}: {message}")]
    File { path: String, message: String },
}

/// One non-dominated solution: the flattened schedule and its objectives
/// in reporting orientation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoMember {
    pub genome: Vec<f64>,
    pub revenue: f64,
    pub qos: f64,
    pub par: f64,
}

impl ParetoMember {
    pub fn objectives(&self) -> ObjectiveTriple {
        ObjectiveTriple {
            revenue: self.revenue,
            qos: self.qos,
            par: self.par,
        }
    }

    pub fn min_space(&self) -> [f64; 3] {
        [-self.revenue, -self.qos, self.par]
    }
}

/// Serializes as a plain JSON list of members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParetoSet {
    pub members: Vec<ParetoMember>,
}

impl ParetoSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_mutually_non_dominated(&self) -> bool {
        self.members.iter().all(|a| {
            self.members
                .iter()
                .all(|b| !dominates(&b.min_space(), &a.min_space()))
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), ParetoError> {
        let text = serde_json::to_string_pretty(self).expect("front serialize");
        std::fs::write(path, text + "\n").map_err(|e| ParetoError::File {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ParetoError> {
        let text = std::fs::read_to_string(path).map_err(|e| ParetoError::File {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        serde_json::from_str(&text).map_err(|e| ParetoError::File {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn member(revenue: f64, qos: f64, par: f64) -> ParetoMember {
        ParetoMember {
            genome: vec![0.5],
            revenue,
            qos,
            par,
        }
    }

    #[test]
    fn serializes_as_a_list() {
        let set = ParetoSet {
            members: vec![member(10.0, 0.5, 2.0)],
        };
        let json = serde_json::to_value(&set).unwrap();
        assert!(json.is_array());
        assert_eq!(json[0]["revenue"], 10.0);
    }

    #[test]
    fn detects_dominated_members() {
        let good = ParetoSet {
            members: vec![member(10.0, 0.5, 2.0), member(8.0, 0.9, 2.0)],
        };
        assert!(good.is_mutually_non_dominated());
        let bad = ParetoSet {
            members: vec![member(10.0, 0.5, 2.0), member(9.0, 0.4, 2.5)],
        };
        assert!(!bad.is_mutually_non_dominated());
    }

    #[test]
    fn save_load_round_trip() {
        let set = ParetoSet {
            members: vec![member(10.0, 0.5, 2.0), member(8.0, 0.9, 2.0)],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("front.json");
        set.save(&path).unwrap();
        assert_eq!(ParetoSet::load(&path).unwrap(), set);
    }
}
