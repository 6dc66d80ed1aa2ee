//! Das-Dennis reference directions on the unit simplex.

use serde::{Deserialize, Serialize};

/// Structured reference directions: all vectors with components from
/// `{0, 1/p, ..., p/p}` summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferencePointSet {
    pub points: Vec<Vec<f64>>,
    pub partitions: usize,
}

pub fn das_dennis(partitions: usize, dims: usize) -> ReferencePointSet {
    assert!(partitions >= 1, "need at least one partition");
    assert!(dims >= 2, "need at least two dimensions");
    let mut points = Vec::with_capacity(expected_count(partitions, dims));
    let mut point = vec![0.0; dims];
    fill(&mut points, &mut point, partitions, partitions, 0);
    ReferencePointSet { points, partitions }
}

fn fill(points: &mut Vec<Vec<f64>>, point: &mut Vec<f64>, partitions: usize, left: usize, depth: usize) {
    if depth == point.len() - 1 {
        point[depth] = left as f64 / partitions as f64;
        points.push(point.clone());
        return;
    }
    for i in 0..=left {
        point[depth] = i as f64 / partitions as f64;
        fill(points, point, partitions, left - i, depth + 1);
    }
}

/// C(p + m - 1, m - 1): how many points das_dennis(p, m) produces.
pub fn expected_count(partitions: usize, dims: usize) -> usize {
    let mut count: u128 = 1;
    for i in 0..(dims - 1) {
        count = count * (partitions + dims - 1 - i) as u128 / (i + 1) as u128;
    }
    count as usize
}

/// Largest partition count whose lattice fits within `max_points`.
pub fn partitions_for(dims: usize, max_points: usize) -> usize {
    let mut p = 1;
    while expected_count(p + 1, dims) <= max_points {
        p += 1;
    }
    p
}
