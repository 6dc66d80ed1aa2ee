//! Crowding distance within one front.

/// Per-member crowding distance: boundary members of each objective get
/// +infinity, interior members the sum over objectives of normalized gaps
/// between their neighbors. An objective with zero range contributes
/// nothing.
pub fn crowding_distance(front: &[Vec<f64>]) -> Vec<f64> {
    let k = front.len();
    if k == 0 {
        return Vec::new();
    }
    let mut dist = vec![0.0f64; k];
    if k <= 2 {
        return vec![f64::INFINITY; k];
    }
    let m = front[0].len();
    let mut order: Vec<usize> = (0..k).collect();
    for j in 0..m {
        order.sort_by(|&a, &b| {
            front[a][j]
                .partial_cmp(&front[b][j])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        dist[order[0]] = f64::INFINITY;
        dist[order[k - 1]] = f64::INFINITY;
        let range = front[order[k - 1]][j] - front[order[0]][j];
        if range <= 0.0 {
            continue;
        }
        for w in 1..k - 1 {
            if dist[order[w]].is_finite() {
                dist[order[w]] += (front[order[w + 1]][j] - front[order[w - 1]][j]) / range;
            }
        }
    }
    dist
}
