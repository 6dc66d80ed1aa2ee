//! NSGA-II: rank-then-crowding survivor selection.

use super::crowding::crowding_distance;
use super::engine::{evolve, EvolutionResult, Individual};
use super::sorting::non_dominated_sort;
use super::{GaConfig, MooError, Problem};

/// Run NSGA-II. Survivors are filled front by front; the front that only
/// partially fits is truncated by descending crowding distance.
pub fn nsga2_run<P: Problem>(problem: &P, cfg: &GaConfig) -> Result<EvolutionResult, MooError> {
    let n = cfg.population;
    evolve(problem, cfg, move |combined, _rng, _notes| {
        survive(combined, n)
    })
}

fn survive(combined: Vec<Individual>, n: usize) -> Vec<Individual> {
    let objs: Vec<Vec<f64>> = combined.iter().map(|i| i.objectives.clone()).collect();
    let fronts = non_dominated_sort(&objs);
    let mut keep: Vec<usize> = Vec::with_capacity(n);
    for front in fronts {
        if keep.len() + front.len() <= n {
            keep.extend(front);
            if keep.len() == n {
                break;
            }
            continue;
        }
        let front_objs: Vec<Vec<f64>> = front.iter().map(|&i| objs[i].clone()).collect();
        let dist = crowding_distance(&front_objs);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&a, &b| {
            dist[b]
                .partial_cmp(&dist[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(front[a].cmp(&front[b]))
        });
        keep.extend(order.into_iter().take(n - keep.len()).map(|w| front[w]));
        break;
    }
    let mut selected: Vec<Option<Individual>> = combined.into_iter().map(Some).collect();
    keep.into_iter()
        .map(|i| selected[i].take().expect("index selected once"))
        .collect()
}
