//! NSGA-III: reference-point niching for the partially fitting front.
//!
//! Survivor selection keeps whole fronts as in NSGA-II; the front that only
//! partially fits is filled by ideal-point translation, extreme-point
//! normalization, perpendicular-distance association to the reference
//! directions, and niche-count selection with seeded random tie-breaks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::engine::{evolve, EvolutionResult, Individual};
use super::refpoints::ReferencePointSet;
use super::sorting::non_dominated_sort;
use super::{GaConfig, MooError, Problem};

pub fn nsga3_run<P: Problem>(
    problem: &P,
    cfg: &GaConfig,
    refs: &ReferencePointSet,
) -> Result<EvolutionResult, MooError> {
    let m = problem.n_objectives();
    if refs.points.is_empty() || refs.points[0].len() != m {
        return Err(MooError::ReferenceDimensionMismatch(
            refs.points.first().map_or(0, |p| p.len()),
            m,
        ));
    }
    let n = cfg.population;
    let mut result = evolve(problem, cfg, move |combined, rng, notes| {
        survive(combined, n, refs, rng, notes)
    })?;
    if cfg.population < refs.points.len() {
        result.notes.insert(
            0,
            format!(
                "population {} is smaller than the {} reference points; some niches can never fill",
                cfg.population,
                refs.points.len()
            ),
        );
    }
    Ok(result)
}

fn survive(
    combined: Vec<Individual>,
    n: usize,
    refs: &ReferencePointSet,
    rng: &mut ChaCha8Rng,
    notes: &mut Vec<String>,
) -> Vec<Individual> {
    let objs: Vec<Vec<f64>> = combined.iter().map(|i| i.objectives.clone()).collect();
    let fronts = non_dominated_sort(&objs);

    let mut keep: Vec<usize> = Vec::with_capacity(n);
    let mut partial: Vec<usize> = Vec::new();
    for front in fronts {
        if keep.len() + front.len() <= n {
            keep.extend(front);
        } else {
            partial = front;
            break;
        }
    }

    if keep.len() < n {
        let mut pool = partial;
        // Everything considered this generation takes part in normalization.
        let members: Vec<usize> = keep.iter().chain(pool.iter()).copied().collect();
        let (normalized, degenerate) = normalize(&objs, &members);
        if degenerate {
            notes.push(
                "degenerate normalization (constant objective range); using unit denominators"
                    .into(),
            );
        }
        let assoc = associate(&normalized, &refs.points);
        let mut assoc_of: Vec<(usize, f64)> = vec![(0, f64::INFINITY); objs.len()];
        for (&i, &a) in members.iter().zip(&assoc) {
            assoc_of[i] = a;
        }
        let to_ref = |i: usize| assoc_of[i];

        let mut niche = vec![0usize; refs.points.len()];
        for &i in &keep {
            niche[to_ref(i).0] += 1;
        }

        if keep.is_empty() {
            // The first front alone overflows the population: keep the
            // per-objective minimizers so no objective's best value is lost.
            let m = objs[0].len();
            for j in 0..m {
                if keep.len() == n {
                    break;
                }
                let best = pool
                    .iter()
                    .copied()
                    .min_by(|&a, &b| {
                        objs[a][j]
                            .partial_cmp(&objs[b][j])
                            .unwrap_or(std::cmp::Ordering::Equal)
                            .then(a.cmp(&b))
                    })
                    .expect("partial front is non-empty");
                if let Some(pos) = pool.iter().position(|&i| i == best) {
                    pool.remove(pos);
                    niche[to_ref(best).0] += 1;
                    keep.push(best);
                }
            }
        }

        let mut active: Vec<bool> = vec![true; refs.points.len()];
        while keep.len() < n {
            let min_count = niche
                .iter()
                .zip(&active)
                .filter(|(_, &a)| a)
                .map(|(&c, _)| c)
                .min()
                .expect("at least one active reference point");
            let candidates: Vec<usize> = (0..refs.points.len())
                .filter(|&r| active[r] && niche[r] == min_count)
                .collect();
            let r = candidates[rng.gen_range(0..candidates.len())];

            let in_niche: Vec<usize> = pool.iter().copied().filter(|&i| to_ref(i).0 == r).collect();
            if in_niche.is_empty() {
                active[r] = false;
                continue;
            }
            let chosen = if niche[r] == 0 {
                in_niche
                    .iter()
                    .copied()
                    .min_by(|&a, &b| {
                        to_ref(a)
                            .1
                            .partial_cmp(&to_ref(b).1)
                            .unwrap_or(std::cmp::Ordering::Equal)
                            .then(a.cmp(&b))
                    })
                    .unwrap()
            } else {
                in_niche[rng.gen_range(0..in_niche.len())]
            };
            pool.retain(|&i| i != chosen);
            niche[r] += 1;
            keep.push(chosen);
        }
    }

    let mut selected: Vec<Option<Individual>> = combined.into_iter().map(Some).collect();
    keep.into_iter()
        .map(|i| selected[i].take().expect("index selected once"))
        .collect()
}

/// Translate by the ideal point and scale by the extreme-point intercepts.
/// Returns the normalized objectives of `members` (same order) and whether
/// the fallback to unit denominators was taken.
fn normalize(objs: &[Vec<f64>], members: &[usize]) -> (Vec<Vec<f64>>, bool) {
    let m = objs[0].len();
    let mut ideal = vec![f64::INFINITY; m];
    for &i in members {
        for j in 0..m {
            ideal[j] = ideal[j].min(objs[i][j]);
        }
    }
    let translated: Vec<Vec<f64>> = members
        .iter()
        .map(|&i| (0..m).map(|j| objs[i][j] - ideal[j]).collect())
        .collect();

    let mut intercepts = intercepts_from_extremes(&translated, m);
    let mut degenerate = false;
    if intercepts.is_none() {
        // Nadir fallback.
        let mut nadir = vec![0.0f64; m];
        for row in &translated {
            for j in 0..m {
                nadir[j] = nadir[j].max(row[j]);
            }
        }
        intercepts = Some(nadir);
    }
    let mut denom = intercepts.unwrap();
    for d in denom.iter_mut() {
        if !d.is_finite() || *d <= 1e-12 {
            *d = 1.0;
            degenerate = true;
        }
    }
    let normalized = translated
        .into_iter()
        .map(|row| row.iter().zip(&denom).map(|(v, d)| v / d).collect())
        .collect();
    (normalized, degenerate)
}

/// Intercepts of the hyperplane through the per-axis extreme points, found
/// by the achievement scalarizing function.
fn intercepts_from_extremes(translated: &[Vec<f64>], m: usize) -> Option<Vec<f64>> {
    let mut extremes = Vec::with_capacity(m);
    for j in 0..m {
        let mut best = 0usize;
        let mut best_asf = f64::INFINITY;
        for (i, row) in translated.iter().enumerate() {
            let asf = row
                .iter()
                .enumerate()
                .map(|(k, &v)| if k == j { v } else { v / 1e-6 })
                .fold(0.0f64, f64::max);
            if asf < best_asf {
                best_asf = asf;
                best = i;
            }
        }
        extremes.push(translated[best].clone());
    }
    // Solve E * a = 1; the intercept on axis j is 1 / a[j].
    let mut matrix = extremes;
    let mut rhs = vec![1.0f64; m];
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&a, &b| {
                matrix[a][col]
                    .abs()
                    .partial_cmp(&matrix[b][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if matrix[pivot][col].abs() < 1e-12 {
            return None;
        }
        matrix.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in (col + 1)..m {
            let factor = matrix[row][col] / matrix[col][col];
            for k in col..m {
                matrix[row][k] -= factor * matrix[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut a = vec![0.0f64; m];
    for row in (0..m).rev() {
        let mut sum = rhs[row];
        for k in (row + 1)..m {
            sum -= matrix[row][k] * a[k];
        }
        a[row] = sum / matrix[row][row];
    }
    let intercepts: Vec<f64> = a.iter().map(|&v| 1.0 / v).collect();
    if intercepts.iter().all(|&v| v.is_finite() && v > 1e-12) {
        Some(intercepts)
    } else {
        None
    }
}

/// Associate each normalized point with its closest reference direction by
/// perpendicular distance. Returns (reference index, distance) per point.
pub fn associate(normalized: &[Vec<f64>], refs: &[Vec<f64>]) -> Vec<(usize, f64)> {
    normalized
        .iter()
        .map(|point| {
            let mut best = (0usize, f64::INFINITY);
            for (r, dir) in refs.iter().enumerate() {
                let d = perpendicular_distance(point, dir);
                if d < best.1 {
                    best = (r, d);
                }
            }
            best
        })
        .collect()
}

fn perpendicular_distance(point: &[f64], dir: &[f64]) -> f64 {
    let dot: f64 = point.iter().zip(dir).map(|(p, d)| p * d).sum();
    let norm_sq: f64 = dir.iter().map(|d| d * d).sum();
    let scale = dot / norm_sq;
    point
        .iter()
        .zip(dir)
        .map(|(p, d)| {
            let diff = p - scale * d;
            diff * diff
        })
        .sum::<f64>()
        .sqrt()
}
