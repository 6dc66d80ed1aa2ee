//! Shared evolutionary loop: initialization, tournament parent selection,
//! variation, and per-generation bookkeeping. Survivor selection is the
//! only part the two engines implement differently.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::crowding::crowding_distance;
use super::sorting::non_dominated_sort;
use super::variation::{polynomial_mutation, sbx_crossover};
use super::{GaConfig, MooError, Problem};

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Vec<f64>,
    /// Objectives in minimization space.
    pub objectives: Vec<f64>,
    pub rank: usize,
    pub crowding: f64,
}

/// Best value per objective and front size after each generation.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationStat {
    pub generation: usize,
    /// Minimum per objective over the surviving population.
    pub best: Vec<f64>,
    pub front_size: usize,
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    /// Final rank-0 front with duplicate objective vectors removed.
    pub front: Vec<Individual>,
    pub history: Vec<GenerationStat>,
    pub notes: Vec<String>,
}

pub(super) fn evolve<P, S>(
    problem: &P,
    cfg: &GaConfig,
    mut survive: S,
) -> Result<EvolutionResult, MooError>
where
    P: Problem,
    S: FnMut(Vec<Individual>, &mut ChaCha8Rng, &mut Vec<String>) -> Vec<Individual>,
{
    cfg.validate()?;
    if problem.n_vars() == 0 {
        return Err(MooError::InvalidConfig("problem has no variables".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut notes = Vec::new();

    let mut pop: Vec<Individual> = (0..cfg.population)
        .map(|_| {
            let genome = random_genome(problem, &mut rng);
            evaluated(problem, genome)
        })
        .collect();
    assign_ranks_and_crowding(&mut pop);
    let mut history = vec![stat(0, &pop)];

    for generation in 1..=cfg.generations {
        let offspring = make_offspring(problem, &pop, cfg, &mut rng);
        let mut combined = pop;
        combined.extend(offspring);
        pop = survive(combined, &mut rng, &mut notes);
        debug_assert_eq!(pop.len(), cfg.population);
        assign_ranks_and_crowding(&mut pop);
        history.push(stat(generation, &pop));
    }

    Ok(EvolutionResult {
        front: dedup_front(&pop),
        history,
        notes,
    })
}

fn random_genome<P: Problem>(problem: &P, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let (lo, hi) = problem.bounds();
    (0..problem.n_vars())
        .map(|_| lo + rng.gen::<f64>() * (hi - lo))
        .collect()
}

fn evaluated<P: Problem>(problem: &P, genome: Vec<f64>) -> Individual {
    let objectives = problem.evaluate(&genome);
    debug_assert_eq!(objectives.len(), problem.n_objectives());
    Individual {
        genome,
        objectives,
        rank: usize::MAX,
        crowding: 0.0,
    }
}

pub(super) fn assign_ranks_and_crowding(pop: &mut [Individual]) {
    let objs: Vec<Vec<f64>> = pop.iter().map(|i| i.objectives.clone()).collect();
    for (rank, front) in non_dominated_sort(&objs).iter().enumerate() {
        let front_objs: Vec<Vec<f64>> = front.iter().map(|&i| objs[i].clone()).collect();
        let dist = crowding_distance(&front_objs);
        for (&i, d) in front.iter().zip(dist) {
            pop[i].rank = rank;
            pop[i].crowding = d;
        }
    }
}

/// Binary tournament on (rank, crowding); exact ties flip a coin.
fn tournament(pop: &[Individual], rng: &mut ChaCha8Rng) -> usize {
    let a = rng.gen_range(0..pop.len());
    let b = rng.gen_range(0..pop.len());
    if pop[a].rank != pop[b].rank {
        return if pop[a].rank < pop[b].rank { a } else { b };
    }
    if pop[a].crowding != pop[b].crowding {
        return if pop[a].crowding > pop[b].crowding { a } else { b };
    }
    if rng.gen::<bool>() {
        a
    } else {
        b
    }
}

fn make_offspring<P: Problem>(
    problem: &P,
    pop: &[Individual],
    cfg: &GaConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<Individual> {
    let bounds = problem.bounds();
    let mut out = Vec::with_capacity(cfg.population);
    while out.len() < cfg.population {
        let p1 = tournament(pop, rng);
        let p2 = tournament(pop, rng);
        let (c1, c2) = sbx_crossover(&pop[p1].genome, &pop[p2].genome, cfg, bounds, rng)
            .expect("parents share genome length");
        let c1 = polynomial_mutation(&c1, cfg, bounds, rng);
        let c2 = polynomial_mutation(&c2, cfg, bounds, rng);
        out.push(evaluated(problem, c1));
        if out.len() < cfg.population {
            out.push(evaluated(problem, c2));
        }
    }
    out
}

fn stat(generation: usize, pop: &[Individual]) -> GenerationStat {
    let m = pop[0].objectives.len();
    let mut best = vec![f64::INFINITY; m];
    for ind in pop {
        for (b, &v) in best.iter_mut().zip(&ind.objectives) {
            if v < *b {
                *b = v;
            }
        }
    }
    let front_size = pop.iter().filter(|i| i.rank == 0).count();
    GenerationStat {
        generation,
        best,
        front_size,
    }
}

/// Rank-0 members with duplicate objective vectors removed (first kept).
fn dedup_front(pop: &[Individual]) -> Vec<Individual> {
    let mut seen = std::collections::BTreeSet::new();
    pop.iter()
        .filter(|i| i.rank == 0)
        .filter(|i| {
            let key: Vec<u64> = i.objectives.iter().map(|v| v.to_bits()).collect();
            seen.insert(key)
        })
        .cloned()
        .collect()
}
