use rand::Rng;

use super::{Chromosome, GAConfig, GenomeError, Organism, Selection};

/// Linear-ranking selection pressure: the best organism is expected to be picked this many times
/// per population-size draws, the worst `2 - RANK_PRESSURE` times.
pub const RANK_PRESSURE: f64 = 1.5;

/// With probability `rate` the pair exchanges each bit independently with probability 0.5;
/// otherwise the children are copies of the parents.
pub fn uniform_crossover<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    rate: f64,
    rng: &mut R,
) -> Result<(Chromosome, Chromosome), GenomeError> {
    if a.len() != b.len() || a.kind() != b.kind() {
        return Err(GenomeError::LengthMismatch(a.len(), b.len()));
    }
    let (mut x, mut y) = (a.clone(), b.clone());
    if rng.gen_bool(rate.clamp(0.0, 1.0)) {
        for i in 0..a.len() {
            if rng.gen_bool(0.5) {
                let (bx, by) = (x.bits()[i], y.bits()[i]);
                x.bits_mut()[i] = by;
                y.bits_mut()[i] = bx;
            }
        }
    }
    Ok((x, y))
}

/// Flips each bit independently with probability `rate`.
pub fn mutate<R: Rng + ?Sized>(c: &Chromosome, rate: f64, rng: &mut R) -> Chromosome {
    let rate = rate.clamp(0.0, 1.0);
    let mut out = c.clone();
    for b in out.bits_mut() {
        if rng.gen_bool(rate) {
            *b = !*b;
        }
    }
    out
}

fn check(population: &[Organism]) -> Result<(), GenomeError> {
    if population.is_empty() {
        return Err(GenomeError::EmptyPopulation);
    }
    if let Some(o) = population.iter().find(|o| !(o.fitness.is_finite() && o.fitness >= 0.0)) {
        return Err(GenomeError::BadFitness(o.fitness));
    }
    Ok(())
}

/// Roulette-wheel selection; uniform when every fitness is zero. Returns an index.
pub fn select_proportional<R: Rng + ?Sized>(population: &[Organism], rng: &mut R) -> Result<usize, GenomeError> {
    check(population)?;
    let total: f64 = population.iter().map(|o| o.fitness).sum();
    if total <= 0.0 {
        return Ok(rng.gen_range(0..population.len()));
    }
    let mut target = rng.gen::<f64>() * total;
    for (i, o) in population.iter().enumerate() {
        if target < o.fitness {
            return Ok(i);
        }
        target -= o.fitness;
    }
    // Rounding left a sliver past the last bucket.
    Ok(population.iter().rposition(|o| o.fitness > 0.0).unwrap_or(0))
}

/// Linear-ranking probabilities for each organism, in population order. Rank 0 is the worst;
/// equal fitness values are ranked by index, the earlier organism ranking lower.
pub fn rank_probabilities(fitness: &[f64], pressure: f64) -> Vec<f64> {
    let n = fitness.len();
    if n == 1 {
        return vec![1.0];
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]));
    let mut p = vec![0.0; n];
    let nf = n as f64;
    for (rank, &i) in order.iter().enumerate() {
        p[i] = (2.0 - pressure) / nf + 2.0 * rank as f64 * (pressure - 1.0) / (nf * (nf - 1.0));
    }
    p
}

/// Linear rank selection with [`RANK_PRESSURE`]. Returns an index.
pub fn select_rank<R: Rng + ?Sized>(population: &[Organism], rng: &mut R) -> Result<usize, GenomeError> {
    check(population)?;
    let fitness: Vec<f64> = population.iter().map(|o| o.fitness).collect();
    let probs = rank_probabilities(&fitness, RANK_PRESSURE);
    let mut target = rng.gen::<f64>();
    for (i, p) in probs.iter().enumerate() {
        if target < *p {
            return Ok(i);
        }
        target -= p;
    }
    Ok(probs.len() - 1)
}

/// Indices of the `count` fittest organisms, best first; ties go to the lower index.
pub fn elite_indices(population: &[Organism], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| population[b].fitness.total_cmp(&population[a].fitness));
    order.truncate(count);
    order
}

/// Chromosomes of the next generation: the elites verbatim (best first), then offspring from
/// selection, crossover and mutation until the population size is reached.
pub fn breed<R: Rng + ?Sized>(
    population: &[Organism],
    config: &GAConfig,
    rng: &mut R,
) -> Result<Vec<Chromosome>, GenomeError> {
    check(population)?;
    let n = config.population_size;
    let mut next: Vec<Chromosome> = elite_indices(population, config.elitism_count.min(n))
        .into_iter()
        .map(|i| population[i].chromosome.clone())
        .collect();
    let select = |rng: &mut R| match config.selection {
        Selection::Proportional => select_proportional(population, rng),
        Selection::Rank => select_rank(population, rng),
    };
    while next.len() < n {
        let a = select(rng)?;
        let b = select(rng)?;
        let (x, y) = uniform_crossover(&population[a].chromosome, &population[b].chromosome, config.crossover_rate, rng)?;
        next.push(mutate(&x, config.mutation_rate, rng));
        if next.len() < n {
            next.push(mutate(&y, config.mutation_rate, rng));
        }
    }
    Ok(next)
}

/// Breeds the next generation and scores it with `fitness` (evaluated in parallel).
pub fn next_generation<R, F>(
    population: &[Organism],
    config: &GAConfig,
    fitness: F,
    rng: &mut R,
) -> Result<Vec<Organism>, GenomeError>
where
    R: Rng + ?Sized,
    F: Fn(&Chromosome) -> f64 + Sync,
{
    use rayon::prelude::*;
    let children = breed(population, config, rng)?;
    let scores: Vec<f64> = children.par_iter().map(&fitness).collect();
    Ok(children.into_iter().zip(scores).map(|(c, f)| Organism::new(c, f)).collect())
}
