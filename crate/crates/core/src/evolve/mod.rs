//! The three learning phases: evaluation weights fitted to winners' moves by 1-ply search,
//! coevolution of the per-run winners through round-robin play, and search-parameter evolution
//! against node counts on a tactical suite.
//!
//! All phases share one driver. Generation `g` draws its randomness from a dedicated stream of
//! the seeded generator, so a run resumed from the checkpoint of generation `g` continues
//! exactly as the uninterrupted run would.

mod training;

pub use training::{
    build_training_set, holdout_match_rate, move_match_fitness, TrainingPair, TrainingSet, MIN_REMAINING_PLIES,
    SKIP_OPENING_PLIES,
};

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::arena::{game_points, play_game, ArenaError, Control, Engine, GameRecord, OpeningLine};
use crate::chess::TestCase;
use crate::eval::EvalParams;
use crate::genome::{
    breed, decode_eval, elite_indices, encode_search, Chromosome, ChromosomeKind, GAConfig, GAConfigError,
    GenomeError, Organism,
};
use crate::search::{search_nodes_to_solution, SearchParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolveError {
    #[error(transparent)]
    Genome(#[from] GenomeError),
    #[error(transparent)]
    Config(#[from] GAConfigError),
    #[error(transparent)]
    Arena(#[from] ArenaError),
    #[error("need {needed} decisive games with a usable position, found {available}")]
    InsufficientGames { needed: usize, available: usize },
    #[error("{0} test positions also occur in the training set")]
    Overlap(usize),
    #[error("test suite is empty")]
    EmptySuite,
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("population has {actual} organisms, configuration requires {expected}")]
    PopulationSize { expected: usize, actual: usize },
    #[error("expected {expected:?} chromosomes")]
    WrongKind { expected: ChromosomeKind },
    #[error("{0}")]
    Hook(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
}

impl GenerationStats {
    fn of(generation: usize, population: &[Organism]) -> GenerationStats {
        let best = population.iter().map(|o| o.fitness).fold(f64::NEG_INFINITY, f64::max);
        let mean = population.iter().map(|o| o.fitness).sum::<f64>() / population.len() as f64;
        GenerationStats { generation, best, mean }
    }
}

/// Where a run stands after scoring a generation; the unit of checkpointing.
#[derive(Clone, Debug, PartialEq)]
pub struct GaState {
    pub generation: usize,
    pub population: Vec<Organism>,
    pub history: Vec<GenerationStats>,
}

#[derive(Clone, Debug)]
pub struct PhaseReport {
    pub history: Vec<GenerationStats>,
    /// Fittest organism of the final generation.
    pub best: Organism,
    pub final_population: Vec<Organism>,
    pub wall_clock: Duration,
}

impl PhaseReport {
    /// `generation best mean` lines.
    pub fn log_lines(&self) -> Vec<String> {
        self.history.iter().map(|s| format!("{} {} {}", s.generation, s.best, s.mean)).collect()
    }
}

/// Random stream for generation `g` (generation 0 is the initial population).
pub fn generation_rng(seed: u64, generation: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(generation as u64);
    rng
}

/// Runs a GA to `config.generations` scored populations.
///
/// A fresh run starts from `seeds` (truncated to the population size) topped up with random
/// chromosomes. `fitness` scores a whole generation at once (given its index); `on_generation`
/// sees each scored generation and may abort the run by returning an error.
pub fn run_ga<F, H>(
    config: &GAConfig,
    kind: ChromosomeKind,
    seeds: &[Chromosome],
    resume: Option<GaState>,
    mut fitness: F,
    mut on_generation: H,
) -> Result<PhaseReport, EvolveError>
where
    F: FnMut(usize, &[Chromosome]) -> Result<Vec<f64>, EvolveError>,
    H: FnMut(&GaState) -> Result<(), EvolveError>,
{
    config.validate()?;
    let started = Instant::now();
    let mut state = match resume {
        Some(state) => {
            if state.population.len() != config.population_size {
                return Err(EvolveError::PopulationSize {
                    expected: config.population_size,
                    actual: state.population.len(),
                });
            }
            if state.population.iter().any(|o| o.chromosome.kind() != kind) {
                return Err(EvolveError::WrongKind { expected: kind });
            }
            state
        }
        None => {
            if seeds.iter().any(|c| c.kind() != kind) {
                return Err(EvolveError::WrongKind { expected: kind });
            }
            let mut rng = generation_rng(config.random_seed, 0);
            let mut chromosomes: Vec<Chromosome> = seeds.iter().take(config.population_size).cloned().collect();
            while chromosomes.len() < config.population_size {
                chromosomes.push(Chromosome::random(kind, &mut rng));
            }
            let scores = fitness(0, &chromosomes)?;
            let population: Vec<Organism> = chromosomes.into_iter().zip(scores).map(|(c, f)| Organism::new(c, f)).collect();
            let state = GaState {
                generation: 0,
                history: vec![GenerationStats::of(0, &population)],
                population,
            };
            on_generation(&state)?;
            state
        }
    };
    while state.generation + 1 < config.generations {
        let g = state.generation + 1;
        let mut rng = generation_rng(config.random_seed, g);
        let children = breed(&state.population, config, &mut rng)?;
        let scores = fitness(g, &children)?;
        state.population = children.into_iter().zip(scores).map(|(c, f)| Organism::new(c, f)).collect();
        state.generation = g;
        state.history.push(GenerationStats::of(g, &state.population));
        on_generation(&state)?;
    }
    let best = state.population[elite_indices(&state.population, 1)[0]].clone();
    Ok(PhaseReport {
        history: state.history,
        best,
        final_population: state.population,
        wall_clock: started.elapsed(),
    })
}

/// Evolves 224-bit evaluation chromosomes by squared move-match count on `set`.
pub fn run_eval_evolution<H>(
    set: &TrainingSet,
    config: &GAConfig,
    resume: Option<GaState>,
    on_generation: H,
) -> Result<PhaseReport, EvolveError>
where
    H: FnMut(&GaState) -> Result<(), EvolveError>,
{
    if set.is_empty() {
        return Err(EvolveError::EmptyTrainingSet);
    }
    let fitness = |_: usize, pop: &[Chromosome]| {
        pop.par_iter().map(|c| move_match_fitness(c, set)).collect::<Result<Vec<_>, _>>()
    };
    run_ga(config, ChromosomeKind::Evaluation, &[], resume, fitness, on_generation)
}

#[derive(Clone, Debug)]
pub struct CoevolutionSettings {
    pub games_per_pair: usize,
    pub control: Control,
    /// Game k of a generation opens with line k.
    pub book: Vec<OpeningLine>,
    /// Search used by every organism; plain alpha-beta by default.
    pub search: SearchParams,
}

impl CoevolutionSettings {
    pub fn new(control: Control, book: Vec<OpeningLine>) -> CoevolutionSettings {
        CoevolutionSettings {
            games_per_pair: 4,
            control,
            book,
            search: SearchParams::off(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RoundRobin {
    pub points: Vec<f64>,
    pub games: Vec<GameRecord>,
}

/// Every pair plays `games_per_pair` games, alternating colours starting with the lower index
/// as white, each game from its own book line. Win 1, draw 0.5.
pub fn round_robin(players: &[EvalParams], settings: &CoevolutionSettings) -> Result<RoundRobin, EvolveError> {
    let n = players.len();
    let mut fixtures = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..settings.games_per_pair {
                fixtures.push(if k % 2 == 0 { (i, j) } else { (j, i) });
            }
        }
    }
    if fixtures.len() > settings.book.len() {
        return Err(ArenaError::BookExhausted {
            needed: fixtures.len(),
            available: settings.book.len(),
        }
        .into());
    }
    let engines: Vec<Engine> = players
        .iter()
        .enumerate()
        .map(|(i, p)| Engine::new(format!("organism-{i}"), *p, settings.search))
        .collect();
    let games = fixtures
        .par_iter()
        .enumerate()
        .map(|(g, &(w, b))| play_game(&engines[w], &engines[b], settings.control, &settings.book[g].moves))
        .collect::<Result<Vec<_>, _>>()?;
    let mut points = vec![0.0; n];
    for (&(w, b), game) in fixtures.iter().zip(&games) {
        let (pw, pb) = game_points(game.result);
        points[w] += pw;
        points[b] += pb;
    }
    Ok(RoundRobin { points, games })
}

/// Coevolves the per-run winners; fitness is round-robin points within each generation.
pub fn run_coevolution<H>(
    seeds: &[Chromosome],
    config: &GAConfig,
    settings: &CoevolutionSettings,
    resume: Option<GaState>,
    on_generation: H,
) -> Result<PhaseReport, EvolveError>
where
    H: FnMut(&GaState) -> Result<(), EvolveError>,
{
    if resume.is_none() && seeds.len() != config.population_size {
        return Err(EvolveError::PopulationSize {
            expected: config.population_size,
            actual: seeds.len(),
        });
    }
    let fitness = |_: usize, pop: &[Chromosome]| {
        let players = pop.iter().map(decode_eval).collect::<Result<Vec<_>, _>>()?;
        Ok(round_robin(&players, settings)?.points)
    };
    run_ga(config, ChromosomeKind::Evaluation, seeds, resume, fitness, on_generation)
}

/// Total nodes over the suite (each position capped at `node_cap`), to be minimised.
pub fn node_count_fitness(
    c: &Chromosome,
    suite: &[TestCase],
    eval: &EvalParams,
    node_cap: u64,
) -> Result<u64, EvolveError> {
    if suite.is_empty() {
        return Err(EvolveError::EmptySuite);
    }
    let params = crate::genome::decode_search(c)?;
    Ok(suite.iter().map(|tc| search_nodes_to_solution(tc, eval, &params, node_cap)).sum())
}

/// Budget minus nodes: the selection fitness of a search organism.
pub fn node_budget(suite_len: usize, node_cap: u64) -> u64 {
    suite_len as u64 * node_cap
}

/// Evolves 70-bit search chromosomes with `eval` frozen. Generation 0 contains the
/// all-features-off organism, so the run starts from the plain-search baseline. Fitness is
/// `node_budget - total nodes`; totals are cached per chromosome.
pub fn run_search_evolution<H>(
    suite: &[TestCase],
    eval: &EvalParams,
    config: &GAConfig,
    node_cap: u64,
    resume: Option<GaState>,
    on_generation: H,
) -> Result<PhaseReport, EvolveError>
where
    H: FnMut(&GaState) -> Result<(), EvolveError>,
{
    if suite.is_empty() {
        return Err(EvolveError::EmptySuite);
    }
    let budget = node_budget(suite.len(), node_cap);
    let cache: Mutex<HashMap<Chromosome, u64>> = Mutex::new(HashMap::new());
    let fitness = |_: usize, pop: &[Chromosome]| {
        let totals = pop
            .par_iter()
            .map(|c| {
                if let Some(&t) = cache.lock().unwrap().get(c) {
                    return Ok(t);
                }
                let t = node_count_fitness(c, suite, eval, node_cap)?;
                cache.lock().unwrap().insert(c.clone(), t);
                Ok(t)
            })
            .collect::<Result<Vec<u64>, EvolveError>>()?;
        Ok(totals.into_iter().map(|t| (budget - t) as f64).collect())
    };
    let baseline = [encode_search(&SearchParams::off())?];
    run_ga(config, ChromosomeKind::Search, &baseline, resume, fitness, on_generation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::Selection;

    fn ones(_: usize, pop: &[Chromosome]) -> Result<Vec<f64>, EvolveError> {
        Ok(pop.iter().map(|c| c.bits().iter().filter(|&&b| b).count() as f64).collect())
    }

    fn cfg(generations: usize) -> GAConfig {
        GAConfig {
            population_size: 8,
            generations,
            mutation_rate: 0.02,
            ..GAConfig::search_phase()
        }
    }

    #[test]
    fn resume_matches_uninterrupted_run() {
        let full = run_ga(&cfg(12), ChromosomeKind::Search, &[], None, ones, |_| Ok(())).unwrap();
        let mut snapshot = None;
        run_ga(&cfg(5), ChromosomeKind::Search, &[], None, ones, |s| {
            snapshot = Some(s.clone());
            Ok(())
        })
        .unwrap();
        let resumed = run_ga(&cfg(12), ChromosomeKind::Search, &[], snapshot, ones, |_| Ok(())).unwrap();
        assert_eq!(resumed.history, full.history);
        assert_eq!(resumed.final_population, full.final_population);
        assert_eq!(full.history.len(), 12);
    }

    #[test]
    fn hook_error_aborts() {
        let r = run_ga(&cfg(5), ChromosomeKind::Search, &[], None, ones, |s| {
            if s.generation == 2 {
                Err(EvolveError::Hook("stop".into()))
            } else {
                Ok(())
            }
        });
        assert_eq!(r.unwrap_err(), EvolveError::Hook("stop".into()));
    }

    #[test]
    fn seeds_and_kinds_checked() {
        let seed = Chromosome::zeros(ChromosomeKind::Search);
        let r = run_ga(&cfg(1), ChromosomeKind::Search, &[seed.clone()], None, ones, |_| Ok(())).unwrap();
        assert!(r.final_population.iter().any(|o| o.chromosome == seed));
        let e = Chromosome::zeros(ChromosomeKind::Evaluation);
        assert!(run_ga(&cfg(1), ChromosomeKind::Search, &[e], None, ones, |_| Ok(())).is_err());
        let mut rank = cfg(3);
        rank.selection = Selection::Rank;
        assert!(run_ga(&rank, ChromosomeKind::Search, &[], None, ones, |_| Ok(())).is_ok());
    }

    #[test]
    fn empty_inputs_rejected() {
        let eval = EvalParams::reference();
        let c = Chromosome::zeros(ChromosomeKind::Search);
        assert_eq!(node_count_fitness(&c, &[], &eval, 10), Err(EvolveError::EmptySuite));
        let empty = TrainingSet::new(vec![], "");
        assert!(matches!(
            run_eval_evolution(&empty, &cfg(2), None, |_| Ok(())),
            Err(EvolveError::EmptyTrainingSet)
        ));
    }
}
