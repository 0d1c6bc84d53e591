use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::EvolveError;
use crate::chess::{Game, Move, Position};
use crate::eval::{features, EvalParams, Features};
use crate::genome::{decode_eval, Chromosome};

/// Opening plies never sampled.
pub const SKIP_OPENING_PLIES: usize = 12;
/// Plies that must still follow a sampled position.
pub const MIN_REMAINING_PLIES: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingPair {
    pub position: Position,
    /// The move the eventual winner played.
    pub played: Move,
}

/// Successor feature vectors for one pair, so that scoring an organism is a dot product per move.
#[derive(Clone, Debug)]
struct Prepared {
    successors: Vec<Features>,
    target: Option<usize>,
    sign: i32,
}

#[derive(Clone, Debug)]
pub struct TrainingSet {
    pairs: Vec<TrainingPair>,
    prepared: Vec<Prepared>,
    pub provenance: String,
}

impl TrainingSet {
    pub fn new(pairs: Vec<TrainingPair>, provenance: impl Into<String>) -> TrainingSet {
        let prepared = pairs
            .iter()
            .map(|p| {
                let moves = p.position.legal_successors();
                Prepared {
                    target: moves.iter().position(|(m, _)| *m == p.played),
                    successors: moves.iter().map(|(_, child)| features(child)).collect(),
                    sign: p.position.side_to_move().sign(),
                }
            })
            .collect();
        TrainingSet {
            pairs,
            prepared,
            provenance: provenance.into(),
        }
    }

    pub fn pairs(&self) -> &[TrainingPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// First `k` pairs and the rest, as two sets sharing the provenance.
    pub fn split_at(&self, k: usize) -> (TrainingSet, TrainingSet) {
        let k = k.min(self.len());
        let part = |range: std::ops::Range<usize>, tag: &str| TrainingSet {
            pairs: self.pairs[range.clone()].to_vec(),
            prepared: self.prepared[range.clone()].to_vec(),
            provenance: format!("{}; {tag} {}..{}", self.provenance, range.start, range.end),
        };
        (part(0..k, "slice"), part(k..self.len(), "slice"))
    }

    /// Pairs whose 1-ply choice under `params` equals the played move. Ties go to the move
    /// generated first.
    pub fn match_count(&self, params: &EvalParams) -> usize {
        self.prepared
            .iter()
            .filter(|p| {
                let mut best = None;
                let mut best_score = i32::MIN;
                for (i, f) in p.successors.iter().enumerate() {
                    let s = p.sign * f.dot(params);
                    if s > best_score {
                        best_score = s;
                        best = Some(i);
                    }
                }
                best.is_some() && best == p.target
            })
            .count()
    }

    pub fn match_rate(&self, params: &EvalParams) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.match_count(params) as f64 / self.len() as f64
    }
}

/// Decodes the chromosome and squares its number of matched moves.
pub fn move_match_fitness(c: &Chromosome, set: &TrainingSet) -> Result<f64, EvolveError> {
    let n = set.match_count(&decode_eval(c)?) as f64;
    Ok(n * n)
}

/// Match rate on `test`, which must share no position with `train`.
pub fn holdout_match_rate(params: &EvalParams, train: &TrainingSet, test: &TrainingSet) -> Result<f64, EvolveError> {
    let seen: HashSet<u64> = train.pairs.iter().map(|p| p.position.hash()).collect();
    let overlap = test
        .pairs
        .iter()
        .filter(|p| seen.contains(&p.position.hash()) && train.pairs.iter().any(|q| q.position == p.position))
        .count();
    if overlap > 0 {
        return Err(EvolveError::Overlap(overlap));
    }
    Ok(test.match_rate(params))
}

fn eligible_plies(game: &Game) -> Vec<usize> {
    let Some(winner) = game.result.winner() else {
        return Vec::new();
    };
    let n = game.moves.len();
    let first = game.initial.side_to_move();
    (SKIP_OPENING_PLIES..n.saturating_sub(MIN_REMAINING_PLIES - 1))
        .filter(|&ply| n - ply >= MIN_REMAINING_PLIES)
        .filter(|&ply| if ply % 2 == 0 { first == winner } else { first != winner })
        .collect()
}

/// Samples one position per decisive game (in random game order) until `n` pairs are found;
/// the position is a random ply at which the eventual winner is to move. A position already
/// taken from another game is replaced by another ply of the same game when possible.
pub fn build_training_set<R: Rng + ?Sized>(
    games: &[Game],
    n: usize,
    rng: &mut R,
    source: &str,
) -> Result<TrainingSet, EvolveError> {
    let mut candidates: Vec<(usize, Vec<usize>)> = games
        .iter()
        .enumerate()
        .map(|(i, g)| (i, eligible_plies(g)))
        .filter(|(_, plies)| !plies.is_empty())
        .collect();
    if candidates.len() < n {
        return Err(EvolveError::InsufficientGames {
            needed: n,
            available: candidates.len(),
        });
    }
    candidates.shuffle(rng);
    let mut seen = HashSet::new();
    let mut pairs = Vec::with_capacity(n);
    for (gi, mut plies) in candidates {
        if pairs.len() == n {
            break;
        }
        plies.shuffle(rng);
        let replay = games[gi].replay();
        if let Some(&ply) = plies.iter().find(|&&ply| !seen.contains(&replay[ply].0.hash())) {
            let (position, played) = replay[ply];
            seen.insert(position.hash());
            pairs.push(TrainingPair { position, played });
        }
    }
    if pairs.len() < n {
        return Err(EvolveError::InsufficientGames {
            needed: n,
            available: pairs.len(),
        });
    }
    let provenance = format!(
        "corpus {source}; games {}; sampled {n}; skip opening {SKIP_OPENING_PLIES} plies; min remaining {MIN_REMAINING_PLIES} plies",
        games.len()
    );
    Ok(TrainingSet::new(pairs, provenance))
}
