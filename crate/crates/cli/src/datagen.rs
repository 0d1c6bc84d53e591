//! Deterministic generators for the data files the phases consume: a self-play game corpus, an
//! opening book and a tactical test suite. Every generator is a pure function of its seed.

use std::collections::HashSet;
use std::ops::ControlFlow;

use evochess::arena::{play_game, Control, Engine, OpeningLine};
use evochess::chess::{Game, GameResult, Move, Position, TestCase};
use evochess::eval::{evaluate, EvalParams, EvalTerm};
use evochess::search::{search, SearchLimits, SearchParams, Searcher, MATE_BOUND};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Moves whose quiescence-backed score is within `margin` of the best, in generation order.
fn reasonable_moves(pos: &Position, eval: &EvalParams, margin: i32) -> Vec<Move> {
    let scored: Vec<(Move, i32)> = pos
        .legal_successors()
        .into_iter()
        .map(|(m, child)| {
            let s = match search(&child, eval, &SearchParams::off(), SearchLimits::depth(1)) {
                Ok(r) => -r.score,
                Err(_) if child.in_check() => MATE_BOUND,
                Err(_) => 0,
            };
            (m, s)
        })
        .collect();
    let best = scored.iter().map(|&(_, s)| s).max().unwrap_or(0);
    scored.into_iter().filter(|&(_, s)| s >= best - margin).map(|(m, _)| m).collect()
}

/// `lines` distinct openings of `plies` moves, each move drawn uniformly from the moves that
/// a shallow search rates within 30 centipawns of the best.
pub fn opening_book(lines: usize, plies: usize, seed: u64) -> Vec<OpeningLine> {
    let eval = EvalParams::reference();
    let mut seen = HashSet::new();
    let mut book = Vec::with_capacity(lines);
    let mut attempt = 0u64;
    while book.len() < lines {
        let mut rng = stream(seed, attempt);
        attempt += 1;
        let mut pos = Position::startpos();
        let mut moves = Vec::with_capacity(plies);
        for _ in 0..plies {
            let options = reasonable_moves(&pos, &eval, 30);
            let Some(&m) = options.choose(&mut rng) else { break };
            pos = pos.play(m);
            moves.push(m);
        }
        if moves.len() == plies && seen.insert(moves.clone()) {
            book.push(OpeningLine { moves });
        }
    }
    book
}

/// Reference weights with every non-pawn weight scaled by a random factor in [0.8, 1.2].
fn perturbed(rng: &mut ChaCha8Rng) -> EvalParams {
    let mut p = EvalParams::reference();
    for t in &EvalTerm::ALL[1..] {
        let scaled = (p[*t] as f64 * rng.gen_range(0.8..1.2)).round() as i32;
        p[*t] = scaled.clamp(0, t.max_value());
    }
    p
}

/// Self-play games between perturbed copies of the reference engine. Each game starts with
/// 6-10 plies of reasonable random moves and is played at a random 1,000-4,000 nodes per move.
pub fn self_play_corpus(games: usize, seed: u64) -> Vec<Game> {
    (0..games)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(seed, k as u64);
            let eval = EvalParams::reference();
            let mut pos = Position::startpos();
            let mut opening = Vec::new();
            for _ in 0..rng.gen_range(6..=10) {
                let options = reasonable_moves(&pos, &eval, 40);
                let Some(&m) = options.choose(&mut rng) else { break };
                pos = pos.play(m);
                opening.push(m);
            }
            let white = Engine::new("selfplay-a", perturbed(&mut rng), SearchParams::learned());
            let black = Engine::new("selfplay-b", perturbed(&mut rng), SearchParams::learned());
            let nodes = rng.gen_range(1_000..=4_000);
            let record = play_game(&white, &black, Control::NodesPerMove(nodes), &opening)
                .expect("generated opening is legal");
            let mut game = record.to_game();
            game.set_tag("Event", "evochess self-play");
            game.set_tag("Round", (k + 1).to_string());
            game.set_tag("NodesPerMove", nodes.to_string());
            game
        })
        .collect()
}

/// Number of decisive games.
pub fn decisive(games: &[Game]) -> usize {
    games.iter().filter(|g| g.result != GameResult::Draw && g.result.winner().is_some()).count()
}

/// Tactical positions from `games`: the side to move has a move that a depth-`depth` search
/// rates at least `gap` centipawns above every alternative, and that a 1-ply search does not
/// already choose.
pub fn tactical_suite(games: &[Game], count: usize, depth: u32, gap: i32, seed: u64) -> Vec<TestCase> {
    let eval = EvalParams::reference();
    let params = SearchParams::off();
    let limits = SearchLimits {
        max_depth: Some(depth),
        max_nodes: Some(400_000),
        max_time: None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<Position> = games
        .iter()
        .flat_map(|g| g.replay().into_iter().skip(10).map(|(p, _)| p))
        .filter(|p| !p.in_check() && p.legal_moves().len() > 1)
        .collect();
    candidates.shuffle(&mut rng);
    let mut seen = HashSet::new();
    candidates.retain(|p| seen.insert(p.hash()));

    let mut suite = Vec::new();
    for chunk in candidates.chunks(64) {
        let found: Vec<TestCase> = chunk
            .par_iter()
            .filter_map(|pos| {
                let mut first = None;
                let best = Searcher::new(&eval, &params, limits)
                    .run(pos, |it| {
                        first.get_or_insert(it.best_move);
                        ControlFlow::Continue(())
                    })
                    .ok()?;
                if best.depth_completed < depth || first == Some(best.best_move) || best.score.abs() >= MATE_BOUND {
                    return None;
                }
                if best.score < -50 || evaluate(pos, &eval).abs() > 300 {
                    return None;
                }
                let others: Vec<Move> = pos.legal_moves().into_iter().filter(|&m| m != best.best_move).collect();
                let second = Searcher::new(&eval, &params, limits)
                    .with_root_moves(others)
                    .run(pos, |_| ControlFlow::Continue(()))
                    .ok()?;
                if second.depth_completed < depth {
                    return None;
                }
                (best.score - second.score >= gap).then(|| TestCase {
                    position: *pos,
                    best_moves: vec![best.best_move],
                    id: String::new(),
                })
            })
            .collect();
        suite.extend(found);
        if suite.len() >= count {
            break;
        }
    }
    suite.truncate(count);
    for (i, tc) in suite.iter_mut().enumerate() {
        tc.id = format!("tactic.{:03}", i + 1);
    }
    suite
}
