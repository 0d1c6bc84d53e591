//! Engine-versus-engine games and matches, opening books, and Elo arithmetic.
//!
//! Engines are deterministic, so node- or depth-limited games and matches reproduce exactly;
//! clock-limited games depend on machine speed.

mod book;
mod elo;

pub use book::{parse_book, BookError, OpeningLine};
pub use elo::{expected_score, format_rating_difference, rating_difference, EloError};

use std::fmt;
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::chess::{Color, Game, GameResult, Move, Position};
use crate::eval::EvalParams;
use crate::search::{SearchLimits, SearchParams, Searcher};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArenaError {
    #[error("a match needs at least one game")]
    NoGames,
    #[error("opening book has {available} lines but {needed} games need distinct lines")]
    BookExhausted { needed: usize, available: usize },
    #[error("opening line {index} is illegal at ply {ply}")]
    IllegalOpening { index: usize, ply: usize },
    #[error("time control base must be positive")]
    ZeroBaseTime,
}

/// A playing configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Engine {
    pub name: String,
    pub eval: EvalParams,
    pub search: SearchParams,
}

impl Engine {
    pub fn new(name: impl Into<String>, eval: EvalParams, search: SearchParams) -> Engine {
        Engine {
            name: name.into(),
            eval,
            search,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct TimeControl {
    pub base_ms: u64,
    pub increment_ms: u64,
}

impl TimeControl {
    pub fn new(base_ms: u64, increment_ms: u64) -> Result<TimeControl, ArenaError> {
        if base_ms == 0 {
            return Err(ArenaError::ZeroBaseTime);
        }
        Ok(TimeControl { base_ms, increment_ms })
    }

    /// Thinking time for the next move: a thirtieth of the clock plus the increment, never more
    /// than a quarter of the clock.
    pub fn move_budget(remaining_ms: u64, increment_ms: u64) -> u64 {
        (remaining_ms / 30 + increment_ms).min(remaining_ms / 4).max(1)
    }
}

/// How each move's search is bounded.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Control {
    Clock(TimeControl),
    NodesPerMove(u64),
    DepthPerMove(u32),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    Checkmate,
    Stalemate,
    ThreefoldRepetition,
    FiftyMoveRule,
    InsufficientMaterial,
    Flag,
    IllegalMove,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Checkmate => "checkmate",
            Termination::Stalemate => "stalemate",
            Termination::ThreefoldRepetition => "threefold repetition",
            Termination::FiftyMoveRule => "fifty-move rule",
            Termination::InsufficientMaterial => "insufficient material",
            Termination::Flag => "flag",
            Termination::IllegalMove => "illegal move",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameRecord {
    pub white: String,
    pub black: String,
    pub initial: Position,
    /// Leading moves taken from the opening book.
    pub book_plies: usize,
    pub moves: Vec<Move>,
    pub result: GameResult,
    pub termination: Termination,
    pub diagnostic: Option<String>,
}

impl GameRecord {
    pub fn to_game(&self) -> Game {
        let mut g = Game::new(self.initial);
        g.set_tag("Event", "evochess match");
        g.set_tag("White", self.white.clone());
        g.set_tag("Black", self.black.clone());
        g.set_tag("Result", self.result.as_pgn());
        g.set_tag("Termination", self.termination.to_string());
        g.set_tag("BookPlies", self.book_plies.to_string());
        g.moves = self.moves.clone();
        g.result = self.result;
        g
    }
}

fn adjudicate(pos: &Position, hashes: &[u64]) -> Option<(GameResult, Termination)> {
    if !pos.has_legal_move() {
        return Some(if pos.in_check() {
            let winner = !pos.side_to_move();
            (win_for(winner), Termination::Checkmate)
        } else {
            (GameResult::Draw, Termination::Stalemate)
        });
    }
    let window = (pos.halfmove_clock() as usize + 1).min(hashes.len());
    let seen = hashes[hashes.len() - window..].iter().filter(|&&h| h == pos.hash()).count();
    if seen >= 3 {
        return Some((GameResult::Draw, Termination::ThreefoldRepetition));
    }
    if pos.halfmove_clock() >= 100 {
        return Some((GameResult::Draw, Termination::FiftyMoveRule));
    }
    if pos.insufficient_material() {
        return Some((GameResult::Draw, Termination::InsufficientMaterial));
    }
    None
}

fn win_for(c: Color) -> GameResult {
    match c {
        Color::White => GameResult::WhiteWin,
        Color::Black => GameResult::BlackWin,
    }
}

/// Plays one game from the standard start position after the forced `opening` moves.
pub fn play_game(white: &Engine, black: &Engine, control: Control, opening: &[Move]) -> Result<GameRecord, ArenaError> {
    play_game_from(white, black, control, opening, 0)
}

fn play_game_from(
    white: &Engine,
    black: &Engine,
    control: Control,
    opening: &[Move],
    opening_index: usize,
) -> Result<GameRecord, ArenaError> {
    let initial = Position::startpos();
    let mut pos = initial;
    let mut hashes = vec![pos.hash()];
    let mut moves = Vec::new();
    for (ply, &m) in opening.iter().enumerate() {
        pos = pos.make_move(m).map_err(|_| ArenaError::IllegalOpening {
            index: opening_index,
            ply,
        })?;
        hashes.push(pos.hash());
        moves.push(m);
    }
    let mut clock = match control {
        Control::Clock(tc) => [tc.base_ms as i64; 2],
        _ => [0; 2],
    };
    let mut record = GameRecord {
        white: white.name.clone(),
        black: black.name.clone(),
        initial,
        book_plies: opening.len(),
        moves: Vec::new(),
        result: GameResult::Unknown,
        termination: Termination::Checkmate,
        diagnostic: None,
    };
    loop {
        if let Some((result, termination)) = adjudicate(&pos, &hashes) {
            record.result = result;
            record.termination = termination;
            break;
        }
        let side = pos.side_to_move();
        let engine = if side == Color::White { white } else { black };
        let limits = match control {
            Control::Clock(tc) => {
                let budget = TimeControl::move_budget(clock[side.index()].max(0) as u64, tc.increment_ms);
                SearchLimits::time(Duration::from_millis(budget))
            }
            Control::NodesPerMove(n) => SearchLimits::nodes(n),
            Control::DepthPerMove(d) => SearchLimits::depth(d),
        };
        let started = Instant::now();
        let found = Searcher::new(&engine.eval, &engine.search, limits)
            .with_history(&hashes[..hashes.len() - 1])
            .run(&pos, |_| ControlFlow::Continue(()));
        let elapsed = started.elapsed().as_millis() as i64;
        let mv = match found {
            Ok(r) if pos.legal_moves().contains(&r.best_move) => r.best_move,
            other => {
                record.result = win_for(!side);
                record.termination = Termination::IllegalMove;
                record.diagnostic = Some(format!("{} produced {:?} in {}", engine.name, other, pos.to_fen()));
                break;
            }
        };
        if let Control::Clock(tc) = control {
            clock[side.index()] -= elapsed;
            if clock[side.index()] < 0 {
                record.result = win_for(!side);
                record.termination = Termination::Flag;
                break;
            }
            clock[side.index()] += tc.increment_ms as i64;
        }
        pos = pos.play(mv);
        hashes.push(pos.hash());
        moves.push(mv);
    }
    record.moves = moves;
    Ok(record)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchRecord {
    pub engine_a: String,
    pub engine_b: String,
    pub games: Vec<GameRecord>,
    pub points_a: f64,
    pub points_b: f64,
}

/// Points scored by the white and black player of a finished game.
pub fn game_points(result: GameResult) -> (f64, f64) {
    match result {
        GameResult::WhiteWin => (1.0, 0.0),
        GameResult::BlackWin => (0.0, 1.0),
        GameResult::Draw => (0.5, 0.5),
        GameResult::Unknown => (0.0, 0.0),
    }
}

impl MatchRecord {
    pub fn games_played(&self) -> usize {
        self.games.len()
    }

    /// Engine A's score fraction.
    pub fn win_rate(&self) -> f64 {
        self.points_a / self.games.len() as f64
    }

    /// `points_A points_B W% RD`, e.g. `181.5 118.5 60.5% +74.1`.
    pub fn summary_line(&self) -> String {
        let w = self.win_rate();
        format!("{} {} {:.1}% {}", self.points_a, self.points_b, w * 100.0, format_rating_difference(w))
    }

    pub fn to_pgn(&self) -> String {
        self.games.iter().map(|g| g.to_game().to_pgn() + "\n").collect()
    }
}

/// Plays `games` games; engine A has white in even-numbered games, and game k opens with
/// book line k. Games run in parallel on the current rayon pool.
pub fn play_match(
    a: &Engine,
    b: &Engine,
    games: usize,
    control: Control,
    book: &[OpeningLine],
) -> Result<MatchRecord, ArenaError> {
    if games == 0 {
        return Err(ArenaError::NoGames);
    }
    if games > book.len() {
        return Err(ArenaError::BookExhausted {
            needed: games,
            available: book.len(),
        });
    }
    let records = (0..games)
        .into_par_iter()
        .map(|k| {
            let (w, bl) = if k % 2 == 0 { (a, b) } else { (b, a) };
            play_game_from(w, bl, control, &book[k].moves, k)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (mut points_a, mut points_b) = (0.0, 0.0);
    for (k, g) in records.iter().enumerate() {
        let (pw, pb) = game_points(g.result);
        if k % 2 == 0 {
            points_a += pw;
            points_b += pb;
        } else {
            points_a += pb;
            points_b += pw;
        }
    }
    Ok(MatchRecord {
        engine_a: a.name.clone(),
        engine_b: b.name.clone(),
        games: records,
        points_a,
        points_b,
    })
}
