//! Textbook iterative-deepening alpha-beta written independently of the engine, for checking
//! that the selective search with every feature switched off is exactly plain alpha-beta.
//!
//! Conventions it shares with the engine because node counts depend on them: fail-soft
//! negamax, one node per interior and per quiescence call, previous-iteration PV move first,
//! captures by most-valuable-victim / least-valuable-attacker, quiets in generation order,
//! quiescence over captures then promotions with mate recognition.

use evochess::chess::{Move, PieceKind, Position};
use evochess::eval::{evaluate, EvalParams};

const MATE: i32 = 32_000;
const WIDE: i32 = 32_500;

pub struct Outcome {
    pub best_move: Move,
    pub score: i32,
    pub nodes: u64,
}

struct Plain<'a> {
    eval: &'a EvalParams,
    nodes: u64,
    /// Hashes from the root to the current node, inclusive.
    path: Vec<u64>,
    guide: Vec<Move>,
}

fn capture_rank(pos: &Position, m: Move) -> i32 {
    let victim = if m.is_en_passant() { PieceKind::Pawn } else { pos.kind_at(m.to).unwrap() };
    let attacker = pos.kind_at(m.from).unwrap();
    8 * victim as i32 - attacker as i32
}

impl Plain<'_> {
    fn repeated(&self, pos: &Position) -> bool {
        if pos.halfmove_clock() >= 100 {
            return true;
        }
        let reach = (pos.halfmove_clock() as usize).min(self.path.len() - 1);
        self.path.iter().rev().take(reach + 1).skip(2).step_by(2).any(|&h| h == pos.hash())
    }

    fn ordered(&self, pos: &Position, guide: Option<Move>) -> Vec<(Move, Position)> {
        let all = pos.legal_successors();
        let mut first = Vec::new();
        let mut captures = Vec::new();
        let mut quiet = Vec::new();
        for (m, c) in all {
            if Some(m) == guide {
                first.push((m, c));
            } else if m.is_capture() {
                captures.push((m, c));
            } else {
                quiet.push((m, c));
            }
        }
        // stable: equal ranks keep generation order
        captures.sort_by(|a, b| capture_rank(pos, b.0).cmp(&capture_rank(pos, a.0)));
        first.into_iter().chain(captures).chain(quiet).collect()
    }

    fn node(&mut self, pos: &Position, depth: u32, ply: usize, mut alpha: i32, beta: i32, on_guide: bool) -> (i32, Vec<Move>) {
        if depth == 0 {
            return self.quiesce(pos, ply, alpha, beta);
        }
        self.nodes += 1;
        if ply > 0 && self.repeated(pos) {
            return (0, Vec::new());
        }
        let guide = if on_guide { self.guide.get(ply).copied() } else { None };
        let moves = self.ordered(pos, guide);
        if moves.is_empty() {
            return (if pos.in_check() { ply as i32 - MATE } else { 0 }, Vec::new());
        }
        let mut best = -WIDE;
        let mut line = Vec::new();
        for (m, child) in moves {
            self.path.push(child.hash());
            let (s, sub) = self.node(&child, depth - 1, ply + 1, -beta, -alpha, on_guide && Some(m) == guide);
            self.path.pop();
            let s = -s;
            if s > best {
                best = s;
                if s > alpha {
                    alpha = s;
                    line = std::iter::once(m).chain(sub).collect();
                    if s >= beta {
                        break;
                    }
                }
            }
        }
        (best, line)
    }

    fn quiesce(&mut self, pos: &Position, ply: usize, mut alpha: i32, beta: i32) -> (i32, Vec<Move>) {
        self.nodes += 1;
        let moves = pos.legal_successors();
        if moves.is_empty() && pos.in_check() {
            return (ply as i32 - MATE, Vec::new());
        }
        let stand = evaluate(pos, self.eval);
        if stand >= beta {
            return (stand, Vec::new());
        }
        let mut captures: Vec<_> = moves.iter().filter(|(m, _)| m.is_capture()).cloned().collect();
        captures.sort_by(|a, b| capture_rank(pos, b.0).cmp(&capture_rank(pos, a.0)));
        let promotions = moves.iter().filter(|(m, _)| !m.is_capture() && m.promotion.is_some()).cloned();
        let mut best = stand;
        alpha = alpha.max(stand);
        let mut line = Vec::new();
        for (m, child) in captures.into_iter().chain(promotions) {
            let (s, sub) = self.quiesce(&child, ply + 1, -beta, -alpha);
            let s = -s;
            if s > best {
                best = s;
                if s > alpha {
                    alpha = s;
                    line = std::iter::once(m).chain(sub).collect();
                    if s >= beta {
                        break;
                    }
                }
            }
        }
        (best, line)
    }
}

/// Iterative deepening to `depth` plies; `history` holds the hashes of earlier game positions.
pub fn plain_search(pos: &Position, eval: &EvalParams, depth: u32, history: &[u64]) -> Outcome {
    let mut p = Plain {
        eval,
        nodes: 0,
        path: history.iter().copied().chain([pos.hash()]).collect(),
        guide: Vec::new(),
    };
    let mut score = 0;
    for d in 1..=depth {
        let (s, line) = p.node(pos, d, 0, -WIDE, WIDE, true);
        score = s;
        p.guide = line;
    }
    Outcome {
        best_move: p.guide[0],
        score,
        nodes: p.nodes,
    }
}

/// Best move and cumulative node count of each iteration, stopping after the first iteration
/// that takes the total past `node_limit`.
pub fn plain_iterations(pos: &Position, eval: &EvalParams, node_limit: u64) -> Vec<(Move, u64)> {
    let mut p = Plain {
        eval,
        nodes: 0,
        path: vec![pos.hash()],
        guide: Vec::new(),
    };
    let mut out = Vec::new();
    for d in 1..=64 {
        let (_, line) = p.node(pos, d, 0, -WIDE, WIDE, true);
        p.guide = line;
        out.push((p.guide[0], p.nodes));
        if p.nodes > node_limit {
            break;
        }
    }
    out
}
