//! Iterative-deepening fail-soft alpha-beta with quiescence, steered by [`SearchParams`].
//!
//! Node accounting: one node per entry into the main recursive search at depth >= 1 ply and one
//! per quiescence node. Searches limited by nodes and/or depth are fully deterministic.
//!
//! Move ordering: previous-iteration PV move, then captures by MVV-LVA (victim kind descending,
//! attacker kind ascending, ties in generation order), then the remaining moves in generation
//! order. Quiescence stands pat (after recognising checkmate) and searches captures by MVV-LVA,
//! then non-capture promotions.

mod params;

pub use params::{SearchField, SearchParams, SearchParamsError, SEARCH_FIELDS, UNITS_PER_PLY};

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::chess::{Move, PieceKind, Position, Square, TestCase};
use crate::eval::{evaluate, EvalParams};

pub const MATE: i32 = 32_000;
/// Scores beyond this magnitude are mate scores.
pub const MATE_BOUND: i32 = MATE - 1_000;
pub const INFINITY: i32 = 32_500;
pub const MAX_PLY: usize = 96;
pub const MAX_DEPTH: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("position has no legal moves")]
    NoLegalMoves,
    #[error("search limits must set at least one of nodes, depth or time")]
    Unbounded,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_nodes: Option<u64>,
    pub max_depth: Option<u32>,
    pub max_time: Option<Duration>,
}

impl SearchLimits {
    pub fn nodes(n: u64) -> SearchLimits {
        SearchLimits {
            max_nodes: Some(n),
            ..Default::default()
        }
    }

    pub fn depth(d: u32) -> SearchLimits {
        SearchLimits {
            max_depth: Some(d),
            ..Default::default()
        }
    }

    pub fn time(t: Duration) -> SearchLimits {
        SearchLimits {
            max_time: Some(t),
            ..Default::default()
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.max_nodes.is_some() || self.max_depth.is_some() || self.max_time.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub best_move: Move,
    pub score: i32,
    pub nodes: u64,
    pub depth_completed: u32,
    pub principal_variation: Vec<Move>,
}

/// Summary of a completed iteration, handed to the iteration callback.
#[derive(Clone, Debug)]
pub struct Iteration<'a> {
    pub depth: u32,
    pub score: i32,
    pub nodes: u64,
    pub best_move: Move,
    pub pv: &'a [Move],
    pub elapsed: Duration,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum NodeType {
    Pv,
    Cut,
    All,
}

/// One transition into quiescence, recorded when tracing is enabled.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct HorizonRecord {
    /// Nominal depth of the iteration, in plies.
    pub iteration: u32,
    pub ply: u32,
    /// Extension units accumulated along the path.
    pub extension_units: i32,
}

pub struct Searcher<'a> {
    eval: &'a EvalParams,
    params: &'a SearchParams,
    limits: SearchLimits,
    stop: Option<Arc<AtomicBool>>,
    start: Instant,
    nodes: u64,
    aborted: bool,
    history: Vec<u64>,
    pv: Vec<[Move; MAX_PLY]>,
    pv_len: [usize; MAX_PLY],
    prev_pv: Vec<Move>,
    root_depth: u32,
    trace: Option<Vec<HorizonRecord>>,
    root_moves: Option<Vec<Move>>,
}

const NULL_MOVE: Move = Move {
    from: Square::A1,
    to: Square::A1,
    promotion: None,
    flags: 0,
};

#[inline]
fn mvv_lva(pos: &Position, m: Move) -> i32 {
    let victim = if m.is_en_passant() {
        PieceKind::Pawn
    } else {
        pos.kind_at(m.to).unwrap_or(PieceKind::Pawn)
    };
    let attacker = pos.kind_at(m.from).unwrap_or(PieceKind::Pawn);
    victim.index() as i32 * 8 - attacker.index() as i32
}

/// Orders `(move, child)` pairs: PV move, captures by MVV-LVA, then the rest in generation order.
fn order_moves(pos: &Position, moves: &mut [(Move, Position)], pv_move: Option<Move>) {
    moves.sort_by_key(|&(m, _)| {
        if Some(m) == pv_move {
            (0, 0)
        } else if m.is_capture() {
            (1, -mvv_lva(pos, m))
        } else {
            (2, 0)
        }
    });
}

impl<'a> Searcher<'a> {
    pub fn new(eval: &'a EvalParams, params: &'a SearchParams, limits: SearchLimits) -> Self {
        Searcher {
            eval,
            params,
            limits,
            stop: None,
            start: Instant::now(),
            nodes: 0,
            aborted: false,
            history: Vec::with_capacity(256),
            pv: vec![[NULL_MOVE; MAX_PLY]; MAX_PLY],
            pv_len: [0; MAX_PLY],
            prev_pv: Vec::new(),
            root_depth: 0,
            trace: None,
            root_moves: None,
        }
    }

    /// Restricts the root to these moves (illegal ones are ignored).
    pub fn with_root_moves(mut self, moves: Vec<Move>) -> Self {
        self.root_moves = Some(moves);
        self
    }

    /// Hashes of the game positions preceding the root (oldest first), for repetition detection.
    pub fn with_history(mut self, hashes: &[u64]) -> Self {
        self.history = hashes.to_vec();
        self
    }

    /// External stop flag, polled every 1024 nodes.
    pub fn with_stop(mut self, stop: Arc<AtomicBool>) -> Self {
        self.stop = Some(stop);
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn take_trace(&mut self) -> Option<Vec<HorizonRecord>> {
        self.trace.take()
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    fn check_stop(&mut self) -> bool {
        if self.aborted {
            return true;
        }
        if let Some(max) = self.limits.max_nodes {
            if self.nodes >= max {
                self.aborted = true;
                return true;
            }
        }
        if self.nodes & 1023 == 0 {
            if let Some(t) = self.limits.max_time {
                if self.start.elapsed() >= t {
                    self.aborted = true;
                }
            }
            if let Some(flag) = &self.stop {
                if flag.load(Ordering::Relaxed) {
                    self.aborted = true;
                }
            }
        }
        self.aborted
    }

    /// Fifty-move rule or a repetition of any earlier position (game history or search path).
    fn is_draw(&self, pos: &Position) -> bool {
        if pos.halfmove_clock() >= 100 {
            return true;
        }
        let n = self.history.len();
        let reach = (pos.halfmove_clock() as usize).min(n.saturating_sub(1));
        let mut k = 2;
        while k <= reach {
            if self.history[n - 1 - k] == pos.hash() {
                return true;
            }
            k += 2;
        }
        false
    }

    fn update_pv(&mut self, ply: usize, m: Move) {
        let child_len = self.pv_len[ply + 1];
        let (head, tail) = self.pv.split_at_mut(ply + 1);
        head[ply][0] = m;
        head[ply][1..=child_len].copy_from_slice(&tail[0][..child_len]);
        self.pv_len[ply] = child_len + 1;
    }

    /// Runs iterative deepening from depth 1, invoking `on_iteration` after each completed
    /// iteration. The result reflects the deepest completed iteration.
    pub fn run<F>(&mut self, pos: &Position, mut on_iteration: F) -> Result<SearchResult, SearchError>
    where
        F: FnMut(&Iteration<'_>) -> ControlFlow<()>,
    {
        if !self.limits.is_bounded() && self.stop.is_none() {
            return Err(SearchError::Unbounded);
        }
        let mut root_moves = pos.legal_successors();
        if let Some(allowed) = &self.root_moves {
            root_moves.retain(|(m, _)| allowed.contains(m));
        }
        if root_moves.is_empty() {
            return Err(SearchError::NoLegalMoves);
        }
        order_moves(pos, &mut root_moves, None);

        self.start = Instant::now();
        self.nodes = 0;
        self.aborted = false;
        self.prev_pv.clear();
        self.history.push(pos.hash());

        let mut result = SearchResult {
            best_move: root_moves[0].0,
            score: 0,
            nodes: 0,
            depth_completed: 0,
            principal_variation: Vec::new(),
        };
        let max_depth = self.limits.max_depth.unwrap_or(MAX_DEPTH).clamp(1, MAX_DEPTH);
        for depth in 1..=max_depth {
            self.root_depth = depth;
            let score = self.alpha_beta(
                pos,
                depth as i32 * UNITS_PER_PLY,
                0,
                -INFINITY,
                INFINITY,
                NodeType::Pv,
                true,
                false,
                None,
                0,
            );
            if self.aborted {
                break;
            }
            let pv = self.pv[0][..self.pv_len[0]].to_vec();
            result = SearchResult {
                best_move: pv[0],
                score,
                nodes: self.nodes,
                depth_completed: depth,
                principal_variation: pv.clone(),
            };
            self.prev_pv = pv;
            let info = Iteration {
                depth,
                score,
                nodes: self.nodes,
                best_move: result.best_move,
                pv: &self.prev_pv,
                elapsed: self.start.elapsed(),
            };
            if on_iteration(&info).is_break() {
                break;
            }
        }
        self.history.pop();
        result.nodes = self.nodes;
        Ok(result)
    }

    #[allow(clippy::too_many_arguments)]
    fn alpha_beta(
        &mut self,
        pos: &Position,
        mut depth: i32,
        ply: usize,
        mut alpha: i32,
        beta: i32,
        node: NodeType,
        follow_pv: bool,
        allow_null: bool,
        last_capture: Option<Square>,
        mut ext_total: i32,
    ) -> i32 {
        if depth < UNITS_PER_PLY || ply >= MAX_PLY - 1 {
            if let Some(trace) = &mut self.trace {
                trace.push(HorizonRecord {
                    iteration: self.root_depth,
                    ply: ply as u32,
                    extension_units: ext_total,
                });
            }
            return self.quiescence(pos, ply, alpha, beta);
        }
        if self.check_stop() {
            return 0;
        }
        self.nodes += 1;
        self.pv_len[ply] = 0;

        if ply > 0 && self.is_draw(pos) {
            return 0;
        }
        let mut moves = pos.legal_successors();
        let in_check = pos.in_check();
        if moves.is_empty() {
            return if in_check { -MATE + ply as i32 } else { 0 };
        }
        if ply == 0 {
            if let Some(allowed) = &self.root_moves {
                moves.retain(|(m, _)| allowed.contains(m));
            }
        }

        let p = self.params;
        let us = pos.side_to_move();
        let may_extend = ply < 2 * self.root_depth as usize;
        let mut static_eval: Option<i32> = None;

        if ply > 0
            && allow_null
            && p.null_move_use
            && !in_check
            && depth / UNITS_PER_PLY >= p.null_move_reduction as i32
            && pos.has_non_pawn_material(us)
        {
            let se = *static_eval.get_or_insert_with(|| evaluate(pos, self.eval));
            if se >= beta {
                let plies = depth / UNITS_PER_PLY;
                let r = if p.null_move_adaptivity_use && plies > p.null_move_adaptivity_depth as i32 {
                    p.null_move_reduction as i32
                } else {
                    (p.null_move_reduction as i32 - 1).max(1)
                };
                let null_pos = pos.play_null();
                self.history.push(null_pos.hash());
                let score = -self.alpha_beta(
                    &null_pos,
                    depth - UNITS_PER_PLY - r * UNITS_PER_PLY,
                    ply + 1,
                    -beta,
                    -beta + 1,
                    NodeType::All,
                    false,
                    false,
                    None,
                    ext_total,
                );
                self.history.pop();
                if self.aborted {
                    return 0;
                }
                if score >= beta {
                    return if score >= MATE_BOUND { beta } else { score };
                }
                if score <= -MATE_BOUND && may_extend {
                    let e = SearchParams::ext_units(p.mate_threat_ext);
                    depth += e;
                    ext_total += e;
                }
            }
        }

        let pv_move = if follow_pv { self.prev_pv.get(ply).copied() } else { None };
        order_moves(pos, &mut moves, pv_move);

        if node == NodeType::Cut
            && p.multi_cut_use
            && ply > 0
            && !in_check
            && depth / UNITS_PER_PLY >= p.multi_cut_depth as i32
        {
            let needed = p.multi_cut_cut_num.max(1) as usize;
            let reduced = depth - UNITS_PER_PLY - p.multi_cut_reduction as i32 * UNITS_PER_PLY;
            let mut cuts = 0;
            for &(m, ref child) in moves.iter().take(p.multi_cut_move_num as usize) {
                self.history.push(child.hash());
                let score = -self.alpha_beta(
                    child,
                    reduced,
                    ply + 1,
                    -beta,
                    -beta + 1,
                    NodeType::All,
                    false,
                    true,
                    m.is_capture().then_some(m.to),
                    ext_total,
                );
                self.history.pop();
                if self.aborted {
                    return 0;
                }
                if score >= beta {
                    cuts += 1;
                    if cuts >= needed {
                        return beta;
                    }
                }
            }
        }

        let plies = depth / UNITS_PER_PLY;
        let futility = ply > 0
            && !in_check
            && (1..=3).contains(&plies)
            && plies <= p.futility_depth as i32;
        let single_reply = moves.len() == 1;

        let mut best = -INFINITY;
        let mut searched = 0;
        for (m, child) in moves {
            let gives_check = child.in_check();
            if futility && !m.is_tactical() && !gives_check {
                let se = *static_eval.get_or_insert_with(|| evaluate(pos, self.eval));
                let bound = se + p.futility_threshold[plies as usize - 1] as i32;
                if bound <= alpha {
                    best = best.max(bound);
                    continue;
                }
            }

            let mut ext = 0;
            if may_extend {
                if gives_check {
                    ext += SearchParams::ext_units(p.check_ext);
                }
                if single_reply {
                    ext += SearchParams::ext_units(p.one_reply_ext);
                }
                if m.is_capture() && last_capture == Some(m.to) {
                    ext += SearchParams::ext_units(p.recapture_ext);
                }
                if m.to.relative_rank(us) == 6 && pos.kind_at(m.from) == Some(PieceKind::Pawn) {
                    ext += SearchParams::ext_units(p.passed_pawn_ext);
                }
                ext = ext.min(UNITS_PER_PLY);
            }

            let child_node = match node {
                NodeType::Pv if searched == 0 => NodeType::Pv,
                NodeType::Pv => NodeType::Cut,
                NodeType::Cut => NodeType::All,
                NodeType::All => NodeType::Cut,
            };
            searched += 1;
            self.history.push(child.hash());
            let score = -self.alpha_beta(
                &child,
                depth - UNITS_PER_PLY + ext,
                ply + 1,
                -beta,
                -alpha,
                child_node,
                follow_pv && Some(m) == pv_move,
                true,
                m.is_capture().then_some(m.to),
                ext_total + ext,
            );
            self.history.pop();
            if self.aborted {
                return 0;
            }
            if score > best {
                best = score;
                if score > alpha {
                    alpha = score;
                    self.update_pv(ply, m);
                    if score >= beta {
                        break;
                    }
                }
            }
        }
        best
    }

    fn quiescence(&mut self, pos: &Position, ply: usize, mut alpha: i32, beta: i32) -> i32 {
        if self.check_stop() {
            return 0;
        }
        self.nodes += 1;
        self.pv_len[ply] = 0;
        if pos.in_check() && !pos.has_legal_move() {
            return -MATE + ply as i32;
        }
        let stand = evaluate(pos, self.eval);
        if stand >= beta || ply >= MAX_PLY - 1 {
            return stand;
        }
        let mut best = stand;
        if stand > alpha {
            alpha = stand;
        }
        let mut moves: Vec<(Move, Position)> = pos
            .legal_successors()
            .into_iter()
            .filter(|(m, _)| m.is_tactical())
            .collect();
        moves.sort_by_key(|&(m, _)| if m.is_capture() { (0, -mvv_lva(pos, m)) } else { (1, 0) });
        for (m, child) in moves {
            let score = -self.quiescence(&child, ply + 1, -beta, -alpha);
            if self.aborted {
                return 0;
            }
            if score > best {
                best = score;
                if score > alpha {
                    alpha = score;
                    self.update_pv(ply, m);
                    if score >= beta {
                        break;
                    }
                }
            }
        }
        best
    }
}

/// Searches `pos` to the given limits.
pub fn search(
    pos: &Position,
    eval: &EvalParams,
    params: &SearchParams,
    limits: SearchLimits,
) -> Result<SearchResult, SearchError> {
    Searcher::new(eval, params, limits).run(pos, |_| ControlFlow::Continue(()))
}

/// Cumulative nodes searched until the first completed iteration whose best move is one of the
/// test case's best moves; `node_cap` when no iteration within the cap finds it.
pub fn search_nodes_to_solution(
    case: &TestCase,
    eval: &EvalParams,
    params: &SearchParams,
    node_cap: u64,
) -> u64 {
    assert!(node_cap > 0, "node cap must be positive");
    let mut solved_at = None;
    let mut searcher = Searcher::new(eval, params, SearchLimits::nodes(node_cap));
    let outcome = searcher.run(&case.position, |it| {
        if case.is_solution(it.best_move) {
            solved_at = Some(it.nodes);
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    match (outcome, solved_at) {
        (Ok(_), Some(n)) => n.min(node_cap),
        _ => node_cap,
    }
}

/// Whether `score` is a mate score, and if so in how many plies (positive when the side to move
/// mates).
pub fn mate_distance(score: i32) -> Option<i32> {
    if score >= MATE_BOUND {
        Some(MATE - score)
    } else if score <= -MATE_BOUND {
        Some(-(MATE + score))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chess::parse_epd;

    fn pos(fen: &str) -> Position {
        Position::from_fen(fen).unwrap()
    }

    #[test]
    fn finds_mate_in_one() {
        let p = pos("6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1");
        let eval = EvalParams::reference();
        let r = search(&p, &eval, &SearchParams::off(), SearchLimits::depth(2)).unwrap();
        assert_eq!(r.best_move.uci(), "a1a8");
        assert_eq!(r.score, MATE - 1);
        assert_eq!(mate_distance(r.score), Some(1));
        assert_eq!(r.depth_completed, 2);
    }

    #[test]
    fn no_legal_moves_is_an_error() {
        let p = pos("R5k1/5ppp/8/8/8/8/8/6K1 b - - 0 1");
        let eval = EvalParams::reference();
        assert_eq!(
            search(&p, &eval, &SearchParams::off(), SearchLimits::depth(1)),
            Err(SearchError::NoLegalMoves)
        );
    }

    #[test]
    fn unbounded_limits_rejected() {
        let eval = EvalParams::reference();
        let r = search(&Position::startpos(), &eval, &SearchParams::off(), SearchLimits::default());
        assert_eq!(r, Err(SearchError::Unbounded));
    }

    #[test]
    fn node_limit_is_respected_and_deterministic() {
        let p = pos("r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1");
        let eval = EvalParams::reference();
        for params in [SearchParams::off(), SearchParams::learned()] {
            let a = search(&p, &eval, &params, SearchLimits::nodes(5_000)).unwrap();
            let b = search(&p, &eval, &params, SearchLimits::nodes(5_000)).unwrap();
            assert_eq!(a, b);
            assert!(a.nodes <= 5_000);
            assert!(p.legal_moves().contains(&a.best_move));
        }
    }

    #[test]
    fn solution_count_for_mate_in_one() {
        let tc = parse_epd("6k1/5ppp/8/8/8/8/8/R5K1 w - - bm Ra8#; id \"m1\";").unwrap();
        let eval = EvalParams::reference();
        let n = search_nodes_to_solution(&tc, &eval, &SearchParams::off(), 500_000);
        assert!(n > 0 && n < 1_000, "{n}");
        let mut first = None;
        Searcher::new(&eval, &SearchParams::off(), SearchLimits::depth(1))
            .run(&tc.position, |it| {
                first = Some(it.nodes);
                ControlFlow::Continue(())
            })
            .unwrap();
        assert_eq!(Some(n), first);
    }

    #[test]
    fn unsolvable_returns_cap_exactly() {
        // The "best move" is a blunder the engine never prefers.
        let tc = parse_epd("6k1/5ppp/8/8/8/8/8/R5K1 w - - bm Kf1; id \"never\";").unwrap();
        let eval = EvalParams::reference();
        assert_eq!(search_nodes_to_solution(&tc, &eval, &SearchParams::off(), 2_000), 2_000);
    }

    #[test]
    fn repetition_in_history_scores_draw() {
        let p = pos("7k/8/8/8/8/8/2Q5/K7 b - - 10 40");
        let eval = EvalParams::reference();
        let lost = search(&p, &eval, &SearchParams::off(), SearchLimits::depth(3)).unwrap();
        assert!(lost.score < -1_000);
        let kg8 = p.parse_uci_move("h8g8").unwrap();
        let seen = p.play(kg8).hash();
        let r = Searcher::new(&eval, &SearchParams::off(), SearchLimits::depth(3))
            .with_history(&[seen])
            .run(&p, |_| ControlFlow::Continue(()))
            .unwrap();
        assert_eq!(r.best_move, kg8);
        assert_eq!(r.score, 0);
    }

    #[test]
    fn root_restriction() {
        let p = pos("6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1");
        let eval = EvalParams::reference();
        let params = SearchParams::off();
        let others: Vec<Move> = p.legal_moves().into_iter().filter(|m| m.uci() != "a1a8").collect();
        let r = Searcher::new(&eval, &params, SearchLimits::depth(2))
            .with_root_moves(others)
            .run(&p, |_| ControlFlow::Continue(()))
            .unwrap();
        assert_ne!(r.best_move.uci(), "a1a8");
        assert!(r.score < MATE_BOUND);
        let none = Searcher::new(&eval, &params, SearchLimits::depth(2))
            .with_root_moves(vec![])
            .run(&p, |_| ControlFlow::Continue(()));
        assert_eq!(none, Err(SearchError::NoLegalMoves));
    }

    #[test]
    fn stop_flag_aborts() {
        let flag = Arc::new(AtomicBool::new(true));
        let eval = EvalParams::reference();
        let params = SearchParams::off();
        let r = Searcher::new(&eval, &params, SearchLimits::depth(30))
            .with_stop(flag)
            .run(&Position::startpos(), |_| ControlFlow::Continue(()))
            .unwrap();
        assert_eq!(r.depth_completed, 0);
        assert!(Position::startpos().legal_moves().contains(&r.best_move));
    }
}
