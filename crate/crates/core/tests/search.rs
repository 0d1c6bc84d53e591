//! Search behaviour against an unordered reference alpha-beta and structural invariants.

use std::ops::ControlFlow;

use evochess::chess::Position;
use evochess::eval::{evaluate, EvalParams};
use evochess::search::{search, SearchLimits, SearchParams, Searcher, MATE, UNITS_PER_PLY};
use proptest::prelude::*;

const POSITIONS: [&str; 6] = [
    "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1",
    "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1",
    "8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1",
    "r1bqkb1r/pppp1ppp/2n2n2/4p2Q/2B1P3/8/PPPP1PPP/RNB1K1NR w KQkq - 4 4",
    "6k1/5ppp/8/8/8/8/5PPP/3R2K1 w - - 0 1",
    "r4rk1/1pp1qppp/p1np1n2/2b1p1B1/2B1P1b1/P1NP1N2/1PP1QPPP/R4RK1 w - - 0 10",
];

/// Textbook fail-hard alpha-beta without move ordering or any selectivity, with the same leaf
/// semantics: stand-pat quiescence over captures and promotions, mate recognised in check,
/// repetition of the path scores zero. With a full window its root value is the minimax value.
fn reference(pos: &Position, depth: u32, ply: i32, mut a: i32, b: i32, path: &mut Vec<u64>, eval: &EvalParams) -> i32 {
    if depth == 0 {
        return quiesce(pos, ply, a, b, eval);
    }
    if ply > 0 {
        let n = path.len();
        let reach = (pos.halfmove_clock() as usize).min(n - 1);
        if pos.halfmove_clock() >= 100 || (2..=reach).step_by(2).any(|k| path[n - 1 - k] == pos.hash()) {
            return 0.clamp(a, b);
        }
    }
    let kids = pos.legal_successors();
    if kids.is_empty() {
        return (if pos.in_check() { -MATE + ply } else { 0 }).clamp(a, b);
    }
    for (_, child) in kids {
        path.push(child.hash());
        let v = -reference(&child, depth - 1, ply + 1, -b, -a, path, eval);
        path.pop();
        if v >= b {
            return b;
        }
        a = a.max(v);
    }
    a
}

fn quiesce(pos: &Position, ply: i32, mut a: i32, b: i32, eval: &EvalParams) -> i32 {
    if pos.in_check() && pos.legal_moves().is_empty() {
        return (-MATE + ply).clamp(a, b);
    }
    let stand = evaluate(pos, eval);
    if stand >= b {
        return b;
    }
    a = a.max(stand);
    // Biggest victim first purely for speed; the value does not depend on the order.
    let mut tactical: Vec<_> = pos
        .legal_successors()
        .into_iter()
        .filter(|(m, _)| m.is_capture() || m.promotion.is_some())
        .collect();
    tactical.sort_by_key(|(m, _)| std::cmp::Reverse(pos.kind_at(m.to).map_or(0, |k| k.index() + 1)));
    for (_, child) in tactical {
        let v = -quiesce(&child, ply + 1, -b, -a, eval);
        if v >= b {
            return b;
        }
        a = a.max(v);
    }
    a
}

const WIDE: i32 = 1_000_000;

fn minimax(pos: &Position, depth: u32, ply: i32, path: &mut Vec<u64>, eval: &EvalParams) -> i32 {
    reference(pos, depth, ply, -WIDE, WIDE, path, eval)
}

#[test]
fn plain_search_matches_minimax() {
    let eval = EvalParams::reference();
    for fen in POSITIONS {
        let pos = Position::from_fen(fen).unwrap();
        for depth in 1..=2 {
            let r = search(&pos, &eval, &SearchParams::off(), SearchLimits::depth(depth)).unwrap();
            let mut path = vec![pos.hash()];
            let expect = minimax(&pos, depth, 0, &mut path, &eval);
            assert_eq!(r.score, expect, "{fen} depth {depth}");
            // The chosen move must realise the score.
            let child = pos.play(r.best_move);
            path.push(child.hash());
            assert_eq!(-minimax(&child, depth - 1, 1, &mut path, &eval), expect, "{fen}");
        }
    }
}

#[test]
fn plain_search_matches_minimax_depth_three_endgame() {
    let eval = EvalParams::reference();
    for fen in [POSITIONS[2], POSITIONS[4]] {
        let pos = Position::from_fen(fen).unwrap();
        let r = search(&pos, &eval, &SearchParams::off(), SearchLimits::depth(3)).unwrap();
        assert_eq!(r.score, minimax(&pos, 3, 0, &mut vec![pos.hash()], &eval), "{fen}");
    }
}

#[test]
fn selective_search_visits_fewer_nodes() {
    let eval = EvalParams::reference();
    let (mut plain, mut tuned) = (0, 0);
    let mut cut = SearchParams::learned();
    for ext in [&mut cut.check_ext, &mut cut.one_reply_ext, &mut cut.recapture_ext] {
        *ext = 0;
    }
    cut.passed_pawn_ext = 0;
    cut.mate_threat_ext = 0;
    for fen in POSITIONS {
        let pos = Position::from_fen(fen).unwrap();
        plain += search(&pos, &eval, &SearchParams::off(), SearchLimits::depth(5)).unwrap().nodes;
        tuned += search(&pos, &eval, &cut, SearchLimits::depth(5)).unwrap().nodes;
    }
    assert!(tuned < plain, "pruned {tuned} vs plain {plain}");
}

#[test]
fn extension_accounting_at_horizon() {
    let eval = EvalParams::reference();
    let mut params = SearchParams::off();
    params.check_ext = 4;
    params.one_reply_ext = 3;
    params.recapture_ext = 2;
    params.passed_pawn_ext = 7;
    params.mate_threat_ext = 1;
    for fen in POSITIONS {
        let pos = Position::from_fen(fen).unwrap();
        let mut s = Searcher::new(&eval, &params, SearchLimits::depth(4)).with_trace();
        s.run(&pos, |_| ControlFlow::Continue(())).unwrap();
        let trace = s.take_trace().unwrap();
        assert!(trace.iter().any(|r| r.extension_units > 0), "{fen}: no extension exercised");
        for r in trace {
            let expect = r.iteration as i32 + r.extension_units / UNITS_PER_PLY;
            assert_eq!(r.ply as i32, expect, "{fen}: {r:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn node_cap_never_exceeded(walk in proptest::collection::vec(0usize..64, 0..12), cap in 1u64..4_000, learned in any::<bool>()) {
        let eval = EvalParams::reference();
        let params = if learned { SearchParams::learned() } else { SearchParams::off() };
        let mut pos = Position::startpos();
        for i in walk {
            let moves = pos.legal_moves();
            if moves.is_empty() { break; }
            pos = pos.play(moves[i % moves.len()]);
        }
        if let Ok(r) = search(&pos, &eval, &params, SearchLimits::nodes(cap)) {
            prop_assert!(r.nodes <= cap);
            prop_assert!(pos.legal_moves().contains(&r.best_move));
        }
    }
}
