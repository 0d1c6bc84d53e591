mod support;

use evochess::chess::{perft, Position};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::naive::Board;

const KIWIPETE: &str = "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1";
const ENDGAME: &str = "8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1";
const PROMOTIONS: &str = "r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1";
const TRICKY: &str = "rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8";

/// Leaf counts produced by the mailbox oracle in `support::naive` (see `oracle_agrees_with_frozen_values`).
const FROZEN: &[(&str, &[u64])] = &[
    (Position::START_FEN, &[20, 400, 8_902, 197_281, 4_865_609]),
    (KIWIPETE, &[48, 2_039, 97_862]),
    (ENDGAME, &[14, 191, 2_812, 43_238]),
    (PROMOTIONS, &[6, 264, 9_467]),
    (TRICKY, &[44, 1_486, 62_379]),
];

#[test]
fn oracle_agrees_with_frozen_values() {
    for (fen, counts) in FROZEN {
        let board = Board::from_fen(fen);
        // The oracle is slow; depth 5 from the start position is covered below by the library.
        for (d, &expected) in counts.iter().enumerate().take(4) {
            assert_eq!(board.perft(d as u32 + 1), expected, "oracle {fen} depth {}", d + 1);
        }
    }
}

#[test]
fn oracle_start_depth_five() {
    assert_eq!(Board::from_fen(Position::START_FEN).perft(5), 4_865_609);
}

#[test]
fn library_matches_frozen_perft() {
    for (fen, counts) in FROZEN {
        let p = Position::from_fen(fen).unwrap();
        for (d, &expected) in counts.iter().enumerate() {
            assert_eq!(perft(&p, d as u32 + 1), expected, "{fen} depth {}", d + 1);
        }
    }
}

/// Random walks: legal move lists and resulting FENs must agree with the oracle at every step.
#[test]
fn random_walks_agree_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for start in [Position::START_FEN, KIWIPETE, ENDGAME, PROMOTIONS, TRICKY] {
        for _ in 0..40 {
            let mut pos = Position::from_fen(start).unwrap();
            let mut board = Board::from_fen(start);
            for _ in 0..80 {
                let mut ours: Vec<String> = pos.legal_moves().iter().map(|m| m.uci()).collect();
                let oracle_moves = board.legal();
                let mut theirs: Vec<String> = oracle_moves.iter().map(|m| m.uci()).collect();
                ours.sort();
                theirs.sort();
                assert_eq!(ours, theirs, "{}", pos.to_fen());
                assert_eq!(pos.to_fen(), board.to_fen());
                assert_eq!(Position::from_fen(&pos.to_fen()).unwrap(), pos);
                checked += 1;
                if oracle_moves.is_empty() {
                    break;
                }
                let m = oracle_moves[rng.gen_range(0..oracle_moves.len())];
                pos = pos.make_move(pos.parse_uci_move(&m.uci()).unwrap()).unwrap();
                board = board.apply(m);
            }
        }
    }
    assert!(checked > 1_000);
}
