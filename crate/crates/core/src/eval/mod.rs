//! Static evaluation under a 35-weight parameter vector.
//!
//! Every term is linear in its weight, so a position is first reduced to a [`Features`] vector of
//! signed counts (white minus black, penalties counted negatively) and the score is the dot
//! product with [`EvalParams`]. The 1-ply fitness uses this to score many organisms against the
//! same successor positions without recomputing the board analysis.
//!
//! Term definitions, applied to each colour from its own point of view (ranks are relative, 1 =
//! own back rank):
//!
//! * pawn advance: `(rank - 2)` per pawn, split into wing files (a-c, f-h) and centre files (d, e)
//! * passed pawn (no enemy pawn ahead on the same or adjacent files): `(rank - 2)` per pawn, plus
//!   the Chebyshev distance from the enemy king to the pawn
//! * doubled: one per extra pawn on a file; isolated: no own pawns on adjacent files; backward:
//!   not isolated, no own pawn on an adjacent file level with or behind it, and the square in
//!   front is attacked by an enemy pawn
//! * weak square: squares on ranks 3-5 that no own pawn can ever defend
//! * knight centricity from a 0-4 table; knight outpost: knight on ranks 4-6 on a square enemy
//!   pawns can never attack, defended by an own pawn
//! * mobility: pseudo-legal destination count (empty or enemy squares)
//! * rook/king file relations, 7th rank, connected rooks, rook behind own passed pawn,
//!   open/semi-open files, rook facing a weak (isolated or backward) enemy pawn on a semi-open
//!   file, and `7 - |rook file - enemy king file|`
//! * king shelter: missing own pawn one square ahead on the king file / adjacent files, with a
//!   smaller penalty when that pawn has advanced one extra square; bonus per file (king file,
//!   adjacent files) with no enemy pawn; pressure = enemy piece attacks on the 3x3 king zone

mod params;

pub use params::{EvalParams, EvalTerm, ParamsError, NUM_TERMS, PAWN_VALUE};

use crate::chess::attacks::{
    bishop_attacks, file_bb, king_attacks, knight_attacks, pawn_attack_span, queen_attacks,
    rook_attacks, Bitboard, Bits,
};
use crate::chess::{Color, PieceKind, Position, Square};

/// Signed feature counts, white minus black, aligned with [`EvalTerm`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Features(pub [i32; NUM_TERMS]);

impl Features {
    /// White-perspective score for the given weights.
    #[inline]
    pub fn dot(&self, params: &EvalParams) -> i32 {
        self.0
            .iter()
            .zip(params.values().iter())
            .map(|(f, w)| f * w)
            .sum()
    }
}

const fn build_masks() -> [[[u64; 64]; 2]; 3] {
    // [0] passed-pawn mask (same + adjacent files strictly ahead)
    // [1] backward support mask (adjacent files, same rank or behind)
    // [2] hole-defender mask (adjacent files, strictly behind)
    let mut t = [[[0u64; 64]; 2]; 3];
    let mut c = 0;
    while c < 2 {
        let mut sq = 0;
        while sq < 64 {
            let f = (sq % 8) as i32;
            let r = (sq / 8) as i32;
            let rel = if c == 0 { r } else { 7 - r };
            let mut s2 = 0;
            while s2 < 64 {
                let f2 = s2 % 8;
                let r2 = s2 / 8;
                let rel2 = if c == 0 { r2 } else { 7 - r2 };
                let df = if f2 > f { f2 - f } else { f - f2 };
                if df <= 1 && rel2 > rel {
                    t[0][c][sq] |= 1u64 << s2;
                }
                if df == 1 && rel2 <= rel {
                    t[1][c][sq] |= 1u64 << s2;
                }
                if df == 1 && rel2 < rel {
                    t[2][c][sq] |= 1u64 << s2;
                }
                s2 += 1;
            }
            sq += 1;
        }
        c += 1;
    }
    t
}

static MASKS: [[[u64; 64]; 2]; 3] = build_masks();

#[inline]
fn passed_mask(c: Color, sq: Square) -> Bitboard {
    MASKS[0][c.index()][sq.index()]
}

#[inline]
fn support_mask(c: Color, sq: Square) -> Bitboard {
    MASKS[1][c.index()][sq.index()]
}

#[inline]
fn defender_mask(c: Color, sq: Square) -> Bitboard {
    MASKS[2][c.index()][sq.index()]
}

#[inline]
fn adjacent_files(file: u8) -> Bitboard {
    let mut b = 0;
    if file > 0 {
        b |= file_bb(file - 1);
    }
    if file < 7 {
        b |= file_bb(file + 1);
    }
    b
}

#[rustfmt::skip]
const KNIGHT_CENTRICITY: [i32; 64] = [
    0, 1, 1, 1, 1, 1, 1, 0,
    1, 2, 2, 2, 2, 2, 2, 1,
    1, 2, 3, 3, 3, 3, 2, 1,
    1, 2, 3, 4, 4, 3, 2, 1,
    1, 2, 3, 4, 4, 3, 2, 1,
    1, 2, 3, 3, 3, 3, 2, 1,
    1, 2, 2, 2, 2, 2, 2, 1,
    0, 1, 1, 1, 1, 1, 1, 0,
];

/// Relative ranks (0-based) of own-half squares checked for weakness: ranks 3-5.
const WEAK_RANKS: std::ops::RangeInclusive<u8> = 2..=4;

fn relative_rank_bb(c: Color, rel: u8) -> Bitboard {
    let rank = match c {
        Color::White => rel,
        Color::Black => 7 - rel,
    };
    crate::chess::attacks::rank_bb(rank)
}

fn isolated(pos: &Position, c: Color, sq: Square) -> bool {
    pos.pieces(c, PieceKind::Pawn) & adjacent_files(sq.file()) == 0
}

fn backward(pos: &Position, c: Color, sq: Square, enemy_pawn_attacks: Bitboard) -> bool {
    let own = pos.pieces(c, PieceKind::Pawn);
    if isolated(pos, c, sq) || own & support_mask(c, sq) != 0 {
        return false;
    }
    match sq.offset(0, if c == Color::White { 1 } else { -1 }) {
        Some(front) => enemy_pawn_attacks & front.bb() != 0,
        None => false,
    }
}

fn passed(pos: &Position, c: Color, sq: Square) -> bool {
    pos.pieces(!c, PieceKind::Pawn) & passed_mask(c, sq) == 0
}

fn side_features(pos: &Position, c: Color, f: &mut [i32; NUM_TERMS]) {
    use EvalTerm::*;
    let sign = c.sign();
    let them = !c;
    let occ = pos.occupied();
    let own_all = pos.color_bb(c);
    let own_pawns = pos.pieces(c, PieceKind::Pawn);
    let enemy_pawns = pos.pieces(them, PieceKind::Pawn);
    let own_pawn_att = pawn_attack_span(c, own_pawns);
    let enemy_pawn_att = pawn_attack_span(them, enemy_pawns);
    let enemy_king = pos.king_square(them);
    let own_king = pos.king_square(c);

    let mut add = |t: EvalTerm, n: i32| f[t.index()] += sign * n;

    add(PawnValue, own_pawns.count_ones() as i32);
    add(KnightValue, pos.pieces(c, PieceKind::Knight).count_ones() as i32);
    add(BishopValue, pos.pieces(c, PieceKind::Bishop).count_ones() as i32);
    add(RookValue, pos.pieces(c, PieceKind::Rook).count_ones() as i32);
    add(QueenValue, pos.pieces(c, PieceKind::Queen).count_ones() as i32);

    let mut passed_pawns: Bitboard = 0;
    for sq in Bits(own_pawns) {
        let rel = sq.relative_rank(c) as i32;
        let advance = rel - 1;
        if matches!(sq.file(), 3 | 4) {
            add(PawnAdvanceB, advance);
        } else {
            add(PawnAdvanceA, advance);
        }
        if passed(pos, c, sq) {
            passed_pawns |= sq.bb();
            add(PassedPawnMult, advance);
            add(PassedPawnEnemyKingDist, enemy_king.chebyshev(sq) as i32);
        }
        if isolated(pos, c, sq) {
            add(IsolatedPawnPenalty, -1);
        } else if backward(pos, c, sq, enemy_pawn_att) {
            add(BackwardPawnPenalty, -1);
        }
    }
    for file in 0..8 {
        let n = (own_pawns & file_bb(file)).count_ones() as i32;
        if n > 1 {
            add(DoubledPawnPenalty, -(n - 1));
        }
    }

    let mut weak = 0;
    for rel in WEAK_RANKS {
        for sq in Bits(relative_rank_bb(c, rel)) {
            if own_pawns & defender_mask(c, sq) == 0 {
                weak += 1;
            }
        }
    }
    add(WeakSquarePenalty, -weak);

    for sq in Bits(pos.pieces(c, PieceKind::Knight)) {
        let rel_sq = if c == Color::White { sq } else { sq.flip() };
        add(KnightSqMult, KNIGHT_CENTRICITY[rel_sq.index()]);
        let rel = sq.relative_rank(c);
        if (3..=5).contains(&rel)
            && enemy_pawns & defender_mask(them, sq) == 0
            && own_pawn_att & sq.bb() != 0
        {
            add(KnightOutpostMult, 1);
        }
    }

    let bishops = pos.pieces(c, PieceKind::Bishop);
    for sq in Bits(bishops) {
        add(BishopMobility, (bishop_attacks(sq, occ) & !own_all).count_ones() as i32);
    }
    if bishops.count_ones() >= 2 {
        add(BishopPair, 1);
    }

    let rooks = pos.pieces(c, PieceKind::Rook);
    let king_file = enemy_king.file() as i32;
    let mut connected = 0;
    for sq in Bits(rooks) {
        let file = sq.file() as i32;
        let att = rook_attacks(sq, occ);
        add(RookMobility, (att & !own_all).count_ones() as i32);
        let dist = (file - king_file).abs();
        if dist == 0 {
            add(RookAttackKingFile, 1);
        } else if dist == 1 {
            if matches!(king_file, 0 | 1 | 6 | 7) {
                add(RookAttackKingAdjFileAbgh, 1);
            } else {
                add(RookAttackKingAdjFile, 1);
            }
        }
        add(RookColumnMult, 7 - dist);
        if sq.relative_rank(c) == 6 {
            add(Rook7thRank, 1);
        }
        connected += (att & rooks).count_ones() as i32;
        let file_mask = file_bb(sq.file());
        let own_on_file = own_pawns & file_mask;
        let enemy_on_file = enemy_pawns & file_mask;
        if own_on_file == 0 && enemy_on_file == 0 {
            add(RookOpenFile, 1);
        } else if own_on_file == 0 {
            add(RookSemiOpenFile, 1);
            if Bits(enemy_on_file).any(|p| isolated(pos, them, p) || backward(pos, them, p, own_pawn_att)) {
                add(RookAtckWeakPawnOpenColumn, 1);
            }
        }
        for p in Bits(passed_pawns & file_mask & att) {
            if p.relative_rank(c) > sq.relative_rank(c) {
                add(RookBehindPassedPawn, 1);
            }
        }
    }
    add(RookConnected, connected / 2);

    for sq in Bits(pos.pieces(c, PieceKind::Queen)) {
        add(QueenMobility, (queen_attacks(sq, occ) & !own_all).count_ones() as i32);
    }

    // King shelter and pawn storm.
    let kf = own_king.file();
    let kr = own_king.relative_rank(c);
    for file in kf.saturating_sub(1)..=(kf + 1).min(7) {
        let on_king_file = file == kf;
        let shield_at = |d: u8| -> bool {
            let rel = kr + d;
            rel <= 7 && own_pawns & file_bb(file) & relative_rank_bb(c, rel) != 0
        };
        if !shield_at(1) {
            if shield_at(2) {
                add(KingFriendlyPawnAdvanced1, -1);
            } else if on_king_file {
                add(KingNoFriendlyPawn, -1);
            } else {
                add(KingNoFriendlyPawnAdj, -1);
            }
        }
        if enemy_pawns & file_bb(file) == 0 {
            if on_king_file {
                add(KingNoEnemyPawn, 1);
            } else {
                add(KingNoEnemyPawnAdj, 1);
            }
        }
    }

    let zone = king_attacks(own_king) | own_king.bb();
    let mut pressure = 0;
    for sq in Bits(pos.pieces(them, PieceKind::Knight)) {
        pressure += (knight_attacks(sq) & zone).count_ones() as i32;
    }
    for sq in Bits(pos.pieces(them, PieceKind::Bishop)) {
        pressure += (bishop_attacks(sq, occ) & zone).count_ones() as i32;
    }
    for sq in Bits(pos.pieces(them, PieceKind::Rook)) {
        pressure += (rook_attacks(sq, occ) & zone).count_ones() as i32;
    }
    for sq in Bits(pos.pieces(them, PieceKind::Queen)) {
        pressure += (queen_attacks(sq, occ) & zone).count_ones() as i32;
    }
    add(KingPressureMult, -pressure);
}

/// Feature counts of `pos`, white minus black.
pub fn features(pos: &Position) -> Features {
    let mut f = [0i32; NUM_TERMS];
    side_features(pos, Color::White, &mut f);
    side_features(pos, Color::Black, &mut f);
    Features(f)
}

/// Centipawn score from the side to move's point of view.
pub fn evaluate(pos: &Position, params: &EvalParams) -> i32 {
    let white = features(pos).dot(params);
    white * pos.side_to_move().sign()
}

/// Material balance in centipawns, white minus black.
pub fn material_count(pos: &Position, params: &EvalParams) -> i32 {
    let mut score = 0;
    for (kind, term) in [
        (PieceKind::Pawn, EvalTerm::PawnValue),
        (PieceKind::Knight, EvalTerm::KnightValue),
        (PieceKind::Bishop, EvalTerm::BishopValue),
        (PieceKind::Rook, EvalTerm::RookValue),
        (PieceKind::Queen, EvalTerm::QueenValue),
    ] {
        let diff = pos.pieces(Color::White, kind).count_ones() as i32
            - pos.pieces(Color::Black, kind).count_ones() as i32;
        score += diff * params[term];
    }
    score
}

/// Value of a piece kind under `params` (king counts as zero).
#[inline]
pub fn piece_value(kind: PieceKind, params: &EvalParams) -> i32 {
    match kind {
        PieceKind::Pawn => params[EvalTerm::PawnValue],
        PieceKind::Knight => params[EvalTerm::KnightValue],
        PieceKind::Bishop => params[EvalTerm::BishopValue],
        PieceKind::Rook => params[EvalTerm::RookValue],
        PieceKind::Queen => params[EvalTerm::QueenValue],
        PieceKind::King => 0,
    }
}
