use std::fmt;

use super::attacks::{
    bishop_attacks, file_bb, king_attacks, knight_attacks, pawn_attacks, queen_attacks, rank_bb,
    rook_attacks, Bitboard, Bits,
};
use super::types::{castle_keep_mask, CastlingRights, Color, Piece, PieceKind, Square};
use super::zobrist::KEYS;
use super::MoveError;

const EMPTY: u8 = 12;

#[inline]
const fn code(color: Color, kind: PieceKind) -> u8 {
    (color as u8) * 6 + kind as u8
}

/// A chess move. Flags are derived from the position the move was generated in.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub from: Square,
    pub to: Square,
    pub promotion: Option<PieceKind>,
    pub flags: u8,
}

impl Move {
    pub const CAPTURE: u8 = 1;
    pub const EN_PASSANT: u8 = 2;
    pub const CASTLE: u8 = 4;
    pub const DOUBLE_PUSH: u8 = 8;

    #[inline]
    pub fn is_capture(self) -> bool {
        self.flags & Move::CAPTURE != 0
    }

    #[inline]
    pub fn is_en_passant(self) -> bool {
        self.flags & Move::EN_PASSANT != 0
    }

    #[inline]
    pub fn is_castle(self) -> bool {
        self.flags & Move::CASTLE != 0
    }

    #[inline]
    pub fn is_double_push(self) -> bool {
        self.flags & Move::DOUBLE_PUSH != 0
    }

    /// Captures and promotions.
    #[inline]
    pub fn is_tactical(self) -> bool {
        self.is_capture() || self.promotion.is_some()
    }

    /// Long algebraic notation as used by UCI, e.g. `e2e4`, `e7e8q`.
    pub fn uci(self) -> String {
        let mut s = format!("{}{}", self.from, self.to);
        if let Some(p) = self.promotion {
            s.push(p.lower_char());
        }
        s
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.uci())
    }
}

/// Complete game state. Positions are immutable values; making a move returns a new one.
#[derive(Copy, Clone, PartialEq, Eq)]
pub struct Position {
    pub(crate) by_kind: [Bitboard; 6],
    pub(crate) by_color: [Bitboard; 2],
    pub(crate) board: [u8; 64],
    pub(crate) side: Color,
    pub(crate) castling: CastlingRights,
    pub(crate) en_passant: Option<Square>,
    pub(crate) halfmove_clock: u32,
    pub(crate) fullmove_number: u32,
    pub(crate) hash: u64,
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Position({})", self.to_fen())
    }
}

impl Default for Position {
    fn default() -> Self {
        Position::startpos()
    }
}

impl Position {
    pub const START_FEN: &'static str = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

    pub fn startpos() -> Position {
        Position::from_fen(Position::START_FEN).expect("start FEN is valid")
    }

    pub(crate) fn empty() -> Position {
        Position {
            by_kind: [0; 6],
            by_color: [0; 2],
            board: [EMPTY; 64],
            side: Color::White,
            castling: CastlingRights::NONE,
            en_passant: None,
            halfmove_clock: 0,
            fullmove_number: 1,
            hash: 0,
        }
    }

    #[inline]
    pub fn side_to_move(&self) -> Color {
        self.side
    }

    #[inline]
    pub fn castling(&self) -> CastlingRights {
        self.castling
    }

    #[inline]
    pub fn en_passant(&self) -> Option<Square> {
        self.en_passant
    }

    #[inline]
    pub fn halfmove_clock(&self) -> u32 {
        self.halfmove_clock
    }

    #[inline]
    pub fn fullmove_number(&self) -> u32 {
        self.fullmove_number
    }

    /// Zobrist hash; the en-passant file only contributes when a capture is possible.
    #[inline]
    pub fn hash(&self) -> u64 {
        self.hash
    }

    #[inline]
    pub fn occupied(&self) -> Bitboard {
        self.by_color[0] | self.by_color[1]
    }

    #[inline]
    pub fn color_bb(&self, color: Color) -> Bitboard {
        self.by_color[color.index()]
    }

    #[inline]
    pub fn kind_bb(&self, kind: PieceKind) -> Bitboard {
        self.by_kind[kind.index()]
    }

    #[inline]
    pub fn pieces(&self, color: Color, kind: PieceKind) -> Bitboard {
        self.by_color[color.index()] & self.by_kind[kind.index()]
    }

    #[inline]
    pub fn piece_at(&self, sq: Square) -> Option<Piece> {
        let c = self.board[sq.index()];
        if c == EMPTY {
            None
        } else {
            let color = if c < 6 { Color::White } else { Color::Black };
            Some(Piece::new(color, PieceKind::from_index((c % 6) as usize)))
        }
    }

    #[inline]
    pub fn kind_at(&self, sq: Square) -> Option<PieceKind> {
        let c = self.board[sq.index()];
        if c == EMPTY {
            None
        } else {
            Some(PieceKind::from_index((c % 6) as usize))
        }
    }

    #[inline]
    pub fn king_square(&self, color: Color) -> Square {
        let kings = self.pieces(color, PieceKind::King);
        debug_assert!(kings != 0);
        Square::new(kings.trailing_zeros() as u8)
    }

    pub(crate) fn put(&mut self, sq: Square, piece: Piece) {
        let b = sq.bb();
        self.by_kind[piece.kind.index()] |= b;
        self.by_color[piece.color.index()] |= b;
        self.board[sq.index()] = code(piece.color, piece.kind);
        self.hash ^= KEYS.pieces[code(piece.color, piece.kind) as usize][sq.index()];
    }

    fn remove(&mut self, sq: Square) -> Option<Piece> {
        let piece = self.piece_at(sq)?;
        let b = sq.bb();
        self.by_kind[piece.kind.index()] &= !b;
        self.by_color[piece.color.index()] &= !b;
        self.board[sq.index()] = EMPTY;
        self.hash ^= KEYS.pieces[code(piece.color, piece.kind) as usize][sq.index()];
        Some(piece)
    }

    fn ep_key(&self) -> u64 {
        match self.en_passant {
            Some(ep) => {
                let capturers = pawn_attacks(!self.side, ep) & self.pieces(self.side, PieceKind::Pawn);
                if capturers != 0 {
                    KEYS.en_passant[ep.file() as usize]
                } else {
                    0
                }
            }
            None => 0,
        }
    }

    pub(crate) fn recompute_hash(&mut self) {
        let mut h = 0u64;
        for i in 0..64 {
            let c = self.board[i];
            if c != EMPTY {
                h ^= KEYS.pieces[c as usize][i];
            }
        }
        h ^= KEYS.castling[self.castling.bits() as usize];
        if self.side == Color::Black {
            h ^= KEYS.black_to_move;
        }
        self.hash = h;
        self.hash ^= self.ep_key();
    }

    /// Pieces of `by` attacking `sq`, given occupancy `occ`.
    #[inline]
    pub fn attackers_to(&self, sq: Square, by: Color, occ: Bitboard) -> Bitboard {
        let them = self.by_color[by.index()];
        let bishops_queens = self.by_kind[PieceKind::Bishop.index()] | self.by_kind[PieceKind::Queen.index()];
        let rooks_queens = self.by_kind[PieceKind::Rook.index()] | self.by_kind[PieceKind::Queen.index()];
        them & ((pawn_attacks(!by, sq) & self.by_kind[PieceKind::Pawn.index()])
            | (knight_attacks(sq) & self.by_kind[PieceKind::Knight.index()])
            | (king_attacks(sq) & self.by_kind[PieceKind::King.index()])
            | (bishop_attacks(sq, occ) & bishops_queens)
            | (rook_attacks(sq, occ) & rooks_queens))
    }

    #[inline]
    pub fn is_attacked(&self, sq: Square, by: Color) -> bool {
        self.attackers_to(sq, by, self.occupied()) != 0
    }

    #[inline]
    pub fn in_check(&self) -> bool {
        self.is_attacked(self.king_square(self.side), !self.side)
    }

    /// Squares attacked by the piece on `sq` (pseudo-legal reach for sliders and leapers).
    pub fn piece_attacks(&self, sq: Square) -> Bitboard {
        let occ = self.occupied();
        match self.piece_at(sq) {
            None => 0,
            Some(p) => match p.kind {
                PieceKind::Pawn => pawn_attacks(p.color, sq),
                PieceKind::Knight => knight_attacks(sq),
                PieceKind::Bishop => bishop_attacks(sq, occ),
                PieceKind::Rook => rook_attacks(sq, occ),
                PieceKind::Queen => queen_attacks(sq, occ),
                PieceKind::King => king_attacks(sq),
            },
        }
    }

    /// Plays `mv` without checking legality. `mv` must come from `legal_moves` of this position.
    pub fn play(&self, mv: Move) -> Position {
        let mut p = *self;
        let us = self.side;
        let them = !us;
        let moving = self.piece_at(mv.from).expect("move from an empty square");

        p.hash ^= self.ep_key();
        p.hash ^= KEYS.castling[self.castling.bits() as usize];
        p.en_passant = None;
        p.halfmove_clock += 1;

        if mv.is_en_passant() {
            let victim = Square::from_coords(mv.to.file(), mv.from.rank());
            p.remove(victim);
            p.halfmove_clock = 0;
        } else if let Some(captured) = p.remove(mv.to) {
            debug_assert!(captured.color == them);
            p.halfmove_clock = 0;
        }

        p.remove(mv.from);
        let placed = match mv.promotion {
            Some(k) => Piece::new(us, k),
            None => moving,
        };
        p.put(mv.to, placed);

        if moving.kind == PieceKind::Pawn {
            p.halfmove_clock = 0;
            if mv.is_double_push() {
                p.en_passant = Some(Square::from_coords(
                    mv.from.file(),
                    (mv.from.rank() + mv.to.rank()) / 2,
                ));
            }
        }

        if mv.is_castle() {
            let (rook_from, rook_to) = if mv.to.file() == 6 {
                (Square::from_coords(7, mv.from.rank()), Square::from_coords(5, mv.from.rank()))
            } else {
                (Square::from_coords(0, mv.from.rank()), Square::from_coords(3, mv.from.rank()))
            };
            let rook = p.remove(rook_from).expect("castling rook present");
            p.put(rook_to, rook);
        }

        let keep = castle_keep_mask(mv.from.index()) & castle_keep_mask(mv.to.index());
        p.castling = CastlingRights::from_bits(self.castling.bits() & keep);
        p.hash ^= KEYS.castling[p.castling.bits() as usize];

        if us == Color::Black {
            p.fullmove_number += 1;
        }
        p.side = them;
        p.hash ^= KEYS.black_to_move;
        p.hash ^= p.ep_key();
        p
    }

    /// Passes the move to the opponent (null move). Undefined when in check. The halfmove clock
    /// restarts so that repetition checks never look across the pass.
    pub fn play_null(&self) -> Position {
        let mut p = *self;
        p.hash ^= self.ep_key();
        p.en_passant = None;
        p.side = !self.side;
        p.hash ^= KEYS.black_to_move;
        p.halfmove_clock = 0;
        p
    }

    /// Plays `mv` after verifying that it is legal here.
    pub fn make_move(&self, mv: Move) -> Result<Position, MoveError> {
        if self.legal_moves().contains(&mv) {
            Ok(self.play(mv))
        } else {
            Err(MoveError::Illegal(mv.uci()))
        }
    }

    /// Finds the legal move with the given from/to/promotion.
    pub fn find_move(&self, from: Square, to: Square, promotion: Option<PieceKind>) -> Option<Move> {
        self.legal_moves()
            .into_iter()
            .find(|m| m.from == from && m.to == to && m.promotion == promotion)
    }

    /// Parses a UCI long-algebraic move (`e2e4`, `a7a8q`) and resolves it against the legal moves.
    pub fn parse_uci_move(&self, text: &str) -> Result<Move, MoveError> {
        let t = text.trim();
        if t.len() < 4 || t.len() > 5 || !t.is_ascii() {
            return Err(MoveError::Unparseable(text.to_string()));
        }
        let from: Square = t[0..2].parse().map_err(|_| MoveError::Unparseable(text.to_string()))?;
        let to: Square = t[2..4].parse().map_err(|_| MoveError::Unparseable(text.to_string()))?;
        let promotion = match t.chars().nth(4) {
            None => None,
            Some(c) => match PieceKind::from_char(c) {
                Some(k) if k != PieceKind::Pawn && k != PieceKind::King => Some(k),
                _ => return Err(MoveError::Unparseable(text.to_string())),
            },
        };
        self.find_move(from, to, promotion)
            .ok_or_else(|| MoveError::Illegal(text.to_string()))
    }

    fn push_targets(&self, from: Square, targets: Bitboard, flags: u8, out: &mut Vec<Move>) {
        let them = self.by_color[(!self.side).index()];
        for to in Bits(targets) {
            let f = if them & to.bb() != 0 { flags | Move::CAPTURE } else { flags };
            out.push(Move {
                from,
                to,
                promotion: None,
                flags: f,
            });
        }
    }

    /// Pseudo-legal moves ordered by from-square, then to-square, then promotion (Q, R, B, N).
    pub fn pseudo_legal_moves(&self, out: &mut Vec<Move>) {
        let us = self.side;
        let them = !us;
        let own = self.by_color[us.index()];
        let enemy = self.by_color[them.index()];
        let occ = own | enemy;

        for from in Bits(own) {
            let kind = self.kind_at(from).expect("own piece");
            match kind {
                PieceKind::Pawn => self.pawn_moves(from, occ, enemy, out),
                PieceKind::Knight => self.push_targets(from, knight_attacks(from) & !own, 0, out),
                PieceKind::Bishop => self.push_targets(from, bishop_attacks(from, occ) & !own, 0, out),
                PieceKind::Rook => self.push_targets(from, rook_attacks(from, occ) & !own, 0, out),
                PieceKind::Queen => self.push_targets(from, queen_attacks(from, occ) & !own, 0, out),
                PieceKind::King => {
                    let normal = king_attacks(from) & !own;
                    let castles = self.castle_targets(from, occ);
                    for to in Bits(normal | castles) {
                        let flags = if castles & to.bb() != 0 {
                            Move::CASTLE
                        } else if enemy & to.bb() != 0 {
                            Move::CAPTURE
                        } else {
                            0
                        };
                        out.push(Move {
                            from,
                            to,
                            promotion: None,
                            flags,
                        });
                    }
                }
            }
        }
    }

    fn pawn_moves(&self, from: Square, occ: Bitboard, enemy: Bitboard, out: &mut Vec<Move>) {
        let us = self.side;
        let forward: i8 = if us == Color::White { 1 } else { -1 };
        let mut targets: Bitboard = 0;
        let mut double: Bitboard = 0;
        if let Some(one) = from.offset(0, forward) {
            if occ & one.bb() == 0 {
                targets |= one.bb();
                if from.relative_rank(us) == 1 {
                    let two = one.offset(0, forward).expect("double push on board");
                    if occ & two.bb() == 0 {
                        double = two.bb();
                        targets |= double;
                    }
                }
            }
        }
        let attacks = pawn_attacks(us, from);
        let ep = match self.en_passant {
            Some(ep) if attacks & ep.bb() != 0 => ep.bb(),
            _ => 0,
        };
        targets |= attacks & enemy;
        targets |= ep;

        for to in Bits(targets) {
            let mut flags = 0;
            if enemy & to.bb() != 0 {
                flags |= Move::CAPTURE;
            }
            if ep & to.bb() != 0 {
                flags |= Move::CAPTURE | Move::EN_PASSANT;
            }
            if double & to.bb() != 0 {
                flags |= Move::DOUBLE_PUSH;
            }
            if to.relative_rank(us) == 7 {
                for k in PieceKind::PROMOTIONS {
                    out.push(Move {
                        from,
                        to,
                        promotion: Some(k),
                        flags,
                    });
                }
            } else {
                out.push(Move {
                    from,
                    to,
                    promotion: None,
                    flags,
                });
            }
        }
    }

    fn castle_targets(&self, from: Square, occ: Bitboard) -> Bitboard {
        let us = self.side;
        let them = !us;
        let back = if us == Color::White { 0 } else { 7 };
        if from != Square::from_coords(4, back) {
            return 0;
        }
        let mut t = 0;
        let can_king = self.castling.has(CastlingRights::kingside(us));
        let can_queen = self.castling.has(CastlingRights::queenside(us));
        if !can_king && !can_queen {
            return 0;
        }
        if self.is_attacked(from, them) {
            return 0;
        }
        let sq = |f: u8| Square::from_coords(f, back);
        if can_king
            && occ & (sq(5).bb() | sq(6).bb()) == 0
            && !self.is_attacked(sq(5), them)
            && !self.is_attacked(sq(6), them)
        {
            t |= sq(6).bb();
        }
        if can_queen
            && occ & (sq(1).bb() | sq(2).bb() | sq(3).bb()) == 0
            && !self.is_attacked(sq(3), them)
            && !self.is_attacked(sq(2), them)
        {
            t |= sq(2).bb();
        }
        t
    }

    /// Whether the side that just moved left its own king attacked.
    #[inline]
    fn mover_in_check(&self) -> bool {
        let mover = !self.side;
        self.is_attacked(self.king_square(mover), self.side)
    }

    /// Exactly the legal moves, ordered by from-square, to-square, then promotion (Q, R, B, N).
    pub fn legal_moves(&self) -> Vec<Move> {
        let mut pseudo = Vec::with_capacity(64);
        self.pseudo_legal_moves(&mut pseudo);
        pseudo.retain(|&m| !self.play(m).mover_in_check());
        pseudo
    }

    /// Legal moves paired with the positions they lead to.
    pub fn legal_successors(&self) -> Vec<(Move, Position)> {
        let mut pseudo = Vec::with_capacity(64);
        self.pseudo_legal_moves(&mut pseudo);
        pseudo
            .into_iter()
            .filter_map(|m| {
                let next = self.play(m);
                (!next.mover_in_check()).then_some((m, next))
            })
            .collect()
    }

    pub fn has_legal_move(&self) -> bool {
        let mut pseudo = Vec::with_capacity(64);
        self.pseudo_legal_moves(&mut pseudo);
        pseudo.into_iter().any(|m| !self.play(m).mover_in_check())
    }

    pub fn is_checkmate(&self) -> bool {
        self.in_check() && !self.has_legal_move()
    }

    pub fn is_stalemate(&self) -> bool {
        !self.in_check() && !self.has_legal_move()
    }

    /// Neither side can possibly deliver mate (K v K, K+minor v K, K+B v K+B same colour bishops).
    pub fn insufficient_material(&self) -> bool {
        let heavy = self.kind_bb(PieceKind::Pawn) | self.kind_bb(PieceKind::Rook) | self.kind_bb(PieceKind::Queen);
        if heavy != 0 {
            return false;
        }
        let knights = self.kind_bb(PieceKind::Knight);
        let bishops = self.kind_bb(PieceKind::Bishop);
        let minors = (knights | bishops).count_ones();
        if minors <= 1 {
            return true;
        }
        if knights == 0 {
            const DARK: Bitboard = 0xaa55_aa55_aa55_aa55;
            return bishops & DARK == 0 || bishops & !DARK == 0;
        }
        false
    }

    /// Colour-flipped and vertically mirrored position (white pieces become black on the mirrored square).
    pub fn mirrored(&self) -> Position {
        let mut p = Position::empty();
        for i in 0..64u8 {
            let sq = Square::new(i);
            if let Some(pc) = self.piece_at(sq) {
                p.put(sq.flip(), Piece::new(!pc.color, pc.kind));
            }
        }
        p.side = !self.side;
        p.castling = self.castling.swapped();
        p.en_passant = self.en_passant.map(Square::flip);
        p.halfmove_clock = self.halfmove_clock;
        p.fullmove_number = self.fullmove_number;
        p.recompute_hash();
        p
    }

    /// Non-pawn, non-king material exists for `color`.
    pub fn has_non_pawn_material(&self, color: Color) -> bool {
        let pieces = self.kind_bb(PieceKind::Knight)
            | self.kind_bb(PieceKind::Bishop)
            | self.kind_bb(PieceKind::Rook)
            | self.kind_bb(PieceKind::Queen);
        pieces & self.color_bb(color) != 0
    }

    /// Whether `mv` (legal here) gives check.
    pub fn gives_check(&self, mv: Move) -> bool {
        self.play(mv).in_check()
    }

    pub(crate) fn validate(&self) -> Result<(), super::FenError> {
        use super::FenError;
        for c in Color::BOTH {
            let n = self.pieces(c, PieceKind::King).count_ones();
            if n != 1 {
                return Err(FenError::KingCount { color: c, count: n });
            }
        }
        if self.kind_bb(PieceKind::Pawn) & (rank_bb(0) | rank_bb(7)) != 0 {
            return Err(FenError::PawnOnBackRank);
        }
        for c in Color::BOTH {
            let back = if c == Color::White { 0 } else { 7 };
            let king_home = self.pieces(c, PieceKind::King) & Square::from_coords(4, back).bb() != 0;
            let rooks = self.pieces(c, PieceKind::Rook);
            if self.castling.has(CastlingRights::kingside(c))
                && !(king_home && rooks & Square::from_coords(7, back).bb() != 0)
            {
                return Err(FenError::Castling("castling right without king and rook on origin squares".into()));
            }
            if self.castling.has(CastlingRights::queenside(c))
                && !(king_home && rooks & Square::from_coords(0, back).bb() != 0)
            {
                return Err(FenError::Castling("castling right without king and rook on origin squares".into()));
            }
        }
        if let Some(ep) = self.en_passant {
            let mover = !self.side;
            let expected_rank = if mover == Color::White { 2 } else { 5 };
            let pawn_sq = Square::from_coords(ep.file(), if mover == Color::White { 3 } else { 4 });
            let origin = Square::from_coords(ep.file(), if mover == Color::White { 1 } else { 6 });
            if ep.rank() != expected_rank
                || self.pieces(mover, PieceKind::Pawn) & pawn_sq.bb() == 0
                || self.occupied() & (ep.bb() | origin.bb()) != 0
            {
                return Err(FenError::EnPassant(ep.to_string()));
            }
        }
        if self.is_attacked(self.king_square(!self.side), self.side) {
            return Err(FenError::OpponentInCheck);
        }
        Ok(())
    }

    /// Pawns of `color` on file `file`.
    #[inline]
    pub fn pawns_on_file(&self, color: Color, file: u8) -> Bitboard {
        self.pieces(color, PieceKind::Pawn) & file_bb(file)
    }
}

/// Leaf count of the legal move tree to `depth`.
pub fn perft(pos: &Position, depth: u32) -> u64 {
    if depth == 0 {
        return 1;
    }
    let moves = pos.legal_moves();
    if depth == 1 {
        return moves.len() as u64;
    }
    moves.iter().map(|&m| perft(&pos.play(m), depth - 1)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(fen: &str) -> Position {
        Position::from_fen(fen).unwrap()
    }

    #[test]
    fn start_has_twenty_moves() {
        assert_eq!(Position::startpos().legal_moves().len(), 20);
    }

    #[test]
    fn generation_order_is_documented_order() {
        let p = pos("4k3/1P6/8/8/8/8/8/R3K2R w KQ - 0 1");
        let moves = p.legal_moves();
        let keys: Vec<_> = moves
            .iter()
            .map(|m| {
                let promo_rank = match m.promotion {
                    None => 0,
                    Some(PieceKind::Queen) => 1,
                    Some(PieceKind::Rook) => 2,
                    Some(PieceKind::Bishop) => 3,
                    Some(PieceKind::Knight) => 4,
                    _ => unreachable!(),
                };
                (m.from.index(), m.to.index(), promo_rank)
            })
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        let b7: Square = "b7".parse().unwrap();
        let promos: Vec<_> = moves.iter().filter(|m| m.from == b7).map(|m| m.promotion.unwrap()).collect();
        assert_eq!(promos, PieceKind::PROMOTIONS.to_vec());
    }

    #[test]
    fn stalemate_has_no_moves() {
        let p = pos("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1");
        assert!(p.legal_moves().is_empty());
        assert!(p.is_stalemate());
        assert!(!p.is_checkmate());
    }

    #[test]
    fn e4_sets_en_passant_and_clocks() {
        let p = Position::startpos();
        let m = p.parse_uci_move("e2e4").unwrap();
        let q = p.make_move(m).unwrap();
        assert_eq!(q.to_fen(), "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1");
    }

    #[test]
    fn castling_moves_rook() {
        let p = pos("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1");
        let q = p.make_move(p.parse_uci_move("e1g1").unwrap()).unwrap();
        assert_eq!(q.to_fen(), "r3k2r/8/8/8/8/8/8/R4RK1 b kq - 1 1");
        let r = q.make_move(q.parse_uci_move("e8c8").unwrap()).unwrap();
        assert_eq!(r.to_fen(), "2kr3r/8/8/8/8/8/8/R4RK1 w - - 2 2");
    }

    #[test]
    fn en_passant_removes_bypassed_pawn() {
        let p = pos("4k3/8/8/3pP3/8/8/8/4K3 w - d6 0 2");
        let q = p.make_move(p.parse_uci_move("e5d6").unwrap()).unwrap();
        assert_eq!(q.to_fen(), "4k3/8/3P4/8/8/8/8/4K3 b - - 0 2");
    }

    #[test]
    fn illegal_move_is_rejected() {
        let p = Position::startpos();
        let bogus = Move {
            from: "e2".parse().unwrap(),
            to: "e5".parse().unwrap(),
            promotion: None,
            flags: 0,
        };
        assert!(matches!(p.make_move(bogus), Err(MoveError::Illegal(_))));
        assert!(p.parse_uci_move("e7e5").is_err());
    }

    #[test]
    fn pinned_piece_cannot_move() {
        let p = pos("4k3/4r3/8/8/8/8/4N3/4K3 w - - 0 1");
        assert!(p.legal_moves().iter().all(|m| m.from != "e2".parse().unwrap()));
    }

    #[test]
    fn incremental_hash_matches_recomputed() {
        let mut p = pos("r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1");
        for _ in 0..40 {
            let moves = p.legal_moves();
            if moves.is_empty() {
                break;
            }
            p = p.play(moves[moves.len() / 2]);
            let mut q = p;
            q.recompute_hash();
            assert_eq!(q.hash(), p.hash());
        }
    }

    #[test]
    fn insufficient_material_cases() {
        assert!(pos("8/8/4k3/8/8/3K4/8/8 w - - 0 1").insufficient_material());
        assert!(pos("8/8/4k3/8/8/3KN3/8/8 w - - 0 1").insufficient_material());
        assert!(!pos("8/8/4k3/8/8/R2K4/8/8 w - - 0 1").insufficient_material());
        assert!(!pos("8/8/4kn2/8/8/3KN3/8/8 w - - 0 1").insufficient_material());
    }

    #[test]
    fn perft_shallow_start() {
        let p = Position::startpos();
        assert_eq!(perft(&p, 0), 1);
        assert_eq!(perft(&p, 1), 20);
        assert_eq!(perft(&p, 2), 400);
    }
}
