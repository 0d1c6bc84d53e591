//! Rules of chess: board representation, move generation and execution, FEN/SAN/PGN/EPD.

pub mod attacks;
mod epd;
mod fen;
mod pgn;
mod position;
mod san;
mod types;
mod zobrist;

use thiserror::Error;

pub use epd::{parse_epd, parse_epd_suite, TestCase};
pub use pgn::{parse_pgn, read_pgn, Game, GameResult, PgnDiagnostic, PgnParse};
pub use position::{perft, Move, Position};
pub use types::{CastlingRights, Color, Piece, PieceKind, Square};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FenError {
    #[error("expected 6 FEN fields, found {0}")]
    FieldCount(usize),
    #[error("malformed piece placement `{0}`")]
    Placement(String),
    #[error("malformed side to move `{0}`")]
    SideToMove(String),
    #[error("malformed castling field: {0}")]
    Castling(String),
    #[error("invalid en-passant square `{0}`")]
    EnPassant(String),
    #[error("malformed move counter `{0}`")]
    Clock(String),
    #[error("{color:?} has {count} kings")]
    KingCount { color: Color, count: u32 },
    #[error("pawn on first or last rank")]
    PawnOnBackRank,
    #[error("side not to move is in check")]
    OpponentInCheck,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("illegal move `{0}`")]
    Illegal(String),
    #[error("unparseable move `{0}`")]
    Unparseable(String),
    #[error("ambiguous move `{0}`")]
    Ambiguous(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpdError {
    #[error("malformed EPD record: {0}")]
    Malformed(String),
    #[error(transparent)]
    Fen(#[from] FenError),
    #[error("EPD record has no `bm` operation")]
    MissingBestMove,
    #[error("best move: {0}")]
    Move(#[from] MoveError),
}
