use thiserror::Error;

use crate::chess::{Move, MoveError, Position};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("opening book line {line}: `{token}`: {source}")]
pub struct BookError {
    pub line: usize,
    pub token: String,
    pub source: MoveError,
}

/// One opening: moves from the standard start position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpeningLine {
    pub moves: Vec<Move>,
}

impl OpeningLine {
    pub fn end_position(&self) -> Position {
        self.moves.iter().fold(Position::startpos(), |p, &m| p.play(m))
    }

    /// Space-separated SAN with move numbers.
    pub fn to_san(&self) -> String {
        let mut pos = Position::startpos();
        let mut out = Vec::new();
        for (i, &m) in self.moves.iter().enumerate() {
            if i % 2 == 0 {
                out.push(format!("{}.", i / 2 + 1));
            }
            out.push(pos.san(m));
            pos = pos.play(m);
        }
        out.join(" ")
    }
}

/// Reads one opening per non-empty line. Tokens may be SAN or coordinate moves; move numbers
/// (`1.`, `1...`) are skipped and `#` starts a comment.
pub fn parse_book(text: &str) -> Result<Vec<OpeningLine>, BookError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut pos = Position::startpos();
        let mut moves = Vec::new();
        for token in body.split_whitespace() {
            let token = token.trim_start_matches(|c: char| c.is_ascii_digit() || c == '.');
            if token.is_empty() {
                continue;
            }
            let mv = pos
                .parse_san(token)
                .or_else(|e| pos.parse_uci_move(token).map_err(|_| e))
                .map_err(|source| BookError {
                    line: i + 1,
                    token: token.to_string(),
                    source,
                })?;
            pos = pos.play(mv);
            moves.push(mv);
        }
        lines.push(OpeningLine { moves });
    }
    Ok(lines)
}
