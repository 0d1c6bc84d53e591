//! Standard algebraic notation.

use super::position::{Move, Position};
use super::types::{PieceKind, Square};
use super::MoveError;

impl Position {
    /// Renders a legal move in SAN, including `+`/`#` suffixes.
    pub fn san(&self, mv: Move) -> String {
        let mut s = String::new();
        let kind = self.kind_at(mv.from).expect("move from occupied square");
        if mv.is_castle() {
            s.push_str(if mv.to.file() == 6 { "O-O" } else { "O-O-O" });
        } else if kind == PieceKind::Pawn {
            if mv.is_capture() {
                s.push((b'a' + mv.from.file()) as char);
                s.push('x');
            }
            s.push_str(&mv.to.to_string());
            if let Some(p) = mv.promotion {
                s.push('=');
                s.push(p.san_char().expect("promotion piece"));
            }
        } else {
            s.push(kind.san_char().expect("non-pawn"));
            let rivals: Vec<Move> = self
                .legal_moves()
                .into_iter()
                .filter(|m| m.to == mv.to && m.from != mv.from && self.kind_at(m.from) == Some(kind))
                .collect();
            if !rivals.is_empty() {
                let same_file = rivals.iter().any(|m| m.from.file() == mv.from.file());
                let same_rank = rivals.iter().any(|m| m.from.rank() == mv.from.rank());
                if !same_file {
                    s.push((b'a' + mv.from.file()) as char);
                } else if !same_rank {
                    s.push((b'1' + mv.from.rank()) as char);
                } else {
                    s.push_str(&mv.from.to_string());
                }
            }
            if mv.is_capture() {
                s.push('x');
            }
            s.push_str(&mv.to.to_string());
        }
        let next = self.play(mv);
        if next.in_check() {
            s.push(if next.has_legal_move() { '+' } else { '#' });
        }
        s
    }

    /// Resolves a SAN token against the legal moves of this position.
    pub fn parse_san(&self, text: &str) -> Result<Move, MoveError> {
        let unparseable = || MoveError::Unparseable(text.to_string());
        let t = text.trim().trim_end_matches(['+', '#', '!', '?']);
        let t = t.strip_suffix("e.p.").unwrap_or(t).trim();
        if t.is_empty() {
            return Err(unparseable());
        }

        let legal = self.legal_moves();
        if matches!(t, "O-O" | "0-0" | "O-O-O" | "0-0-0") {
            let file = if t.len() == 3 { 6 } else { 2 };
            return legal
                .into_iter()
                .find(|m| m.is_castle() && m.to.file() == file)
                .ok_or_else(|| MoveError::Illegal(text.to_string()));
        }

        let chars: Vec<char> = t.chars().collect();
        let (kind, mut rest) = match chars[0] {
            'N' | 'B' | 'R' | 'Q' | 'K' => (PieceKind::from_char(chars[0]).unwrap(), &chars[1..]),
            _ => (PieceKind::Pawn, &chars[..]),
        };

        let mut promotion = None;
        if let Some(pos) = rest.iter().position(|&c| c == '=') {
            let pc = rest.get(pos + 1).copied().ok_or_else(unparseable)?;
            promotion = Some(promotion_kind(pc).ok_or_else(unparseable)?);
            rest = &rest[..pos];
        } else if kind == PieceKind::Pawn && rest.len() >= 3 {
            if let Some(k) = promotion_kind(*rest.last().unwrap()) {
                if rest[rest.len() - 2].is_ascii_digit() {
                    promotion = Some(k);
                    rest = &rest[..rest.len() - 1];
                }
            }
        }

        if rest.len() < 2 {
            return Err(unparseable());
        }
        let dest: String = rest[rest.len() - 2..].iter().collect();
        let to: Square = dest.parse().map_err(|_| unparseable())?;
        let mut disambig: Vec<char> = rest[..rest.len() - 2].to_vec();
        if disambig.last() == Some(&'x') {
            disambig.pop();
        }
        if disambig.len() > 2 || disambig.contains(&'x') {
            return Err(unparseable());
        }
        let mut from_file = None;
        let mut from_rank = None;
        for c in disambig {
            match c {
                'a'..='h' => from_file = Some(c as u8 - b'a'),
                '1'..='8' => from_rank = Some(c as u8 - b'1'),
                _ => return Err(unparseable()),
            }
        }

        let candidates: Vec<Move> = legal
            .into_iter()
            .filter(|m| {
                !m.is_castle()
                    && m.to == to
                    && m.promotion == promotion
                    && self.kind_at(m.from) == Some(kind)
                    && from_file.is_none_or(|f| m.from.file() == f)
                    && from_rank.is_none_or(|r| m.from.rank() == r)
            })
            .collect();
        match candidates.len() {
            0 => Err(MoveError::Illegal(text.to_string())),
            1 => Ok(candidates[0]),
            _ => Err(MoveError::Ambiguous(text.to_string())),
        }
    }
}

fn promotion_kind(c: char) -> Option<PieceKind> {
    match c.to_ascii_uppercase() {
        'Q' => Some(PieceKind::Queen),
        'R' => Some(PieceKind::Rook),
        'B' => Some(PieceKind::Bishop),
        'N' => Some(PieceKind::Knight),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(fen: &str) -> Position {
        Position::from_fen(fen).unwrap()
    }

    #[test]
    fn san_round_trips_every_legal_move() {
        for fen in [
            Position::START_FEN,
            "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1",
            "n1n5/PPPk4/8/8/8/8/4Kppp/5N1N b - - 0 1",
            "8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1",
            "1k6/8/8/8/R6R/8/8/R3K3 w - - 0 1",
        ] {
            let p = pos(fen);
            for m in p.legal_moves() {
                let s = p.san(m);
                assert_eq!(p.parse_san(&s), Ok(m), "{fen} {s}");
            }
        }
    }

    #[test]
    fn disambiguation() {
        let p = pos("1k6/8/8/8/R6R/8/8/R3K3 w - - 0 1");
        let m = p.parse_san("R4a2").unwrap();
        assert_eq!(m.from.to_string(), "a4");
        assert_eq!(p.san(m), "R4a2");
        let m = p.parse_san("Rhd4").unwrap();
        assert_eq!(m.from.to_string(), "h4");
        assert!(matches!(p.parse_san("Ra2"), Err(MoveError::Ambiguous(_))));
        assert!(matches!(p.parse_san("Rd4"), Err(MoveError::Ambiguous(_))));
    }

    #[test]
    fn checks_and_mates_are_marked() {
        let p = pos("6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1");
        let m = p.parse_san("Ra8").unwrap();
        assert_eq!(p.san(m), "Ra8#");
        assert_eq!(p.parse_san("Ra8#").unwrap(), m);
    }

    #[test]
    fn promotions_and_castling() {
        let p = pos("r3k3/1P6/8/8/8/8/8/R3K2R w KQq - 0 1");
        assert_eq!(p.parse_san("bxa8=N").unwrap().promotion, Some(PieceKind::Knight));
        assert_eq!(p.parse_san("b8Q").unwrap().promotion, Some(PieceKind::Queen));
        assert!(p.parse_san("O-O").unwrap().is_castle());
        assert!(p.parse_san("0-0-0").unwrap().is_castle());
        assert!(p.parse_san("Zz9").is_err());
        assert!(matches!(p.parse_san("Qd4"), Err(MoveError::Illegal(_))));
    }
}
