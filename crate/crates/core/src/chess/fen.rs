use super::position::Position;
use super::types::{CastlingRights, Color, Piece, Square};
use super::FenError;

impl Position {
    /// Parses a six-field FEN. The last two fields (clocks) may be omitted and default to `0 1`.
    pub fn from_fen(text: &str) -> Result<Position, FenError> {
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 6 && fields.len() != 4 {
            return Err(FenError::FieldCount(fields.len()));
        }
        let mut p = Position::empty();

        let ranks: Vec<&str> = fields[0].split('/').collect();
        if ranks.len() != 8 {
            return Err(FenError::Placement(fields[0].to_string()));
        }
        for (i, row) in ranks.iter().enumerate() {
            let rank = 7 - i as u8;
            let mut file = 0u8;
            for c in row.chars() {
                if let Some(d) = c.to_digit(10) {
                    if !(1..=8).contains(&d) {
                        return Err(FenError::Placement(fields[0].to_string()));
                    }
                    file += d as u8;
                } else {
                    let piece = Piece::from_fen_char(c).ok_or_else(|| FenError::Placement(fields[0].to_string()))?;
                    if file >= 8 {
                        return Err(FenError::Placement(fields[0].to_string()));
                    }
                    p.put(Square::from_coords(file, rank), piece);
                    file += 1;
                }
                if file > 8 {
                    return Err(FenError::Placement(fields[0].to_string()));
                }
            }
            if file != 8 {
                return Err(FenError::Placement(fields[0].to_string()));
            }
        }

        p.side = match fields[1] {
            "w" => Color::White,
            "b" => Color::Black,
            other => return Err(FenError::SideToMove(other.to_string())),
        };

        let mut rights = CastlingRights::NONE;
        if fields[2] != "-" {
            for c in fields[2].chars() {
                let flag = match c {
                    'K' => CastlingRights::WHITE_KING,
                    'Q' => CastlingRights::WHITE_QUEEN,
                    'k' => CastlingRights::BLACK_KING,
                    'q' => CastlingRights::BLACK_QUEEN,
                    _ => return Err(FenError::Castling(fields[2].to_string())),
                };
                if rights.has(flag) {
                    return Err(FenError::Castling(fields[2].to_string()));
                }
                rights.insert(flag);
            }
        }
        p.castling = rights;

        p.en_passant = match fields[3] {
            "-" => None,
            s => Some(s.parse::<Square>().map_err(|_| FenError::EnPassant(s.to_string()))?),
        };

        if fields.len() == 6 {
            p.halfmove_clock = fields[4]
                .parse()
                .map_err(|_| FenError::Clock(fields[4].to_string()))?;
            p.fullmove_number = fields[5]
                .parse()
                .map_err(|_| FenError::Clock(fields[5].to_string()))?;
            if p.fullmove_number == 0 {
                return Err(FenError::Clock(fields[5].to_string()));
            }
        }

        p.validate()?;
        p.recompute_hash();
        Ok(p)
    }

    /// The first four FEN fields (placement, side, castling, en passant), as used by EPD.
    pub fn to_epd_prefix(&self) -> String {
        let mut s = String::with_capacity(80);
        for rank in (0..8).rev() {
            let mut empty = 0;
            for file in 0..8 {
                match self.piece_at(Square::from_coords(file, rank)) {
                    Some(pc) => {
                        if empty > 0 {
                            s.push(char::from(b'0' + empty));
                            empty = 0;
                        }
                        s.push(pc.fen_char());
                    }
                    None => empty += 1,
                }
            }
            if empty > 0 {
                s.push(char::from(b'0' + empty));
            }
            if rank > 0 {
                s.push('/');
            }
        }
        s.push(' ');
        s.push(if self.side == Color::White { 'w' } else { 'b' });
        s.push(' ');
        let c = self.castling;
        if c.bits() == 0 {
            s.push('-');
        } else {
            for (flag, ch) in [
                (CastlingRights::WHITE_KING, 'K'),
                (CastlingRights::WHITE_QUEEN, 'Q'),
                (CastlingRights::BLACK_KING, 'k'),
                (CastlingRights::BLACK_QUEEN, 'q'),
            ] {
                if c.has(flag) {
                    s.push(ch);
                }
            }
        }
        s.push(' ');
        match self.en_passant {
            Some(ep) => s.push_str(&ep.to_string()),
            None => s.push('-'),
        }
        s
    }

    /// Canonical six-field FEN.
    pub fn to_fen(&self) -> String {
        format!(
            "{} {} {}",
            self.to_epd_prefix(),
            self.halfmove_clock,
            self.fullmove_number
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_round_trip() {
        let p = Position::startpos();
        assert_eq!(p.to_fen(), Position::START_FEN);
        assert_eq!(Position::from_fen(&p.to_fen()).unwrap(), p);
    }

    #[test]
    fn rejects_missing_kings() {
        assert!(matches!(
            Position::from_fen("8/8/8/8/8/8/8/8 w - - 0 1"),
            Err(FenError::KingCount { .. })
        ));
        assert!(matches!(
            Position::from_fen("kk6/8/8/8/8/8/8/K7 w - - 0 1"),
            Err(FenError::KingCount { color: Color::Black, count: 2 })
        ));
    }

    #[test]
    fn rejects_opponent_in_check() {
        assert_eq!(
            Position::from_fen("4k3/8/8/8/8/8/4R3/4K3 w - - 0 1"),
            Err(FenError::OpponentInCheck)
        );
    }

    #[test]
    fn rejects_malformed_fields() {
        for bad in [
            "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP w KQkq - 0 1",
            "rnbqkbnr/pppppppp/9/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1",
            "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR x KQkq - 0 1",
            "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkz - 0 1",
            "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq e3 0 1",
            "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - x 1",
            "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 0",
            "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq",
            "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBN1 w KQkq - 0 1",
            "Pnbqkbnr/pppppppp/8/8/8/8/1PPPPPPP/RNBQKBNR w Kkq - 0 1",
        ] {
            assert!(Position::from_fen(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn four_field_form_defaults_clocks() {
        let p = Position::from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq -").unwrap();
        assert_eq!(p, Position::startpos());
    }
}
