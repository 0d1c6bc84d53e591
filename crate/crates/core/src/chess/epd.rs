//! EPD test positions with `bm` (best move) and `id` opcodes.

use super::position::{Move, Position};
use super::EpdError;

/// A position with its predetermined best move(s).
#[derive(Clone, Debug, PartialEq)]
pub struct TestCase {
    pub position: Position,
    pub best_moves: Vec<Move>,
    pub id: String,
}

impl TestCase {
    pub fn is_solution(&self, mv: Move) -> bool {
        self.best_moves.contains(&mv)
    }

    /// EPD line: four FEN fields followed by `bm` (SAN) and `id` operations.
    pub fn to_epd(&self) -> String {
        let sans: Vec<String> = self.best_moves.iter().map(|&m| self.position.san(m)).collect();
        format!(
            "{} bm {}; id \"{}\";",
            self.position.to_epd_prefix(),
            sans.join(" "),
            self.id.replace('"', "'")
        )
    }
}

/// Splits the operation section into `(opcode, operands)` pairs, honouring quoted strings.
fn operations(text: &str) -> Result<Vec<(String, Vec<String>)>, EpdError> {
    let mut ops = Vec::new();
    let mut cur: Vec<String> = Vec::new();
    let mut word = String::new();
    let mut chars = text.chars().peekable();
    let flush_word = |word: &mut String, cur: &mut Vec<String>| {
        if !word.is_empty() {
            cur.push(std::mem::take(word));
        }
    };
    while let Some(c) = chars.next() {
        match c {
            '"' => {
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some(c) => s.push(c),
                        None => return Err(EpdError::Malformed("unterminated string".into())),
                    }
                }
                cur.push(s);
            }
            ';' => {
                flush_word(&mut word, &mut cur);
                if !cur.is_empty() {
                    let opcode = cur.remove(0);
                    ops.push((opcode, std::mem::take(&mut cur)));
                }
            }
            c if c.is_whitespace() => flush_word(&mut word, &mut cur),
            c => word.push(c),
        }
    }
    flush_word(&mut word, &mut cur);
    if !cur.is_empty() {
        let opcode = cur.remove(0);
        ops.push((opcode, cur));
    }
    Ok(ops)
}

/// Parses one EPD record. Best moves are resolved as SAN against the legal moves, falling back
/// to UCI long algebraic.
pub fn parse_epd(line: &str) -> Result<TestCase, EpdError> {
    let line = line.trim();
    let mut fields = line.splitn(5, char::is_whitespace);
    let mut fen_fields = Vec::with_capacity(4);
    for _ in 0..4 {
        match fields.next() {
            Some(f) if !f.is_empty() => fen_fields.push(f),
            _ => return Err(EpdError::Malformed(line.to_string())),
        }
    }
    let rest = fields.next().unwrap_or("");
    let ops = operations(rest)?;

    let mut fen = fen_fields.join(" ");
    let hmvc = ops.iter().find(|(k, _)| k == "hmvc").and_then(|(_, v)| v.first().cloned());
    let fmvn = ops.iter().find(|(k, _)| k == "fmvn").and_then(|(_, v)| v.first().cloned());
    fen.push_str(&format!(
        " {} {}",
        hmvc.as_deref().unwrap_or("0"),
        fmvn.as_deref().unwrap_or("1")
    ));
    let position = Position::from_fen(&fen)?;

    let bm = ops
        .iter()
        .find(|(k, _)| k == "bm")
        .ok_or(EpdError::MissingBestMove)?;
    if bm.1.is_empty() {
        return Err(EpdError::MissingBestMove);
    }
    let mut best_moves = Vec::with_capacity(bm.1.len());
    for token in &bm.1 {
        let mv = match position.parse_san(token) {
            Ok(m) => m,
            Err(san_err) => position.parse_uci_move(token).map_err(|_| san_err)?,
        };
        if !best_moves.contains(&mv) {
            best_moves.push(mv);
        }
    }
    let id = ops
        .iter()
        .find(|(k, _)| k == "id")
        .and_then(|(_, v)| v.first().cloned())
        .unwrap_or_default();
    Ok(TestCase {
        position,
        best_moves,
        id,
    })
}

/// Parses every non-blank, non-comment line; returns the cases and per-line failures.
pub fn parse_epd_suite(text: &str) -> (Vec<TestCase>, Vec<(usize, EpdError)>) {
    let mut cases = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        match parse_epd(t) {
            Ok(c) => cases.push(c),
            Err(e) => errors.push((i + 1, e)),
        }
    }
    (cases, errors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chess::MoveError;

    #[test]
    fn parses_bm_and_id() {
        let tc = parse_epd(
            "r1bqkb1r/pppp1ppp/2n2n2/4p2Q/2B1P3/8/PPPP1PPP/RNB1K1NR w KQkq - bm Qxf7#; id \"pos1\";",
        )
        .unwrap();
        assert_eq!(tc.id, "pos1");
        assert_eq!(tc.best_moves.len(), 1);
        assert_eq!(tc.best_moves[0].uci(), "h5f7");
        assert!(tc.position.play(tc.best_moves[0]).is_checkmate());
    }

    #[test]
    fn missing_bm_is_an_error() {
        assert_eq!(
            parse_epd("4k3/8/8/8/8/8/8/4K2R w K - id \"x\";"),
            Err(EpdError::MissingBestMove)
        );
    }

    #[test]
    fn ambiguous_san_is_an_error() {
        let r = parse_epd("1k6/8/8/8/R6R/8/8/R3K3 w - - bm Ra2; id \"amb\";");
        assert_eq!(r, Err(EpdError::Move(MoveError::Ambiguous("Ra2".into()))));
    }

    #[test]
    fn several_best_moves_and_round_trip() {
        let tc = parse_epd("1k6/8/8/8/R6R/8/8/R3K3 w - - bm Rh8+ R4a8+; id \"two\";").unwrap();
        assert_eq!(tc.best_moves.len(), 2);
        let again = parse_epd(&tc.to_epd()).unwrap();
        assert_eq!(again, tc);
    }

    #[test]
    fn suite_collects_errors() {
        let text = "# comment\n\n4k3/8/8/8/8/8/8/4K2R w K - bm O-O; id \"a\";\nbad line\n";
        let (cases, errors) = parse_epd_suite(text);
        assert_eq!(cases.len(), 1);
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].0, 4);
    }
}
