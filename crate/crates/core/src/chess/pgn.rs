//! PGN export-format reading and writing.

use std::fmt;
use std::io::{self, Read};

use super::position::{Move, Position};
use super::types::Color;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum GameResult {
    WhiteWin,
    BlackWin,
    Draw,
    Unknown,
}

impl GameResult {
    pub fn as_pgn(self) -> &'static str {
        match self {
            GameResult::WhiteWin => "1-0",
            GameResult::BlackWin => "0-1",
            GameResult::Draw => "1/2-1/2",
            GameResult::Unknown => "*",
        }
    }

    pub fn from_pgn(token: &str) -> Option<GameResult> {
        match token {
            "1-0" => Some(GameResult::WhiteWin),
            "0-1" => Some(GameResult::BlackWin),
            "1/2-1/2" => Some(GameResult::Draw),
            "*" => Some(GameResult::Unknown),
            _ => None,
        }
    }

    pub fn winner(self) -> Option<Color> {
        match self {
            GameResult::WhiteWin => Some(Color::White),
            GameResult::BlackWin => Some(Color::Black),
            _ => None,
        }
    }
}

impl fmt::Display for GameResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_pgn())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Game {
    pub tags: Vec<(String, String)>,
    pub initial: Position,
    pub moves: Vec<Move>,
    pub result: GameResult,
}

impl Game {
    pub fn new(initial: Position) -> Game {
        Game {
            tags: Vec::new(),
            initial,
            moves: Vec::new(),
            result: GameResult::Unknown,
        }
    }

    pub fn tag(&self, name: &str) -> Option<&str> {
        self.tags
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn set_tag(&mut self, name: &str, value: impl Into<String>) {
        let value = value.into();
        match self.tags.iter_mut().find(|(k, _)| k == name) {
            Some(slot) => slot.1 = value,
            None => self.tags.push((name.to_string(), value)),
        }
    }

    /// Positions before each move, paired with the move played.
    pub fn replay(&self) -> Vec<(Position, Move)> {
        let mut out = Vec::with_capacity(self.moves.len());
        let mut pos = self.initial;
        for &m in &self.moves {
            out.push((pos, m));
            pos = pos.play(m);
        }
        out
    }

    pub fn final_position(&self) -> Position {
        self.moves.iter().fold(self.initial, |p, &m| p.play(m))
    }

    /// Export-format PGN text for this game.
    pub fn to_pgn(&self) -> String {
        let mut out = String::new();
        let roster = ["Event", "Site", "Date", "Round", "White", "Black"];
        for name in roster {
            let v = self.tag(name).unwrap_or("?");
            out.push_str(&format!("[{name} \"{}\"]\n", escape(v)));
        }
        out.push_str(&format!("[Result \"{}\"]\n", self.result));
        let start = self.initial != Position::startpos();
        if start {
            out.push_str("[SetUp \"1\"]\n");
            out.push_str(&format!("[FEN \"{}\"]\n", self.initial.to_fen()));
        }
        for (k, v) in &self.tags {
            if roster.contains(&k.as_str()) || matches!(k.as_str(), "Result" | "SetUp" | "FEN") {
                continue;
            }
            out.push_str(&format!("[{k} \"{}\"]\n", escape(v)));
        }
        out.push('\n');

        let mut tokens = Vec::with_capacity(self.moves.len() * 2);
        let mut pos = self.initial;
        for (i, &m) in self.moves.iter().enumerate() {
            if pos.side_to_move() == Color::White {
                tokens.push(format!("{}.", pos.fullmove_number()));
            } else if i == 0 {
                tokens.push(format!("{}...", pos.fullmove_number()));
            }
            tokens.push(pos.san(m));
            pos = pos.play(m);
        }
        tokens.push(self.result.to_string());

        let mut line = String::new();
        for t in tokens {
            if !line.is_empty() && line.len() + 1 + t.len() > 79 {
                out.push_str(&line);
                out.push('\n');
                line.clear();
            }
            if !line.is_empty() {
                line.push(' ');
            }
            line.push_str(&t);
        }
        out.push_str(&line);
        out.push_str("\n\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// A game that could not be read, with the 1-based ordinal of the game in the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PgnDiagnostic {
    pub game_index: usize,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for PgnDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "game {} (line {}): {}", self.game_index, self.line, self.message)
    }
}

#[derive(Clone, Debug, Default)]
pub struct PgnParse {
    pub games: Vec<Game>,
    pub diagnostics: Vec<PgnDiagnostic>,
}

#[derive(Debug, PartialEq)]
enum Token {
    Tag(String, String),
    Result(GameResult),
    San(String),
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
    line: usize,
    at_line_start: bool,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.char_indices().peekable(),
            text,
            line: 1,
            at_line_start: true,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.at_line_start = true;
        } else if !c.is_whitespace() {
            self.at_line_start = false;
        }
        Some(c)
    }

    fn skip_line(&mut self) {
        while let Some(c) = self.bump() {
            if c == '\n' {
                break;
            }
        }
    }

    /// Next token; `Err` carries a lexical problem but the lexer stays usable.
    fn next_token(&mut self) -> Option<Result<Token, String>> {
        loop {
            let &(start, c) = self.chars.peek()?;
            if c == '%' && self.at_line_start {
                self.skip_line();
                continue;
            }
            match c {
                _ if c.is_whitespace() => {
                    self.bump();
                }
                '{' => {
                    while let Some(c) = self.bump() {
                        if c == '}' {
                            break;
                        }
                    }
                }
                ';' => self.skip_line(),
                '(' => {
                    let mut depth = 0;
                    while let Some(c) = self.bump() {
                        match c {
                            '(' => depth += 1,
                            ')' => {
                                depth -= 1;
                                if depth == 0 {
                                    break;
                                }
                            }
                            '{' => {
                                while let Some(c) = self.bump() {
                                    if c == '}' {
                                        break;
                                    }
                                }
                            }
                            _ => {}
                        }
                    }
                }
                ')' => {
                    self.bump();
                    return Some(Err("unbalanced ')'".into()));
                }
                '[' => {
                    self.bump();
                    return Some(self.tag());
                }
                '$' => {
                    self.bump();
                    while matches!(self.chars.peek(), Some(&(_, c)) if c.is_ascii_digit()) {
                        self.bump();
                    }
                }
                _ => {
                    let mut end = start;
                    while let Some(&(i, c)) = self.chars.peek() {
                        if c.is_whitespace() || matches!(c, '{' | '(' | ')' | ';' | '[' | '$') {
                            break;
                        }
                        end = i + c.len_utf8();
                        self.bump();
                    }
                    let word = &self.text[start..end];
                    if let Some(r) = GameResult::from_pgn(word) {
                        return Some(Ok(Token::Result(r)));
                    }
                    // Strip move numbers ("12.", "12...", "12.e4").
                    let trimmed = word.trim_start_matches(|c: char| c.is_ascii_digit());
                    let san = if trimmed.len() < word.len() && trimmed.starts_with('.') {
                        trimmed.trim_start_matches('.')
                    } else if trimmed.len() < word.len() && trimmed.is_empty() {
                        ""
                    } else {
                        word.trim_start_matches('.')
                    };
                    if san.is_empty() {
                        continue;
                    }
                    return Some(Ok(Token::San(san.to_string())));
                }
            }
        }
    }

    fn tag(&mut self) -> Result<Token, String> {
        let mut name = String::new();
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_whitespace() || c == '"' || c == ']' {
                break;
            }
            name.push(c);
            self.bump();
        }
        while matches!(self.chars.peek(), Some(&(_, c)) if c.is_whitespace() && c != '\n') {
            self.bump();
        }
        if self.bump() != Some('"') {
            self.skip_line();
            return Err(format!("malformed tag [{name}"));
        }
        let mut value = String::new();
        loop {
            match self.bump() {
                Some('\\') => {
                    if let Some(c) = self.bump() {
                        value.push(c);
                    }
                }
                Some('"') => break,
                Some('\n') | None => return Err(format!("unterminated tag value for {name}")),
                Some(c) => value.push(c),
            }
        }
        while let Some(c) = self.bump() {
            if c == ']' {
                return Ok(Token::Tag(name, value));
            }
            if !c.is_whitespace() {
                self.skip_line();
                return Err(format!("malformed tag [{name}"));
            }
        }
        Err(format!("unterminated tag [{name}"))
    }
}

struct Builder {
    game: Game,
    pos: Position,
    error: Option<String>,
    error_line: usize,
    has_moves: bool,
    started: bool,
}

impl Builder {
    fn new() -> Self {
        Builder {
            game: Game::new(Position::startpos()),
            pos: Position::startpos(),
            error: None,
            error_line: 0,
            has_moves: false,
            started: false,
        }
    }

    fn fail(&mut self, msg: String, line: usize) {
        if self.error.is_none() {
            self.error = Some(msg);
            self.error_line = line;
        }
    }
}

/// Parses every game in `text`. Games with unreadable movetext or illegal moves are skipped and
/// reported in `diagnostics`; the remaining games are returned in input order.
pub fn parse_pgn(text: &str) -> PgnParse {
    let mut out = PgnParse::default();
    let mut lexer = Lexer::new(text);
    let mut b = Builder::new();
    let mut ordinal = 1usize;

    let mut finish = |b: &mut Builder, out: &mut PgnParse, result: Option<GameResult>, line: usize| {
        if !b.started {
            return;
        }
        if let Some(r) = result {
            if let Some(tagged) = b.game.tag("Result").and_then(GameResult::from_pgn) {
                if tagged != r && b.error.is_none() {
                    b.fail(format!("result tag {tagged} disagrees with movetext {r}"), line);
                }
            }
            b.game.result = r;
        } else {
            b.game.result = b
                .game
                .tag("Result")
                .and_then(GameResult::from_pgn)
                .unwrap_or(GameResult::Unknown);
            if b.error.is_none() {
                b.fail("missing game termination marker".into(), line);
            }
        }
        let done = std::mem::replace(b, Builder::new());
        match done.error {
            None => out.games.push(done.game),
            Some(message) => out.diagnostics.push(PgnDiagnostic {
                game_index: ordinal,
                line: done.error_line,
                message,
            }),
        }
        ordinal += 1;
    };

    while let Some(tok) = lexer.next_token() {
        let line = lexer.line;
        match tok {
            Err(msg) => {
                b.started = true;
                b.fail(msg, line);
            }
            Ok(Token::Tag(name, value)) => {
                if b.has_moves {
                    finish(&mut b, &mut out, None, line);
                }
                b.started = true;
                if name == "FEN" {
                    match Position::from_fen(&value) {
                        Ok(p) => {
                            b.game.initial = p;
                            b.pos = p;
                        }
                        Err(e) => b.fail(format!("bad FEN tag: {e}"), line),
                    }
                }
                b.game.tags.push((name, value));
            }
            Ok(Token::San(san)) => {
                b.started = true;
                b.has_moves = true;
                if b.error.is_some() {
                    continue;
                }
                match b.pos.parse_san(&san) {
                    Ok(m) => {
                        b.game.moves.push(m);
                        b.pos = b.pos.play(m);
                    }
                    Err(e) => b.fail(format!("move {}: {e}", b.game.moves.len() / 2 + 1), line),
                }
            }
            Ok(Token::Result(r)) => {
                b.started = true;
                finish(&mut b, &mut out, Some(r), line);
            }
        }
    }
    let line = lexer.line;
    finish(&mut b, &mut out, None, line);
    out
}

/// Reads a whole character stream and parses it as PGN.
pub fn read_pgn<R: Read>(mut reader: R) -> io::Result<PgnParse> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    Ok(parse_pgn(&text))
}
