//! A UCI front end. Searches run on a worker thread so `stop` and `isready` stay responsive;
//! other commands wait for a running search to finish.

use std::io::{BufRead, Write};
use std::ops::ControlFlow;
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use evochess::arena::TimeControl;
use evochess::chess::{Color, Position};
use evochess::eval::EvalParams;
use evochess::search::{mate_distance, SearchLimits, SearchParams, Searcher, MAX_DEPTH};

use crate::commands::{load_eval, load_search};

type Out = Arc<Mutex<dyn Write + Send>>;

fn emit(out: &Out, line: &str) {
    let mut w = out.lock().unwrap_or_else(|p| p.into_inner());
    let _ = writeln!(w, "{line}");
    let _ = w.flush();
}

struct Job {
    stop: Arc<AtomicBool>,
    handle: JoinHandle<()>,
}

pub struct Uci {
    out: Out,
    eval: EvalParams,
    search: SearchParams,
    position: Position,
    /// Hashes of the positions before `position`, oldest first.
    history: Vec<u64>,
    job: Option<Job>,
}

fn score_text(score: i32) -> String {
    match mate_distance(score) {
        Some(p) if p > 0 => format!("mate {}", (p + 1) / 2),
        Some(p) => format!("mate -{}", (-p + 1) / 2),
        None => format!("cp {score}"),
    }
}

impl Uci {
    pub fn new(out: Out, eval: EvalParams, search: SearchParams) -> Uci {
        Uci {
            out,
            eval,
            search,
            position: Position::startpos(),
            history: Vec::new(),
            job: None,
        }
    }

    fn info(&self, text: impl AsRef<str>) {
        emit(&self.out, &format!("info string {}", text.as_ref()));
    }

    /// Reads commands until `quit` or end of input; a search still running at end of input
    /// finishes normally.
    pub fn run(&mut self, input: impl BufRead) {
        for line in input.lines() {
            let Ok(line) = line else { break };
            if !self.handle(&line) {
                self.stop();
                return;
            }
        }
        self.wait();
    }

    /// Handles one command line; false on `quit`.
    pub fn handle(&mut self, line: &str) -> bool {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let Some((&cmd, args)) = tokens.split_first() else {
            return true;
        };
        match cmd {
            "uci" => {
                emit(&self.out, "id name evochess");
                emit(&self.out, "id author evochess developers");
                emit(&self.out, "option name EvalFile type string default <reference>");
                emit(&self.out, "option name SearchFile type string default <learned>");
                emit(&self.out, "uciok");
            }
            "isready" => emit(&self.out, "readyok"),
            "ucinewgame" => {
                self.wait();
                self.position = Position::startpos();
                self.history.clear();
            }
            "position" => {
                self.wait();
                if let Err(e) = self.set_position(args) {
                    self.info(format!("error: {e}"));
                }
            }
            "go" => {
                self.wait();
                if let Err(e) = self.go(args) {
                    self.info(format!("error: {e}"));
                }
            }
            "stop" => self.stop(),
            "setoption" => {
                self.wait();
                if let Err(e) = self.set_option(args) {
                    self.info(format!("error: {e}"));
                }
            }
            "quit" => return false,
            _ => self.info(format!("unknown command `{cmd}`")),
        }
        true
    }

    fn set_position(&mut self, args: &[&str]) -> Result<(), String> {
        let (mut pos, rest) = match args.split_first() {
            Some((&"startpos", rest)) => (Position::startpos(), rest),
            Some((&"fen", rest)) => {
                let n = rest.iter().position(|t| *t == "moves").unwrap_or(rest.len());
                (Position::from_fen(&rest[..n].join(" ")).map_err(|e| e.to_string())?, &rest[n..])
            }
            _ => return Err("expected `startpos` or `fen`".into()),
        };
        let mut history = Vec::new();
        match rest.split_first() {
            None => {}
            Some((&"moves", moves)) => {
                for m in moves {
                    let mv = pos.parse_uci_move(m).map_err(|e| format!("move `{m}`: {e}"))?;
                    history.push(pos.hash());
                    pos = pos.play(mv);
                }
            }
            Some((t, _)) => return Err(format!("unexpected `{t}`")),
        }
        self.position = pos;
        self.history = history;
        Ok(())
    }

    fn set_option(&mut self, args: &[&str]) -> Result<(), String> {
        let v = args.iter().position(|t| *t == "value");
        let (name, value) = match (args.first(), v) {
            (Some(&"name"), Some(v)) => (args[1..v].join(" "), args[v + 1..].join(" ")),
            _ => return Err("expected `setoption name <id> value <x>`".into()),
        };
        match name.to_ascii_lowercase().as_str() {
            "evalfile" => self.eval = load_eval(Some(Path::new(&value))).map_err(|e| e.to_string())?,
            "searchfile" => {
                self.search = load_search(Some(Path::new(&value)), SearchParams::learned()).map_err(|e| e.to_string())?
            }
            _ => return Err(format!("no option `{name}`")),
        }
        Ok(())
    }

    fn go(&mut self, args: &[&str]) -> Result<(), String> {
        let mut limits = SearchLimits::default();
        let mut clock: [Option<u64>; 2] = [None, None];
        let mut inc = [0u64; 2];
        let mut root_moves = Vec::new();
        let mut i = 0;
        let num = |i: usize| -> Result<u64, String> {
            args.get(i + 1)
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| format!("`{}` needs a number", args[i]))
        };
        while i < args.len() {
            match args[i] {
                "depth" => limits.max_depth = Some(num(i)?.clamp(1, MAX_DEPTH as u64) as u32),
                "nodes" => limits.max_nodes = Some(num(i)?),
                "movetime" => limits.max_time = Some(Duration::from_millis(num(i)?)),
                "wtime" => clock[0] = Some(num(i)?),
                "btime" => clock[1] = Some(num(i)?),
                "winc" => inc[0] = num(i)?,
                "binc" => inc[1] = num(i)?,
                "movestogo" => {
                    num(i)?;
                }
                "infinite" => {
                    i += 1;
                    continue;
                }
                "searchmoves" => {
                    while let Some(m) = args.get(i + 1) {
                        match self.position.parse_uci_move(m) {
                            Ok(mv) => root_moves.push(mv),
                            Err(_) => break,
                        }
                        i += 1;
                    }
                    i += 1;
                    continue;
                }
                t => return Err(format!("unknown go parameter `{t}`")),
            }
            i += 2;
        }
        let side = (self.position.side_to_move() == Color::Black) as usize;
        if let (Some(ms), None) = (clock[side], limits.max_time) {
            limits.max_time = Some(Duration::from_millis(TimeControl::move_budget(ms, inc[side])));
        }
        if !limits.is_bounded() {
            // Infinite: runs to maximum depth unless stopped.
            limits.max_depth = Some(MAX_DEPTH);
        }
        if self.position.legal_moves().is_empty() {
            emit(&self.out, "bestmove 0000");
            return Ok(());
        }
        let stop = Arc::new(AtomicBool::new(false));
        let (out, eval, search, pos, history) = (
            self.out.clone(),
            self.eval,
            self.search,
            self.position,
            self.history.clone(),
        );
        let flag = stop.clone();
        let handle = std::thread::spawn(move || {
            let mut s = Searcher::new(&eval, &search, limits).with_history(&history).with_stop(flag);
            if !root_moves.is_empty() {
                s = s.with_root_moves(root_moves);
            }
            let result = s.run(&pos, |it| {
                let pv: Vec<String> = it.pv.iter().map(|m| m.uci()).collect();
                let ms = it.elapsed.as_millis().max(1) as u64;
                emit(
                    &out,
                    &format!(
                        "info depth {} score {} nodes {} nps {} time {} pv {}",
                        it.depth,
                        score_text(it.score),
                        it.nodes,
                        it.nodes * 1000 / ms,
                        ms,
                        pv.join(" ")
                    ),
                );
                ControlFlow::Continue(())
            });
            match result {
                Ok(r) => emit(&out, &format!("bestmove {}", r.best_move.uci())),
                Err(e) => {
                    emit(&out, &format!("info string error: {e}"));
                    emit(&out, "bestmove 0000");
                }
            }
        });
        self.job = Some(Job { stop, handle });
        Ok(())
    }

    fn wait(&mut self) {
        if let Some(job) = self.job.take() {
            let _ = job.handle.join();
        }
    }

    fn stop(&mut self) {
        if let Some(job) = &self.job {
            job.stop.store(true, Ordering::Relaxed);
        }
        self.wait();
    }

    /// Current position, for tests.
    pub fn position(&self) -> &Position {
        &self.position
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Clone, Default)]
    struct Buf(Arc<Mutex<Vec<u8>>>);

    impl Write for Buf {
        fn write(&mut self, b: &[u8]) -> std::io::Result<usize> {
            self.0.lock().unwrap().write(b)
        }
        fn flush(&mut self) -> std::io::Result<()> {
            Ok(())
        }
    }

    fn session(script: &str) -> String {
        let buf = Buf::default();
        let out: Out = Arc::new(Mutex::new(buf.clone()));
        let mut uci = Uci::new(out, EvalParams::reference(), SearchParams::learned());
        uci.run(script.as_bytes());
        let text = buf.0.lock().unwrap().clone();
        String::from_utf8(text).unwrap()
    }

    #[test]
    fn handshake_and_mate() {
        let s = session("uci\nisready\nposition fen 6k1/5ppp/8/8/8/8/8/R6K w - - 0 1\ngo depth 3\n");
        assert!(s.contains("uciok") && s.contains("readyok"));
        assert!(s.contains("score mate 1"));
        assert!(s.trim_end().ends_with("bestmove a1a8"));
    }

    #[test]
    fn moves_and_searchmoves() {
        let s = session("position startpos moves e2e4 e7e5\ngo depth 2 searchmoves g1f3\n");
        assert!(s.trim_end().ends_with("bestmove g1f3"), "{s}");
    }

    #[test]
    fn malformed_input_reports() {
        let s = session("position startpos moves e2e5\nfrobnicate\ngo depth x\nsetoption name Hash value 1\n");
        assert_eq!(s.matches("info string").count(), 4, "{s}");
    }

    #[test]
    fn stop_ends_infinite_search() {
        let s = session("go infinite\nstop\n");
        assert!(s.contains("bestmove"));
        let s = session("position fen 7k/8/8/8/8/8/8/K7 b - - 0 1\ngo nodes 100\n");
        assert!(s.contains("bestmove h8"));
    }

    #[test]
    fn mate_score_text() {
        assert_eq!(score_text(32_000 - 1), "mate 1");
        assert_eq!(score_text(32_000 - 3), "mate 2");
        assert_eq!(score_text(-(32_000 - 2)), "mate -1");
        assert_eq!(score_text(-15), "cp -15");
    }
}
