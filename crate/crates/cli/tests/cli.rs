use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn evochess(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evochess")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    evochess(args).status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const MINI_SUITE: &str = "6k1/5ppp/8/8/8/8/8/R6K w - - bm Ra8#; id \"mate.1\";
r1bqkb1r/pppp1ppp/2n2n2/4p2Q/2B1P3/8/PPPP1PPP/RNB1K1NR w KQkq - bm Qxf7#; id \"mate.2\";
4k3/8/8/8/8/8/4q3/R3K3 w Q - bm Kxe2; id \"recapture\";
";

#[test]
fn exit_codes() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["evolve-eval", "--bogus"]), 2);
    assert_eq!(code(&["evolve-eval", "--set", "population_size=1", "--set", "corpus=x.pgn"]), 2);
    assert_eq!(code(&["evolve-eval", "--set", "nonsense"]), 2);
    assert_eq!(code(&["evolve-eval"]), 2, "no corpus configured");
    assert_eq!(code(&["evolve-eval", "--set", "corpus=/nonexistent/corpus.pgn"]), 3);
    assert_eq!(code(&["bench", "--suite", "/nonexistent.epd", "--depth", "2"]), 3);
    assert_eq!(code(&["match", "--book", "/nonexistent.txt", "--games", "0", "--nodes", "100"]), 2);
    assert_eq!(code(&["coevolve", "--set", "seeds=/nonexistent.txt"]), 3);
}

#[test]
fn empty_suite_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("empty.epd");
    std::fs::write(&p, "\n").unwrap();
    assert_eq!(code(&["bench", "--suite", p.to_str().unwrap(), "--depth", "2"]), 3);
}

#[test]
fn bench_reports_each_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("mini.epd");
    std::fs::write(&p, MINI_SUITE).unwrap();
    let o = evochess(&["bench", "--suite", p.to_str().unwrap(), "--depth", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("mate.1 solved Ra8#"), "{text}");
    assert!(text.contains("mate.2 solved Qxf7#"), "{text}");
    assert!(text.lines().last().unwrap().starts_with("summary positions=3 solved=3"), "{text}");
}

#[test]
fn config_hash_ignores_output_directory() {
    let a = stdout(&evochess(&["show-config", "evolve-search", "--out", "x"]));
    let b = stdout(&evochess(&["show-config", "evolve-search", "--out", "y", "--jobs", "1"]));
    let c = stdout(&evochess(&["show-config", "evolve-search", "--seed", "9"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.starts_with("# config ") && a.contains("mutation_rate = 0.05"));
}

fn read_tree(dir: &Path) -> Vec<(String, String)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn interrupted_search_evolution_resumes_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("mini.epd");
    std::fs::write(&suite, MINI_SUITE).unwrap();
    let s = format!("suite={}", suite.display());
    let base = ["evolve-search", "--set", &s, "--set", "population_size=4", "--set", "generations=4", "--set", "node_cap=800"];
    let whole = dir.path().join("whole");
    let parts = dir.path().join("parts");
    let run = |extra: &[&str], out: &Path| {
        let mut a = base.to_vec();
        a.extend_from_slice(extra);
        a.extend_from_slice(&["--out", out.to_str().unwrap()]);
        let o = evochess(&a);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    };
    run(&[], &whole);
    run(&["--stop-after", "1"], &parts);
    assert!(std::fs::read_to_string(parts.join("checkpoint.txt")).unwrap().contains("# generation 1"));
    assert!(!parts.join("best.search").exists());
    run(&["--resume"], &parts);
    assert_eq!(read_tree(&whole), read_tree(&parts));
    let log = std::fs::read_to_string(whole.join("log.txt")).unwrap();
    assert!(log.contains("# baseline_nodes "), "{log}");

    // a checkpoint from another configuration is refused
    let mut a = base.to_vec();
    a.extend_from_slice(&["--seed", "77", "--resume", "--out", parts.to_str().unwrap()]);
    assert_eq!(evochess(&a).status.code(), Some(2));
}

#[test]
fn uci_session() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_evochess"))
        .arg("uci")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"uci\nisready\nposition startpos moves e2e4\ngo depth 3\nposition fen 8/8/8/8 w\ngo nodes 500\nquit\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("uciok") && text.contains("readyok"));
    assert!(text.contains("info depth 3 "), "{text}");
    assert!(text.contains("info string error"), "{text}");
    assert_eq!(text.matches("bestmove ").count(), 2, "{text}");
}

#[test]
fn book_and_population_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let book = dir.path().join("book.txt");
    assert!(evochess(&["gen-book", "--lines", "5", "--plies", "4", "--out", book.to_str().unwrap()]).status.success());
    let lines = evochess::arena::parse_book(&std::fs::read_to_string(&book).unwrap()).unwrap();
    assert_eq!(lines.len(), 5);
    assert!(lines.iter().all(|l| l.moves.len() == 4));

    let eval = dir.path().join("ref.eval");
    std::fs::write(&eval, evochess::eval::EvalParams::reference().to_text()).unwrap();
    let pop = dir.path().join("seeds.txt");
    let e = eval.to_str().unwrap();
    assert!(evochess(&["population", e, e, "--out", pop.to_str().unwrap()]).status.success());
    let (_, organisms) = evochess::genome::parse_population(&std::fs::read_to_string(&pop).unwrap()).unwrap();
    assert_eq!(organisms.len(), 2);
    assert_eq!(organisms[0].eval_params().unwrap(), evochess::eval::EvalParams::reference());
}

#[test]
fn shipped_configs_resolve() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_stem().unwrap().to_string_lossy().into_owned();
        let phase = ["evolve-eval", "coevolve", "evolve-search"].into_iter().find(|p| name.ends_with(p)).unwrap();
        let o = evochess(&["show-config", phase, "--config", path.to_str().unwrap()]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        seen += 1;
    }
    assert!(seen >= 6);
    let full = stdout(&evochess(&["show-config", "evolve-eval", "--config", dir.join("full-evolve-eval.conf").to_str().unwrap()]));
    assert!(full.contains("population_size = 100") && full.contains("generations = 200") && full.contains("runs = 10"));
}
