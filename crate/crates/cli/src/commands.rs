//! Subcommand implementations. Each writes its human-readable report to `out`.

use std::io::Write;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};

use evochess::arena::{parse_book, play_match, Control, Engine, OpeningLine, TimeControl};
use evochess::chess::{parse_epd_suite, parse_pgn, Game, TestCase};
use evochess::eval::EvalParams;
use evochess::evolve::{
    build_training_set, holdout_match_rate, node_budget, node_count_fitness, run_coevolution, run_eval_evolution,
    run_search_evolution, CoevolutionSettings, EvolveError, GaState, GenerationStats, PhaseReport, TrainingSet,
};
use evochess::genome::{encode_search, parse_population, write_population, ChromosomeKind, Organism};
use evochess::search::{SearchLimits, SearchParams, Searcher};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::error::{read_file, write_file, CliError};

const STOP_REQUEST: &str = "stop requested";

fn say(out: &mut dyn Write, text: impl AsRef<str>) -> Result<(), CliError> {
    writeln!(out, "{}", text.as_ref()).map_err(|e| CliError::Runtime(format!("writing report: {e}")))
}

pub fn load_games(path: &Path) -> Result<Vec<Game>, CliError> {
    let parsed = parse_pgn(&read_file(path)?);
    for d in parsed.diagnostics.iter().take(5) {
        eprintln!("{}: game {} line {}: {} (skipped)", path.display(), d.game_index, d.line, d.message);
    }
    if parsed.games.is_empty() {
        return Err(CliError::input(path, "no games"));
    }
    Ok(parsed.games)
}

pub fn load_suite(path: &Path) -> Result<Vec<TestCase>, CliError> {
    let (cases, errors) = parse_epd_suite(&read_file(path)?);
    if let Some((line, e)) = errors.first() {
        return Err(CliError::input(path, format!("line {line}: {e}")));
    }
    if cases.is_empty() {
        return Err(CliError::input(path, "suite is empty"));
    }
    Ok(cases)
}

pub fn load_book(path: &Path) -> Result<Vec<OpeningLine>, CliError> {
    parse_book(&read_file(path)?).map_err(|e| CliError::input(path, e))
}

pub fn load_eval(path: Option<&Path>) -> Result<EvalParams, CliError> {
    match path {
        None => Ok(EvalParams::reference()),
        Some(p) => EvalParams::parse(&read_file(p)?).map_err(|e| CliError::input(p, e)),
    }
}

pub fn load_search(path: Option<&Path>, default: SearchParams) -> Result<SearchParams, CliError> {
    match path {
        None => Ok(default),
        Some(p) => SearchParams::parse(&read_file(p)?).map_err(|e| CliError::input(p, e)),
    }
}

fn require<'a>(p: &'a Option<PathBuf>, what: &str) -> Result<&'a Path, CliError> {
    p.as_deref().ok_or_else(|| CliError::Config(format!("no {what} given")))
}

fn evolve_err(e: EvolveError) -> CliError {
    match e {
        EvolveError::Config(_) | EvolveError::PopulationSize { .. } | EvolveError::WrongKind { .. } => {
            CliError::Config(e.to_string())
        }
        EvolveError::InsufficientGames { .. } | EvolveError::EmptySuite | EvolveError::EmptyTrainingSet => {
            CliError::Input(e.to_string())
        }
        _ => CliError::Runtime(e.to_string()),
    }
}

/// Common header of every artifact.
fn header(phase: &str, cfg: &RunConfig, seed: u64) -> Vec<(String, String)> {
    vec![
        ("phase".into(), phase.into()),
        ("config".into(), cfg.hash()),
        ("seed".into(), seed.to_string()),
    ]
}

fn header_text(h: &[(String, String)]) -> String {
    h.iter().map(|(k, v)| format!("# {k} {v}\n")).collect()
}

/// Writes checkpoint and log for a scored generation; used as the GA hook.
struct Recorder<'a> {
    dir: PathBuf,
    header: Vec<(String, String)>,
    extra: &'a dyn Fn(&GenerationStats) -> String,
    stop_after: Option<usize>,
}

impl Recorder<'_> {
    fn checkpoint_path(&self) -> PathBuf {
        self.dir.join("checkpoint.txt")
    }

    fn record(&self, state: &GaState) -> Result<(), EvolveError> {
        let mut h = self.header.clone();
        h.push(("generation".into(), state.generation.to_string()));
        for s in &state.history {
            h.push(("history".into(), format!("{} {} {}", s.generation, s.best, s.mean)));
        }
        let io = |e: CliError| EvolveError::Hook(e.to_string());
        write_file(&self.checkpoint_path(), &write_population(&h, &state.population)).map_err(io)?;
        let mut log = header_text(&self.header);
        log.push_str("# generation best mean\n");
        for s in &state.history {
            log.push_str(&format!("{} {} {}{}\n", s.generation, s.best, s.mean, (self.extra)(s)));
        }
        write_file(&self.dir.join("log.txt"), &log).map_err(io)?;
        if self.stop_after == Some(state.generation) {
            return Err(EvolveError::Hook(STOP_REQUEST.into()));
        }
        Ok(())
    }

    /// Checkpointed state to continue from, after checking it belongs to this configuration.
    fn resume_state(&self, kind: ChromosomeKind) -> Result<Option<GaState>, CliError> {
        let path = self.checkpoint_path();
        if !path.exists() {
            return Ok(None);
        }
        let (h, population) = parse_population(&read_file(&path)?).map_err(|e| CliError::input(&path, e))?;
        for (k, v) in &self.header {
            if !h.iter().any(|(hk, hv)| hk == k && hv == v) {
                return Err(CliError::Config(format!(
                    "{} was written with a different {k} (expected {v})",
                    path.display()
                )));
            }
        }
        if population.iter().any(|o| o.chromosome.kind() != kind) {
            return Err(CliError::Config(format!("{} holds {:?} chromosomes", path.display(), population[0].chromosome.kind())));
        }
        let bad = |m: &str| CliError::input(&path, m);
        let generation = h
            .iter()
            .find(|(k, _)| k == "generation")
            .and_then(|(_, v)| v.parse().ok())
            .ok_or_else(|| bad("missing generation"))?;
        let history = h
            .iter()
            .filter(|(k, _)| k == "history")
            .map(|(_, v)| {
                let f: Vec<&str> = v.split_whitespace().collect();
                match f.as_slice() {
                    [g, b, m] => Some(GenerationStats {
                        generation: g.parse().ok()?,
                        best: b.parse().ok()?,
                        mean: m.parse().ok()?,
                    }),
                    _ => None,
                }
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("malformed history"))?;
        Ok(Some(GaState {
            generation,
            population,
            history,
        }))
    }
}

/// Outcome of a phase driver: `None` when stopped on request.
fn finish(result: Result<PhaseReport, EvolveError>) -> Result<Option<PhaseReport>, CliError> {
    match result {
        Ok(r) => Ok(Some(r)),
        Err(EvolveError::Hook(m)) if m == STOP_REQUEST => Ok(None),
        Err(e) => Err(evolve_err(e)),
    }
}

pub struct PhaseOptions {
    pub resume: bool,
    pub stop_after: Option<usize>,
}

fn output_dir(cfg: &RunConfig, phase: &str) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from("runs").join(phase))
}

/// Training and holdout sets sampled from the corpus with the configuration's seed.
pub fn training_sets(cfg: &RunConfig) -> Result<(TrainingSet, TrainingSet), CliError> {
    let corpus = require(&cfg.corpus, "corpus")?;
    let games = load_games(corpus)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.ga.random_seed);
    rng.set_stream(u64::MAX);
    let total = cfg.training_positions + cfg.holdout_positions;
    let all = build_training_set(&games, total, &mut rng, &corpus.display().to_string()).map_err(evolve_err)?;
    Ok(all.split_at(cfg.training_positions))
}

pub fn cmd_evolve_eval(cfg: &RunConfig, opts: &PhaseOptions, out: &mut dyn Write) -> Result<(), CliError> {
    let (train, holdout) = training_sets(cfg)?;
    let dir = output_dir(cfg, "evolve-eval");
    say(out, format!("training {} positions, holdout {} ({})", train.len(), holdout.len(), train.provenance))?;
    let n = train.len() as f64;
    let extra = move |s: &GenerationStats| format!(" {:.4}", s.best.sqrt() / n);
    let mut winners = Vec::new();
    let mut summary = header_text(&header("evolve-eval", cfg, cfg.ga.random_seed));
    summary.push_str("# run seed train_rate holdout_rate\n");
    for run in 0..cfg.runs {
        let seed = cfg.ga.random_seed + run as u64;
        let ga = evochess::genome::GAConfig {
            random_seed: seed,
            ..cfg.ga.clone()
        };
        let run_dir = if cfg.runs == 1 { dir.clone() } else { dir.join(format!("run-{run:02}")) };
        let rec = Recorder {
            dir: run_dir.clone(),
            header: header("evolve-eval", cfg, seed),
            extra: &extra,
            stop_after: opts.stop_after,
        };
        let resume = if opts.resume { rec.resume_state(ChromosomeKind::Evaluation)? } else { None };
        let Some(report) = finish(run_eval_evolution(&train, &ga, resume, |s| rec.record(s)))? else {
            say(out, format!("run {run}: stopped after generation {}", opts.stop_after.unwrap_or(0)))?;
            return Ok(());
        };
        let params = report.best.eval_params().map_err(|e| CliError::Runtime(e.to_string()))?;
        let train_rate = train.match_rate(&params);
        let holdout_rate = if holdout.is_empty() {
            f64::NAN
        } else {
            holdout_match_rate(&params, &train, &holdout).map_err(evolve_err)?
        };
        write_file(&run_dir.join("best.eval"), &(header_text(&rec.header) + &params.to_text()))?;
        summary.push_str(&format!("{run} {seed} {train_rate:.4} {holdout_rate:.4}\n"));
        say(
            out,
            format!(
                "run {run} seed {seed}: generation-0 mean rate {:.4}, best rate {train_rate:.4}, holdout {holdout_rate:.4}",
                report.history[0].mean.sqrt() / n
            ),
        )?;
        eprintln!("run {run}: {:.1}s", report.wall_clock.as_secs_f64());
        winners.push(Organism::new(report.best.chromosome.clone(), report.best.fitness));
    }
    write_file(&dir.join("summary.txt"), &summary)?;
    write_file(
        &dir.join("winners.txt"),
        &write_population(&header("evolve-eval", cfg, cfg.ga.random_seed), &winners),
    )?;
    Ok(())
}

fn game_control(cfg: &RunConfig) -> Result<Control, CliError> {
    match (cfg.nodes_per_move, cfg.depth_per_move, cfg.base_ms) {
        (Some(n), None, None) => Ok(Control::NodesPerMove(n)),
        (None, Some(d), None) => Ok(Control::DepthPerMove(d)),
        (None, None, Some(b)) => Ok(Control::Clock(
            TimeControl::new(b, cfg.increment_ms).map_err(|e| CliError::Config(e.to_string()))?,
        )),
        (None, None, None) => Err(CliError::Config(
            "set one of nodes_per_move, depth_per_move or base_ms".into(),
        )),
        _ => Err(CliError::Config(
            "nodes_per_move, depth_per_move and base_ms are mutually exclusive".into(),
        )),
    }
}

pub fn cmd_coevolve(cfg: &RunConfig, opts: &PhaseOptions, out: &mut dyn Write) -> Result<(), CliError> {
    let seeds_path = require(&cfg.seeds, "seeds (population file of evaluation chromosomes)")?;
    let (_, seeds) = parse_population(&read_file(seeds_path)?).map_err(|e| CliError::input(seeds_path, e))?;
    let seeds: Vec<_> = seeds.into_iter().map(|o| o.chromosome).collect();
    let book = load_book(require(&cfg.book, "book")?)?;
    let mut settings = CoevolutionSettings::new(game_control(cfg)?, book);
    settings.games_per_pair = cfg.games_per_pair;
    let dir = output_dir(cfg, "coevolve");
    let no_extra = |_: &GenerationStats| String::new();
    let rec = Recorder {
        dir: dir.clone(),
        header: header("coevolve", cfg, cfg.ga.random_seed),
        extra: &no_extra,
        stop_after: opts.stop_after,
    };
    let resume = if opts.resume { rec.resume_state(ChromosomeKind::Evaluation)? } else { None };
    let Some(report) = finish(run_coevolution(&seeds, &cfg.ga, &settings, resume, |s| {
        eprintln!("generation {}: best {} mean {}", s.generation, s.history.last().unwrap().best, s.history.last().unwrap().mean);
        rec.record(s)
    }))?
    else {
        return say(out, "stopped on request");
    };
    let params = report.best.eval_params().map_err(|e| CliError::Runtime(e.to_string()))?;
    write_file(&dir.join("best.eval"), &(header_text(&rec.header) + &params.to_text()))?;
    say(out, format!("coevolution finished: best points {}", report.best.fitness))
}

pub fn cmd_evolve_search(cfg: &RunConfig, opts: &PhaseOptions, out: &mut dyn Write) -> Result<(), CliError> {
    let suite = load_suite(require(&cfg.suite, "suite")?)?;
    let eval = load_eval(cfg.eval.as_deref())?;
    let budget = node_budget(suite.len(), cfg.node_cap);
    let off = encode_search(&SearchParams::off()).map_err(|e| CliError::Runtime(e.to_string()))?;
    let baseline = node_count_fitness(&off, &suite, &eval, cfg.node_cap).map_err(evolve_err)?;
    let dir = output_dir(cfg, "evolve-search");
    let extra = move |s: &GenerationStats| format!(" {}", budget - s.best as u64);
    let mut head = header("evolve-search", cfg, cfg.ga.random_seed);
    head.push(("baseline_nodes".into(), baseline.to_string()));
    let rec = Recorder {
        dir: dir.clone(),
        header: head,
        extra: &extra,
        stop_after: opts.stop_after,
    };
    let resume = if opts.resume { rec.resume_state(ChromosomeKind::Search)? } else { None };
    let Some(report) = finish(run_search_evolution(&suite, &eval, &cfg.ga, cfg.node_cap, resume, |s| rec.record(s)))?
    else {
        return say(out, "stopped on request");
    };
    let params = report.best.search_params().map_err(|e| CliError::Runtime(e.to_string()))?;
    write_file(&dir.join("best.search"), &(header_text(&rec.header) + &params.to_text()))?;
    say(
        out,
        format!(
            "search evolution finished: best total {} nodes, plain alpha-beta {} nodes ({} positions, cap {})",
            budget - report.best.fitness as u64,
            baseline,
            suite.len(),
            cfg.node_cap
        ),
    )
}

/// Per-position outcome of a benchmark run.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchLine {
    pub id: String,
    pub solved: bool,
    pub best_move: String,
    pub nodes: u64,
    /// Cumulative nodes at the first iteration that chose a solution.
    pub nodes_to_solution: Option<u64>,
}

pub fn bench(suite: &[TestCase], eval: &EvalParams, search: &SearchParams, limits: SearchLimits) -> Vec<BenchLine> {
    use rayon::prelude::*;
    suite
        .par_iter()
        .map(|tc| {
            let mut first = None;
            let r = Searcher::new(eval, search, limits).run(&tc.position, |it| {
                if first.is_none() && tc.is_solution(it.best_move) {
                    first = Some(it.nodes);
                }
                ControlFlow::Continue(())
            });
            match r {
                Ok(r) => BenchLine {
                    id: tc.id.clone(),
                    solved: tc.is_solution(r.best_move),
                    best_move: tc.position.san(r.best_move),
                    nodes: r.nodes,
                    nodes_to_solution: first,
                },
                Err(_) => BenchLine {
                    id: tc.id.clone(),
                    solved: false,
                    best_move: "-".into(),
                    nodes: 0,
                    nodes_to_solution: None,
                },
            }
        })
        .collect()
}

pub fn cmd_bench(
    suite_path: &Path,
    eval: Option<&Path>,
    search: &SearchParams,
    limits: SearchLimits,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if !limits.is_bounded() {
        return Err(CliError::Config("give --nodes, --depth or --time-ms".into()));
    }
    let suite = load_suite(suite_path)?;
    let eval = load_eval(eval)?;
    let lines = bench(&suite, &eval, search, limits);
    for l in &lines {
        say(
            out,
            format!(
                "{} {} {} nodes={} to_solution={}",
                l.id,
                if l.solved { "solved" } else { "unsolved" },
                l.best_move,
                l.nodes,
                l.nodes_to_solution.map_or("-".into(), |n| n.to_string())
            ),
        )?;
    }
    let solved = lines.iter().filter(|l| l.solved).count();
    let nodes: u64 = lines.iter().map(|l| l.nodes).sum();
    say(out, format!("summary positions={} solved={solved} nodes={nodes}", lines.len()))
}

pub struct MatchSpec {
    pub a: Engine,
    pub b: Engine,
    pub games: usize,
    pub control: Control,
    pub book: PathBuf,
    pub pgn: Option<PathBuf>,
}

pub fn cmd_match(spec: &MatchSpec, out: &mut dyn Write) -> Result<(), CliError> {
    if spec.games == 0 {
        return Err(CliError::Config("a match needs at least one game".into()));
    }
    let book = load_book(&spec.book)?;
    let record = play_match(&spec.a, &spec.b, spec.games, spec.control, &book).map_err(|e| match e {
        evochess::arena::ArenaError::BookExhausted { .. } => CliError::Input(e.to_string()),
        _ => CliError::Runtime(e.to_string()),
    })?;
    if let Some(p) = &spec.pgn {
        write_file(p, &record.to_pgn())?;
    }
    say(out, format!("{} vs {}: {} games", record.engine_a, record.engine_b, record.games_played()))?;
    say(out, record.summary_line())
}
