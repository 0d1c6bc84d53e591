//! Library half of the `evochess` binary: argument parsing, run configuration and the
//! subcommands. Kept as a library so the integration tests can drive it in-process.

pub mod commands;
pub mod config;
pub mod datagen;
pub mod error;
pub mod uci;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use clap::{Args, Parser, Subcommand};
use evochess::arena::{Control, Engine, TimeControl};
use evochess::chess::TestCase;
use evochess::genome::{encode_eval, write_population, GAConfig, Organism};
use evochess::search::{SearchLimits, SearchParams};

use crate::commands::{load_eval, load_games, load_search, MatchSpec, PhaseOptions};
use crate::config::RunConfig;
use crate::error::{read_file, write_file, CliError};

#[derive(Parser, Debug)]
#[command(name = "evochess", version, about = "Evolve a chess engine's evaluation and search parameters")]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evolve evaluation weights to reproduce the winners' moves in a game corpus.
    EvolveEval(PhaseArgs),
    /// Coevolve evaluation weights through round-robin play.
    Coevolve(PhaseArgs),
    /// Evolve selective-search parameters to minimise nodes on a tactical suite.
    EvolveSearch(PhaseArgs),
    /// Print the fully resolved configuration of a phase and its hash.
    ShowConfig {
        #[arg(value_parser = ["evolve-eval", "coevolve", "evolve-search"])]
        phase: String,
        #[command(flatten)]
        args: PhaseArgs,
    },
    /// Search every position of an EPD suite.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        eval: Option<PathBuf>,
        /// Search parameters (defaults to the built-in learned set).
        #[arg(long)]
        search: Option<PathBuf>,
        /// Use plain alpha-beta instead of the selective search.
        #[arg(long, conflicts_with = "search")]
        plain: bool,
        #[arg(long)]
        nodes: Option<u64>,
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long)]
        time_ms: Option<u64>,
    },
    /// Play a match between two parameter sets.
    Match(MatchArgs),
    /// Speak UCI on standard input and output.
    Uci {
        #[arg(long)]
        eval: Option<PathBuf>,
        #[arg(long)]
        search: Option<PathBuf>,
    },
    /// Generate a self-play PGN corpus.
    GenCorpus {
        #[arg(long, default_value_t = 1600)]
        games: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate an opening book.
    GenBook {
        #[arg(long, default_value_t = 200)]
        lines: usize,
        #[arg(long, default_value_t = 8)]
        plies: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract a tactical EPD suite from a corpus.
    GenSuite {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 120)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        /// Minimum score margin of the key move over every alternative, in centipawns.
        #[arg(long, default_value_t = 100)]
        gap: i32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encode evaluation parameter files as a population file (input to `coevolve`).
    Population {
        /// Evaluation parameter files.
        #[arg(required = true)]
        evals: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug, Clone, Default)]
pub struct PhaseArgs {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one setting; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Continue from the checkpoint in the output directory.
    #[arg(long)]
    pub resume: bool,
    /// Stop after scoring this generation, leaving a checkpoint (simulates an interruption).
    #[arg(long)]
    pub stop_after: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct MatchArgs {
    #[arg(long)]
    pub a_eval: Option<PathBuf>,
    /// Search parameters for A; `off` for plain alpha-beta, default learned.
    #[arg(long)]
    pub a_search: Option<String>,
    #[arg(long)]
    pub b_eval: Option<PathBuf>,
    #[arg(long)]
    pub b_search: Option<String>,
    #[arg(long, default_value_t = 50)]
    pub games: usize,
    #[arg(long)]
    pub book: PathBuf,
    #[arg(long, group = "control")]
    pub nodes: Option<u64>,
    #[arg(long, group = "control")]
    pub depth: Option<u32>,
    #[arg(long, group = "control")]
    pub base_ms: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub inc_ms: u64,
    #[arg(long)]
    pub pgn: Option<PathBuf>,
}

fn phase_defaults(phase: &str) -> GAConfig {
    match phase {
        "coevolve" => GAConfig::coevolution_phase(),
        "evolve-search" => GAConfig::search_phase(),
        _ => GAConfig::eval_phase(),
    }
}

/// Phase defaults, then the config file, then `--set`, then `--seed` and `--out`.
pub fn resolve_config(phase: &str, args: &PhaseArgs) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::with_ga(phase_defaults(phase));
    if let Some(p) = &args.config {
        let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
        cfg.overlay(&text)?;
    }
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(s) = args.seed {
        cfg.ga.random_seed = s;
    }
    if let Some(o) = &args.out {
        cfg.out = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn search_arg(arg: Option<&str>) -> Result<SearchParams, CliError> {
    match arg {
        None | Some("learned") => Ok(SearchParams::learned()),
        Some("off") => Ok(SearchParams::off()),
        Some(p) => load_search(Some(std::path::Path::new(p)), SearchParams::learned()),
    }
}

fn engine(name: &str, eval: Option<&PathBuf>, search: Option<&str>) -> Result<Engine, CliError> {
    let label = match (eval, search) {
        (None, None) => name.to_string(),
        _ => format!(
            "{name}[{}/{}]",
            eval.map_or("reference".into(), |p| p.display().to_string()),
            search.unwrap_or("learned")
        ),
    };
    Ok(Engine::new(label, load_eval(eval.map(|p| p.as_path()))?, search_arg(search)?))
}

fn with_pool<T>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError>
where
    T: Send,
{
    match jobs {
        None => Ok(f()),
        Some(0) => Err(CliError::Config("--jobs must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CliError::Runtime(e.to_string())),
    }
}

fn say(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    writeln!(out, "{text}").map_err(|e| CliError::Runtime(e.to_string()))
}

/// Parses `args` (including the program name) and runs the command, reporting to `out`.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send)) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            return say(out, e.to_string().trim_end());
        }
        Err(e) => return Err(CliError::Config(e.to_string().trim_end().to_string())),
    };
    let jobs = cli.jobs;
    match cli.command {
        Command::EvolveEval(a) => phase("evolve-eval", &a, jobs, out),
        Command::Coevolve(a) => phase("coevolve", &a, jobs, out),
        Command::EvolveSearch(a) => phase("evolve-search", &a, jobs, out),
        Command::ShowConfig { phase, args } => {
            let cfg = resolve_config(&phase, &args)?;
            say(out, &format!("# config {}", cfg.hash()))?;
            say(out, cfg.canonical_text().trim_end())
        }
        Command::Bench {
            suite,
            eval,
            search,
            plain,
            nodes,
            depth,
            time_ms,
        } => {
            let limits = SearchLimits {
                max_nodes: nodes,
                max_depth: depth,
                max_time: time_ms.map(std::time::Duration::from_millis),
            };
            let search = if plain {
                SearchParams::off()
            } else {
                load_search(search.as_deref(), SearchParams::learned())?
            };
            with_pool(jobs, || commands::cmd_bench(&suite, eval.as_deref(), &search, limits, out))?
        }
        Command::Match(m) => {
            let control = match (m.nodes, m.depth, m.base_ms) {
                (Some(n), _, _) => Control::NodesPerMove(n),
                (_, Some(d), _) => Control::DepthPerMove(d),
                (_, _, Some(b)) => Control::Clock(TimeControl::new(b, m.inc_ms).map_err(|e| CliError::Config(e.to_string()))?),
                _ => return Err(CliError::Config("give --nodes, --depth or --base-ms".into())),
            };
            let spec = MatchSpec {
                a: engine("A", m.a_eval.as_ref(), m.a_search.as_deref())?,
                b: engine("B", m.b_eval.as_ref(), m.b_search.as_deref())?,
                games: m.games,
                control,
                book: m.book,
                pgn: m.pgn,
            };
            with_pool(jobs, || commands::cmd_match(&spec, out))?
        }
        Command::Uci { eval, search } => {
            let eval = load_eval(eval.as_deref())?;
            let search = load_search(search.as_deref(), SearchParams::learned())?;
            let stdout: Arc<Mutex<dyn Write + Send>> = Arc::new(Mutex::new(std::io::stdout()));
            uci::Uci::new(stdout, eval, search).run(std::io::stdin().lock());
            Ok(())
        }
        Command::GenCorpus { games, seed, out: path } => {
            let corpus = with_pool(jobs, || datagen::self_play_corpus(games, seed))?;
            let text: String = corpus.iter().map(|g| g.to_pgn() + "\n").collect();
            write_file(&path, &text)?;
            say(out, &format!("{} games, {} decisive -> {}", corpus.len(), datagen::decisive(&corpus), path.display()))
        }
        Command::GenBook {
            lines,
            plies,
            seed,
            out: path,
        } => {
            let book = with_pool(jobs, || datagen::opening_book(lines, plies, seed))?;
            let mut text = format!("# {} opening lines of {plies} plies, seed {seed}\n", book.len());
            for l in &book {
                text.push_str(&l.to_san());
                text.push('\n');
            }
            write_file(&path, &text)?;
            say(out, &format!("{} lines -> {}", book.len(), path.display()))
        }
        Command::GenSuite {
            corpus,
            count,
            depth,
            gap,
            seed,
            out: path,
        } => {
            let games = load_games(&corpus)?;
            let suite: Vec<TestCase> = with_pool(jobs, || datagen::tactical_suite(&games, count, depth, gap, seed))?;
            let text: String = suite.iter().map(|t| t.to_epd() + "\n").collect();
            write_file(&path, &text)?;
            say(out, &format!("{} positions -> {}", suite.len(), path.display()))
        }
        Command::Population { evals, out: path } => {
            let mut organisms = Vec::new();
            for p in &evals {
                let params = evochess::eval::EvalParams::parse(&read_file(p)?).map_err(|e| CliError::input(p, e))?;
                let c = encode_eval(&params).map_err(|e| CliError::input(p, e))?;
                organisms.push(Organism::new(c, 0.0));
            }
            let header = vec![("phase".to_string(), "seeds".to_string())];
            write_file(&path, &write_population(&header, &organisms))?;
            say(out, &format!("{} organisms -> {}", organisms.len(), path.display()))
        }
    }
}

fn phase(name: &str, args: &PhaseArgs, jobs: Option<usize>, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let cfg = resolve_config(name, args)?;
    let opts = PhaseOptions {
        resume: args.resume,
        stop_after: args.stop_after,
    };
    with_pool(jobs.or(cfg.jobs), || match name {
        "evolve-eval" => commands::cmd_evolve_eval(&cfg, &opts, out),
        "coevolve" => commands::cmd_coevolve(&cfg, &opts, out),
        _ => commands::cmd_evolve_search(&cfg, &opts, out),
    })?
}
