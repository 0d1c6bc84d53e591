//! Run configuration: `key = value` text shared by all phase commands.

use std::path::PathBuf;

use evochess::genome::GAConfig;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub suite: Option<PathBuf>,
    pub book: Option<PathBuf>,
    pub eval: Option<PathBuf>,
    pub seeds: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub training_positions: usize,
    pub holdout_positions: usize,
    pub runs: usize,
    pub node_cap: u64,
    pub games_per_pair: usize,
    pub nodes_per_move: Option<u64>,
    pub depth_per_move: Option<u32>,
    pub base_ms: Option<u64>,
    pub increment_ms: u64,
    pub jobs: Option<usize>,
    pub ga: GAConfig,
}

impl RunConfig {
    /// Desk-scale defaults on top of the given GA settings.
    pub fn with_ga(ga: GAConfig) -> RunConfig {
        RunConfig {
            corpus: None,
            suite: None,
            book: None,
            eval: None,
            seeds: None,
            out: None,
            training_positions: 500,
            holdout_positions: 500,
            runs: 1,
            node_cap: 3_000,
            games_per_pair: 4,
            nodes_per_move: None,
            depth_per_move: None,
            base_ms: None,
            increment_ms: 0,
            jobs: None,
            ga,
        }
    }

    /// Applies `key = value` lines; GA keys go to the GA settings.
    pub fn overlay(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        self.validate()
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
            v.parse().map_err(|_| CliError::Config(format!("{key}: `{v}` is not a valid number")))
        }
        let path = || Some(PathBuf::from(value));
        match key {
            "corpus" => self.corpus = path(),
            "suite" => self.suite = path(),
            "book" => self.book = path(),
            "eval" => self.eval = path(),
            "seeds" => self.seeds = path(),
            "out" => self.out = path(),
            "training_positions" => self.training_positions = num(key, value)?,
            "holdout_positions" => self.holdout_positions = num(key, value)?,
            "runs" => self.runs = num(key, value)?,
            "node_cap" => self.node_cap = num(key, value)?,
            "games_per_pair" => self.games_per_pair = num(key, value)?,
            "nodes_per_move" => self.nodes_per_move = Some(num(key, value)?),
            "depth_per_move" => self.depth_per_move = Some(num(key, value)?),
            "base_ms" => self.base_ms = Some(num(key, value)?),
            "increment_ms" => self.increment_ms = num(key, value)?,
            "jobs" => self.jobs = Some(num(key, value)?),
            _ => self.ga.set(key, value).map_err(|e| CliError::Config(e.to_string()))?,
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.ga.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let positive = [
            ("training_positions", self.training_positions as u64),
            ("runs", self.runs as u64),
            ("node_cap", self.node_cap),
            ("games_per_pair", self.games_per_pair as u64),
        ];
        if let Some((k, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(CliError::Config(format!("{k} must be positive")));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Config("jobs must be positive".into()));
        }
        Ok(())
    }

    /// Canonical text of every setting that can influence results (not `out` or `jobs`).
    pub fn canonical_text(&self) -> String {
        let p = |x: &Option<PathBuf>| x.as_ref().map_or("-".to_string(), |p| p.display().to_string());
        let o = |x: Option<u64>| x.map_or("-".to_string(), |v| v.to_string());
        format!(
            "corpus = {}\nsuite = {}\nbook = {}\neval = {}\nseeds = {}\ntraining_positions = {}\nholdout_positions = {}\nruns = {}\nnode_cap = {}\ngames_per_pair = {}\nnodes_per_move = {}\ndepth_per_move = {}\nbase_ms = {}\nincrement_ms = {}\n{}",
            p(&self.corpus),
            p(&self.suite),
            p(&self.book),
            p(&self.eval),
            p(&self.seeds),
            self.training_positions,
            self.holdout_positions,
            self.runs,
            self.node_cap,
            self.games_per_pair,
            o(self.nodes_per_move),
            o(self.depth_per_move.map(u64::from)),
            o(self.base_ms),
            self.increment_ms,
            self.ga.to_text()
        )
    }

    /// First 16 hex digits of the SHA-256 of [`RunConfig::canonical_text`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        format!("{digest:x}")[..16].to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlay_routes_ga_keys() {
        let mut c = RunConfig::with_ga(GAConfig::eval_phase());
        c.overlay("corpus = data/corpus.pgn\npopulation_size = 20\nnode_cap = 500 # desk\n").unwrap();
        assert_eq!(c.ga.population_size, 20);
        assert_eq!(c.node_cap, 500);
        assert_eq!(c.corpus, Some(PathBuf::from("data/corpus.pgn")));
        assert!(c.clone().overlay("bogus = 1").is_err());
        assert!(c.clone().overlay("runs = 0").is_err());
    }

    #[test]
    fn hash_ignores_output_location() {
        let mut a = RunConfig::with_ga(GAConfig::eval_phase());
        let h = a.hash();
        a.out = Some("elsewhere".into());
        a.jobs = Some(3);
        assert_eq!(a.hash(), h);
        a.ga.random_seed = 99;
        assert_ne!(a.hash(), h);
        assert_eq!(h.len(), 16);
    }
}
