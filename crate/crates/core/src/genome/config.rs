use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Selection {
    Proportional,
    Rank,
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Selection::Proportional => "proportional",
            Selection::Rank => "rank",
        })
    }
}

impl FromStr for Selection {
    type Err = GAConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "proportional" => Ok(Selection::Proportional),
            "rank" => Ok(Selection::Rank),
            _ => Err(GAConfigError::Invalid {
                key: "selection".into(),
                message: format!("`{s}` is not `proportional` or `rank`"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GAConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown GA setting `{0}`")]
    UnknownKey(String),
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GAConfig {
    pub population_size: usize,
    /// Probability that a selected pair is recombined at all.
    pub crossover_rate: f64,
    /// Per-bit flip probability.
    pub mutation_rate: f64,
    /// Populations evaluated, counting the initial one.
    pub generations: usize,
    pub selection: Selection,
    pub elitism_count: usize,
    pub random_seed: u64,
}

impl Default for GAConfig {
    fn default() -> Self {
        GAConfig::eval_phase()
    }
}

impl GAConfig {
    /// Published settings for evolving the evaluation against game moves.
    pub fn eval_phase() -> GAConfig {
        GAConfig {
            population_size: 100,
            crossover_rate: 0.75,
            mutation_rate: 0.005,
            generations: 200,
            selection: Selection::Proportional,
            elitism_count: 1,
            random_seed: 1,
        }
    }

    /// Ten per-run winners coevolved for 50 generations under rank selection.
    pub fn coevolution_phase() -> GAConfig {
        GAConfig {
            population_size: 10,
            generations: 50,
            selection: Selection::Rank,
            ..GAConfig::eval_phase()
        }
    }

    /// Published settings for evolving the search parameters.
    pub fn search_phase() -> GAConfig {
        GAConfig {
            population_size: 10,
            crossover_rate: 0.75,
            mutation_rate: 0.05,
            generations: 50,
            selection: Selection::Proportional,
            elitism_count: 1,
            random_seed: 1,
        }
    }

    pub fn validate(&self) -> Result<(), GAConfigError> {
        let bad = |key: &str, message: String| Err(GAConfigError::Invalid { key: key.into(), message });
        if self.population_size < 2 {
            return bad("population_size", format!("{} < 2", self.population_size));
        }
        for (key, r) in [("crossover_rate", self.crossover_rate), ("mutation_rate", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&r) {
                return bad(key, format!("{r} outside [0, 1]"));
            }
        }
        if self.elitism_count < 1 || self.elitism_count > self.population_size {
            return bad("elitism_count", format!("{} outside 1..=population_size", self.elitism_count));
        }
        if self.generations < 1 {
            return bad("generations", "must be at least 1".into());
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        format!(
            "population_size = {}\ncrossover_rate = {}\nmutation_rate = {}\ngenerations = {}\nselection = {}\nelitism_count = {}\nrandom_seed = {}\n",
            self.population_size,
            self.crossover_rate,
            self.mutation_rate,
            self.generations,
            self.selection,
            self.elitism_count,
            self.random_seed
        )
    }

    /// Applies `key = value` lines on top of `self` (`#` starts a comment), then validates.
    pub fn overlay(&self, text: &str) -> Result<GAConfig, GAConfigError> {
        let mut c = self.clone();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(GAConfigError::Syntax { line: i + 1 })?;
            c.set(k.trim(), v.trim())?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), GAConfigError> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T, GAConfigError> {
            v.parse().map_err(|_| GAConfigError::Invalid {
                key: key.into(),
                message: format!("`{v}` is not a number"),
            })
        }
        match key {
            "population_size" => self.population_size = num(key, value)?,
            "crossover_rate" => self.crossover_rate = num(key, value)?,
            "mutation_rate" => self.mutation_rate = num(key, value)?,
            "generations" => self.generations = num(key, value)?,
            "selection" => self.selection = value.parse()?,
            "elitism_count" => self.elitism_count = num(key, value)?,
            "random_seed" => self.random_seed = num(key, value)?,
            _ => return Err(GAConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }
}

impl fmt::Display for GAConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
