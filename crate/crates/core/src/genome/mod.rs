//! Gray-coded bit-string genomes for the evaluation and search parameter sets, and the GA
//! operators that act on them.
//!
//! Evaluation layout (224 bits): the four non-pawn material values as 11-bit fields, then the
//! 30 positional weights as 6-bit fields, in canonical term order. `PAWN_VALUE` is not encoded.
//! Search layout (70 bits): the 18 fields of [`SEARCH_FIELDS`] in order at their listed widths.
//! Every field is stored most-significant bit first.

mod config;
mod ops;

pub use config::{GAConfig, GAConfigError, Selection};
pub use ops::{
    breed, elite_indices, mutate, next_generation, rank_probabilities, select_proportional,
    select_rank, uniform_crossover, RANK_PRESSURE,
};

use std::fmt;

use thiserror::Error;

use crate::eval::{EvalParams, EvalTerm, ParamsError, NUM_TERMS, PAWN_VALUE};
use crate::search::{SearchParams, SearchParamsError, SEARCH_FIELDS};

pub const MATERIAL_BITS: u32 = 11;
pub const POSITIONAL_BITS: u32 = 6;
pub const EVAL_BITS: usize = 4 * MATERIAL_BITS as usize + 30 * POSITIONAL_BITS as usize;
pub const SEARCH_BITS: usize = 70;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenomeError {
    #[error("value {value} does not fit in {width} bits")]
    FieldRange { value: u32, width: u32 },
    #[error("expected a {expected:?} chromosome, got {actual:?}")]
    KindMismatch { expected: ChromosomeKind, actual: ChromosomeKind },
    #[error("chromosome lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("bad chromosome hex `{0}`")]
    Hex(String),
    #[error("population is empty")]
    EmptyPopulation,
    #[error("negative or non-finite fitness {0}")]
    BadFitness(f64),
    #[error("checkpoint line {line}: {message}")]
    Checkpoint { line: usize, message: String },
    #[error(transparent)]
    Eval(#[from] ParamsError),
    #[error(transparent)]
    Search(#[from] SearchParamsError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum ChromosomeKind {
    Evaluation,
    Search,
}

impl ChromosomeKind {
    pub const fn len(self) -> usize {
        match self {
            ChromosomeKind::Evaluation => EVAL_BITS,
            ChromosomeKind::Search => SEARCH_BITS,
        }
    }

    /// Hex digits in the textual form.
    pub const fn hex_len(self) -> usize {
        self.len().div_ceil(4)
    }

    /// Field widths in chromosome order.
    pub fn widths(self) -> Vec<u32> {
        match self {
            ChromosomeKind::Evaluation => (1..NUM_TERMS)
                .map(|i| if EvalTerm::ALL[i].is_material() { MATERIAL_BITS } else { POSITIONAL_BITS })
                .collect(),
            ChromosomeKind::Search => SEARCH_FIELDS.iter().map(|f| f.bits).collect(),
        }
    }
}

/// Reflected binary Gray code of `value`.
pub fn gray_field(value: u32, width: u32) -> Result<u32, GenomeError> {
    if width < 32 && value >> width != 0 {
        return Err(GenomeError::FieldRange { value, width });
    }
    Ok(value ^ (value >> 1))
}

/// Inverse of [`gray_field`].
pub fn gray_field_inverse(code: u32) -> u32 {
    let mut v = code;
    let mut shift = 1;
    while shift < 32 {
        v ^= v >> shift;
        shift <<= 1;
    }
    v
}

/// Fixed-length bit string tagged with the parameter set it encodes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chromosome {
    kind: ChromosomeKind,
    bits: Vec<bool>,
}

impl fmt::Debug for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chromosome({:?}, {})", self.kind, self.to_hex())
    }
}

impl fmt::Display for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Chromosome {
    pub fn zeros(kind: ChromosomeKind) -> Chromosome {
        Chromosome {
            kind,
            bits: vec![false; kind.len()],
        }
    }

    pub fn from_bits(kind: ChromosomeKind, bits: Vec<bool>) -> Result<Chromosome, GenomeError> {
        if bits.len() != kind.len() {
            return Err(GenomeError::LengthMismatch(bits.len(), kind.len()));
        }
        Ok(Chromosome { kind, bits })
    }

    pub fn random<R: rand::Rng + ?Sized>(kind: ChromosomeKind, rng: &mut R) -> Chromosome {
        Chromosome {
            kind,
            bits: (0..kind.len()).map(|_| rng.gen::<bool>()).collect(),
        }
    }

    pub fn kind(&self) -> ChromosomeKind {
        self.kind
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub(crate) fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Hex digits, most significant bit first, zero-padded at the end to a whole digit.
    pub fn to_hex(&self) -> String {
        self.bits
            .chunks(4)
            .map(|c| {
                let mut n = 0u32;
                for i in 0..4 {
                    n = n << 1 | c.get(i).copied().unwrap_or(false) as u32;
                }
                char::from_digit(n, 16).unwrap()
            })
            .collect()
    }

    /// Parses [`Chromosome::to_hex`] output; the kind follows from the digit count.
    pub fn from_hex(text: &str) -> Result<Chromosome, GenomeError> {
        let text = text.trim();
        let kind = [ChromosomeKind::Evaluation, ChromosomeKind::Search]
            .into_iter()
            .find(|k| k.hex_len() == text.len())
            .ok_or_else(|| GenomeError::Hex(text.to_string()))?;
        let mut bits = Vec::with_capacity(text.len() * 4);
        for c in text.chars() {
            let n = c.to_digit(16).ok_or_else(|| GenomeError::Hex(text.to_string()))?;
            for i in (0..4).rev() {
                bits.push(n >> i & 1 == 1);
            }
        }
        if bits[kind.len()..].iter().any(|&b| b) {
            return Err(GenomeError::Hex(text.to_string()));
        }
        bits.truncate(kind.len());
        Ok(Chromosome { kind, bits })
    }

    fn expect(&self, kind: ChromosomeKind) -> Result<(), GenomeError> {
        if self.kind != kind {
            return Err(GenomeError::KindMismatch {
                expected: kind,
                actual: self.kind,
            });
        }
        Ok(())
    }

    fn fields(&self) -> Vec<u32> {
        let mut at = 0;
        self.kind
            .widths()
            .into_iter()
            .map(|w| {
                let code = self.bits[at..at + w as usize]
                    .iter()
                    .fold(0u32, |acc, &b| acc << 1 | b as u32);
                at += w as usize;
                gray_field_inverse(code)
            })
            .collect()
    }

    fn from_fields(kind: ChromosomeKind, values: &[u32]) -> Result<Chromosome, GenomeError> {
        let mut bits = Vec::with_capacity(kind.len());
        for (&v, w) in values.iter().zip(kind.widths()) {
            let code = gray_field(v, w)?;
            bits.extend((0..w).rev().map(|i| code >> i & 1 == 1));
        }
        Chromosome::from_bits(kind, bits)
    }
}

pub fn decode_eval(c: &Chromosome) -> Result<EvalParams, GenomeError> {
    c.expect(ChromosomeKind::Evaluation)?;
    let mut values = [0i32; NUM_TERMS];
    values[0] = PAWN_VALUE;
    for (slot, v) in values[1..].iter_mut().zip(c.fields()) {
        *slot = v as i32;
    }
    Ok(EvalParams::from_values(values)?)
}

pub fn encode_eval(p: &EvalParams) -> Result<Chromosome, GenomeError> {
    p.validate()?;
    let values: Vec<u32> = p.values()[1..].iter().map(|&v| v as u32).collect();
    Chromosome::from_fields(ChromosomeKind::Evaluation, &values)
}

pub fn decode_search(c: &Chromosome) -> Result<SearchParams, GenomeError> {
    c.expect(ChromosomeKind::Search)?;
    let f = c.fields();
    let mut v = [0u32; 18];
    v.copy_from_slice(&f);
    Ok(SearchParams::from_values(v)?)
}

pub fn encode_search(p: &SearchParams) -> Result<Chromosome, GenomeError> {
    Chromosome::from_fields(ChromosomeKind::Search, &p.to_values())
}

/// A chromosome with its most recent fitness.
#[derive(Clone, Debug, PartialEq)]
pub struct Organism {
    pub chromosome: Chromosome,
    pub fitness: f64,
}

impl Organism {
    pub fn new(chromosome: Chromosome, fitness: f64) -> Organism {
        Organism { chromosome, fitness }
    }

    pub fn eval_params(&self) -> Result<EvalParams, GenomeError> {
        decode_eval(&self.chromosome)
    }

    pub fn search_params(&self) -> Result<SearchParams, GenomeError> {
        decode_search(&self.chromosome)
    }
}

/// Checkpoint text: `# key value` header lines, then one `hex fitness` line per organism.
pub fn write_population(header: &[(String, String)], organisms: &[Organism]) -> String {
    let mut out = String::new();
    for (k, v) in header {
        out.push_str(&format!("# {k} {v}\n"));
    }
    for o in organisms {
        out.push_str(&format!("{} {}\n", o.chromosome.to_hex(), o.fitness));
    }
    out
}

/// Header key/value pairs are returned in file order.
pub type PopulationFile = (Vec<(String, String)>, Vec<Organism>);

pub fn parse_population(text: &str) -> Result<PopulationFile, GenomeError> {
    let mut header = Vec::new();
    let mut organisms: Vec<Organism> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let err = |message: String| GenomeError::Checkpoint { line: i + 1, message };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
            header.push((k.to_string(), v.trim().to_string()));
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(hex), Some(fit), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err(format!("expected `hex fitness`, got `{line}`")));
        };
        let chromosome = Chromosome::from_hex(hex).map_err(|e| err(e.to_string()))?;
        let fitness: f64 = fit.parse().map_err(|_| err(format!("bad fitness `{fit}`")))?;
        if !(fitness.is_finite() && fitness >= 0.0) {
            return Err(err(format!("bad fitness `{fit}`")));
        }
        if let Some(first) = organisms.first() {
            if first.chromosome.kind() != chromosome.kind() {
                return Err(err("mixed chromosome kinds".into()));
            }
        }
        organisms.push(Organism { chromosome, fitness });
    }
    Ok((header, organisms))
}
