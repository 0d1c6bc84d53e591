//! Chess engine with a 35-weight evaluation and an 18-parameter selective search, plus the
//! genetic-algorithm machinery that evolves both parameter sets.

pub mod arena;
pub mod chess;
pub mod eval;
pub mod evolve;
pub mod genome;
pub mod search;
