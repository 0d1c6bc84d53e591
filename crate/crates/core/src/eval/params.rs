use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use thiserror::Error;

/// The 35 evaluation weights, in canonical order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EvalTerm {
    PawnValue,
    KnightValue,
    BishopValue,
    RookValue,
    QueenValue,
    PawnAdvanceA,
    PawnAdvanceB,
    PassedPawnMult,
    DoubledPawnPenalty,
    IsolatedPawnPenalty,
    BackwardPawnPenalty,
    WeakSquarePenalty,
    PassedPawnEnemyKingDist,
    KnightSqMult,
    KnightOutpostMult,
    BishopMobility,
    BishopPair,
    RookAttackKingFile,
    RookAttackKingAdjFile,
    RookAttackKingAdjFileAbgh,
    Rook7thRank,
    RookConnected,
    RookMobility,
    RookBehindPassedPawn,
    RookOpenFile,
    RookSemiOpenFile,
    RookAtckWeakPawnOpenColumn,
    RookColumnMult,
    QueenMobility,
    KingNoFriendlyPawn,
    KingNoFriendlyPawnAdj,
    KingFriendlyPawnAdvanced1,
    KingNoEnemyPawn,
    KingNoEnemyPawnAdj,
    KingPressureMult,
}

pub const NUM_TERMS: usize = 35;

impl EvalTerm {
    pub const ALL: [EvalTerm; NUM_TERMS] = {
        use EvalTerm::*;
        [
            PawnValue,
            KnightValue,
            BishopValue,
            RookValue,
            QueenValue,
            PawnAdvanceA,
            PawnAdvanceB,
            PassedPawnMult,
            DoubledPawnPenalty,
            IsolatedPawnPenalty,
            BackwardPawnPenalty,
            WeakSquarePenalty,
            PassedPawnEnemyKingDist,
            KnightSqMult,
            KnightOutpostMult,
            BishopMobility,
            BishopPair,
            RookAttackKingFile,
            RookAttackKingAdjFile,
            RookAttackKingAdjFileAbgh,
            Rook7thRank,
            RookConnected,
            RookMobility,
            RookBehindPassedPawn,
            RookOpenFile,
            RookSemiOpenFile,
            RookAtckWeakPawnOpenColumn,
            RookColumnMult,
            QueenMobility,
            KingNoFriendlyPawn,
            KingNoFriendlyPawnAdj,
            KingFriendlyPawnAdvanced1,
            KingNoEnemyPawn,
            KingNoEnemyPawnAdj,
            KingPressureMult,
        ]
    };

    pub const NAMES: [&'static str; NUM_TERMS] = [
        "PAWN_VALUE",
        "KNIGHT_VALUE",
        "BISHOP_VALUE",
        "ROOK_VALUE",
        "QUEEN_VALUE",
        "PAWN_ADVANCE_A",
        "PAWN_ADVANCE_B",
        "PASSED_PAWN_MULT",
        "DOUBLED_PAWN_PENALTY",
        "ISOLATED_PAWN_PENALTY",
        "BACKWARD_PAWN_PENALTY",
        "WEAK_SQUARE_PENALTY",
        "PASSED_PAWN_ENEMY_KING_DIST",
        "KNIGHT_SQ_MULT",
        "KNIGHT_OUTPOST_MULT",
        "BISHOP_MOBILITY",
        "BISHOP_PAIR",
        "ROOK_ATTACK_KING_FILE",
        "ROOK_ATTACK_KING_ADJ_FILE",
        "ROOK_ATTACK_KING_ADJ_FILE_ABGH",
        "ROOK_7TH_RANK",
        "ROOK_CONNECTED",
        "ROOK_MOBILITY",
        "ROOK_BEHIND_PASSED_PAWN",
        "ROOK_OPEN_FILE",
        "ROOK_SEMI_OPEN_FILE",
        "ROOK_ATCK_WEAK_PAWN_OPEN_COLUMN",
        "ROOK_COLUMN_MULT",
        "QUEEN_MOBILITY",
        "KING_NO_FRIENDLY_PAWN",
        "KING_NO_FRIENDLY_PAWN_ADJ",
        "KING_FRIENDLY_PAWN_ADVANCED1",
        "KING_NO_ENEMY_PAWN",
        "KING_NO_ENEMY_PAWN_ADJ",
        "KING_PRESSURE_MULT",
    ];

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        Self::NAMES[self.index()]
    }

    pub fn from_name(name: &str) -> Option<EvalTerm> {
        Self::NAMES.iter().position(|&n| n == name).map(|i| Self::ALL[i])
    }

    /// Knight, bishop, rook and queen values (11-bit genes); the pawn is the fixed reference.
    pub fn is_material(self) -> bool {
        self.index() <= EvalTerm::QueenValue.index()
    }

    /// Largest value the genome can express for this term.
    pub fn max_value(self) -> i32 {
        match self {
            EvalTerm::PawnValue => PAWN_VALUE,
            t if t.is_material() => 2047,
            _ => 63,
        }
    }
}

pub const PAWN_VALUE: i32 = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown parameter `{0}`")]
    UnknownName(String),
    #[error("parameter `{0}` given twice")]
    Duplicate(String),
    #[error("parameter `{0}` missing")]
    Missing(String),
    #[error("{name} = {value} outside 0..={max}")]
    OutOfRange { name: String, value: i64, max: i64 },
    #[error("PAWN_VALUE must be 100, got {0}")]
    PawnValue(i64),
}

/// Weight vector for the static evaluation. `PAWN_VALUE` is always 100 and every other weight is
/// non-negative and within its gene range.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct EvalParams {
    values: [i32; NUM_TERMS],
}

impl Index<EvalTerm> for EvalParams {
    type Output = i32;

    fn index(&self, t: EvalTerm) -> &i32 {
        &self.values[t.index()]
    }
}

impl IndexMut<EvalTerm> for EvalParams {
    fn index_mut(&mut self, t: EvalTerm) -> &mut i32 {
        &mut self.values[t.index()]
    }
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams::reference()
    }
}

impl EvalParams {
    /// All weights zero except the fixed pawn value.
    pub fn zeroed() -> EvalParams {
        let mut values = [0; NUM_TERMS];
        values[0] = PAWN_VALUE;
        EvalParams { values }
    }

    /// Builds from all 35 values in canonical order, validating ranges.
    pub fn from_values(values: [i32; NUM_TERMS]) -> Result<EvalParams, ParamsError> {
        let p = EvalParams { values };
        p.validate()?;
        Ok(p)
    }

    pub fn values(&self) -> &[i32; NUM_TERMS] {
        &self.values
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.values[0] != PAWN_VALUE {
            return Err(ParamsError::PawnValue(self.values[0] as i64));
        }
        for t in EvalTerm::ALL {
            let v = self[t];
            if v < 0 || v > t.max_value() {
                return Err(ParamsError::OutOfRange {
                    name: t.name().to_string(),
                    value: v as i64,
                    max: t.max_value() as i64,
                });
            }
        }
        Ok(())
    }

    /// The averaged evolved weights reported for the best evolved organisms.
    pub fn reference() -> EvalParams {
        EvalParams {
            values: [
                100, 521, 572, 824, 1710, 3, 6, 10, 14, 8, 3, 5, 7, 6, 9, 4, 28, 51, 8, 26, 30, 6, 4,
                40, 27, 11, 15, 6, 2, 35, 10, 6, 17, 9, 4,
            ],
        }
    }

    /// `NAME value` lines in canonical order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in EvalTerm::ALL {
            s.push_str(&format!("{:<34}{:>5}\n", t.name(), self[t]));
        }
        s
    }

    /// Reads `NAME value` lines. Blank lines and `#` comments are ignored; every name must appear
    /// exactly once.
    pub fn parse(text: &str) -> Result<EvalParams, ParamsError> {
        let mut seen = [false; NUM_TERMS];
        let mut values = [0i32; NUM_TERMS];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (name, value) = match (parts.next(), parts.next(), parts.next()) {
                (Some(n), Some(v), None) => (n, v),
                _ => {
                    return Err(ParamsError::Syntax {
                        line: i + 1,
                        message: format!("expected `NAME value`, got `{line}`"),
                    })
                }
            };
            let term = EvalTerm::from_name(name).ok_or_else(|| ParamsError::UnknownName(name.to_string()))?;
            let v: i64 = value.parse().map_err(|_| ParamsError::Syntax {
                line: i + 1,
                message: format!("`{value}` is not an integer"),
            })?;
            if seen[term.index()] {
                return Err(ParamsError::Duplicate(name.to_string()));
            }
            seen[term.index()] = true;
            if term == EvalTerm::PawnValue && v != PAWN_VALUE as i64 {
                return Err(ParamsError::PawnValue(v));
            }
            if v < 0 || v > term.max_value() as i64 {
                return Err(ParamsError::OutOfRange {
                    name: name.to_string(),
                    value: v,
                    max: term.max_value() as i64,
                });
            }
            values[term.index()] = v as i32;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(ParamsError::Missing(EvalTerm::NAMES[i].to_string()));
        }
        Ok(EvalParams { values })
    }
}

impl fmt::Display for EvalParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for EvalParams {
    type Err = ParamsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EvalParams::parse(s)
    }
}
