use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Fractional-ply units per full ply.
pub const UNITS_PER_PLY: i32 = 4;

/// One row of the search chromosome: name, nominal value range, and gene width.
#[derive(Copy, Clone, Debug)]
pub struct SearchField {
    pub name: &'static str,
    pub max: u32,
    pub bits: u32,
}

/// Rows in chromosome order.
pub const SEARCH_FIELDS: [SearchField; 18] = [
    SearchField { name: "null_move_use", max: 1, bits: 1 },
    SearchField { name: "null_move_reduction", max: 7, bits: 3 },
    SearchField { name: "null_move_adaptivity_use", max: 1, bits: 1 },
    SearchField { name: "null_move_adaptivity_depth", max: 7, bits: 3 },
    SearchField { name: "futility_depth", max: 3, bits: 2 },
    SearchField { name: "futility_threshold_d1", max: 1023, bits: 10 },
    SearchField { name: "futility_threshold_d2", max: 1023, bits: 10 },
    SearchField { name: "futility_threshold_d3", max: 1023, bits: 10 },
    SearchField { name: "multi_cut_use", max: 1, bits: 1 },
    SearchField { name: "multi_cut_reduction", max: 7, bits: 3 },
    SearchField { name: "multi_cut_depth", max: 7, bits: 3 },
    SearchField { name: "multi_cut_move_num", max: 31, bits: 5 },
    SearchField { name: "multi_cut_cut_num", max: 7, bits: 3 },
    SearchField { name: "check_ext", max: 4, bits: 3 },
    SearchField { name: "one_reply_ext", max: 4, bits: 3 },
    SearchField { name: "recapture_ext", max: 4, bits: 3 },
    SearchField { name: "passed_pawn_ext", max: 4, bits: 3 },
    SearchField { name: "mate_threat_ext", max: 4, bits: 3 },
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchParamsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown search parameter `{0}`")]
    UnknownName(String),
    #[error("search parameter `{0}` given twice")]
    Duplicate(String),
    #[error("search parameter `{0}` missing")]
    Missing(String),
    #[error("{name} = {value} does not fit in {bits} bits")]
    OutOfRange { name: String, value: u64, bits: u32 },
}

/// The 18 selective-search controls.
///
/// Extension fields are stored as their 3-bit gene value (0-7) so that every chromosome decodes
/// and re-encodes exactly; values above 4 units act as 4 (one full ply).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SearchParams {
    pub null_move_use: bool,
    pub null_move_reduction: u8,
    pub null_move_adaptivity_use: bool,
    pub null_move_adaptivity_depth: u8,
    pub futility_depth: u8,
    pub futility_threshold: [u16; 3],
    pub multi_cut_use: bool,
    pub multi_cut_reduction: u8,
    pub multi_cut_depth: u8,
    pub multi_cut_move_num: u8,
    pub multi_cut_cut_num: u8,
    pub check_ext: u8,
    pub one_reply_ext: u8,
    pub recapture_ext: u8,
    pub passed_pawn_ext: u8,
    pub mate_threat_ext: u8,
}

impl SearchParams {
    /// Every selective mechanism disabled: plain alpha-beta with quiescence.
    pub fn off() -> SearchParams {
        SearchParams::default()
    }

    /// The learned values reported for the evolved search.
    pub fn learned() -> SearchParams {
        SearchParams {
            null_move_use: true,
            null_move_reduction: 4,
            null_move_adaptivity_use: true,
            null_move_adaptivity_depth: 6,
            futility_depth: 3,
            futility_threshold: [112, 227, 506],
            multi_cut_use: true,
            multi_cut_reduction: 4,
            multi_cut_depth: 6,
            multi_cut_move_num: 15,
            multi_cut_cut_num: 3,
            check_ext: 4,
            one_reply_ext: 4,
            recapture_ext: 2,
            passed_pawn_ext: 3,
            mate_threat_ext: 2,
        }
    }

    /// Field values in chromosome order.
    pub fn to_values(&self) -> [u32; 18] {
        [
            self.null_move_use as u32,
            self.null_move_reduction as u32,
            self.null_move_adaptivity_use as u32,
            self.null_move_adaptivity_depth as u32,
            self.futility_depth as u32,
            self.futility_threshold[0] as u32,
            self.futility_threshold[1] as u32,
            self.futility_threshold[2] as u32,
            self.multi_cut_use as u32,
            self.multi_cut_reduction as u32,
            self.multi_cut_depth as u32,
            self.multi_cut_move_num as u32,
            self.multi_cut_cut_num as u32,
            self.check_ext as u32,
            self.one_reply_ext as u32,
            self.recapture_ext as u32,
            self.passed_pawn_ext as u32,
            self.mate_threat_ext as u32,
        ]
    }

    /// Builds from values in chromosome order; each must fit its gene width.
    pub fn from_values(v: [u32; 18]) -> Result<SearchParams, SearchParamsError> {
        for (f, &x) in SEARCH_FIELDS.iter().zip(v.iter()) {
            if x >= 1 << f.bits {
                return Err(SearchParamsError::OutOfRange {
                    name: f.name.to_string(),
                    value: x as u64,
                    bits: f.bits,
                });
            }
        }
        Ok(SearchParams {
            null_move_use: v[0] == 1,
            null_move_reduction: v[1] as u8,
            null_move_adaptivity_use: v[2] == 1,
            null_move_adaptivity_depth: v[3] as u8,
            futility_depth: v[4] as u8,
            futility_threshold: [v[5] as u16, v[6] as u16, v[7] as u16],
            multi_cut_use: v[8] == 1,
            multi_cut_reduction: v[9] as u8,
            multi_cut_depth: v[10] as u8,
            multi_cut_move_num: v[11] as u8,
            multi_cut_cut_num: v[12] as u8,
            check_ext: v[13] as u8,
            one_reply_ext: v[14] as u8,
            recapture_ext: v[15] as u8,
            passed_pawn_ext: v[16] as u8,
            mate_threat_ext: v[17] as u8,
        })
    }

    #[inline]
    pub(crate) fn ext_units(raw: u8) -> i32 {
        (raw as i32).min(UNITS_PER_PLY)
    }

    /// True when no selective mechanism can change the tree.
    pub fn is_plain(&self) -> bool {
        !self.null_move_use
            && self.futility_depth == 0
            && !self.multi_cut_use
            && self.check_ext == 0
            && self.one_reply_ext == 0
            && self.recapture_ext == 0
            && self.passed_pawn_ext == 0
            && self.mate_threat_ext == 0
    }

    /// `name = value` lines in chromosome order.
    pub fn to_text(&self) -> String {
        SEARCH_FIELDS
            .iter()
            .zip(self.to_values())
            .map(|(f, v)| format!("{} = {}\n", f.name, v))
            .collect()
    }

    /// Reads `name = value` lines (`#` comments allowed); all 18 fields are required.
    pub fn parse(text: &str) -> Result<SearchParams, SearchParamsError> {
        let mut values = [0u32; 18];
        let mut seen = [false; 18];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, value) = line.split_once('=').ok_or_else(|| SearchParamsError::Syntax {
                line: i + 1,
                message: format!("expected `name = value`, got `{line}`"),
            })?;
            let name = name.trim();
            let idx = SEARCH_FIELDS
                .iter()
                .position(|f| f.name == name)
                .ok_or_else(|| SearchParamsError::UnknownName(name.to_string()))?;
            let v: u64 = value.trim().parse().map_err(|_| SearchParamsError::Syntax {
                line: i + 1,
                message: format!("`{}` is not a non-negative integer", value.trim()),
            })?;
            if seen[idx] {
                return Err(SearchParamsError::Duplicate(name.to_string()));
            }
            seen[idx] = true;
            if v >= 1 << SEARCH_FIELDS[idx].bits {
                return Err(SearchParamsError::OutOfRange {
                    name: name.to_string(),
                    value: v,
                    bits: SEARCH_FIELDS[idx].bits,
                });
            }
            values[idx] = v as u32;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(SearchParamsError::Missing(SEARCH_FIELDS[i].name.to_string()));
        }
        SearchParams::from_values(values)
    }
}

impl fmt::Display for SearchParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for SearchParams {
    type Err = SearchParamsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SearchParams::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths_sum_to_seventy() {
        assert_eq!(SEARCH_FIELDS.iter().map(|f| f.bits).sum::<u32>(), 70);
        for f in SEARCH_FIELDS {
            assert!(f.max < 1 << f.bits, "{}", f.name);
        }
    }

    #[test]
    fn text_round_trip() {
        let p = SearchParams::learned();
        assert_eq!(SearchParams::parse(&p.to_text()).unwrap(), p);
        assert_eq!(p.null_move_reduction, 4);
        assert!(SearchParams::off().is_plain());
        assert!(!p.is_plain());
    }

    #[test]
    fn parse_errors() {
        let text = SearchParams::off().to_text();
        let bad = text.replace("futility_threshold_d1 = 0", "futility_threshold_d1 = 1024");
        assert!(matches!(SearchParams::parse(&bad), Err(SearchParamsError::OutOfRange { .. })));
        let missing = text.replace("check_ext = 0\n", "");
        assert_eq!(SearchParams::parse(&missing), Err(SearchParamsError::Missing("check_ext".into())));
        assert!(matches!(SearchParams::parse("nope = 1"), Err(SearchParamsError::UnknownName(_))));
        assert!(matches!(SearchParams::parse("check_ext 1"), Err(SearchParamsError::Syntax { .. })));
    }

    #[test]
    fn extensions_saturate_at_one_ply() {
        assert_eq!(SearchParams::ext_units(3), 3);
        assert_eq!(SearchParams::ext_units(7), 4);
    }
}
