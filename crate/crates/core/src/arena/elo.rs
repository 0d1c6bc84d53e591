use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EloError {
    /// A perfect or zero score implies an unbounded rating difference.
    #[error("winning rate {0} gives an unbounded rating difference")]
    Unbounded(f64),
    #[error("winning rate {0} is not a probability")]
    NotAProbability(f64),
}

/// Expected score of the stronger side for rating difference `rd`.
pub fn expected_score(rd: f64) -> f64 {
    1.0 / (10f64.powf(-rd / 400.0) + 1.0)
}

/// Rating difference implied by winning rate `w`.
pub fn rating_difference(w: f64) -> Result<f64, EloError> {
    if !(0.0..=1.0).contains(&w) || w.is_nan() {
        return Err(EloError::NotAProbability(w));
    }
    if w == 0.0 || w == 1.0 {
        return Err(EloError::Unbounded(w));
    }
    let rd = -400.0 * (1.0 / w - 1.0).log10();
    // avoid printing -0.0 for an even score
    Ok(if rd == 0.0 { 0.0 } else { rd })
}

/// `+74.1`, or `+inf`/`-inf` for a perfect or zero score.
pub fn format_rating_difference(w: f64) -> String {
    match rating_difference(w) {
        Ok(rd) => format!("{rd:+.1}"),
        Err(_) if w >= 1.0 => "+inf".into(),
        Err(_) => "-inf".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_points() {
        assert_eq!(expected_score(0.0), 0.5);
        assert_eq!(rating_difference(0.5).unwrap(), 0.0);
        assert!((expected_score(120.0) + expected_score(-120.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_rates() {
        assert_eq!(rating_difference(1.0), Err(EloError::Unbounded(1.0)));
        assert_eq!(rating_difference(0.0), Err(EloError::Unbounded(0.0)));
        assert!(rating_difference(1.5).is_err());
        assert_eq!(format_rating_difference(1.0), "+inf");
        assert_eq!(format_rating_difference(0.605), "+74.1");
    }
}
