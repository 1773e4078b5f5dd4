//! Exact parsing of non-negative rationals given as `p/q` or as decimals.

use num_rational::Ratio;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` is not a non-negative rational (expected p/q or a decimal)")]
pub struct ParseRatioError(pub String);

/// `"1/4"`, `"0.25"`, `"3"` and `".5"` all parse exactly.
pub fn parse_ratio(text: &str) -> Result<Ratio<u64>, ParseRatioError> {
    let err = || ParseRatioError(text.to_string());
    let s = text.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: u64 = p.trim().parse().map_err(|_| err())?;
        let q: u64 = q.trim().parse().map_err(|_| err())?;
        if q == 0 {
            return Err(err());
        }
        return Ok(Ratio::new(p, q));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let den = 10u64.checked_pow(frac.len() as u32).ok_or_else(err)?;
    let digits = format!("{int}{frac}");
    let num: u64 = digits.parse().map_err(|_| err())?;
    Ok(Ratio::new(num, den))
}
