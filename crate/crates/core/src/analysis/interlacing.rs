//! Strict interlacing of two node sets.

use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::Real;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterlacingReport {
    pub first: String,
    pub second: String,
    /// True iff the merged, sorted sets alternate between the two sources
    /// with no ties.
    pub interlaced: bool,
    /// Smallest distance between neighbours of the merged sequence.
    pub min_gap: f64,
}

/// Checks strict interlacing of `a` and `b`; their sizes may differ by one.
pub fn check_interlacing(a: &[Real], b: &[Real]) -> Result<InterlacingReport> {
    check_interlacing_labeled(a, b, "A", "B")
}

pub fn check_interlacing_labeled(a: &[Real], b: &[Real], first: &str, second: &str) -> Result<InterlacingReport> {
    if a.len().abs_diff(b.len()) > 1 {
        return Err(Error::InvalidArgument(format!(
            "cannot interlace sets of sizes {} and {}",
            a.len(),
            b.len()
        )));
    }
    let mut merged: Vec<(&Real, u8)> = a.iter().map(|x| (x, 0)).chain(b.iter().map(|x| (x, 1))).collect();
    merged.sort_by(|x, y| x.0.partial_cmp(y.0).unwrap_or(std::cmp::Ordering::Equal));

    let mut interlaced = true;
    let mut min_gap = f64::INFINITY;
    for pair in merged.windows(2) {
        let gap = Float::with_val(pair[1].0.prec(), pair[1].0 - pair[0].0).to_f64();
        min_gap = min_gap.min(gap);
        if pair[0].1 == pair[1].1 || gap <= 0.0 {
            interlaced = false;
        }
    }
    Ok(InterlacingReport {
        first: first.to_string(),
        second: second.to_string(),
        interlaced,
        min_gap,
    })
}
