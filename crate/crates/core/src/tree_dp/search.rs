//! Turning a solver for one problem into a solver for its dual.
//!
//! BMR minimizes storage under a retrieval cap, MMR minimizes the cap under a
//! storage budget; the same holds for BSR and MSR. Because the least storage is
//! non-increasing in the cap, the smallest cap that fits the budget can be
//! found by binary search.

use crate::error::SolveError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome<T> {
    /// Smallest bound found feasible.
    pub bound: u64,
    /// What the inner solver returned for that bound.
    pub value: T,
    pub calls: usize,
}

/// Smallest `b` in `lo..=hi` such that `solve(b)` yields a cost within `target`.
///
/// `solve` returns `Ok(None)` when it has no plan for a bound, and must be
/// monotone: once a bound fits, every larger one does too. Makes at most
/// `ceil(log2(hi - lo + 1)) + 1` calls.
pub fn dual_binary_search<T, F>(lo: u64, hi: u64, target: u64, mut solve: F) -> Result<SearchOutcome<T>, SolveError>
where
    F: FnMut(u64) -> Result<Option<(u64, T)>, SolveError>,
{
    assert!(lo <= hi, "empty search range");
    let mut calls = 1;
    let mut best = match solve(hi)? {
        Some((cost, value)) if cost <= target => value,
        _ => return Err(SolveError::Infeasible),
    };
    let (mut l, mut h) = (lo, hi);
    while l < h {
        let mid = l + (h - l) / 2;
        calls += 1;
        match solve(mid)? {
            Some((cost, value)) if cost <= target => {
                h = mid;
                best = value;
            }
            _ => l = mid + 1,
        }
    }
    Ok(SearchOutcome { bound: h, value: best, calls })
}
