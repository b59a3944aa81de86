// SPDX-License-Identifier: MIT OR Apache-2.0

//! Two-sample U-statistic scans.
//!
//! For a split of `[a, b]` after `m`, with left block `[a, m]` of length
//! `L = m - a + 1` and right block `[m + 1, b]` of length `R = b - m`,
//!
//! ```text
//! G(m; a, b) = P(a, m) / C(L, 2) + P(m+1, b) / C(R, 2) - 2 C(a, m, b) / (L R)
//! ```
//!
//! where `P` is the within-block pair sum and `C` the cross-block sum of
//! inner products. The rescaled statistic multiplies by
//! `L (L - 1) R (R - 1) / (b - a + 1)^3`. All indices are 1-based.

use serde::Serialize;

use crate::error::{Block, Error, Result};
use crate::gram::IntervalSums;

fn check_split(n: usize, m: usize, a: usize, b: usize) -> Result<()> {
    if a == 0 || b > n || !(a <= m && m < b) {
        return Err(Error::IndexOutOfRange(format!(
            "split (m={m}; a={a}, b={b}) needs 1 <= a <= m < b <= n = {n}"
        )));
    }
    let left = m - a + 1;
    if left < 2 {
        return Err(Error::ShortBlock {
            block: Block::Left,
            start: a,
            end: m,
            len: left,
        });
    }
    let right = b - m;
    if right < 2 {
        return Err(Error::ShortBlock {
            block: Block::Right,
            start: m + 1,
            end: b,
            len: right,
        });
    }
    Ok(())
}

#[inline]
fn g_from_sums(left: f64, right: f64, cross: f64, l: f64, r: f64) -> f64 {
    2.0 * left / (l * (l - 1.0)) + 2.0 * right / (r * (r - 1.0)) - 2.0 * cross / (l * r)
}

#[inline]
fn rescale_factor(m: usize, a: usize, b: usize) -> f64 {
    let l = (m - a + 1) as f64;
    let r = (b - m) as f64;
    let len = (b - a + 1) as f64;
    l * (l - 1.0) * r * (r - 1.0) / (len * len * len)
}

#[inline]
pub(crate) fn rescaled_unchecked<S: IntervalSums + ?Sized>(s: &S, m: usize, a: usize, b: usize) -> f64 {
    let g = g_from_sums(
        s.pair_sum(a, m),
        s.pair_sum(m + 1, b),
        s.cross_sum(a, m, b),
        (m - a + 1) as f64,
        (b - m) as f64,
    );
    rescale_factor(m, a, b) * g
}

/// `G_n(m; a, b)`. Both blocks must hold at least two observations.
pub fn g_stat<S: IntervalSums + ?Sized>(s: &S, m: usize, a: usize, b: usize) -> Result<f64> {
    check_split(s.len(), m, a, b)?;
    Ok(g_from_sums(
        s.pair_sum(a, m),
        s.pair_sum(m + 1, b),
        s.cross_sum(a, m, b),
        (m - a + 1) as f64,
        (b - m) as f64,
    ))
}

/// Rescaled statistic `G~_n(m; a, b)`.
pub fn rescaled_g<S: IntervalSums + ?Sized>(s: &S, m: usize, a: usize, b: usize) -> Result<f64> {
    check_split(s.len(), m, a, b)?;
    Ok(rescaled_unchecked(s, m, a, b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    Single,
    IntervalForward,
    IntervalBackward,
}

/// Candidate location of a scan: a split point, or a `(m, k)` pair for the
/// forward (`G~(m; 1, k)`) and backward (`G~(m; k, n)`) interval scans.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum ScanIndex {
    Split(usize),
    Pair { m: usize, k: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanProfile {
    pub kind: ScanKind,
    /// Candidates in ascending (lexicographic) order with their values.
    pub values: Vec<(ScanIndex, f64)>,
    pub max_value: f64,
    /// First candidate attaining `max_value`.
    pub argmax: ScanIndex,
}

impl ScanProfile {
    fn from_values(kind: ScanKind, values: Vec<(ScanIndex, f64)>) -> Self {
        let (argmax, max_value) = values
            .iter()
            .copied()
            .fold(None, |best: Option<(ScanIndex, f64)>, (i, v)| match best {
                Some((_, bv)) if v <= bv => best,
                _ => Some((i, v)),
            })
            .expect("scan range is nonempty");
        Self {
            kind,
            values,
            max_value,
            argmax,
        }
    }

    /// Value at a given candidate.
    pub fn value_at(&self, index: ScanIndex) -> Option<f64> {
        self.values
            .binary_search_by(|(i, _)| i.cmp(&index))
            .ok()
            .map(|k| self.values[k].1)
    }
}

fn require_scan_length(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::TooFewObservations {
            what: "a change-point scan",
            required: 4,
            actual: n,
        });
    }
    Ok(())
}

/// Maximum over `m = 2..=n-2` of `G~(m)` given prefix pair sums
/// `left[m] = P(1, m)` and suffix pair sums `right[m] = P(m+1, n)`
/// (vectors indexed by `m`, length `n + 1`). Returns `(max, argmax)`.
pub(crate) fn single_max_from_split_sums(n: usize, left: &[f64], right: &[f64]) -> (f64, usize) {
    let total = left[n];
    let nf = n as f64;
    let n3 = nf * nf * nf;
    let mut best = (f64::NEG_INFINITY, 0);
    for m in 2..=n - 2 {
        let l = m as f64;
        let r = nf - l;
        let cross = total - left[m] - right[m];
        let v = l * (l - 1.0) * r * (r - 1.0) / n3 * g_from_sums(left[m], right[m], cross, l, r);
        if v > best.0 {
            best = (v, m);
        }
    }
    best
}

/// Single change-point scan: `T_n = max_{m=2..n-2} G~_n(m)`.
pub fn single_scan<S: IntervalSums + ?Sized>(s: &S) -> Result<ScanProfile> {
    let n = s.len();
    require_scan_length(n)?;
    let values = (2..=n - 2)
        .map(|m| (ScanIndex::Split(m), rescaled_unchecked(s, m, 1, n)))
        .collect();
    Ok(ScanProfile::from_values(ScanKind::Single, values))
}

/// Result of the forward/backward interval scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiScan {
    /// `T_{n,M}`: forward maximum plus backward maximum.
    pub statistic: f64,
    pub forward: ScanProfile,
    pub backward: ScanProfile,
}

/// Forward/backward scan for multiple change points:
/// `T_{n,M} = max_{m<k} G~(m; 1, k) + max_{k<m} G~(m; k, n)`.
///
/// Candidates without two observations on each side are skipped. `O(n^2)`.
pub fn multi_scan<S: IntervalSums + ?Sized>(s: &S) -> Result<MultiScan> {
    let n = s.len();
    require_scan_length(n)?;
    let mut forward = Vec::new();
    let mut backward = Vec::new();
    for m in 2..=n - 1 {
        for k in m + 2..=n {
            forward.push((ScanIndex::Pair { m, k }, rescaled_unchecked(s, m, 1, k)));
        }
    }
    for m in 2..=n - 2 {
        for k in 1..m {
            backward.push((ScanIndex::Pair { m, k }, rescaled_unchecked(s, m, k, n)));
        }
    }
    let forward = ScanProfile::from_values(ScanKind::IntervalForward, forward);
    let backward = ScanProfile::from_values(ScanKind::IntervalBackward, backward);
    Ok(MultiScan {
        statistic: forward.max_value + backward.max_value,
        forward,
        backward,
    })
}

/// `(forward max, backward max)` without materializing the profiles.
pub(crate) fn multi_max<S: IntervalSums + ?Sized>(s: &S) -> (f64, f64) {
    let n = s.len();
    let mut fwd = f64::NEG_INFINITY;
    let mut bwd = f64::NEG_INFINITY;
    for m in 2..=n - 1 {
        for k in m + 2..=n {
            fwd = fwd.max(rescaled_unchecked(s, m, 1, k));
        }
    }
    for m in 2..=n - 2 {
        for k in 1..m {
            bwd = bwd.max(rescaled_unchecked(s, m, k, n));
        }
    }
    (fwd, bwd)
}

/// `max_{s+2 <= t <= e-2} G~(t; s, e)` and its first maximizer.
pub(crate) fn interval_max<S: IntervalSums + ?Sized>(sums: &S, s: usize, e: usize) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for t in s + 2..=e - 2 {
        let v = rescaled_unchecked(sums, t, s, e);
        if v > best.0 {
            best = (v, t);
        }
    }
    best
}
