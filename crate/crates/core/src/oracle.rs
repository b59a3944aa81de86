// SPDX-License-Identifier: MIT OR Apache-2.0

//! Brute-force reference formulas computed directly from the rows.
//!
//! These bypass the Gram table entirely and cost `O(n^4 p)` / `O(n^2 p)`;
//! they exist to cross-check the fast statistics on small inputs.

use crate::data::DataMatrix;
use crate::error::{Error, Result};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `D_n(k) = sum_{j1 != j3 <= k} sum_{k+1 <= j2 != j4} (X_j1 - X_j2)^T (X_j3 - X_j4)`.
///
/// `G_n(k) = D_n(k) / (k (k-1) (n-k) (n-k-1))`. Requires `2 <= k <= n - 2`.
pub fn d_oracle(x: &DataMatrix, k: usize) -> Result<f64> {
    let n = x.n();
    if k < 2 || k + 2 > n {
        return Err(Error::IndexOutOfRange(format!(
            "k = {k} outside 2..=n-2 for n = {n}"
        )));
    }
    let p = x.p();
    let mut diff_a = vec![0.0; p];
    let mut diff_b = vec![0.0; p];
    let mut total = 0.0;
    for j1 in 0..k {
        for j3 in 0..k {
            if j1 == j3 {
                continue;
            }
            for j2 in k..n {
                for (d, (u, v)) in diff_a.iter_mut().zip(x.row(j1).iter().zip(x.row(j2))) {
                    *d = u - v;
                }
                for j4 in k..n {
                    if j2 == j4 {
                        continue;
                    }
                    for (d, (u, v)) in diff_b.iter_mut().zip(x.row(j3).iter().zip(x.row(j4))) {
                        *d = u - v;
                    }
                    total += dot(&diff_a, &diff_b);
                }
            }
        }
    }
    Ok(total)
}

/// `S~_n(k, m) = sum_{i=k..m} sum_{j=k..i} X_{i+1}^T X_j`, 1-based.
///
/// Equivalently the sum of `X_i^T X_j` over pairs `k <= j < i <= m + 1`, so
/// the within-block pair sum over `[a, b]` is `s_tilde(a, b - 1)`.
///
/// Requires `1 <= k <= m <= n - 1`.
pub fn s_tilde(x: &DataMatrix, k: usize, m: usize) -> Result<f64> {
    let n = x.n();
    if k < 1 || k > m || m + 1 > n {
        return Err(Error::IndexOutOfRange(format!(
            "(k, m) = ({k}, {m}) outside 1 <= k <= m <= n-1 for n = {n}"
        )));
    }
    let mut total = 0.0;
    for i in k..=m {
        for j in k..=i {
            total += dot(x.row(i), x.row(j - 1));
        }
    }
    Ok(total)
}

fn split_sums(x: &DataMatrix, k: usize) -> Result<(f64, f64, f64)> {
    let n = x.n();
    if k < 2 || k + 2 > n {
        return Err(Error::IndexOutOfRange(format!(
            "k = {k} outside 2..=n-2 for n = {n}"
        )));
    }
    let left = s_tilde(x, 1, k - 1)?;
    let right = s_tilde(x, k + 1, n - 1)?;
    let cross = s_tilde(x, 1, n - 1)? - left - right;
    Ok((left, right, cross))
}

/// The `S~` decomposition of `G~_n(k)` in its large-sample form
///
/// ```text
/// 2(n-k)(n-k-1)/n^3 S~(1, k-1) + 2k(k-1)/n^3 S~(k+1, n-1)
///   - 2k(n-k)/n^3 (S~(1, n-1) - S~(1, k-1) - S~(k+1, n-1))
/// ```
///
/// Its cross coefficient `k(n-k)` replaces the exact `(k-1)(n-k-1)`, so it
/// exceeds `G~_n(k)` by `-2(n-1)/n^3` times the cross-block sum; see
/// [`rescaled_g_from_pair_sums`] for the exact form.
pub fn rescaled_g_from_s_tilde(x: &DataMatrix, k: usize) -> Result<f64> {
    let (left, right, cross) = split_sums(x, k)?;
    let nf = x.n() as f64;
    let kf = k as f64;
    let n3 = nf * nf * nf;
    Ok(2.0 * (nf - kf) * (nf - kf - 1.0) / n3 * left + 2.0 * kf * (kf - 1.0) / n3 * right
        - 2.0 * kf * (nf - kf) / n3 * cross)
}

/// Exact decomposition of `G~_n(k)` into left, right and cross pair sums,
/// each taken from [`s_tilde`]:
/// cross coefficient `2(k-1)(n-k-1)/n^3`.
pub fn rescaled_g_from_pair_sums(x: &DataMatrix, k: usize) -> Result<f64> {
    let (left, right, cross) = split_sums(x, k)?;
    let nf = x.n() as f64;
    let kf = k as f64;
    let n3 = nf * nf * nf;
    Ok(2.0 * (nf - kf) * (nf - kf - 1.0) / n3 * left + 2.0 * kf * (kf - 1.0) / n3 * right
        - 2.0 * (kf - 1.0) * (nf - kf - 1.0) / n3 * cross)
}

/// `S~(1, n-1) - S~(1, k-1) - S~(k+1, n-1)`, the cross-block pair sum.
pub fn cross_sum(x: &DataMatrix, k: usize) -> Result<f64> {
    Ok(split_sums(x, k)?.2)
}
