// SPDX-License-Identifier: MIT OR Apache-2.0

//! Gaussian multiplier bootstrap for the single and multiple change-point
//! scans.
//!
//! Rows are centered by the overall mean and the centered Gram table is
//! reweighted by `e_i e_j` with i.i.d. standard normal multipliers. Each
//! replicate costs `O(n^2)` on top of the one-off `O(n^2 p)` Gram build.

use rayon::prelude::*;
use serde::Serialize;

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::gram::{GramTable, IntervalSums, PairTable};
use crate::rng::MultiplierStream;
use crate::stats::{self, ScanIndex};

/// Below this many replicates the report carries a warning.
pub const RECOMMENDED_MIN_REPLICATES: usize = 50;
/// Default replicate count for interactive use.
pub const DEFAULT_REPLICATES: usize = 200;

/// Gram table of the rows `X_i - X_bar`.
pub fn centered_gram(x: &DataMatrix) -> Result<GramTable> {
    if x.n() < 2 {
        return Err(Error::TooFewObservations {
            what: "centering",
            required: 2,
            actual: x.n(),
        });
    }
    let mean = x.mean_row();
    let neg: Vec<f64> = mean.iter().map(|m| -m).collect();
    Ok(GramTable::build(&x.shifted(&neg)?))
}

/// Double-centers a raw Gram table: `G[i][j] - r_i - r_j + s` with `r` the
/// row means and `s` the grand mean. Algebraically equal to
/// [`centered_gram`]; the latter is preferred numerically.
pub fn double_centered(gram: &GramTable) -> Result<GramTable> {
    let n = gram.len();
    let g = gram.entries();
    let nf = n as f64;
    let row_mean: Vec<f64> = (0..n).map(|i| g[i * n..(i + 1) * n].iter().sum::<f64>() / nf).collect();
    let grand = row_mean.iter().sum::<f64>() / nf;
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = g[i * n + j] - row_mean[i] - row_mean[j] + grand;
        }
    }
    GramTable::from_matrix(n, out)
}

fn check_multipliers(n: usize, e: &[f64]) -> Result<()> {
    if e.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: e.len(),
        });
    }
    if n < 4 {
        return Err(Error::TooFewObservations {
            what: "a bootstrap scan",
            required: 4,
            actual: n,
        });
    }
    Ok(())
}

/// Scratch space for one worker.
struct Workspace {
    e: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
    pairs: Option<PairTable>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            e: vec![0.0; n],
            left: vec![0.0; n + 1],
            right: vec![0.0; n + 1],
            pairs: None,
        }
    }

    fn pairs(&mut self, n: usize) -> &mut PairTable {
        self.pairs.get_or_insert_with(|| PairTable::new(n))
    }
}

/// `T*_n`: prefix/suffix pair sums of the reweighted table in one sweep of
/// the upper triangle, then the single scan.
fn single_stat_into(centered: &GramTable, e: &[f64], left: &mut [f64], right: &mut [f64]) -> f64 {
    let n = centered.len();
    let g = centered.entries();
    // left[j+1] collects column sums sum_{i<j} w_ij, right[i] row sums sum_{j>i} w_ij
    left.iter_mut().for_each(|v| *v = 0.0);
    right.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..n {
        let ei = e[i];
        let row = &g[i * n..(i + 1) * n];
        let mut acc = 0.0;
        for j in i + 1..n {
            let w = ei * e[j] * row[j];
            acc += w;
            left[j + 1] += w;
        }
        right[i] = acc;
    }
    // left[m] = P(1, m), right[m] = P(m+1, n)
    for m in 1..=n {
        left[m] += left[m - 1];
    }
    for m in (0..n).rev() {
        right[m] += right[m + 1];
    }
    stats::single_max_from_split_sums(n, left, right).0
}

/// One bootstrap replicate of the single-change statistic `T*_n`.
///
/// `centered` is the Gram table of the centered rows and `e` the multipliers.
pub fn bootstrap_single_stat(centered: &GramTable, e: &[f64]) -> Result<f64> {
    let n = centered.len();
    check_multipliers(n, e)?;
    let mut left = vec![0.0; n + 1];
    let mut right = vec![0.0; n + 1];
    Ok(single_stat_into(centered, e, &mut left, &mut right))
}

fn multi_stat_into(centered: &GramTable, e: &[f64], pairs: &mut PairTable) -> f64 {
    pairs.fill_weighted(centered, e);
    let (f, b) = stats::multi_max(pairs);
    f + b
}

/// One bootstrap replicate of the forward/backward statistic `T*_{n,M}`.
pub fn bootstrap_multi_stat(centered: &GramTable, e: &[f64]) -> Result<f64> {
    let n = centered.len();
    check_multipliers(n, e)?;
    let mut pairs = PairTable::new(n);
    Ok(multi_stat_into(centered, e, &mut pairs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatKind {
    Single,
    Multi,
}

/// `M` bootstrap replicates and the seed that reproduces them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BootstrapDraws {
    pub stat_kind: StatKind,
    pub values: Vec<f64>,
    pub seed: u64,
}

impl BootstrapDraws {
    pub fn replicates(&self) -> usize {
        self.values.len()
    }
}

/// Draws `replicates` bootstrap statistics. Replicate `r` uses multiplier
/// stream `(seed, r)`, so the result does not depend on the thread count.
pub fn bootstrap_draws(
    centered: &GramTable,
    kind: StatKind,
    replicates: usize,
    seed: u64,
) -> Result<BootstrapDraws> {
    if replicates == 0 {
        return Err(Error::invalid("bootstrap replicate count must be at least 1"));
    }
    let n = centered.len();
    check_multipliers(n, &vec![0.0; n])?;
    let values: Vec<f64> = (0..replicates as u64)
        .into_par_iter()
        .map_init(
            || Workspace::new(n),
            |ws, r| {
                MultiplierStream::new(seed, r).fill(&mut ws.e);
                let e = std::mem::take(&mut ws.e);
                let v = match kind {
                    StatKind::Single => single_stat_into(centered, &e, &mut ws.left, &mut ws.right),
                    StatKind::Multi => multi_stat_into(centered, &e, ws.pairs(n)),
                };
                ws.e = e;
                v
            },
        )
        .collect();
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Degenerate(format!("non-finite bootstrap statistic {bad}")));
    }
    Ok(BootstrapDraws {
        stat_kind: kind,
        values,
        seed,
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Number of draws allowed above the critical value, `floor(alpha * M)`.
/// The tiny offset keeps products like `0.29 * 100` on the intended integer.
fn exceedance_budget(alpha: f64, m: usize) -> usize {
    ((alpha * m as f64) + 1e-9).floor() as usize
}

/// Empirical critical value `inf { t : 1 - F*_M(t) <= alpha }`, realized as
/// the order statistic `v_(M - floor(alpha M))` of the sorted draws.
pub fn critical_value(values: &[f64], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if values.is_empty() {
        return Err(Error::invalid("critical value needs at least one draw"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let k = m.saturating_sub(exceedance_budget(alpha, m)).max(1);
    Ok(sorted[k - 1])
}

/// Finite-sample p-value `(#{T* > T} + 1) / (M + 1)`. Never zero.
pub fn bootstrap_p_value(values: &[f64], statistic: f64) -> f64 {
    let above = values.iter().filter(|&&v| v > statistic).count();
    (above + 1) as f64 / (values.len() + 1) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DrawSummary {
    pub replicates: usize,
    pub seed: u64,
}

/// Outcome of a bootstrap change-point test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestReport {
    pub kind: StatKind,
    pub statistic: f64,
    pub critical_value: f64,
    pub alpha: f64,
    /// `statistic > critical_value`.
    pub reject: bool,
    /// Add-one bootstrap p-value; an extension beyond the reject/accept rule.
    pub p_value: f64,
    pub draws: DrawSummary,
    /// Maximizing split (single) or forward and backward pairs (multi).
    pub argmax: Vec<ScanIndex>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Observed statistic together with its bootstrap draws, before a level is
/// chosen. One bootstrap run serves any number of `alpha` values.
#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapTest {
    pub kind: StatKind,
    pub statistic: f64,
    /// Maximizing split (single) or forward and backward pairs (multi).
    pub argmax: Vec<ScanIndex>,
    pub draws: BootstrapDraws,
    pub warnings: Vec<String>,
}

impl BootstrapTest {
    pub fn run(x: &DataMatrix, kind: StatKind, replicates: usize, seed: u64) -> Result<Self> {
        if replicates == 0 {
            return Err(Error::invalid("bootstrap replicate count must be at least 1"));
        }
        if x.n() < 4 {
            return Err(Error::TooFewObservations {
                what: "a change-point test",
                required: 4,
                actual: x.n(),
            });
        }
        let mut warnings = Vec::new();
        if replicates < RECOMMENDED_MIN_REPLICATES {
            warnings.push(format!(
                "only {replicates} bootstrap replicates; at least {RECOMMENDED_MIN_REPLICATES} are recommended"
            ));
        }
        let gram = GramTable::build(x);
        let (statistic, argmax) = match kind {
            StatKind::Single => {
                let profile = stats::single_scan(&gram)?;
                (profile.max_value, vec![profile.argmax])
            }
            StatKind::Multi => {
                let scan = stats::multi_scan(&gram)?;
                (scan.statistic, vec![scan.forward.argmax, scan.backward.argmax])
            }
        };
        let draws = bootstrap_draws(&centered_gram(x)?, kind, replicates, seed)?;
        Ok(Self {
            kind,
            statistic,
            argmax,
            draws,
            warnings,
        })
    }

    pub fn p_value(&self) -> f64 {
        bootstrap_p_value(&self.draws.values, self.statistic)
    }

    pub fn critical_value(&self, alpha: f64) -> Result<f64> {
        critical_value(&self.draws.values, alpha)
    }

    pub fn reject(&self, alpha: f64) -> Result<bool> {
        Ok(self.statistic > self.critical_value(alpha)?)
    }

    pub fn report(&self, alpha: f64) -> Result<TestReport> {
        let critical_value = self.critical_value(alpha)?;
        Ok(TestReport {
            kind: self.kind,
            statistic: self.statistic,
            critical_value,
            alpha,
            reject: self.statistic > critical_value,
            p_value: self.p_value(),
            draws: DrawSummary {
                replicates: self.draws.replicates(),
                seed: self.draws.seed,
            },
            argmax: self.argmax.clone(),
            warnings: self.warnings.clone(),
        })
    }
}

/// Bootstrap test of no change against a single change point, based on
/// `T_n = max_m G~_n(m)`.
pub fn test_single(x: &DataMatrix, alpha: f64, replicates: usize, seed: u64) -> Result<TestReport> {
    check_alpha(alpha)?;
    BootstrapTest::run(x, StatKind::Single, replicates, seed)?.report(alpha)
}

/// Bootstrap test of no change against multiple change points, based on the
/// forward/backward statistic `T_{n,M}`.
pub fn test_multi(x: &DataMatrix, alpha: f64, replicates: usize, seed: u64) -> Result<TestReport> {
    check_alpha(alpha)?;
    BootstrapTest::run(x, StatKind::Multi, replicates, seed)?.report(alpha)
}
