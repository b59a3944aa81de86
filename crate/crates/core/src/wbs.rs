// SPDX-License-Identifier: MIT OR Apache-2.0

//! Wild binary segmentation with a bootstrap threshold.
//!
//! `N` random intervals are drawn once. On each interval the statistic
//! `W(s, e) = max_{s+2 <= t <= e-2} G~(t; s, e)` is evaluated, and the
//! threshold `xi` is the 95% quantile of `max_m W*(s_m, e_m)` over `R`
//! bootstrap replicates, with one multiplier vector per replicate shared by
//! all intervals. Segmentation then recurses on `[s, t^]` and `[t^ + 1, e]`
//! using only intervals contained in the current segment.

use rand::RngExt;
use rayon::prelude::*;
use serde::Serialize;

use crate::bootstrap::{centered_gram, critical_value};
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::gram::{GramTable, IntervalSums, PairTable};
use crate::rng::{self, MultiplierStream};
use crate::stats;

/// Shortest admissible interval: `e - s >= MIN_SPAN`.
pub const MIN_SPAN: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalSet {
    /// `(s, e)` pairs, 1-based inclusive.
    pub intervals: Vec<(usize, usize)>,
    pub seed: u64,
}

impl IntervalSet {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WbsConfig {
    /// Number of random intervals `N`.
    pub intervals: usize,
    /// Bootstrap replicates `R` for the threshold.
    pub replicates: usize,
    pub quantile_level: f64,
    pub seed: u64,
}

impl Default for WbsConfig {
    fn default() -> Self {
        Self {
            intervals: 1000,
            replicates: 200,
            quantile_level: 0.95,
            seed: 0,
        }
    }
}

impl WbsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.intervals == 0 {
            return Err(Error::invalid("WBS needs at least one interval"));
        }
        if self.replicates == 0 {
            return Err(Error::invalid("WBS needs at least one bootstrap replicate"));
        }
        if !(self.quantile_level > 0.0 && self.quantile_level < 1.0) {
            return Err(Error::invalid(format!(
                "quantile level must lie in (0, 1), got {}",
                self.quantile_level
            )));
        }
        Ok(())
    }
}

/// Draws `count` intervals uniformly from `{(s, e) : 1 <= s < e <= n, e - s >= 4}`
/// by rejection from the `n x n` grid.
pub fn draw_intervals(n: usize, count: usize, seed: u64) -> Result<IntervalSet> {
    if n < MIN_SPAN + 1 {
        return Err(Error::TooFewObservations {
            what: "random interval sampling",
            required: MIN_SPAN + 1,
            actual: n,
        });
    }
    let mut rng = rng::stream(seed, rng::domain::INTERVALS, 0);
    let mut intervals = Vec::with_capacity(count);
    while intervals.len() < count {
        let s = rng.random_range(1..=n);
        let e = rng.random_range(1..=n);
        if e >= s + MIN_SPAN {
            intervals.push((s, e));
        }
    }
    Ok(IntervalSet { intervals, seed })
}

fn check_interval(n: usize, s: usize, e: usize) -> Result<()> {
    if s == 0 || e > n || e < s + MIN_SPAN {
        return Err(Error::IndexOutOfRange(format!(
            "interval ({s}, {e}) needs 1 <= s, e <= n = {n} and e - s >= {MIN_SPAN}"
        )));
    }
    Ok(())
}

/// `W(s, e)` and the smallest maximizing split `t^`.
pub fn interval_stat<S: IntervalSums + ?Sized>(sums: &S, s: usize, e: usize) -> Result<(f64, usize)> {
    check_interval(sums.len(), s, e)?;
    Ok(stats::interval_max(sums, s, e))
}

/// Bootstrap maxima `xi^i = max_m W*_i(s_m, e_m)` for `i = 0..replicates`,
/// with multipliers supplied by `fill(i, buf)`.
fn threshold_draws<F>(centered: &GramTable, intervals: &IntervalSet, replicates: usize, fill: F) -> Vec<f64>
where
    F: Fn(u64, &mut [f64]) + Sync,
{
    let n = centered.len();
    (0..replicates as u64)
        .into_par_iter()
        .map_init(
            || (vec![0.0; n], PairTable::new(n)),
            |(e, pairs), i| {
                fill(i, e);
                pairs.fill_weighted(centered, e);
                intervals
                    .intervals
                    .iter()
                    .map(|&(s, t)| stats::interval_max(pairs, s, t).0)
                    .fold(f64::NEG_INFINITY, f64::max)
            },
        )
        .collect()
}

fn check_calibration_inputs(x: &DataMatrix, intervals: &IntervalSet, cfg: &WbsConfig) -> Result<()> {
    cfg.validate()?;
    if intervals.is_empty() {
        return Err(Error::invalid("threshold calibration needs a nonempty interval set"));
    }
    for &(s, e) in &intervals.intervals {
        check_interval(x.n(), s, e)?;
    }
    Ok(())
}

/// Bootstrap maxima over the interval set, one per replicate.
pub fn bootstrap_interval_maxima(x: &DataMatrix, intervals: &IntervalSet, cfg: &WbsConfig) -> Result<Vec<f64>> {
    check_calibration_inputs(x, intervals, cfg)?;
    let centered = centered_gram(x)?;
    Ok(threshold_draws(&centered, intervals, cfg.replicates, |i, buf| {
        MultiplierStream::new(cfg.seed, i).fill(buf)
    }))
}

/// Threshold `xi_n`: the `quantile_level` empirical quantile of the bootstrap
/// interval maxima, with the same order-statistic rule as
/// [`critical_value`].
pub fn calibrate_threshold(x: &DataMatrix, intervals: &IntervalSet, cfg: &WbsConfig) -> Result<f64> {
    let draws = bootstrap_interval_maxima(x, intervals, cfg)?;
    critical_value(&draws, 1.0 - cfg.quantile_level)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Detection {
    /// Interval `(s, e)` that attained the segment maximum.
    pub interval: (usize, usize),
    /// `W(s, e)` on that interval.
    pub statistic: f64,
    /// Estimated change location `t^`: last index before the change.
    pub location: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChangePointEstimate {
    /// Strictly increasing change locations.
    pub locations: Vec<usize>,
    pub threshold: f64,
    /// Detections in discovery order.
    pub detections: Vec<Detection>,
}

/// Interval statistics precomputed on the raw data.
#[derive(Clone, Debug)]
pub struct IntervalScores {
    pub intervals: IntervalSet,
    /// `(W, t^)` per interval, aligned with `intervals`.
    pub scores: Vec<(f64, usize)>,
}

impl IntervalScores {
    pub fn compute(gram: &GramTable, intervals: IntervalSet) -> Result<Self> {
        for &(s, e) in &intervals.intervals {
            check_interval(gram.len(), s, e)?;
        }
        let scores = intervals
            .intervals
            .par_iter()
            .map(|&(s, e)| stats::interval_max(gram, s, e))
            .collect();
        Ok(Self { intervals, scores })
    }

    /// Runs the segmentation recursion from `[1, n]` with a fixed threshold.
    pub fn segment(&self, n: usize, threshold: f64) -> ChangePointEstimate {
        let mut detections = Vec::new();
        self.recurse(1, n, threshold, &mut detections);
        let mut locations: Vec<usize> = detections.iter().map(|d| d.location).collect();
        locations.sort_unstable();
        ChangePointEstimate {
            locations,
            threshold,
            detections,
        }
    }

    fn recurse(&self, s: usize, e: usize, threshold: f64, out: &mut Vec<Detection>) {
        if e < s + MIN_SPAN {
            return;
        }
        // strict containment: s <= s_m and e_m <= e; first index wins ties
        let best = self
            .intervals
            .intervals
            .iter()
            .zip(&self.scores)
            .filter(|((sm, em), _)| s <= *sm && *em <= e)
            .fold(None, |best: Option<(&(usize, usize), &(f64, usize))>, cand| match best {
                Some((_, (bw, _))) if cand.1 .0 <= *bw => best,
                _ => Some(cand),
            });
        let Some((&interval, &(w, t))) = best else {
            return;
        };
        if w > threshold {
            out.push(Detection {
                interval,
                statistic: w,
                location: t,
            });
            self.recurse(s, t, threshold, out);
            self.recurse(t + 1, e, threshold, out);
        }
    }
}

/// Estimates change locations by bootstrap-thresholded WBS.
pub fn wbs_estimate(x: &DataMatrix, cfg: &WbsConfig) -> Result<ChangePointEstimate> {
    cfg.validate()?;
    let n = x.n();
    let intervals = draw_intervals(n, cfg.intervals, cfg.seed)?;
    let threshold = calibrate_threshold(x, &intervals, cfg)?;
    let scores = IntervalScores::compute(&GramTable::build(x), intervals)?;
    Ok(scores.segment(n, threshold))
}

fn check_locations(locs: &[usize], n: usize, name: &str) -> Result<()> {
    for w in locs.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::invalid(format!("{name} locations must be strictly increasing")));
        }
    }
    if let Some(&bad) = locs.iter().find(|&&t| t == 0 || t >= n) {
        return Err(Error::invalid(format!("{name} location {bad} outside [1, {}]", n - 1)));
    }
    Ok(())
}

/// Segment labels of `1..=n` induced by change locations.
fn labels(locs: &[usize], n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    for i in 1..=n {
        out.push(seg);
        if seg < locs.len() && i == locs[seg] {
            seg += 1;
        }
    }
    out
}

fn choose2(k: usize) -> f64 {
    let k = k as f64;
    k * (k - 1.0) / 2.0
}

/// Adjusted Rand index between the segmentations of `1..=n` induced by two
/// sets of change locations (permutation-model ARI over the contingency
/// table). Returns 0 when nothing was estimated but the truth has changes.
pub fn adjusted_rand_index(estimated: &[usize], truth: &[usize], n: usize) -> Result<f64> {
    check_locations(estimated, n, "estimated")?;
    check_locations(truth, n, "true")?;
    if estimated.is_empty() && !truth.is_empty() {
        return Ok(0.0);
    }
    let la = labels(estimated, n);
    let lb = labels(truth, n);
    let (ka, kb) = (estimated.len() + 1, truth.len() + 1);
    let mut table = vec![0usize; ka * kb];
    for (a, b) in la.iter().zip(&lb) {
        table[a * kb + b] += 1;
    }
    let index: f64 = table.iter().map(|&c| choose2(c)).sum();
    let rows: f64 = (0..ka).map(|a| choose2(table[a * kb..(a + 1) * kb].iter().sum())).sum();
    let cols: f64 = (0..kb).map(|b| choose2((0..ka).map(|a| table[a * kb + b]).sum())).sum();
    let expected = rows * cols / choose2(n);
    let max = 0.5 * (rows + cols);
    if max == expected {
        return Ok(if estimated == truth { 1.0 } else { 0.0 });
    }
    Ok((index - expected) / (max - expected))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift_panel(n: usize, p: usize, breaks: &[usize], size: f64) -> DataMatrix {
        let mut v = Vec::with_capacity(n * p);
        for i in 1..=n {
            let level = breaks.iter().filter(|&&b| i > b).count();
            let mu = if level % 2 == 1 { size } else { 0.0 };
            for l in 0..p {
                // deterministic small wiggle
                v.push(mu + 0.05 * (((i * 31 + l * 7) % 13) as f64 - 6.0) / 6.0);
            }
        }
        DataMatrix::new(n, p, v).unwrap()
    }

    #[test]
    fn n5_has_single_support() {
        let set = draw_intervals(5, 20, 1).unwrap();
        assert!(set.intervals.iter().all(|&iv| iv == (1, 5)));
        assert!(draw_intervals(4, 1, 1).is_err());
    }

    #[test]
    fn intervals_respect_length_and_seed() {
        let a = draw_intervals(100, 1000, 8).unwrap();
        assert!(a.intervals.iter().all(|&(s, e)| s >= 1 && e <= 100 && e - s >= 4));
        assert_eq!(a, draw_intervals(100, 1000, 8).unwrap());
        assert_ne!(a, draw_intervals(100, 1000, 9).unwrap());
    }

    #[test]
    fn interval_stat_reduces_to_single_scan() {
        let x = shift_panel(30, 3, &[13], 1.0);
        let g = GramTable::build(&x);
        let prof = stats::single_scan(&g).unwrap();
        let (w, t) = interval_stat(&g, 1, 30).unwrap();
        assert_eq!(w, prof.max_value);
        assert_eq!(stats::ScanIndex::Split(t), prof.argmax);
        assert!(interval_stat(&g, 3, 6).is_err());
        assert_eq!(interval_stat(&GramTable::build(&DataMatrix::zeros(9, 2)), 2, 9).unwrap().0, 0.0);
    }

    #[test]
    fn interval_stat_finds_noiseless_break() {
        let rows: Vec<[f64; 2]> = (1..=40).map(|i| if i <= 22 { [0.0, 0.0] } else { [1.0, -1.0] }).collect();
        let g = GramTable::build(&DataMatrix::from_rows(&rows).unwrap());
        for (s, e) in [(10, 35), (19, 26), (1, 40), (5, 30)] {
            assert_eq!(interval_stat(&g, s, e).unwrap().1, 22, "interval ({s}, {e})");
        }
    }

    #[test]
    fn zero_multipliers_zero_threshold() {
        let x = shift_panel(20, 2, &[], 0.0);
        let c = centered_gram(&x).unwrap();
        let set = draw_intervals(20, 30, 2).unwrap();
        let d = threshold_draws(&c, &set, 5, |_, buf| buf.iter_mut().for_each(|v| *v = 0.0));
        assert_eq!(critical_value(&d, 0.05).unwrap(), 0.0);
    }

    #[test]
    fn single_replicate_threshold_is_that_draw() {
        let x = shift_panel(25, 3, &[10], 0.3);
        let set = draw_intervals(25, 40, 3).unwrap();
        let cfg = WbsConfig {
            intervals: 40,
            replicates: 1,
            quantile_level: 0.95,
            seed: 4,
        };
        let draws = bootstrap_interval_maxima(&x, &set, &cfg).unwrap();
        assert_eq!(calibrate_threshold(&x, &set, &cfg).unwrap(), draws[0]);
    }

    #[test]
    fn zero_data_has_no_detections() {
        let cfg = WbsConfig {
            intervals: 50,
            replicates: 20,
            ..WbsConfig::default()
        };
        let est = wbs_estimate(&DataMatrix::zeros(30, 3), &cfg).unwrap();
        assert!(est.locations.is_empty());
    }

    #[test]
    fn recursion_finds_clear_breaks_within_scan_bounds() {
        let x = shift_panel(60, 4, &[20, 40], 3.0);
        let cfg = WbsConfig {
            intervals: 300,
            replicates: 50,
            quantile_level: 0.95,
            seed: 12,
        };
        let est = wbs_estimate(&x, &cfg).unwrap();
        assert_eq!(est.locations, vec![20, 40]);
        for d in &est.detections {
            assert!(d.location >= d.interval.0 + 2 && d.location + 2 <= d.interval.1);
        }
        assert_eq!(est, wbs_estimate(&x, &cfg).unwrap());
    }

    #[test]
    fn whole_range_interval_reproduces_single_scan() {
        let x = shift_panel(30, 3, &[17], 0.5);
        let g = GramTable::build(&x);
        let set = IntervalSet {
            intervals: vec![(1, 30)],
            seed: 0,
        };
        let scores = IntervalScores::compute(&g, set).unwrap();
        let est = scores.segment(30, -1.0);
        let prof = stats::single_scan(&g).unwrap();
        assert_eq!(stats::ScanIndex::Split(est.detections[0].location), prof.argmax);
    }

    #[test]
    fn higher_level_never_adds_detections() {
        let x = shift_panel(50, 3, &[15, 33], 0.15);
        let set = draw_intervals(50, 200, 5).unwrap();
        let mut cfg = WbsConfig {
            intervals: 200,
            replicates: 100,
            quantile_level: 0.5,
            seed: 6,
        };
        let scores = IntervalScores::compute(&GramTable::build(&x), set.clone()).unwrap();
        let mut last: Option<(f64, usize)> = None;
        for level in [0.5, 0.8, 0.95, 0.99] {
            cfg.quantile_level = level;
            let xi = calibrate_threshold(&x, &set, &cfg).unwrap();
            let k = scores.segment(50, xi).locations.len();
            if let Some((px, pk)) = last {
                assert!(xi >= px);
                assert!(k <= pk);
            }
            last = Some((xi, k));
        }
    }

    fn ari_by_pairs(a: &[usize], b: &[usize], n: usize) -> f64 {
        let la = labels(a, n);
        let lb = labels(b, n);
        let (mut ss, mut sd, mut ds, mut dd) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            for j in i + 1..n {
                match (la[i] == la[j], lb[i] == lb[j]) {
                    (true, true) => ss += 1.0,
                    (true, false) => sd += 1.0,
                    (false, true) => ds += 1.0,
                    (false, false) => dd += 1.0,
                }
            }
        }
        2.0 * (ss * dd - sd * ds) / ((ss + sd) * (sd + dd) + (ss + ds) * (ds + dd))
    }

    #[test]
    fn ari_reference_cases() {
        let truth = [30, 60, 90];
        assert_eq!(adjusted_rand_index(&truth, &truth, 120).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&[], &truth, 120).unwrap(), 0.0);
        let got = adjusted_rand_index(&[29, 61, 90], &truth, 120).unwrap();
        let want = ari_by_pairs(&[29, 61, 90], &truth, 120);
        assert!((got - want).abs() < 1e-12);
        assert!(got < 1.0 && got > 0.9);
        for est in [&[50usize][..], &[10, 20, 30, 100], &[60]] {
            let got = adjusted_rand_index(est, &truth, 120).unwrap();
            assert!((got - ari_by_pairs(est, &truth, 120)).abs() < 1e-12);
        }
    }

    #[test]
    fn ari_input_validation() {
        assert!(adjusted_rand_index(&[5, 3], &[2], 10).is_err());
        assert!(adjusted_rand_index(&[10], &[2], 10).is_err());
        assert!(adjusted_rand_index(&[0], &[2], 10).is_err());
        assert_eq!(adjusted_rand_index(&[], &[], 10).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&[4], &[], 10).unwrap(), 0.0);
    }
}
