// SPDX-License-Identifier: MIT OR Apache-2.0

//! Heteroscedasticity screening before a mean-change analysis.
//!
//! Each coordinate gets a block-variance constancy test `U(n)`; the
//! coordinate p-values are then combined with the Higher Criticism statistic
//! whose null law is simulated.
//!
//! Block layout for a series of length `n` with tuning `(s, q)`:
//! `l = floor(n^s)`, `b = floor(n / l)`, only the first `N' = b l` points are
//! used, and the long-run estimate works on `b~ = floor(N' / l~)` inner blocks
//! of length `l~ = floor(n^q)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand_distr::{Distribution, Uniform};
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::rng;

/// Variance of the limiting normal law of the standardized statistic,
/// `4/3 + (8/pi)(sqrt 3 - 2)`.
pub fn limit_variance() -> f64 {
    4.0 / 3.0 + 8.0 / std::f64::consts::PI * (3f64.sqrt() - 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VarianceTestConfig {
    /// Block-length exponent `s`.
    pub s: f64,
    /// Long-run block exponent `q`.
    pub q: f64,
}

impl Default for VarianceTestConfig {
    fn default() -> Self {
        Self { s: 0.7, q: 0.5 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Layout {
    l: usize,
    b: usize,
    l_inner: usize,
    b_inner: usize,
}

impl VarianceTestConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.q && self.q < self.s && self.s < 1.0) {
            return Err(Error::invalid(format!(
                "variance test exponents need 0 < q < s < 1, got s = {}, q = {}",
                self.s, self.q
            )));
        }
        Ok(())
    }

    fn layout(&self, n: usize) -> Option<Layout> {
        let nf = n as f64;
        let l = nf.powf(self.s).floor() as usize;
        let l_inner = nf.powf(self.q).floor() as usize;
        if l < 2 || l_inner < 1 {
            return None;
        }
        let b = n / l;
        let b_inner = (b * l) / l_inner;
        (b >= 2 && b_inner >= 1).then_some(Layout { l, b, l_inner, b_inner })
    }

    /// Smallest series length accepted by the test.
    pub fn min_length(&self) -> usize {
        (1..).find(|&n| self.layout(n).is_some()).unwrap_or(usize::MAX)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceTestReport {
    pub u: f64,
    pub standardized: f64,
    /// Upper-tail p-value under the normal limit.
    pub p_value: f64,
    pub block_variances: Vec<f64>,
    pub kappa_star: f64,
}

/// Block-variance constancy test of one series. Rejects for large
/// `standardized` values.
pub fn variance_constancy_test(series: &[f64], cfg: &VarianceTestConfig) -> Result<VarianceTestReport> {
    cfg.validate()?;
    let n = series.len();
    let Some(Layout { l, b, l_inner, b_inner }) = cfg.layout(n) else {
        return Err(Error::TooFewObservations {
            what: "the variance constancy test",
            required: cfg.min_length(),
            actual: n,
        });
    };
    if let Some(i) = series.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { row: i + 1, col: 1 });
    }
    let used = b * l;
    let mut centered = Vec::with_capacity(used);
    let mut block_variances = Vec::with_capacity(b);
    for block in series[..used].chunks_exact(l) {
        let mean = block.iter().sum::<f64>() / l as f64;
        let start = centered.len();
        centered.extend(block.iter().map(|v| v - mean));
        let var = centered[start..].iter().map(|d| d * d).sum::<f64>() / l as f64;
        block_variances.push(var);
    }
    if let Some(j) = block_variances.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::Degenerate(format!("block {} has zero variance", j + 1)));
    }
    let logs: Vec<f64> = block_variances.iter().map(|v| v.ln()).collect();
    let mut pair_total = 0.0;
    for j in 0..b {
        for k in j + 1..b {
            pair_total += (logs[j] - logs[k]).abs();
        }
    }
    let u = 2.0 * pair_total / (b * (b - 1)) as f64;

    let sq: Vec<f64> = centered.iter().map(|d| d * d).collect();
    let sigma2_h = sq.iter().sum::<f64>() / used as f64;
    let inner_scale = (l_inner as f64).sqrt();
    let abs_sum: f64 = sq
        .chunks_exact(l_inner)
        .take(b_inner)
        .map(|c| (c.iter().map(|v| v - sigma2_h).sum::<f64>() / inner_scale).abs())
        .sum();
    let kappa_star = (std::f64::consts::PI / 2.0).sqrt() * abs_sum / (b_inner as f64 * sigma2_h);
    if !(kappa_star > 0.0) {
        return Err(Error::Degenerate("long-run variance estimate is zero".into()));
    }
    let standardized =
        (b as f64).sqrt() * ((l as f64).sqrt() / kappa_star * u - 2.0 / std::f64::consts::PI.sqrt());
    let limit = Normal::new(0.0, limit_variance().sqrt()).expect("positive variance");
    Ok(VarianceTestReport {
        u,
        standardized,
        p_value: limit.sf(standardized),
        block_variances,
        kappa_star,
    })
}

pub const HC_CLIP: f64 = 1e-12;
pub const DEFAULT_HC_DRAWS: usize = 10_000;

/// Higher Criticism over the lower half of the order statistics,
/// `max_{i <= max(1, floor(N/2))} sqrt(N) (i/N - p_(i)) / sqrt(p_(i) (1 - p_(i)))`.
/// Inputs must already lie strictly inside `(0, 1)`.
pub fn hc_statistic(p_values: &[f64]) -> f64 {
    let mut sorted = p_values.to_vec();
    sorted.sort_by(f64::total_cmp);
    hc_sorted(&sorted)
}

fn hc_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    let top = (sorted.len() / 2).max(1);
    sorted[..top]
        .iter()
        .enumerate()
        .map(|(i, &p)| n.sqrt() * ((i + 1) as f64 / n - p) / (p * (1.0 - p)).sqrt())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Simulated null distribution of HC for `len` independent uniforms,
/// sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct HcNull {
    pub len: usize,
    pub seed: u64,
    pub values: Vec<f64>,
}

impl HcNull {
    pub fn simulate(len: usize, draws: usize, seed: u64) -> Result<Self> {
        if len == 0 || draws == 0 {
            return Err(Error::invalid("HC null needs len >= 1 and draws >= 1"));
        }
        let unif = Uniform::new(HC_CLIP, 1.0 - HC_CLIP).expect("valid range");
        let mut values: Vec<f64> = (0..draws as u64)
            .into_par_iter()
            .map(|d| {
                let mut g = rng::stream(seed, rng::domain::HC_NULL, d);
                let mut p: Vec<f64> = (0..len).map(|_| unif.sample(&mut g)).collect();
                p.sort_by(f64::total_cmp);
                hc_sorted(&p)
            })
            .collect();
        values.sort_by(f64::total_cmp);
        Ok(Self { len, seed, values })
    }

    /// Shared instance for `(len, draws, seed)`, simulated once per process.
    pub fn cached(len: usize, draws: usize, seed: u64) -> Result<Arc<Self>> {
        type Cache = Mutex<HashMap<(usize, usize, u64), Arc<HcNull>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(hit) = cache.lock().expect("cache poisoned").get(&(len, draws, seed)) {
            return Ok(hit.clone());
        }
        let fresh = Arc::new(Self::simulate(len, draws, seed)?);
        let mut guard = cache.lock().expect("cache poisoned");
        Ok(guard.entry((len, draws, seed)).or_insert(fresh).clone())
    }

    /// `(#{null >= stat} + 1) / (draws + 1)`.
    pub fn p_value(&self, stat: f64) -> f64 {
        let below = self.values.partition_point(|v| *v < stat);
        (self.values.len() - below + 1) as f64 / (self.values.len() + 1) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HcResult {
    pub hc_stat: f64,
    pub p_value: f64,
    /// Inputs moved to `[1e-12, 1 - 1e-12]`.
    pub clipped: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Higher Criticism combination with a Monte Carlo null of `draws`
/// uniform vectors of the same length.
pub fn higher_criticism_with(p_values: &[f64], draws: usize, seed: u64) -> Result<HcResult> {
    if p_values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(p) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::invalid(format!("p-values must lie in [0, 1], got {p}")));
    }
    let mut clipped = 0;
    let p: Vec<f64> = p_values
        .iter()
        .map(|&v| {
            let c = v.clamp(HC_CLIP, 1.0 - HC_CLIP);
            clipped += usize::from(c != v);
            c
        })
        .collect();
    let mut warnings = Vec::new();
    if clipped > 0 {
        warnings.push(format!("{clipped} p-values clipped to [{HC_CLIP:e}, 1 - {HC_CLIP:e}]"));
    }
    let hc_stat = hc_statistic(&p);
    let null = HcNull::cached(p.len(), draws, seed)?;
    Ok(HcResult {
        hc_stat,
        p_value: null.p_value(hc_stat),
        clipped,
        warnings,
    })
}

pub fn higher_criticism(p_values: &[f64], seed: u64) -> Result<HcResult> {
    higher_criticism_with(p_values, DEFAULT_HC_DRAWS, seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoordinateResult {
    /// 1-based coordinate.
    pub index: usize,
    pub u: f64,
    pub standardized: f64,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScreenMethod {
    pub s: f64,
    pub q: f64,
    pub sidedness: &'static str,
    pub kappa_centering: &'static str,
    pub hc_null_draws: usize,
    pub hc_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScreenReport {
    pub coordinates: Vec<CoordinateResult>,
    pub combined: HcResult,
    /// 1-based coordinates left out of the combination.
    pub excluded: Vec<usize>,
    pub method: ScreenMethod,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Per-coordinate variance tests on the columns of `x`, combined by Higher
/// Criticism. Coordinates the test cannot handle (for example a constant
/// block) are excluded with a warning.
pub fn panel_heteroscedasticity_screen(
    x: &DataMatrix,
    cfg: &VarianceTestConfig,
    hc_draws: usize,
    seed: u64,
) -> Result<ScreenReport> {
    cfg.validate()?;
    if x.n() < cfg.min_length() {
        return Err(Error::TooFewObservations {
            what: "the variance constancy test",
            required: cfg.min_length(),
            actual: x.n(),
        });
    }
    let outcomes: Vec<_> = (0..x.p())
        .into_par_iter()
        .map(|l| (l + 1, variance_constancy_test(&x.column(l), cfg)))
        .collect();
    let mut coordinates = Vec::new();
    let mut excluded = Vec::new();
    let mut warnings = Vec::new();
    for (index, res) in outcomes {
        match res {
            Ok(r) => coordinates.push(CoordinateResult {
                index,
                u: r.u,
                standardized: r.standardized,
                p_value: r.p_value,
            }),
            Err(e) => {
                warnings.push(format!("coordinate {index} excluded: {e}"));
                excluded.push(index);
            }
        }
    }
    if coordinates.is_empty() {
        return Err(Error::Degenerate("every coordinate failed the variance test".into()));
    }
    let p: Vec<f64> = coordinates.iter().map(|c| c.p_value).collect();
    let combined = higher_criticism_with(&p, hc_draws, seed)?;
    Ok(ScreenReport {
        coordinates,
        combined,
        excluded,
        method: ScreenMethod {
            s: cfg.s,
            q: cfg.q,
            sidedness: "upper",
            kappa_centering: "variance-block means",
            hc_null_draws: hc_draws,
            hc_seed: seed,
        },
        warnings,
    })
}
