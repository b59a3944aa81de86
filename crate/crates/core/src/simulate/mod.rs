// SPDX-License-Identifier: MIT OR Apache-2.0

//! Data-generating processes `X_i = mu_i + H(i/n) Z_i` with Gaussian `Z_i`.
//!
//! `Z` rows are drawn without any matrix factorization: AR(rho) rows by the
//! scalar recursion `z_1 = eps_1, z_l = rho z_{l-1} + sqrt(1 - rho^2) eps_l`,
//! compound-symmetric rows by the one-factor form
//! `z = sqrt(rho) w 1 + sqrt(1 - rho) eps`.

mod experiment;
mod scenario;

pub use experiment::{
    run_power_curve, run_rejection_experiment, run_size_experiment, run_wbs_experiment, PowerPoint, RateRow,
    RepOutcome, SizeExperiment, WbsExperiment, WbsRep,
};
pub use scenario::{wbs_plan, Scenario, ScenarioKind};

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Covariance {
    /// `Sigma_ij = rho^|i-j|`; `rho = 0` is the identity.
    Ar { rho: f64 },
    /// `Sigma_ij = rho^{1(i != j)}`.
    CompoundSymmetry { rho: f64 },
}

impl Covariance {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Covariance::Ar { rho } if !(rho > -1.0 && rho < 1.0) => {
                Err(Error::invalid(format!("AR coefficient must lie in (-1, 1), got {rho}")))
            }
            Covariance::CompoundSymmetry { rho } if !(0.0..1.0).contains(&rho) => {
                Err(Error::invalid(format!("compound-symmetry rho must lie in [0, 1), got {rho}")))
            }
            _ => Ok(()),
        }
    }

    /// Closed-form entry `Sigma_ij`, 0-based.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match *self {
            Covariance::Ar { rho } => rho.powi(i.abs_diff(j) as i32),
            Covariance::CompoundSymmetry { rho } => {
                if i == j {
                    1.0
                } else {
                    rho
                }
            }
        }
    }

    /// `||Sigma||_F` in dimension `p`.
    pub fn frobenius_norm(&self, p: usize) -> f64 {
        let mut total = 0.0;
        for d in 0..p {
            let v = self.entry(0, d);
            let count = if d == 0 { p } else { 2 * (p - d) };
            total += count as f64 * v * v;
        }
        total.sqrt()
    }

    fn sample_row<R: rand::Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match *self {
            Covariance::Ar { rho } => {
                let innov = (1.0 - rho * rho).sqrt();
                let mut prev = 0.0;
                for (l, z) in out.iter_mut().enumerate() {
                    let eps: f64 = StandardNormal.sample(rng);
                    prev = if l == 0 { eps } else { rho * prev + innov * eps };
                    *z = prev;
                }
            }
            Covariance::CompoundSymmetry { rho } => {
                let w: f64 = StandardNormal.sample(rng);
                let common = rho.sqrt() * w;
                let idio = (1.0 - rho).sqrt();
                for z in out.iter_mut() {
                    let eps: f64 = StandardNormal.sample(rng);
                    *z = common + idio * eps;
                }
            }
        }
    }
}

/// Time-varying standard-deviation profile `H(i/n)` (diagonal).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    /// No trend.
    A0,
    /// `0.2` up to `n/2`, `0.6` after.
    A1,
    /// `i/n`.
    A2,
    /// `0.2 (1 + cos^2(i / n^{4/5}))`.
    A3,
    /// `0.2 + 0.1 log(1 + |i - n/2|)`.
    A4,
    /// `first` on coordinates `1..=p/2`, `second` on the rest.
    Mix(Box<Trend>, Box<Trend>),
}

impl Trend {
    pub fn mix(first: Trend, second: Trend) -> Self {
        Trend::Mix(Box::new(first), Box::new(second))
    }

    /// `H_ll(i/n)` for 1-based time `i` and 0-based coordinate `l`.
    pub fn scale(&self, i: usize, n: usize, l: usize, p: usize) -> f64 {
        let t = i as f64;
        let nf = n as f64;
        match self {
            Trend::A0 => 1.0,
            // n/2 is the real number, not floored
            Trend::A1 => {
                if t <= nf / 2.0 {
                    0.2
                } else {
                    0.6
                }
            }
            Trend::A2 => t / nf,
            Trend::A3 => {
                let c = (t / nf.powf(0.8)).cos();
                0.2 * (1.0 + c * c)
            }
            Trend::A4 => 0.2 + 0.1 * (1.0 + (t - nf / 2.0).abs()).ln(),
            Trend::Mix(first, second) => {
                if l < p / 2 {
                    first.scale(i, n, l, p)
                } else {
                    second.scale(i, n, l, p)
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Trend::A0 => "A0".into(),
            Trend::A1 => "A1".into(),
            Trend::A2 => "A2".into(),
            Trend::A3 => "A3".into(),
            Trend::A4 => "A4".into(),
            Trend::Mix(a, b) => format!("{}+{}", a.label(), b.label()),
        }
    }

    /// Parses `a0`..`a4` and mixtures such as `a1+a2` or `a1a2`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        let single = |t: &str| match t {
            "a0" => Ok(Trend::A0),
            "a1" => Ok(Trend::A1),
            "a2" => Ok(Trend::A2),
            "a3" => Ok(Trend::A3),
            "a4" => Ok(Trend::A4),
            other => Err(Error::invalid(format!("unknown trend {other:?}"))),
        };
        if let Some((a, b)) = s.split_once('+') {
            return Ok(Trend::mix(single(a)?, single(b)?));
        }
        if s.len() == 4 {
            return Ok(Trend::mix(single(&s[..2])?, single(&s[2..])?));
        }
        single(&s)
    }

    /// The eight trend types of the size study.
    pub fn all() -> Vec<Trend> {
        vec![
            Trend::A0,
            Trend::A1,
            Trend::A2,
            Trend::A3,
            Trend::A4,
            Trend::mix(Trend::A1, Trend::A2),
            Trend::mix(Trend::A1, Trend::A3),
            Trend::mix(Trend::A1, Trend::A4),
        ]
    }
}

/// Mean sequence `mu_i`. Shift vectors have length `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeanPlan {
    Null,
    /// `mu_i = delta` for `i > after`, zero before.
    OneCp { after: usize, delta: Vec<f64> },
    /// `mu_i = delta` for `floor(n/3) <= i <= floor(2n/3)`.
    TwoCp { delta: Vec<f64> },
    /// `mu_i = delta` on `floor(n/4) <= i <= floor(n/2)` and `floor(3n/4) <= i <= n`.
    ThreeCp { delta: Vec<f64> },
    /// Piecewise-constant zones: the level starts at zero and `jumps[j]` is
    /// added after `locations[j]`.
    Zones {
        locations: Vec<usize>,
        jumps: Vec<Vec<f64>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub n: usize,
    pub p: usize,
    pub covariance: Covariance,
    pub trend: Trend,
    pub mean: MeanPlan,
}

impl ScenarioSpec {
    pub fn null(n: usize, p: usize, covariance: Covariance, trend: Trend) -> Self {
        Self {
            n,
            p,
            covariance,
            trend,
            mean: MeanPlan::Null,
        }
    }

    pub fn with_mean(mut self, mean: MeanPlan) -> Self {
        self.mean = mean;
        self
    }

    /// Last index before each mean change (1-based), ascending.
    pub fn change_locations(&self) -> Vec<usize> {
        let n = self.n;
        match &self.mean {
            MeanPlan::Null => vec![],
            MeanPlan::OneCp { after, .. } => vec![*after],
            MeanPlan::TwoCp { .. } => vec![(n / 3).saturating_sub(1), 2 * n / 3],
            MeanPlan::ThreeCp { .. } => vec![(n / 4).saturating_sub(1), n / 2, (3 * n / 4).saturating_sub(1)],
            MeanPlan::Zones { locations, .. } => locations.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.covariance.validate()?;
        if self.n == 0 || self.p == 0 {
            return Err(Error::invalid("scenario needs n >= 1 and p >= 1"));
        }
        if matches!(self.trend, Trend::Mix(..)) && self.p < 2 {
            return Err(Error::invalid("mixed trends need p >= 2"));
        }
        let check_len = |d: &Vec<f64>| {
            if d.len() != self.p {
                Err(Error::DimensionMismatch {
                    expected: self.p,
                    actual: d.len(),
                })
            } else {
                Ok(())
            }
        };
        match &self.mean {
            MeanPlan::Null => {}
            MeanPlan::OneCp { delta, .. } | MeanPlan::TwoCp { delta } | MeanPlan::ThreeCp { delta } => {
                check_len(delta)?
            }
            MeanPlan::Zones { locations, jumps } => {
                if locations.len() != jumps.len() {
                    return Err(Error::invalid("zone plan needs one jump per location"));
                }
                jumps.iter().try_for_each(check_len)?;
                if locations.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::invalid("zone locations must be strictly increasing"));
                }
            }
        }
        if self.change_locations().iter().any(|&t| t < 1 || t >= self.n) {
            return Err(Error::invalid(format!(
                "change locations {:?} must lie in [1, n-1] for n = {}",
                self.change_locations(),
                self.n
            )));
        }
        Ok(())
    }

    /// Writes `mu_i` (1-based `i`) into `out`.
    pub fn mean_at(&self, i: usize, out: &mut [f64]) {
        let n = self.n;
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut add = |d: &[f64]| out.iter_mut().zip(d).for_each(|(o, v)| *o += v);
        match &self.mean {
            MeanPlan::Null => {}
            MeanPlan::OneCp { after, delta } => {
                if i > *after {
                    add(delta)
                }
            }
            MeanPlan::TwoCp { delta } => {
                if n / 3 <= i && i <= 2 * n / 3 {
                    add(delta)
                }
            }
            MeanPlan::ThreeCp { delta } => {
                if (n / 4 <= i && i <= n / 2) || 3 * n / 4 <= i {
                    add(delta)
                }
            }
            MeanPlan::Zones { locations, jumps } => {
                for (t, d) in locations.iter().zip(jumps) {
                    if i > *t {
                        add(d)
                    }
                }
            }
        }
    }
}

/// Draws one panel from `spec`. Deterministic in `seed`.
pub fn sample_panel(spec: &ScenarioSpec, seed: u64) -> Result<DataMatrix> {
    spec.validate()?;
    let (n, p) = (spec.n, spec.p);
    let mut rng = rng::stream(seed, rng::domain::PANEL, 0);
    let mut values = vec![0.0; n * p];
    let mut z = vec![0.0; p];
    let mut mu = vec![0.0; p];
    for i in 1..=n {
        spec.covariance.sample_row(&mut rng, &mut z);
        spec.mean_at(i, &mut mu);
        let row = &mut values[(i - 1) * p..i * p];
        for l in 0..p {
            row[l] = mu[l] + spec.trend.scale(i, n, l, p) * z[l];
        }
    }
    DataMatrix::new(n, p, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trend_values() {
        assert_eq!(Trend::A1.scale(50, 100, 0, 4), 0.2);
        assert_eq!(Trend::A1.scale(51, 100, 0, 4), 0.6);
        // odd n: n/2 = 50.5 is not floored
        assert_eq!(Trend::A1.scale(50, 101, 0, 4), 0.2);
        assert_eq!(Trend::A1.scale(51, 101, 0, 4), 0.6);
        assert_eq!(Trend::A2.scale(25, 100, 0, 4), 0.25);
        assert!((Trend::A4.scale(50, 100, 0, 4) - 0.2).abs() < 1e-15);
        let a3 = Trend::A3.scale(7, 100, 0, 4);
        let c = (7.0 / 100f64.powf(0.8)).cos();
        assert!((a3 - 0.2 * (1.0 + c * c)).abs() < 1e-15);
        let mix = Trend::mix(Trend::A1, Trend::A2);
        assert_eq!(mix.scale(80, 100, 1, 4), 0.6);
        assert_eq!(mix.scale(80, 100, 2, 4), 0.8);
    }

    #[test]
    fn trend_parsing() {
        assert_eq!(Trend::parse("A2").unwrap(), Trend::A2);
        assert_eq!(Trend::parse("a1+a3").unwrap(), Trend::mix(Trend::A1, Trend::A3));
        assert_eq!(Trend::parse("a1a4").unwrap(), Trend::mix(Trend::A1, Trend::A4));
        assert!(Trend::parse("a7").is_err());
        assert_eq!(Trend::mix(Trend::A1, Trend::A2).label(), "A1+A2");
    }

    #[test]
    fn mean_plans_place_changes() {
        let d = vec![1.0; 2];
        let spec = ScenarioSpec::null(12, 2, Covariance::Ar { rho: 0.0 }, Trend::A0)
            .with_mean(MeanPlan::TwoCp { delta: d.clone() });
        let mut mu = vec![0.0; 2];
        let on: Vec<usize> = (1..=12)
            .filter(|&i| {
                spec.mean_at(i, &mut mu);
                mu[0] != 0.0
            })
            .collect();
        assert_eq!(on, (4..=8).collect::<Vec<_>>());
        assert_eq!(spec.change_locations(), vec![3, 8]);

        let spec = spec.with_mean(MeanPlan::ThreeCp { delta: d });
        let on: Vec<usize> = (1..=12)
            .filter(|&i| {
                spec.mean_at(i, &mut mu);
                mu[0] != 0.0
            })
            .collect();
        assert_eq!(on, vec![3, 4, 5, 6, 9, 10, 11, 12]);
        assert_eq!(spec.change_locations(), vec![2, 6, 8]);
    }

    #[test]
    fn validation() {
        let base = ScenarioSpec::null(10, 3, Covariance::Ar { rho: 1.0 }, Trend::A0);
        assert!(base.validate().is_err());
        let base = ScenarioSpec::null(10, 1, Covariance::CompoundSymmetry { rho: 0.5 }, Trend::mix(Trend::A1, Trend::A2));
        assert!(base.validate().is_err());
        let bad = ScenarioSpec::null(10, 3, Covariance::Ar { rho: 0.5 }, Trend::A0).with_mean(MeanPlan::OneCp {
            after: 10,
            delta: vec![1.0; 3],
        });
        assert!(bad.validate().is_err());
        let bad = ScenarioSpec::null(10, 3, Covariance::Ar { rho: 0.5 }, Trend::A0).with_mean(MeanPlan::OneCp {
            after: 4,
            delta: vec![1.0; 2],
        });
        assert!(bad.validate().is_err());
    }

    #[test]
    fn frobenius_matches_entrywise_sum() {
        for cov in [Covariance::Ar { rho: 0.5 }, Covariance::CompoundSymmetry { rho: 0.5 }] {
            let p = 17;
            let direct: f64 = (0..p)
                .flat_map(|i| (0..p).map(move |j| (i, j)))
                .map(|(i, j)| cov.entry(i, j).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!((cov.frobenius_norm(p) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn panel_is_seed_deterministic() {
        let spec = ScenarioSpec::null(20, 4, Covariance::Ar { rho: 0.5 }, Trend::A3);
        assert_eq!(sample_panel(&spec, 3).unwrap(), sample_panel(&spec, 3).unwrap());
        assert_ne!(sample_panel(&spec, 3).unwrap(), sample_panel(&spec, 4).unwrap());
    }
}
