// SPDX-License-Identifier: MIT OR Apache-2.0

//! Monte Carlo drivers for size, power and segmentation studies.
//!
//! Replication `r` draws its panel from `child_seed(seed, PANEL, r)` and its
//! bootstrap multipliers from `child_seed(seed, MULTIPLIERS, r)`; results are
//! collected in replication order, so tallies do not depend on the number of
//! worker threads.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::{sample_panel, MeanPlan, ScenarioSpec};
use crate::bootstrap::{BootstrapTest, StatKind};
use crate::error::{Error, Result};
use crate::rng::{child_seed, domain};
use crate::wbs::{adjusted_rand_index, wbs_estimate, WbsConfig};

/// One cell of a rejection-rate table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateRow {
    pub scenario: String,
    pub alpha: f64,
    pub rate: f64,
    /// Binomial standard error `sqrt(rate (1 - rate) / reps)`.
    pub se: f64,
    pub reps: usize,
    pub rejections: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepOutcome {
    pub statistic: f64,
    pub p_value: f64,
    /// Decision per requested alpha, in request order.
    pub rejected: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeExperiment {
    pub rows: Vec<RateRow>,
    pub outcomes: Vec<RepOutcome>,
}

impl SizeExperiment {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(&self.rows, out)
    }
}

pub(crate) fn write_rows<W: Write, T: Serialize>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn check_reps(reps: usize, alphas: &[f64]) -> Result<()> {
    if reps == 0 {
        return Err(Error::invalid("experiment needs at least one replication"));
    }
    if alphas.is_empty() {
        return Err(Error::invalid("experiment needs at least one alpha"));
    }
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {a}")));
    }
    Ok(())
}

fn standard_error(rate: f64, reps: usize) -> f64 {
    (rate * (1.0 - rate) / reps as f64).sqrt()
}

/// Rejection rates of the bootstrap test over `reps` fresh panels drawn
/// from `spec`, for every level in `alphas`. Works for null and alternative
/// plans alike.
pub fn run_rejection_experiment(
    scenario: &str,
    spec: &ScenarioSpec,
    kind: StatKind,
    alphas: &[f64],
    reps: usize,
    replicates: usize,
    seed: u64,
) -> Result<SizeExperiment> {
    check_reps(reps, alphas)?;
    spec.validate()?;
    let outcomes = (0..reps as u64)
        .into_par_iter()
        .map(|r| -> Result<RepOutcome> {
            let x = sample_panel(spec, child_seed(seed, domain::PANEL, r))?;
            let test = BootstrapTest::run(&x, kind, replicates, child_seed(seed, domain::MULTIPLIERS, r))?;
            let rejected = alphas.iter().map(|&a| test.reject(a)).collect::<Result<_>>()?;
            Ok(RepOutcome {
                statistic: test.statistic,
                p_value: test.p_value(),
                rejected,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = alphas
        .iter()
        .enumerate()
        .map(|(k, &alpha)| {
            let rejections = outcomes.iter().filter(|o| o.rejected[k]).count();
            let rate = rejections as f64 / reps as f64;
            RateRow {
                scenario: scenario.to_owned(),
                alpha,
                rate,
                se: standard_error(rate, reps),
                reps,
                rejections,
            }
        })
        .collect();
    Ok(SizeExperiment { rows, outcomes })
}

/// Empirical size under a null scenario.
pub fn run_size_experiment(
    scenario: &str,
    spec: &ScenarioSpec,
    kind: StatKind,
    alphas: &[f64],
    reps: usize,
    replicates: usize,
    seed: u64,
) -> Result<SizeExperiment> {
    if spec.mean != MeanPlan::Null {
        return Err(Error::invalid("size experiments need a null mean plan"));
    }
    run_rejection_experiment(scenario, spec, kind, alphas, reps, replicates, seed)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerPoint {
    pub delta: f64,
    pub rate: f64,
    pub se: f64,
    pub reps: usize,
}

/// Single-change power as the shift grows. Each grid value scales the
/// template's shift vector; every grid point reuses the same replication
/// seeds, so the curve is free of between-point sampling noise in `Z`.
pub fn run_power_curve(
    template: &ScenarioSpec,
    deltas: &[f64],
    alpha: f64,
    reps: usize,
    replicates: usize,
    seed: u64,
) -> Result<Vec<PowerPoint>> {
    let MeanPlan::OneCp { after, delta } = &template.mean else {
        return Err(Error::invalid("power curves need a one-change template"));
    };
    deltas
        .iter()
        .map(|&d| {
            let spec = template.clone().with_mean(MeanPlan::OneCp {
                after: *after,
                delta: delta.iter().map(|v| v * d).collect(),
            });
            let run = run_rejection_experiment("power", &spec, StatKind::Single, &[alpha], reps, replicates, seed)?;
            let row = &run.rows[0];
            Ok(PowerPoint {
                delta: d,
                rate: row.rate,
                se: row.se,
                reps,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WbsRep {
    pub locations: Vec<usize>,
    /// `N^ - N`.
    pub count_error: i64,
    pub ari: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WbsExperiment {
    pub truth: Vec<usize>,
    /// Frequency of each `N^ - N`.
    pub histogram: BTreeMap<i64, usize>,
    /// Mean of `(N^ - N)^2`.
    pub mse: f64,
    pub mean_ari: f64,
    pub reps: Vec<WbsRep>,
}

impl WbsExperiment {
    /// Share of replications with exactly the true number of changes.
    pub fn exact_share(&self) -> f64 {
        self.histogram.get(&0).copied().unwrap_or(0) as f64 / self.reps.len() as f64
    }
}

/// Repeated WBS segmentation of panels drawn from `spec`; the true
/// locations are the plan's change locations.
pub fn run_wbs_experiment(spec: &ScenarioSpec, cfg: &WbsConfig, reps: usize, seed: u64) -> Result<WbsExperiment> {
    if reps == 0 {
        return Err(Error::invalid("experiment needs at least one replication"));
    }
    spec.validate()?;
    cfg.validate()?;
    let truth = spec.change_locations();
    let n = spec.n;
    let runs = (0..reps as u64)
        .into_par_iter()
        .map(|r| -> Result<WbsRep> {
            let x = sample_panel(spec, child_seed(seed, domain::PANEL, r))?;
            let rep_cfg = WbsConfig {
                seed: child_seed(seed, domain::REPLICATION, r),
                ..cfg.clone()
            };
            let est = wbs_estimate(&x, &rep_cfg)?;
            let ari = adjusted_rand_index(&est.locations, &truth, n)?;
            Ok(WbsRep {
                count_error: est.locations.len() as i64 - truth.len() as i64,
                locations: est.locations,
                ari,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut histogram = BTreeMap::new();
    for r in &runs {
        *histogram.entry(r.count_error).or_insert(0) += 1;
    }
    let k = reps as f64;
    let mse = runs.iter().map(|r| (r.count_error * r.count_error) as f64).sum::<f64>() / k;
    let mean_ari = runs.iter().map(|r| r.ari).sum::<f64>() / k;
    Ok(WbsExperiment {
        truth,
        histogram,
        mse,
        mean_ari,
        reps: runs,
    })
}
