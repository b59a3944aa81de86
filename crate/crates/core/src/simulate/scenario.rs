// SPDX-License-Identifier: MIT OR Apache-2.0

//! Named built-in scenarios.
//!
//! Identifiers are dash-separated tokens, for example
//! `table1-a2-ar05-n400-p100`, `table2-a1-ar05-2cp` or `table3-a3-strong`.
//!
//! | family   | role                          | defaults                         |
//! |----------|-------------------------------|----------------------------------|
//! | `table1` | single-change size            | n = p = 100, `ar05`, `h0`        |
//! | `table2` | multi-change size and power   | n = p = 50, `ar05`, `h0`, d=0.2  |
//! | `table3` | WBS segmentation              | n = 120, p = 50, identity        |
//! | `power`  | single-change power template  | n = p = 100, `ar05`, d=1         |
//!
//! Optional tokens: a trend (`a0`..`a4`, `a1+a2`, `a1a2`), a covariance
//! (`ar05`, `ar08`, `cs05`, `iid`), `n<int>`, `p<int>`, `d<real>` for the
//! per-coordinate shift, the plan `h0`/`1cp`/`2cp`/`3cp`, and `strong`/`weak`
//! for WBS signal strength.

use serde::{Deserialize, Serialize};

use super::{Covariance, MeanPlan, ScenarioSpec, Trend};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Single-change test experiment.
    Single,
    /// Multi-change test experiment.
    Multi,
    /// WBS segmentation experiment.
    Wbs,
    /// Single-change power curve; `spec` is the unit-shift template.
    Power,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub kind: ScenarioKind,
    pub spec: ScenarioSpec,
}

#[derive(Clone, Copy, PartialEq)]
enum Plan {
    Null,
    One,
    Two,
    Three,
}

fn parse_num<T: std::str::FromStr>(tok: &str, digits: &str) -> Result<T> {
    digits
        .parse()
        .map_err(|_| Error::invalid(format!("bad scenario token {tok:?}")))
}

impl Scenario {
    pub fn parse(id: &str) -> Result<Self> {
        let lower = id.to_ascii_lowercase();
        let mut tokens = lower.split('-');
        let family = tokens.next().unwrap_or_default();
        let (kind, mut n, mut p, mut delta) = match family {
            "table1" => (ScenarioKind::Single, 100, 100, 1.0),
            "table2" => (ScenarioKind::Multi, 50, 50, 0.2),
            "table3" => (ScenarioKind::Wbs, 120, 50, 0.0),
            "power" => (ScenarioKind::Power, 100, 100, 1.0),
            other => return Err(Error::invalid(format!("unknown scenario family {other:?}"))),
        };
        let mut covariance = match kind {
            ScenarioKind::Wbs => Covariance::Ar { rho: 0.0 },
            _ => Covariance::Ar { rho: 0.5 },
        };
        let mut trend = Trend::A0;
        let mut plan = if kind == ScenarioKind::Power { Plan::One } else { Plan::Null };
        let mut strong = true;
        for tok in tokens {
            match tok {
                "ar05" => covariance = Covariance::Ar { rho: 0.5 },
                "ar08" => covariance = Covariance::Ar { rho: 0.8 },
                "cs05" => covariance = Covariance::CompoundSymmetry { rho: 0.5 },
                "iid" => covariance = Covariance::Ar { rho: 0.0 },
                "h0" => plan = Plan::Null,
                "1cp" => plan = Plan::One,
                "2cp" => plan = Plan::Two,
                "3cp" => plan = Plan::Three,
                "strong" => strong = true,
                "weak" => strong = false,
                t if t.starts_with('a') => trend = Trend::parse(t)?,
                t if t.starts_with('n') => n = parse_num(t, &t[1..])?,
                t if t.starts_with('p') => p = parse_num(t, &t[1..])?,
                t if t.starts_with('d') => delta = parse_num(t, &t[1..])?,
                t => return Err(Error::invalid(format!("bad scenario token {t:?}"))),
            }
        }
        let base = ScenarioSpec::null(n, p, covariance, trend);
        let shift = vec![delta; p];
        let spec = match kind {
            ScenarioKind::Wbs => base.with_mean(wbs_plan(n, p, strong)),
            _ => match plan {
                Plan::Null => base,
                Plan::One => base.with_mean(MeanPlan::OneCp {
                    after: (n / 2).saturating_sub(1),
                    delta: shift,
                }),
                Plan::Two => base.with_mean(MeanPlan::TwoCp { delta: shift }),
                Plan::Three => base.with_mean(MeanPlan::ThreeCp { delta: shift }),
            },
        };
        spec.validate()?;
        Ok(Self {
            id: id.to_owned(),
            kind,
            spec,
        })
    }
}

/// Three changes at `n/4, n/2, 3n/4` with jumps `k (1, -1, 1)` per
/// coordinate, `k = sqrt(2.5 / p)` (weak) or twice that (strong). At
/// `n = 120` the locations are 30, 60, 90.
pub fn wbs_plan(n: usize, p: usize, strong: bool) -> MeanPlan {
    let k = (2.5 / p as f64).sqrt() * if strong { 2.0 } else { 1.0 };
    MeanPlan::Zones {
        locations: vec![n / 4, n / 2, 3 * n / 4],
        jumps: [1.0, -1.0, 1.0].iter().map(|s| vec![s * k; p]).collect(),
    }
}
