// SPDX-License-Identifier: MIT OR Apache-2.0

//! Locating three changes with wild binary segmentation and scoring the
//! result with the adjusted Rand index.
//!
//! ```bash
//! cargo run --release --example wbs_estimate
//! ```

use hetcp::simulate::{sample_panel, wbs_plan, Covariance, ScenarioSpec, Trend};
use hetcp::wbs::{adjusted_rand_index, wbs_estimate, WbsConfig};

fn main() -> hetcp::Result<()> {
    let (n, p) = (120, 50);
    let spec = ScenarioSpec::null(n, p, Covariance::Ar { rho: 0.0 }, Trend::A3).with_mean(wbs_plan(n, p, true));
    let truth = spec.change_locations();
    let x = sample_panel(&spec, 31)?;

    let cfg = WbsConfig {
        intervals: 500,
        replicates: 200,
        seed: 32,
        ..WbsConfig::default()
    };
    let est = wbs_estimate(&x, &cfg)?;
    println!("threshold {:.4}", est.threshold);
    for d in &est.detections {
        println!("  detected {:3} on {:?} with W = {:.4}", d.location, d.interval, d.statistic);
    }
    println!("estimate {:?}  truth {:?}", est.locations, truth);
    println!("ARI {:.4}", adjusted_rand_index(&est.locations, &truth, n)?);
    Ok(())
}
