// SPDX-License-Identifier: MIT OR Apache-2.0

//! Screening a panel for non-constant variance: one block-variance test per
//! coordinate, combined by Higher Criticism.
//!
//! ```bash
//! cargo run --release --example heteroscedasticity_screen
//! ```

use hetcp::diagnostics::{panel_heteroscedasticity_screen, VarianceTestConfig};
use hetcp::simulate::{sample_panel, Covariance, ScenarioSpec, Trend};

fn main() -> hetcp::Result<()> {
    let cfg = VarianceTestConfig::default();
    for trend in [Trend::A0, Trend::A1] {
        let spec = ScenarioSpec::null(2000, 20, Covariance::Ar { rho: 0.5 }, trend.clone());
        let x = sample_panel(&spec, 3)?;
        let rep = panel_heteroscedasticity_screen(&x, &cfg, 10_000, 4)?;
        let smallest = rep.coordinates.iter().map(|c| c.p_value).fold(1.0, f64::min);
        println!(
            "{:3}: HC = {:7.3}  combined p = {:.4}  smallest coordinate p = {:.2e}",
            trend.label(),
            rep.combined.hc_stat,
            rep.combined.p_value,
            smallest
        );
    }
    Ok(())
}
