// SPDX-License-Identifier: MIT OR Apache-2.0

//! Power of the single-change test as the shift grows, for two AR
//! coefficients. Every grid point reuses the same replication seeds.
//!
//! ```bash
//! cargo run --release --example power_curve
//! ```

use hetcp::simulate::{run_power_curve, Covariance, MeanPlan, ScenarioSpec, Trend};

fn main() -> hetcp::Result<()> {
    let (n, p) = (100, 100);
    let grid = [0.0, 0.02, 0.04, 0.06, 0.08, 0.1, 0.15];
    for rho in [0.5, 0.8] {
        let template = ScenarioSpec::null(n, p, Covariance::Ar { rho }, Trend::A1).with_mean(MeanPlan::OneCp {
            after: n / 2 - 1,
            delta: vec![1.0; p],
        });
        let curve = run_power_curve(&template, &grid, 0.05, 200, 200, 9)?;
        println!("rho = {rho}");
        for pt in curve {
            let bar = "#".repeat((pt.rate * 40.0).round() as usize);
            println!("  delta {:4.2}  power {:.3} +- {:.3}  {bar}", pt.delta, pt.rate, pt.se);
        }
    }
    Ok(())
}
