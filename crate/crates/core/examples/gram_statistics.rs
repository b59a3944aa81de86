// SPDX-License-Identifier: MIT OR Apache-2.0

//! Interval statistics from one Gram table: the split profile of a panel,
//! a few interval queries, and a brute-force cross-check.
//!
//! ```bash
//! cargo run --example gram_statistics
//! ```

use hetcp::oracle::d_oracle;
use hetcp::simulate::{sample_panel, Covariance, MeanPlan, ScenarioSpec, Trend};
use hetcp::stats::{rescaled_g, single_scan};
use hetcp::GramTable;

fn main() -> hetcp::Result<()> {
    let (n, p) = (40, 25);
    let spec = ScenarioSpec::null(n, p, Covariance::Ar { rho: 0.5 }, Trend::A1).with_mean(MeanPlan::OneCp {
        after: 24,
        delta: vec![0.8; p],
    });
    let x = sample_panel(&spec, 2024)?;
    let gram = GramTable::build(&x);

    let profile = single_scan(&gram)?;
    println!("split profile (true change after t = 24):");
    for (idx, v) in profile.values.iter().step_by(4) {
        println!("  {idx:?}: {v:10.4}");
    }
    println!("max {:.4} at {:?}", profile.max_value, profile.argmax);

    // G~(m; a, b) on a sub-interval, O(1) per query.
    println!("G~(20; 10, 35) = {:.6}", rescaled_g(&gram, 20, 10, 35)?);

    // The same split value from the quadruple-sum definition.
    let k = 24;
    let direct = d_oracle(&x, k)? / (n as f64).powi(3);
    let fast = rescaled_g(&gram, k, 1, n)?;
    println!("split {k}: table {fast:.12}  brute force {direct:.12}");
    Ok(())
}
