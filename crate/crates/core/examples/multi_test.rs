// SPDX-License-Identifier: MIT OR Apache-2.0

//! The forward/backward statistic against several changes. A bump in the
//! middle of the sample cancels in single-split comparisons but not on
//! sub-intervals.
//!
//! ```bash
//! cargo run --release --example multi_test
//! ```

use hetcp::bootstrap::{test_multi, test_single};
use hetcp::simulate::{sample_panel, Covariance, MeanPlan, ScenarioSpec, Trend};

fn main() -> hetcp::Result<()> {
    let (n, p) = (50, 50);
    let spec = ScenarioSpec::null(n, p, Covariance::Ar { rho: 0.5 }, Trend::mix(Trend::A1, Trend::A2))
        .with_mean(MeanPlan::TwoCp { delta: vec![0.3; p] });
    println!("true changes after {:?}", spec.change_locations());

    let x = sample_panel(&spec, 5)?;
    let single = test_single(&x, 0.05, 300, 6)?;
    let multi = test_multi(&x, 0.05, 300, 6)?;
    println!("single: T = {:8.4}  p = {:.4}  reject = {}", single.statistic, single.p_value, single.reject);
    println!("multi:  T = {:8.4}  p = {:.4}  reject = {}", multi.statistic, multi.p_value, multi.reject);
    println!("forward and backward maximizers: {:?}", multi.argmax);
    Ok(())
}
