// SPDX-License-Identifier: MIT OR Apache-2.0

//! Writing a panel to CSV and reading it back bit for bit, then testing the
//! loaded copy.
//!
//! ```bash
//! cargo run --example csv_round_trip
//! ```

use hetcp::bootstrap::test_single;
use hetcp::io::{load_csv, save_csv};
use hetcp::simulate::{sample_panel, Covariance, ScenarioSpec, Trend};

fn main() -> hetcp::Result<()> {
    let spec = ScenarioSpec::null(30, 6, Covariance::CompoundSymmetry { rho: 0.5 }, Trend::A4);
    let x = sample_panel(&spec, 1)?;
    let path = std::env::temp_dir().join("hetcp_round_trip.csv");
    save_csv(&x, &path)?;
    let y = load_csv(&path)?;
    println!("wrote and read {} x {} panel at {}", y.n(), y.p(), path.display());
    println!("identical bits: {}", x == y);
    let a = test_single(&x, 0.05, 200, 8)?;
    let b = test_single(&y, 0.05, 200, 8)?;
    println!("statistics {:.10} vs {:.10}", a.statistic, b.statistic);
    std::fs::remove_file(path)?;
    Ok(())
}
