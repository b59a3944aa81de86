// SPDX-License-Identifier: MIT OR Apache-2.0

//! Empirical size over all eight variance trends, printed as CSV.
//!
//! ```bash
//! cargo run --release --example size_experiment -- 200
//! ```

use hetcp::bootstrap::StatKind;
use hetcp::simulate::{run_size_experiment, Covariance, ScenarioSpec, Trend};

fn main() -> hetcp::Result<()> {
    let reps = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let mut rows = Vec::new();
    for trend in Trend::all() {
        let id = format!("{}-ar05-n100-p100", trend.label().to_lowercase());
        let spec = ScenarioSpec::null(100, 100, Covariance::Ar { rho: 0.5 }, trend);
        let run = run_size_experiment(&id, &spec, StatKind::Single, &[0.05, 0.1], reps, 200, 7)?;
        rows.extend(run.rows);
    }
    let mut out = csv::Writer::from_writer(std::io::stdout());
    for r in &rows {
        out.serialize(r).map_err(hetcp::Error::from)?;
    }
    out.flush()?;
    Ok(())
}
