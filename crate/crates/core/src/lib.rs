// SPDX-License-Identifier: MIT OR Apache-2.0

#![forbid(unsafe_code)]

pub mod bootstrap;
pub mod cli;
pub mod data;
pub mod diagnostics;
pub mod error;
pub mod gram;
pub mod io;
pub mod oracle;
pub mod rng;
pub mod simulate;
pub mod stats;
pub mod wbs;

pub use data::DataMatrix;
pub use error::{Error, Result};
pub use gram::{GramTable, IntervalSums};
