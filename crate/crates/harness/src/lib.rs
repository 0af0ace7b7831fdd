//! Experiment runner for the `lowmach-core` solvers: configuration files,
//! paired PE/CPE runs, ε-sweeps with rate fits, CSV/JSON/SVG output and the
//! `lowmach` command line.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod svg;
pub mod sweep;
pub mod verify;

pub use config::{BaseParams, ExperimentConfig, Thresholds};
pub use error::{HarnessError, Result};
pub use run::{run_cpe, run_pair, run_pe, PairRun};
pub use sweep::{run_sweep, SweepReport, SweepSummary};
pub use verify::{verify, Check};
