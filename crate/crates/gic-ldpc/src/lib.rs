//! Experiment driver: scenario files, artifact formats, BER sweeps and the
//! optimize / certify / region / BER pipeline.

// `!(x > 0.0)` style checks are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ber;
pub mod config;
pub mod error;
pub mod formats;
pub mod pipeline;

pub use ber::{run_ber_sweep, BerCurve, BerPoint, BerSweepConfig, FiniteCodeSet};
pub use config::Scenario;
pub use error::HarnessError;
pub use pipeline::{run_scenario, RunOptions, RunSummary, StageSet};
