//! Streaming active learning for regression via classification.
//!
//! The target is discretized into K ordered classes by 1-D k-means, a
//! probabilistic classifier is trained per resolution, and the averaged
//! classifier uncertainty serves as a bounded utility for budgeted
//! streaming label acquisition. The crate also ships the query-by-committee
//! and random baselines, four budget managers, synthetic drifting streams,
//! and the offline and prequential evaluation protocols.
//!
//! See the `examples/` directory for one runnable example per capability,
//! and the `rvc-stream` binary for the experiment driver.

pub mod budget;
pub mod cli;
pub mod config;
pub mod core;
pub mod data;
pub mod discretize;
pub mod error;
pub mod metrics;
pub mod models;
pub mod stream;
pub mod utility;

pub use crate::core::{LabeledSample, LabeledWindow, RngSeed, Sample};
pub use crate::discretize::{Discretizer, InverseMode};
pub use crate::error::{Error, Result};
pub use crate::models::{ModelConfig, Posterior};
pub use crate::stream::{
    run_experiment, run_offline_eval, run_stream, ExperimentPlan, ManagerKind, StrategyConfig,
    StreamRunRecord, SummaryTable, UtilityKind,
};
