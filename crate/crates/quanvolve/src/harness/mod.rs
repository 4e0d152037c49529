//! Experiment orchestration: single training runs, the full benchmark
//! sweep, gradient checks, and simulator self-tests.
//!
//! The harness ties the other modules together. A run is described by an
//! [`ExperimentConfig`]; [`train_run`] executes it end to end
//! (preprocess, train, evaluate, write metrics) and [`run_sweep`] repeats
//! that over the whole color-space x template grid. [`gradient_check`]
//! and [`self_test`] expose the numerical validation suites as callable
//! reports for the command-line frontend.
//!
//! Reproducibility contract: a config's seed fully determines the data
//! split, the initial parameters, and every training-time draw (batch
//! order, activation slopes). Metrics files contain no timing data, so
//! identical configs produce bitwise-identical metrics files.

mod check;
mod config;
mod model;
mod sweep;
mod train;

pub use check::{
    gradient_check, oracle_equivalence, self_test, GradCheckReport, OracleReport, SelfTestReport,
    FD_STEP, GRAD_ABS_FLOOR, GRAD_REL_TOL, ORACLE_CIRCUITS, ORACLE_TOL,
};
pub use config::{ChannelSelect, ConfigError, ExperimentConfig};
pub use model::HybridModel;
pub use sweep::{
    baseline_for, run_sweep, SweepCellResult, SweepOptions, SweepReport, BASELINE_ACCURACY,
    SWEEP_ROWS,
};
pub use train::{
    prepare_data, run_dir, train_run, EpochMetrics, PreparedSplit, RunMetrics, INPUT_EDGE,
    METRICS_FILE, SUMMARY_FILE,
};

use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::colorspace::ColorError;
use crate::data::DataError;
use crate::nn::NnError;
use crate::qconv::QconvError;
use crate::qsim::SimError;

/// Errors from experiment orchestration.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Color(#[from] ColorError),
    #[error(transparent)]
    Conv(#[from] QconvError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Nn(#[from] NnError),
    /// Filesystem trouble while writing run outputs.
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    /// The configured input size cannot fit a single filter window.
    #[error("input of {in_h}x{in_w} cannot fit a 2x2 filter window")]
    InputTooSmall { in_h: usize, in_w: usize },
    /// A bounded worker pool could not be created.
    #[error("worker pool: {0}")]
    Pool(String),
}

impl HarnessError {
    fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}
