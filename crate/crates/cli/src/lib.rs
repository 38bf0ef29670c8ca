//! Experiment harness: configuration, simulated ground truth, file-based
//! pipeline stages and the phantom studies.

pub mod config;
pub mod error;
pub mod experiments;
pub mod stages;
pub mod truth;

pub use config::{ClassifierChoice, ExperimentConfig, LaserProfile};
pub use error::{ErrorKind, HarnessError};
pub use experiments::{run_end_to_end, run_marker_experiment, run_roi_experiment, run_trajectory_experiment, TrialResult};
