//! Camera extrinsics from 2D–3D correspondences, and the laser reference
//! frame, offsets and incidence vector from fiducial observations.

pub mod extrinsics;
pub mod io;
pub mod laser;

use thiserror::Error;

use crate::geometry::GeometryError;

pub use extrinsics::{estimate_camera_extrinsics, Correspondence2D3D, ExtrinsicsEstimate};
pub use laser::{
    angles_from_incidence, calibrate_laser_axes, calibrate_laser_orientation, incidence_from_angles, reprojection_error,
    AxisObservation, LaserCalibration, LaserSpotObservation, OrientationOptions, DEFAULT_WORKING_DISTANCE,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalibrationError {
    #[error("axis observation is too short ({0:.3} mm, need > 0.5 mm)")]
    DegenerateAxis(f64),
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("observations span a single board height; tilt and offset are not separable")]
    SingleHeight,
    #[error("solver did not converge in {0} iterations")]
    NonConvergence(usize),
    #[error("jacobian condition number {0:e} exceeds 1e12")]
    IllConditioned(f64),
    #[error("no observations")]
    EmptyObservations,
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("incidence vector must point downward")]
    NotDownward,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("calibration I/O: {0}")]
    Io(String),
}

/// Condition number above which a converged solution is rejected.
pub const MAX_CONDITION: f64 = 1e12;
