//! Simulation and planning library for laser tumor resection guided by OCT
//! surface scans and a point fluorescence probe.

pub mod geometry;
pub mod lsq;
pub mod sensor;
pub mod spectra;
pub mod calibration;
pub mod kinematics;
pub mod mapping;
pub mod metrics;
