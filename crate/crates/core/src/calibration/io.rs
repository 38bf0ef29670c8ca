//! CSV ingestion of correspondences and spot observations, JSON output of
//! laser calibrations.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CalibrationError, Correspondence2D3D, LaserCalibration, LaserSpotObservation};
use crate::geometry::{PlaneFrame, Vec2, Vec3};
use crate::kinematics::WaypointCoord;

fn io_err(e: impl std::fmt::Display) -> CalibrationError {
    CalibrationError::Io(e.to_string())
}

#[derive(Debug, Serialize, Deserialize)]
struct CorrespondenceRow {
    u: f64,
    v: f64,
    #[serde(rename = "X")]
    x: f64,
    #[serde(rename = "Y")]
    y: f64,
    #[serde(rename = "Z")]
    z: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpotRow {
    beta_x: f64,
    beta_y: f64,
    px: f64,
    py: f64,
    pz: f64,
    nx: f64,
    ny: f64,
    nz: f64,
    sx: f64,
    sy: f64,
    sz: f64,
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CalibrationError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(io_err)?;
    r.deserialize().map(|row| row.map_err(io_err)).collect()
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<(), CalibrationError> {
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    for row in rows {
        w.serialize(row).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_correspondences(path: &Path) -> Result<Vec<Correspondence2D3D>, CalibrationError> {
    Ok(read_rows::<CorrespondenceRow>(path)?
        .into_iter()
        .map(|r| Correspondence2D3D {
            image: Vec2::new(r.u, r.v),
            world: Vec3::new(r.x, r.y, r.z),
        })
        .collect())
}

pub fn write_correspondences(path: &Path, corr: &[Correspondence2D3D]) -> Result<(), CalibrationError> {
    write_rows(
        path,
        corr.iter().map(|c| CorrespondenceRow {
            u: c.image.x,
            v: c.image.y,
            x: c.world.x,
            y: c.world.y,
            z: c.world.z,
        }),
    )
}

pub fn read_spot_observations(path: &Path) -> Result<Vec<LaserSpotObservation>, CalibrationError> {
    read_rows::<SpotRow>(path)?
        .into_iter()
        .map(|r| {
            Ok(LaserSpotObservation {
                beta: WaypointCoord::new(r.beta_x, r.beta_y),
                plane: PlaneFrame::new(Vec3::new(r.px, r.py, r.pz), Vec3::new(r.nx, r.ny, r.nz))?,
                spot: Vec3::new(r.sx, r.sy, r.sz),
            })
        })
        .collect()
}

pub fn write_spot_observations(path: &Path, obs: &[LaserSpotObservation]) -> Result<(), CalibrationError> {
    write_rows(
        path,
        obs.iter().map(|o| SpotRow {
            beta_x: o.beta.x,
            beta_y: o.beta.y,
            px: o.plane.center.x,
            py: o.plane.center.y,
            pz: o.plane.center.z,
            nx: o.plane.normal.x,
            ny: o.plane.normal.y,
            nz: o.plane.normal.z,
            sx: o.spot.x,
            sy: o.spot.y,
            sz: o.spot.z,
        }),
    )
}

pub fn write_calibration(path: &Path, cal: &LaserCalibration) -> Result<(), CalibrationError> {
    std::fs::write(path, serde_json::to_string_pretty(cal).map_err(io_err)?).map_err(io_err)
}

pub fn read_calibration(path: &Path) -> Result<LaserCalibration, CalibrationError> {
    let cal: LaserCalibration = serde_json::from_str(&std::fs::read_to_string(path).map_err(io_err)?).map_err(io_err)?;
    if (cal.v_w.norm() - 1.0).abs() > crate::geometry::UNIT_TOL * 10.0 || cal.v_w.z >= 0.0 {
        return Err(CalibrationError::NotDownward);
    }
    Ok(cal)
}
