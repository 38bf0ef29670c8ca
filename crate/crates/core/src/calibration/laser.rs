use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{CalibrationError, MAX_CONDITION};
use crate::geometry::{PlaneFrame, ReferenceFrame, Vec3};
use crate::kinematics::{LaserPose, WaypointCoord};
use crate::lsq::{self, LeastSquaresProblem, SolverOptions};

/// Standoff of the fluorescence probe optics (mm).
pub const DEFAULT_WORKING_DISTANCE: f64 = 56.3;

/// Minimum fiducial travel for a usable axis observation (mm).
const MIN_AXIS_TRAVEL: f64 = 0.5;

/// Two fiducial positions recorded while jogging along one frame axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisObservation {
    pub start: Vec3,
    pub end: Vec3,
}

/// A laser spot measured on a calibration board for a commanded waypoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserSpotObservation {
    pub beta: WaypointCoord,
    pub plane: PlaneFrame,
    pub spot: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserCalibration {
    pub frame: ReferenceFrame,
    pub alpha: [f64; 2],
    pub v_w: Vec3,
    pub residual_rms: f64,
    pub iterations: usize,
}

impl LaserCalibration {
    /// Known calibration (no fit statistics). `v_w` is normalized and must
    /// point downward.
    pub fn new(frame: ReferenceFrame, alpha: [f64; 2], v_w: Vec3) -> Result<Self, CalibrationError> {
        let v_w = v_w.normalized().ok_or(CalibrationError::NotDownward)?;
        if v_w.z >= 0.0 {
            return Err(CalibrationError::NotDownward);
        }
        Ok(Self {
            frame,
            alpha,
            v_w,
            residual_rms: 0.0,
            iterations: 0,
        })
    }

    /// Waypoint `p_w = origin + (α_x+β_x)·v_x + (α_y+β_y)·v_y`.
    pub fn waypoint(&self, beta: WaypointCoord) -> Vec3 {
        self.frame.point(self.alpha[0] + beta.x, self.alpha[1] + beta.y)
    }

    pub fn pose(&self, beta: WaypointCoord) -> LaserPose {
        LaserPose {
            p_w: self.waypoint(beta),
            v_w: self.v_w,
        }
    }
}

/// `R_y(φ)·R_x(θ)·(0, 0, −1)`.
pub fn incidence_from_angles(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(-sp * ct, st, -cp * ct)
}

/// Inverse of [`incidence_from_angles`] for a unit, downward vector.
pub fn angles_from_incidence(v: Vec3) -> (f64, f64) {
    (v.y.clamp(-1.0, 1.0).asin(), (-v.x).atan2(-v.z))
}

fn d_incidence(theta: f64, phi: f64) -> (Vec3, Vec3) {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    (Vec3::new(sp * st, ct, cp * st), Vec3::new(-cp * ct, 0.0, sp * ct))
}

pub fn calibrate_laser_axes(origin: Vec3, x: &AxisObservation, y: &AxisObservation) -> Result<ReferenceFrame, CalibrationError> {
    let axis = |o: &AxisObservation| {
        let d = o.end - o.start;
        let len = d.norm();
        if len <= MIN_AXIS_TRAVEL {
            Err(CalibrationError::DegenerateAxis(len))
        } else {
            Ok(d * (1.0 / len))
        }
    };
    Ok(ReferenceFrame::new(origin, axis(x)?, axis(y)?)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientationOptions {
    /// Initial `(θ, φ)`; zero means straight down.
    pub initial_angles: (f64, f64),
    pub initial_alpha: [f64; 2],
    /// Reject data lying on a single board height before solving.
    pub require_distinct_heights: bool,
    pub solver: SolverOptions,
}

impl Default for OrientationOptions {
    fn default() -> Self {
        Self {
            initial_angles: (0.0, 0.0),
            initial_alpha: [0.0, 0.0],
            require_distinct_heights: true,
            solver: SolverOptions::default(),
        }
    }
}

struct SpotProblem<'a> {
    frame: ReferenceFrame,
    obs: &'a [LaserSpotObservation],
}

impl SpotProblem<'_> {
    fn unpack(p: &DVector<f64>) -> (Vec3, [f64; 2]) {
        (incidence_from_angles(p[0], p[1]), [p[2], p[3]])
    }
}

impl LeastSquaresProblem for SpotProblem<'_> {
    fn residuals(&self, p: &DVector<f64>) -> DVector<f64> {
        let (v, alpha) = Self::unpack(p);
        let mut r = DVector::zeros(3 * self.obs.len());
        for (j, o) in self.obs.iter().enumerate() {
            let q = self.frame.point(alpha[0] + o.beta.x, alpha[1] + o.beta.y);
            let n = o.plane.normal;
            let s = n.dot(q - o.plane.center) / n.dot(v);
            let e = q - v * s - o.spot;
            for k in 0..3 {
                r[3 * j + k] = e[k];
            }
        }
        r
    }

    fn jacobian(&self, p: &DVector<f64>) -> DMatrix<f64> {
        let (v, alpha) = Self::unpack(p);
        let (dv_dt, dv_dp) = d_incidence(p[0], p[1]);
        let mut jac = DMatrix::zeros(3 * self.obs.len(), 4);
        for (j, o) in self.obs.iter().enumerate() {
            let q = self.frame.point(alpha[0] + o.beta.x, alpha[1] + o.beta.y);
            let n = o.plane.normal;
            let d = n.dot(v);
            let s = n.dot(q - o.plane.center) / d;
            // ∂g/∂v · w = −s·w + s·v·(n·w)/d
            let dg_dv = |w: Vec3| w * (-s) + v * (s * n.dot(w) / d);
            // ∂g/∂α_k = v_k − v·(n·v_k)/d
            let dg_da = |axis: Vec3| axis - v * (n.dot(axis) / d);
            let cols = [dg_dv(dv_dt), dg_dv(dv_dp), dg_da(self.frame.v_x), dg_da(self.frame.v_y)];
            for (c, col) in cols.iter().enumerate() {
                for k in 0..3 {
                    jac[(3 * j + k, c)] = col[k];
                }
            }
        }
        jac
    }
}

fn distinct_heights(obs: &[LaserSpotObservation]) -> usize {
    let mut h: Vec<f64> = obs.iter().map(|o| o.plane.center.dot(o.plane.normal)).collect();
    h.sort_by(f64::total_cmp);
    h.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    h.len()
}

/// Fits `(θ, φ, α_x, α_y)` to the measured spots by nonlinear least squares.
pub fn calibrate_laser_orientation(
    frame: ReferenceFrame,
    observations: &[LaserSpotObservation],
    options: &OrientationOptions,
) -> Result<LaserCalibration, CalibrationError> {
    if observations.len() < 3 {
        return Err(CalibrationError::TooFewObservations {
            needed: 3,
            got: observations.len(),
        });
    }
    if options.require_distinct_heights && distinct_heights(observations) < 2 {
        return Err(CalibrationError::SingleHeight);
    }
    let problem = SpotProblem { frame, obs: observations };
    let x0 = DVector::from_vec(vec![
        options.initial_angles.0,
        options.initial_angles.1,
        options.initial_alpha[0],
        options.initial_alpha[1],
    ]);
    let sol = lsq::solve(&problem, x0, &options.solver);
    if !sol.termination.converged() {
        return Err(CalibrationError::NonConvergence(sol.iterations));
    }
    let cond = sol.condition_number();
    if cond > MAX_CONDITION {
        return Err(CalibrationError::IllConditioned(cond));
    }
    let (v_w, alpha) = SpotProblem::unpack(&sol.params);
    if v_w.z >= 0.0 {
        return Err(CalibrationError::NotDownward);
    }
    let per_spot = sol.residuals.len() / 3;
    Ok(LaserCalibration {
        frame,
        alpha,
        v_w,
        residual_rms: (sol.residuals.norm_squared() / per_spot as f64).sqrt(),
        iterations: sol.iterations,
    })
}

/// Per-observation distances `‖g_j − p_j*‖` and their RMS.
pub fn reprojection_error(
    calibration: &LaserCalibration,
    observations: &[LaserSpotObservation],
) -> Result<(Vec<f64>, f64), CalibrationError> {
    if observations.is_empty() {
        return Err(CalibrationError::EmptyObservations);
    }
    let d = observations
        .iter()
        .map(|o| Ok(crate::kinematics::forward_model(calibration, o.beta, &o.plane)?.distance(o.spot)))
        .collect::<Result<Vec<f64>, CalibrationError>>()?;
    let rms = (d.iter().map(|v| v * v).sum::<f64>() / d.len() as f64).sqrt();
    Ok((d, rms))
}
