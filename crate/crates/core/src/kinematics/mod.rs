//! Laser forward model, optimization-based inverse kinematics, trajectory
//! planning and raster scan patterns.

mod raster;

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calibration::LaserCalibration;
use crate::geometry::{ray_plane_intersect, GeometryError, PlaneFrame, Ray, Vec3};
use crate::lsq::{self, LeastSquaresProblem, SolverOptions};

pub use raster::{raster_pattern, Ordering, RasterSpec, ScanPattern};

/// Largest acceptable IK residual (mm).
pub const IK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KinematicsError {
    #[error("target {index} is unreachable (residual {residual:e} mm)")]
    Unreachable { index: usize, residual: f64 },
    #[error("raster step must be positive and no larger than the extent")]
    BadStep,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("plan I/O: {0}")]
    Io(String),
}

/// Commanded laser coordinates `(β_x, β_y)` in the reference frame (mm).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct WaypointCoord {
    pub x: f64,
    pub y: f64,
}

impl WaypointCoord {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

impl From<[f64; 2]> for WaypointCoord {
    fn from(a: [f64; 2]) -> Self {
        Self::new(a[0], a[1])
    }
}

impl From<WaypointCoord> for [f64; 2] {
    fn from(b: WaypointCoord) -> Self {
        [b.x, b.y]
    }
}

/// Beam origin and direction for one waypoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserPose {
    pub p_w: Vec3,
    pub v_w: Vec3,
}

impl LaserPose {
    pub fn ray(&self) -> Ray {
        Ray::new(self.p_w, self.v_w).expect("calibrated incidence vector is unit")
    }
}

/// Where the beam commanded to `beta` meets `plane`.
pub fn forward_model(cal: &LaserCalibration, beta: WaypointCoord, plane: &PlaneFrame) -> Result<Vec3, GeometryError> {
    ray_plane_intersect(&cal.pose(beta).ray(), plane)
}

/// Rectangular bounds on β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Workspace {
    pub min: WaypointCoord,
    pub max: WaypointCoord,
}

impl Workspace {
    /// Square window of side `extent` centered on β = 0, inflated by `margin` (0.2 = 20%).
    pub fn around(extent: f64, margin: f64) -> Self {
        let h = 0.5 * extent * (1.0 + margin);
        Self {
            min: WaypointCoord::new(-h, -h),
            max: WaypointCoord::new(h, h),
        }
    }

    pub fn contains(&self, b: WaypointCoord) -> bool {
        (self.min.x..=self.max.x).contains(&b.x) && (self.min.y..=self.max.y).contains(&b.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IkOptions {
    pub workspace: Option<Workspace>,
    pub solver: SolverOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IkSolution {
    pub beta: WaypointCoord,
    pub residual: f64,
    pub iterations: usize,
}

struct IkProblem<'a> {
    cal: &'a LaserCalibration,
    target: Vec3,
    plane: PlaneFrame,
}

impl IkProblem<'_> {
    fn hit(&self, b: &DVector<f64>) -> Vec3 {
        let q = self.cal.waypoint(WaypointCoord::new(b[0], b[1]));
        let v = self.cal.v_w;
        let n = self.plane.normal;
        q - v * (n.dot(q - self.plane.center) / n.dot(v))
    }

    /// `∂g/∂β_k = v_k − v_w·(n·v_k)/(n·v_w)`; constant in β.
    fn columns(&self) -> [Vec3; 2] {
        let v = self.cal.v_w;
        let n = self.plane.normal;
        let d = n.dot(v);
        [self.cal.frame.v_x, self.cal.frame.v_y].map(|a| a - v * (n.dot(a) / d))
    }
}

impl LeastSquaresProblem for IkProblem<'_> {
    fn residuals(&self, b: &DVector<f64>) -> DVector<f64> {
        let e = self.hit(b) - self.target;
        DVector::from_vec(vec![e.x, e.y, e.z])
    }

    fn jacobian(&self, _: &DVector<f64>) -> DMatrix<f64> {
        let [a, b] = self.columns();
        DMatrix::from_row_slice(3, 2, &[a.x, b.x, a.y, b.y, a.z, b.z])
    }
}

/// Objective `f(β) = ‖g(β) − p*‖²` on the target's virtual plane and its
/// analytic gradient `2·Jᵀ·r`.
pub fn ik_objective(cal: &LaserCalibration, target: Vec3, beta: WaypointCoord) -> Result<(f64, [f64; 2]), GeometryError> {
    let p = ik_problem(cal, target)?;
    let b = DVector::from_vec(vec![beta.x, beta.y]);
    let r = p.hit(&b) - target;
    let [ja, jb] = p.columns();
    Ok((r.norm_squared(), [2.0 * ja.dot(r), 2.0 * jb.dot(r)]))
}

fn ik_problem(cal: &LaserCalibration, target: Vec3) -> Result<IkProblem<'_>, GeometryError> {
    let plane = PlaneFrame::at_target(target);
    let d = plane.normal.dot(cal.v_w);
    if d.abs() <= crate::geometry::PARALLEL_EPS {
        return Err(GeometryError::ParallelRay(d));
    }
    Ok(IkProblem { cal, target, plane })
}

/// Waypoint that puts the beam on `target`, found by nonlinear least squares
/// on the virtual plane through the target with normal +z.
pub fn solve_ik(cal: &LaserCalibration, target: Vec3, options: &IkOptions) -> Result<IkSolution, KinematicsError> {
    solve_ik_indexed(cal, target, options, 0)
}

fn solve_ik_indexed(cal: &LaserCalibration, target: Vec3, options: &IkOptions, index: usize) -> Result<IkSolution, KinematicsError> {
    let problem = ik_problem(cal, target)?;
    let sol = lsq::solve(&problem, DVector::zeros(2), &options.solver);
    let beta = WaypointCoord::new(sol.params[0], sol.params[1]);
    let residual = sol.residuals.norm();
    let outside = options.workspace.is_some_and(|w| !w.contains(beta));
    if !(residual < IK_TOLERANCE) || outside {
        return Err(KinematicsError::Unreachable { index, residual });
    }
    Ok(IkSolution {
        beta,
        residual,
        iterations: sol.iterations,
    })
}

/// Ordered laser targets with their waypoints.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CutPlan {
    pub targets: Vec<Vec3>,
    pub waypoints: Vec<WaypointCoord>,
    pub residuals: Vec<f64>,
}

impl CutPlan {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), KinematicsError> {
        let err = |e: csv::Error| KinematicsError::Io(e.to_string());
        let mut w = csv::Writer::from_path(path).map_err(err)?;
        w.write_record(["k", "beta_x", "beta_y", "px", "py", "pz", "residual"]).map_err(err)?;
        for (k, ((t, b), r)) in self.targets.iter().zip(&self.waypoints).zip(&self.residuals).enumerate() {
            w.write_record([
                k.to_string(),
                b.x.to_string(),
                b.y.to_string(),
                t.x.to_string(),
                t.y.to_string(),
                t.z.to_string(),
                r.to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| KinematicsError::Io(e.to_string()))
    }

    pub fn write_json(&self, path: &Path) -> Result<(), KinematicsError> {
        let s = serde_json::to_string_pretty(self).map_err(|e| KinematicsError::Io(e.to_string()))?;
        std::fs::write(path, s).map_err(|e| KinematicsError::Io(e.to_string()))
    }
}

/// Minimizes the summed squared target misses. The objective separates over
/// targets, so each waypoint is the single-target IK solution; input order
/// is kept.
pub fn plan_trajectory(cal: &LaserCalibration, targets: &[Vec3], options: &IkOptions) -> Result<CutPlan, KinematicsError> {
    let mut plan = CutPlan::default();
    for (k, &t) in targets.iter().enumerate() {
        let s = solve_ik_indexed(cal, t, options, k)?;
        plan.targets.push(t);
        plan.waypoints.push(s.beta);
        plan.residuals.push(s.residual);
    }
    Ok(plan)
}
