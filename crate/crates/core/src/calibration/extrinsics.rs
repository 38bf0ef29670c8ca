//! Camera pose from 2D–3D correspondences: linear DLT on normalized image
//! coordinates, then reprojection-error refinement over (rotation vector,
//! translation).

use nalgebra::{DMatrix, DVector, Matrix3, Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use super::CalibrationError;
use crate::geometry::{Mat3, Vec2, Vec3};
use crate::lsq::{self, LeastSquaresProblem, SolverOptions};
use crate::sensor::{Intrinsics, Pose};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correspondence2D3D {
    pub image: Vec2,
    pub world: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrinsicsEstimate {
    pub pose: Pose,
    /// Reprojection distance per correspondence (px).
    pub residuals_px: Vec<f64>,
    /// The same residuals scaled to mm at each point's camera depth.
    pub residuals_mm: Vec<f64>,
    pub mean_px: f64,
    pub rms_px: f64,
    pub mean_mm: f64,
    pub iterations: usize,
}

fn to_na(m: &Mat3) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| m.rows[i][j])
}

fn from_na(m: &Matrix3<f64>) -> Mat3 {
    Mat3::from_rows([0, 1, 2].map(|i| [0, 1, 2].map(|j| m[(i, j)])))
}

fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Right Jacobian of SO(3) at rotation vector `w`.
fn right_jacobian(w: &Vector3<f64>) -> Matrix3<f64> {
    let t = w.norm();
    let k = skew(w);
    if t < 1e-5 {
        return Matrix3::identity() - k * 0.5 + k * k / 6.0;
    }
    Matrix3::identity() - k * ((1.0 - t.cos()) / (t * t)) + k * k * ((t - t.sin()) / (t * t * t))
}

/// Linear pose estimate. Rank < 11 of the DLT system means the points do
/// not constrain a projection.
fn dlt(k: &Intrinsics, corr: &[Correspondence2D3D]) -> Result<(Matrix3<f64>, Vector3<f64>), CalibrationError> {
    let n = corr.len();
    let centroid = corr.iter().fold(Vector3::zeros(), |a, c| a + Vector3::new(c.world.x, c.world.y, c.world.z)) / n as f64;
    let mean_dist = corr
        .iter()
        .map(|c| (Vector3::new(c.world.x, c.world.y, c.world.z) - centroid).norm())
        .sum::<f64>()
        / n as f64;
    if mean_dist <= 0.0 {
        return Err(CalibrationError::DegenerateConfiguration("all world points coincide".into()));
    }
    let scale = 3f64.sqrt() / mean_dist;

    let mut a = DMatrix::zeros(2 * n, 12);
    for (i, c) in corr.iter().enumerate() {
        let xn = k.normalize(c.image);
        let p = (Vector3::new(c.world.x, c.world.y, c.world.z) - centroid) * scale;
        let ph = [p.x, p.y, p.z, 1.0];
        for j in 0..4 {
            a[(2 * i, j)] = ph[j];
            a[(2 * i, 8 + j)] = -xn.x * ph[j];
            a[(2 * i + 1, 4 + j)] = ph[j];
            a[(2 * i + 1, 8 + j)] = -xn.y * ph[j];
        }
    }
    // 2n ≥ 12 rows, so the thin SVD still yields the full 12×12 right basis.
    let svd = a.svd(false, true);
    let sv = &svd.singular_values;
    let vt = svd.v_t.as_ref().expect("requested");
    let max = sv.max();
    let rank = sv.iter().filter(|&&s| s > 1e-10 * max).count();
    if rank < 11 {
        return Err(CalibrationError::DegenerateConfiguration(format!("DLT system has rank {rank} < 11")));
    }
    let imin = sv.imin();
    let pn = DMatrix::from_fn(3, 4, |i, j| vt[(imin, 4 * i + j)]);
    // Undo the world normalization: P = Pn·T.
    let mut m = Matrix3::from_fn(|i, j| pn[(i, j)] * scale);
    let mut p4 = Vector3::from_fn(|i, _| pn[(i, 3)]) - m * centroid;
    if m.determinant() < 0.0 {
        m = -m;
        p4 = -p4;
    }
    let svd = m.svd(true, true);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let r = u * vt;
    let s = svd.singular_values.mean();
    Ok((r, p4 / s))
}

struct Reprojection<'a> {
    k: &'a Intrinsics,
    corr: &'a [Correspondence2D3D],
}

impl Reprojection<'_> {
    fn pose(p: &DVector<f64>) -> (Rotation3<f64>, Vector3<f64>) {
        (
            Rotation3::from_scaled_axis(Vector3::new(p[0], p[1], p[2])),
            Vector3::new(p[3], p[4], p[5]),
        )
    }
}

impl LeastSquaresProblem for Reprojection<'_> {
    fn residuals(&self, p: &DVector<f64>) -> DVector<f64> {
        let (r, t) = Self::pose(p);
        let mut out = DVector::zeros(2 * self.corr.len());
        for (i, c) in self.corr.iter().enumerate() {
            let pc = r * Vector3::new(c.world.x, c.world.y, c.world.z) + t;
            out[2 * i] = self.k.fx * pc.x / pc.z + self.k.cx - c.image.x;
            out[2 * i + 1] = self.k.fy * pc.y / pc.z + self.k.cy - c.image.y;
        }
        out
    }

    fn jacobian(&self, p: &DVector<f64>) -> DMatrix<f64> {
        let (r, t) = Self::pose(p);
        let w = Vector3::new(p[0], p[1], p[2]);
        let jr = right_jacobian(&w);
        let rm = r.matrix();
        let mut jac = DMatrix::zeros(2 * self.corr.len(), 6);
        for (i, c) in self.corr.iter().enumerate() {
            let pw = Vector3::new(c.world.x, c.world.y, c.world.z);
            let pc = rm * pw + t;
            let (x, y, z) = (pc.x, pc.y, pc.z);
            let dproj = nalgebra::Matrix2x3::new(
                self.k.fx / z,
                0.0,
                -self.k.fx * x / (z * z),
                0.0,
                self.k.fy / z,
                -self.k.fy * y / (z * z),
            );
            // ∂(R·p)/∂ω = −R·[p]×·J_r(ω)
            let drot = -(rm * skew(&pw) * jr);
            let jw = dproj * drot;
            for row in 0..2 {
                for col in 0..3 {
                    jac[(2 * i + row, col)] = jw[(row, col)];
                    jac[(2 * i + row, 3 + col)] = dproj[(row, col)];
                }
            }
        }
        jac
    }
}

pub fn estimate_camera_extrinsics(
    intrinsics: &Intrinsics,
    correspondences: &[Correspondence2D3D],
) -> Result<ExtrinsicsEstimate, CalibrationError> {
    if correspondences.len() < 6 {
        return Err(CalibrationError::TooFewObservations {
            needed: 6,
            got: correspondences.len(),
        });
    }
    let (r0, t0) = dlt(intrinsics, correspondences)?;
    let w0 = Rotation3::from_matrix_unchecked(r0).scaled_axis();
    let x0 = DVector::from_vec(vec![w0.x, w0.y, w0.z, t0.x, t0.y, t0.z]);
    let problem = Reprojection {
        k: intrinsics,
        corr: correspondences,
    };
    let sol = lsq::solve(&problem, x0, &SolverOptions::default());
    if !sol.termination.converged() {
        return Err(CalibrationError::NonConvergence(sol.iterations));
    }
    let (r, t) = Reprojection::pose(&sol.params);
    let pose = Pose {
        rotation: from_na(r.matrix()),
        translation: Vec3::new(t.x, t.y, t.z),
    };
    let focal = 0.5 * (intrinsics.fx + intrinsics.fy);
    let mut residuals_px = Vec::new();
    let mut residuals_mm = Vec::new();
    for (i, c) in correspondences.iter().enumerate() {
        let d = sol.residuals[2 * i].hypot(sol.residuals[2 * i + 1]);
        residuals_px.push(d);
        residuals_mm.push(d * pose.apply(c.world).z / focal);
    }
    let n = residuals_px.len() as f64;
    Ok(ExtrinsicsEstimate {
        pose,
        mean_px: residuals_px.iter().sum::<f64>() / n,
        rms_px: (residuals_px.iter().map(|v| v * v).sum::<f64>() / n).sqrt(),
        mean_mm: residuals_mm.iter().sum::<f64>() / n,
        residuals_px,
        residuals_mm,
        iterations: sol.iterations,
    })
}

/// Angle of the relative rotation `R_aᵀ·R_b` (rad).
pub fn rotation_angle_between(a: &Mat3, b: &Mat3) -> f64 {
    let rel = to_na(a).transpose() * to_na(b);
    ((rel.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
}
