use serde::{Deserialize, Serialize};

use super::SensorError;
use crate::geometry::{Mat3, Vec2, Vec3};

/// Rigid transform from the world (OCT) frame into a camera frame:
/// `X_cam = R·X_world + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub rotation: Mat3,
    pub translation: Vec3,
}

impl Pose {
    pub const IDENTITY: Pose = Pose {
        rotation: Mat3::IDENTITY,
        translation: Vec3::ZERO,
    };

    pub fn apply(&self, p: Vec3) -> Vec3 {
        self.rotation.mul_vec(p) + self.translation
    }

    /// Camera centre in world coordinates, `−Rᵀt`.
    pub fn center(&self) -> Vec3 {
        -self.rotation.transpose().mul_vec(self.translation)
    }

    /// Camera at `eye` looking at `target`; image y points along `−up`.
    pub fn look_at(eye: Vec3, target: Vec3, up: Vec3) -> Pose {
        let f = (target - eye).normalized().expect("eye and target must differ");
        let x = f.cross(up).normalized().expect("up must not be parallel to the view direction");
        let y = f.cross(x);
        let rotation = Mat3::from_rows([x.to_array(), y.to_array(), f.to_array()]);
        Pose {
            rotation,
            translation: -rotation.mul_vec(eye),
        }
    }
}

/// Ideal pinhole camera (no distortion).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl Intrinsics {
    /// 1280×720 with the principal point at the image centre.
    pub fn hd(focal: f64) -> Self {
        Self {
            fx: focal,
            fy: focal,
            cx: 640.0,
            cy: 360.0,
            width: 1280,
            height: 720,
        }
    }

    /// Normalized image coordinates `K⁻¹·[u, v, 1]`.
    pub fn normalize(&self, px: Vec2) -> Vec2 {
        Vec2::new((px.x - self.cx) / self.fx, (px.y - self.cy) / self.fy)
    }

    pub fn in_image(&self, px: Vec2) -> bool {
        px.x >= -0.5 && px.y >= -0.5 && px.x < self.width as f64 - 0.5 && px.y < self.height as f64 - 0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinholeCamera {
    pub intrinsics: Intrinsics,
    pub pose: Pose,
}

impl PinholeCamera {
    pub fn new(intrinsics: Intrinsics, pose: Pose) -> Result<Self, SensorError> {
        if !(intrinsics.fx > 0.0 && intrinsics.fy > 0.0) {
            return Err(SensorError::Config("focal lengths must be positive".into()));
        }
        if pose.rotation.orthonormality_error() > 1e-10 {
            return Err(SensorError::Config("camera rotation is not orthonormal".into()));
        }
        Ok(Self { intrinsics, pose })
    }

    /// Perspective projection `u = fx·X/Z + cx`, `v = fy·Y/Z + cy`.
    pub fn project(&self, world: Vec3) -> Result<Vec2, SensorError> {
        let p = self.pose.apply(world);
        if p.z <= 1e-6 {
            return Err(SensorError::BehindCamera);
        }
        let k = &self.intrinsics;
        Ok(Vec2::new(k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy))
    }

    /// World-frame ray direction (unit) through pixel `px`.
    pub fn back_project(&self, px: Vec2) -> Vec3 {
        let n = self.intrinsics.normalize(px);
        let dir_cam = Vec3::new(n.x, n.y, 1.0);
        self.pose
            .rotation
            .transpose()
            .mul_vec(dir_cam)
            .normalized()
            .expect("non-zero by construction")
    }
}

/// Convenience alias used by the mapping module.
pub fn project_world_to_image(camera: &PinholeCamera, p: Vec3) -> Result<Vec2, SensorError> {
    camera.project(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_cam() -> PinholeCamera {
        PinholeCamera::new(Intrinsics::hd(800.0), Pose::IDENTITY).unwrap()
    }

    #[test]
    fn optical_axis_hits_principal_point() {
        let px = identity_cam().project(Vec3::new(0.0, 0.0, 42.0)).unwrap();
        assert_eq!(px, Vec2::new(640.0, 360.0));
    }

    #[test]
    fn off_axis_point() {
        let px = identity_cam().project(Vec3::new(0.1, 0.0, 100.0)).unwrap();
        assert!((px.x - 640.8).abs() < 1e-12);
        assert_eq!(px.y, 360.0);
    }

    #[test]
    fn behind_camera() {
        assert!(matches!(
            identity_cam().project(Vec3::new(1.0, 1.0, 0.0)),
            Err(SensorError::BehindCamera)
        ));
    }

    #[test]
    fn scale_consistency() {
        let cam = PinholeCamera::new(
            Intrinsics::hd(900.0),
            Pose::look_at(Vec3::new(30.0, -40.0, 120.0), Vec3::ZERO, Vec3::Z),
        )
        .unwrap();
        let p = Vec3::new(1.5, -2.0, 3.0);
        let c = cam.pose.center();
        let a = cam.project(p).unwrap();
        let b = cam.project(c + (p - c) * 2.0).unwrap();
        assert!(a.distance(b) < 1e-9);
    }

    #[test]
    fn look_at_centre_projects_to_principal_point() {
        let cam = PinholeCamera::new(
            Intrinsics::hd(1000.0),
            Pose::look_at(Vec3::new(50.0, 0.0, 150.0), Vec3::new(0.0, 0.0, 2.0), Vec3::Z),
        )
        .unwrap();
        let px = cam.project(Vec3::new(0.0, 0.0, 2.0)).unwrap();
        assert!(px.distance(Vec2::new(640.0, 360.0)) < 1e-9);
        assert!((cam.pose.center() - Vec3::new(50.0, 0.0, 150.0)).norm() < 1e-9);
    }

    #[test]
    fn back_projection_inverts_projection() {
        let cam = PinholeCamera::new(
            Intrinsics::hd(1000.0),
            Pose::look_at(Vec3::new(-40.0, 20.0, 130.0), Vec3::ZERO, Vec3::Z),
        )
        .unwrap();
        let p = Vec3::new(2.0, 3.0, 1.0);
        let dir = cam.back_project(cam.project(p).unwrap());
        let to_p = (p - cam.pose.center()).normalized().unwrap();
        assert!((dir - to_p).norm() < 1e-12);
    }
}
