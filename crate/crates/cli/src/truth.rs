//! Simulated ground truth: the real laser and camera poses, the analytic
//! surface the beam lands on, and the synthetic observations fed to the
//! calibration stage.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use resect_core::calibration::{
    incidence_from_angles, AxisObservation, Correspondence2D3D, LaserCalibration, LaserSpotObservation, DEFAULT_WORKING_DISTANCE,
};
use resect_core::geometry::{Label, PlaneFrame, Ray, ReferenceFrame, Vec2, Vec3};
use resect_core::kinematics::WaypointCoord;
use resect_core::mapping::RgbImage;
use resect_core::sensor::{Intrinsics, PinholeCamera, Pose, ScenePhantom};

use crate::config::LaserProfile;

/// Independent generator per pipeline stage so that changing one stage's
/// draws leaves the others untouched.
pub fn stage_rng(seed: u64, stage: &str) -> ChaCha8Rng {
    // FNV-1a over the tag.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in stage.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

/// Zero-mean normal sampler that tolerates σ = 0.
pub struct Noise {
    sigma: f64,
    unit: Normal<f64>,
}

impl Noise {
    pub fn new(sigma: f64) -> Self {
        Self { sigma, unit: Normal::new(0.0, 1.0).expect("unit normal") }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        // Draw even when σ = 0 so the stream position does not depend on σ.
        self.sigma * self.unit.sample(rng)
    }

    pub fn vec2(&self, rng: &mut impl Rng) -> Vec2 {
        Vec2::new(self.sample(rng), self.sample(rng))
    }
}

/// The laser's real calibration for a profile, with `tilt_deg` added to φ.
pub fn truth_calibration(profile: LaserProfile, tilt_deg: f64) -> LaserCalibration {
    let t = profile.truth();
    let yaw = t.yaw_deg.to_radians();
    let frame = ReferenceFrame::new(
        Vec3::new(0.0, 0.0, DEFAULT_WORKING_DISTANCE),
        Vec3::new(yaw.cos(), yaw.sin(), 0.0),
        Vec3::new(-yaw.sin(), yaw.cos(), 0.0),
    )
    .expect("orthogonal axes");
    let v = incidence_from_angles(t.angles_deg.0.to_radians(), (t.angles_deg.1 + tilt_deg).to_radians());
    LaserCalibration::new(frame, t.alpha, v).expect("profile beams point down")
}

pub const CAMERA_FOCAL: f64 = 1400.0;

/// Stereo pair above the field, both aimed near the surface centre.
pub fn truth_cameras() -> [PinholeCamera; 2] {
    let target = Vec3::new(0.0, 0.0, 2.0);
    [Vec3::new(-40.0, -10.0, 120.0), Vec3::new(40.0, -10.0, 120.0)].map(|eye| {
        PinholeCamera::new(Intrinsics::hd(CAMERA_FOCAL), Pose::look_at(eye, target, Vec3::Y)).expect("valid camera")
    })
}

/// First crossing of `ray` with the analytic height field, searched by
/// marching down in z and bisecting the bracket. The returned point lies on
/// the surface (`z = height(x, y)`).
pub fn trace_to_scene(scene: &ScenePhantom, ray: &Ray) -> Option<Vec3> {
    let o = ray.origin();
    let d = ray.direction();
    if d.z >= 0.0 {
        return None;
    }
    let gap = |t: f64| {
        let p = ray.at(t);
        p.z - scene.height(p.x, p.y)
    };
    if gap(0.0) <= 0.0 {
        return None;
    }
    let dt = 0.02 / -d.z;
    let t_max = (o.z + 200.0) / -d.z;
    let (mut lo, mut hi) = (0.0, dt);
    while gap(hi) > 0.0 {
        lo = hi;
        hi += dt;
        if hi > t_max {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = ray.at(hi);
    Some(Vec3::new(p.x, p.y, scene.height(p.x, p.y)))
}

/// Where the real beam commanded to `beta` lands on the scene.
pub fn fire(truth: &LaserCalibration, scene: &ScenePhantom, beta: WaypointCoord) -> Option<Vec3> {
    trace_to_scene(scene, &truth.pose(beta).ray())
}

/// Surface color seen by the cameras.
pub fn tissue_color(scene: &ScenePhantom, p: Vec2) -> [u8; 3] {
    let a = scene.albedo_at(p);
    let base = match scene.label_at(p) {
        Label::Tumor => [170.0, 70.0, 90.0],
        _ => [235.0, 190.0, 175.0],
    };
    base.map(|c| (c * (0.4 + 0.6 * a)).round().clamp(0.0, 255.0) as u8)
}

/// Renders the camera image of the analytic scene. Each pixel ray is
/// intersected with the height field by fixed-point iteration on z, which
/// is adequate for the gentle slopes of the phantoms.
pub fn render_camera_image(scene: &ScenePhantom, camera: &PinholeCamera) -> RgbImage {
    let c = camera.pose.center();
    let dom = scene.domain;
    RgbImage::from_fn(camera.intrinsics.width, camera.intrinsics.height, |u, v| {
        let d = camera.back_project(Vec2::new(u as f64, v as f64));
        if d.z >= 0.0 {
            return [0, 0, 0];
        }
        let mut z = scene.height(c.x, c.y);
        let mut p = c;
        for _ in 0..12 {
            p = c + d * ((z - c.z) / d.z);
            z = scene.height(p.x, p.y);
        }
        if p.x < dom.x0 || p.y < dom.y0 || p.x > dom.x0 + dom.width || p.y > dom.y0 + dom.height {
            return [0, 0, 0];
        }
        tissue_color(scene, p.xy())
    })
}

/// Fiducial jogs of `travel` mm along each true frame axis, read back with
/// `sigma` noise per coordinate.
pub fn axis_observations(truth: &LaserCalibration, travel: f64, sigma: f64, rng: &mut ChaCha8Rng) -> [AxisObservation; 2] {
    let n = Noise::new(sigma);
    let mut jitter = |p: Vec3| p + Vec3::new(n.sample(rng), n.sample(rng), n.sample(rng));
    let o = truth.frame.origin;
    let x = AxisObservation { start: jitter(o), end: jitter(o + truth.frame.v_x * travel) };
    let y = AxisObservation { start: jitter(o), end: jitter(o + truth.frame.v_y * travel) };
    [x, y]
}

pub const BOARD_HEIGHTS: [f64; 3] = [0.0, 3.0, 6.0];
pub const BOARD_BETAS: [f64; 3] = [-4.0, 0.0, 4.0];

/// Laser spots on flat boards, displaced in-plane by N(0, σ²) per axis.
pub fn spot_observations(truth: &LaserCalibration, sigma: f64, rng: &mut ChaCha8Rng) -> Vec<LaserSpotObservation> {
    let n = Noise::new(sigma);
    let mut out = Vec::new();
    for &h in &BOARD_HEIGHTS {
        let plane = PlaneFrame::horizontal(h);
        for &by in &BOARD_BETAS {
            for &bx in &BOARD_BETAS {
                let beta = WaypointCoord::new(bx, by);
                let hit = resect_core::kinematics::forward_model(truth, beta, &plane).expect("beam crosses the board");
                let e = n.vec2(rng);
                out.push(LaserSpotObservation { beta, plane, spot: hit + Vec3::new(e.x, e.y, 0.0) });
            }
        }
    }
    out
}

/// 5×5 fiducials over ±10 mm on two levels, imaged with pixel noise.
pub fn camera_correspondences(camera: &PinholeCamera, sigma_px: f64, rng: &mut ChaCha8Rng) -> Vec<Correspondence2D3D> {
    let n = Noise::new(sigma_px);
    let mut out = Vec::new();
    for z in [0.0, 4.0] {
        for j in 0..5 {
            for i in 0..5 {
                let world = Vec3::new(-10.0 + 5.0 * i as f64, -10.0 + 5.0 * j as f64, z);
                let px = camera.project(world).expect("fiducials are in front of the camera");
                out.push(Correspondence2D3D { image: px + n.vec2(rng), world });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use resect_core::sensor::Primitive;

    #[test]
    fn trace_lands_on_plane_and_cap() {
        let truth = truth_calibration(LaserProfile::Diode, 0.0);
        let flat = ScenePhantom::flat_with_disc(3.0, Vec2::ZERO, 5.0);
        let p = fire(&truth, &flat, WaypointCoord::new(1.0, 2.0)).unwrap();
        let plane_hit = resect_core::kinematics::forward_model(&truth, WaypointCoord::new(1.0, 2.0), &PlaneFrame::horizontal(3.0)).unwrap();
        assert!(p.distance(plane_hit) < 1e-12);

        let mut cap = flat.clone();
        cap.primitives.push(Primitive::SphereCap { center: Vec2::ZERO, radius: 6.0, height: 2.0 });
        let q = fire(&truth, &cap, WaypointCoord::new(0.0, 0.0)).unwrap();
        assert!((q.z - cap.height(q.x, q.y)).abs() < 1e-12);
        assert!(q.z > 3.0);
    }

    #[test]
    fn tilted_profile_still_points_down() {
        for p in LaserProfile::ALL {
            let c = truth_calibration(p, 40.0);
            assert!(c.v_w.z < -0.5);
        }
    }

    #[test]
    fn stage_streams_differ() {
        let a: u64 = stage_rng(7, "scan").random();
        let b: u64 = stage_rng(7, "calibrate").random();
        assert_ne!(a, b);
        assert_eq!(a, stage_rng(7, "scan").random::<u64>());
    }
}
