use serde::{Deserialize, Serialize};

use super::MappingError;
use crate::geometry::{nearest_neighbor, ray_mesh_intersect, Ray, SurfaceCloud, TriMesh, Vec2, Vec3};
use crate::sensor::PinholeCamera;

/// Color given to surface points that project outside the image.
pub const OFF_IMAGE_COLOR: [u8; 3] = [255, 0, 255];

/// The valid surface points as seen by one camera, with their pixel
/// positions.
#[derive(Debug, Clone)]
pub struct CameraView {
    pub camera: PinholeCamera,
    indices: Vec<usize>,
    pixels: Vec<Vec2>,
}

impl CameraView {
    pub fn new(camera: PinholeCamera, surface: &SurfaceCloud) -> Self {
        let (indices, pixels) = surface
            .valid_points()
            .filter_map(|(i, p)| camera.project(p).ok().map(|px| (i, px)))
            .unzip();
        Self { camera, indices, pixels }
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Surface index whose projection is nearest to `px`.
    pub fn nearest_surface_index(&self, px: Vec2) -> Result<usize, MappingError> {
        let (k, _) = nearest_neighbor(px, &self.pixels).map_err(|_| MappingError::NoVisibleSurface)?;
        Ok(self.indices[k])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpotEstimate {
    pub from_left_camera: Vec3,
    pub from_right_camera: Vec3,
    pub from_ray_trace: Vec3,
    /// Component-wise mean of the three.
    pub fused: Vec3,
    /// Largest pairwise distance among the three (mm).
    pub spread: f64,
}

impl SpotEstimate {
    pub fn fuse(a: Vec3, b: Vec3, c: Vec3) -> Self {
        Self {
            from_left_camera: a,
            from_right_camera: b,
            from_ray_trace: c,
            fused: (a + b + c) * (1.0 / 3.0),
            spread: a.distance(b).max(a.distance(c)).max(b.distance(c)),
        }
    }
}

/// Locates a laser spot on the surface three ways (nearest projected
/// surface point in each camera, and the beam traced onto the mesh) and
/// averages them.
pub fn estimate_spot_3d(
    left_hit: Vec2,
    left: &CameraView,
    right_hit: Vec2,
    right: &CameraView,
    surface: &SurfaceCloud,
    mesh: &TriMesh,
    ray: &Ray,
) -> Result<SpotEstimate, MappingError> {
    let a = surface.points[left.nearest_surface_index(left_hit)?];
    let b = surface.points[right.nearest_surface_index(right_hit)?];
    let (c, _) = ray_mesh_intersect(ray, mesh).ok_or(MappingError::NoRayHit)?;
    Ok(SpotEstimate::fuse(a, b, c))
}

/// Row-major RGB image.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    pub width: u32,
    pub height: u32,
    pub data: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> [u8; 3]) -> Self {
        let data = (0..height).flat_map(|v| (0..width).map(move |u| (u, v))).map(|(u, v)| f(u, v)).collect();
        Self { width, height, data }
    }

    pub fn pixel(&self, u: u32, v: u32) -> [u8; 3] {
        self.data[(v * self.width + u) as usize]
    }
}

/// Colors each valid surface point with the image pixel it projects onto.
/// Returns the colored cloud and a per-point visibility flag; invisible or
/// invalid points get [`OFF_IMAGE_COLOR`].
pub fn colorize_surface(
    surface: &SurfaceCloud,
    camera: Option<&PinholeCamera>,
    image: &RgbImage,
) -> Result<(SurfaceCloud, Vec<bool>), MappingError> {
    let camera = camera.ok_or(MappingError::NoCalibration)?;
    let mut colors = vec![OFF_IMAGE_COLOR; surface.len()];
    let mut visible = vec![false; surface.len()];
    for (i, p) in surface.valid_points() {
        let Ok(px) = camera.project(p) else { continue };
        let (u, v) = (px.x.round(), px.y.round());
        if u >= 0.0 && v >= 0.0 && u < image.width as f64 && v < image.height as f64 {
            colors[i] = image.pixel(u as u32, v as u32);
            visible[i] = true;
        }
    }
    let mut out = surface.clone();
    out.color = Some(colors);
    Ok((out, visible))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::triangulate_grid;
    use crate::sensor::{Intrinsics, Pose};

    fn flat() -> SurfaceCloud {
        SurfaceCloud::from_height_fn(-5.0, -5.0, 0.1, 0.1, 101, 101, |_, _| 2.0)
    }

    fn cams() -> (PinholeCamera, PinholeCamera) {
        let target = Vec3::new(0.0, 0.0, 2.0);
        let l = PinholeCamera::new(Intrinsics::hd(1400.0), Pose::look_at(Vec3::new(-40.0, 0.0, 120.0), target, Vec3::Y)).unwrap();
        let r = PinholeCamera::new(Intrinsics::hd(1400.0), Pose::look_at(Vec3::new(40.0, 0.0, 120.0), target, Vec3::Y)).unwrap();
        (l, r)
    }

    #[test]
    fn flat_surface_spot() {
        let s = flat();
        let (mesh, _) = triangulate_grid(&s).unwrap();
        let (l, r) = cams();
        let (lv, rv) = (CameraView::new(l, &s), CameraView::new(r, &s));
        let truth = Vec3::new(1.234, -0.77, 2.0);
        let ray = Ray::new(Vec3::new(truth.x, truth.y, 50.0), Vec3::new(0.0, 0.0, -1.0)).unwrap();
        let est = estimate_spot_3d(l.project(truth).unwrap(), &lv, r.project(truth).unwrap(), &rv, &s, &mesh, &ray).unwrap();
        for p in [est.from_left_camera, est.from_right_camera, est.from_ray_trace, est.fused] {
            assert!(p.distance(truth) <= 0.1 * 2f64.sqrt());
        }
        assert!(est.from_ray_trace.distance(truth) < 1e-9);
        let miss = Ray::new(Vec3::new(50.0, 0.0, 50.0), Vec3::new(0.0, 0.0, -1.0)).unwrap();
        assert_eq!(
            estimate_spot_3d(Vec2::ZERO, &lv, Vec2::ZERO, &rv, &s, &mesh, &miss).unwrap_err(),
            MappingError::NoRayHit
        );
    }

    #[test]
    fn fusion_is_the_mean() {
        let (a, b, c) = (Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 2.0, 0.0), Vec3::new(0.0, 0.0, 3.0));
        let f = SpotEstimate::fuse(a, b, c);
        assert!((f.fused - Vec3::new(1.0 / 3.0, 2.0 / 3.0, 1.0)).norm() < 1e-12);
        assert!((f.spread - 13f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn colorization() {
        let s = flat();
        let (l, _) = cams();
        let red = RgbImage::from_fn(1280, 720, |_, _| [255, 0, 0]);
        let (c, vis) = colorize_surface(&s, Some(&l), &red).unwrap();
        let colors = c.color.unwrap();
        assert!(vis.iter().all(|&v| v));
        assert!(colors.iter().all(|&x| x == [255, 0, 0]));
        assert_eq!(colorize_surface(&s, None, &red).unwrap_err(), MappingError::NoCalibration);
    }

    #[test]
    fn two_tone_image_splits_at_projected_midline() {
        // Camera straight above; image split at column 640 maps to x = 0.
        let s = flat();
        let cam = PinholeCamera::new(Intrinsics::hd(1000.0), Pose::look_at(Vec3::new(0.0, 0.0, 102.0), Vec3::new(0.0, 0.0, 2.0), Vec3::Y)).unwrap();
        let img = RgbImage::from_fn(1280, 720, |u, _| if u < 640 { [0, 255, 0] } else { [0, 0, 255] });
        let (c, _) = colorize_surface(&s, Some(&cam), &img).unwrap();
        let colors = c.color.unwrap();
        // Geometric midline: the ray through the column-639.5 pixel edge.
        let dir = cam.back_project(Vec2::new(639.5, 360.0));
        let c0 = cam.pose.center();
        let x_mid = c0.x + dir.x * (2.0 - c0.z) / dir.z;
        let footprint = 100.0 / 1000.0;
        let mut checked = 0;
        for (p, col) in s.points.iter().zip(&colors) {
            if (p.x - x_mid).abs() > footprint {
                assert_eq!(*col == [0, 255, 0], p.x < x_mid);
                checked += 1;
            }
        }
        assert!(checked > 9000);
    }

    #[test]
    fn behind_camera_gets_sentinel() {
        let s = SurfaceCloud::new(1, 2, vec![Vec3::new(0.0, 0.0, 2.0), Vec3::new(0.0, 0.0, 500.0)]).unwrap();
        let cam = PinholeCamera::new(Intrinsics::hd(1000.0), Pose::look_at(Vec3::new(0.0, 0.0, 102.0), Vec3::new(0.0, 0.0, 2.0), Vec3::Y)).unwrap();
        let img = RgbImage::from_fn(1280, 720, |_, _| [1, 2, 3]);
        let (c, vis) = colorize_surface(&s, Some(&cam), &img).unwrap();
        assert_eq!(vis, vec![true, false]);
        assert_eq!(c.color.unwrap()[1], OFF_IMAGE_COLOR);
    }
}
