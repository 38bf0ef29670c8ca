//! 3D primitives shared by every other module: vectors, rays, planes,
//! gridded surfaces, triangulation and ray casting.
//!
//! All types are plain values; every operation is a pure function.

mod mesh;
pub mod polygon;
mod vector;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mesh::{ray_mesh_intersect, ray_triangle_intersect, triangulate_grid, TriMesh};
pub use vector::{Mat3, Vec2, Vec3};

/// `|n · d|` at or below this is treated as a ray parallel to the plane.
pub const PARALLEL_EPS: f64 = 1e-9;

/// Tolerance on the norm of vectors that are required to be unit length.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("ray is parallel to the plane (|n·d| = {0:e})")]
    ParallelRay(f64),
    #[error("grid must be at least 2x2, got {rows}x{cols}")]
    GridTooSmall { rows: usize, cols: usize },
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("vector must be finite and non-zero")]
    ZeroVector,
    #[error("reference axes are degenerate (|v_x·v_y| = {0})")]
    DegenerateAxes(f64),
    #[error("surface has {points} points, expected {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, points: usize },
}

/// A half-line `origin + t·direction, t ≥ 0` with unit direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    origin: Vec3,
    direction: Vec3,
}

impl Ray {
    /// Builds a ray, normalizing `direction`.
    pub fn new(origin: Vec3, direction: Vec3) -> Result<Self, GeometryError> {
        let direction = direction.normalized().ok_or(GeometryError::ZeroVector)?;
        if !origin.is_finite() {
            return Err(GeometryError::ZeroVector);
        }
        Ok(Self { origin, direction })
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

/// A plane through `center` with unit `normal`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneFrame {
    pub center: Vec3,
    pub normal: Vec3,
}

impl PlaneFrame {
    pub fn new(center: Vec3, normal: Vec3) -> Result<Self, GeometryError> {
        let normal = normal.normalized().ok_or(GeometryError::ZeroVector)?;
        Ok(Self { center, normal })
    }

    /// Horizontal plane `z = z0`, normal +z.
    pub fn horizontal(z0: f64) -> Self {
        Self {
            center: Vec3::new(0.0, 0.0, z0),
            normal: Vec3::Z,
        }
    }

    /// The virtual plane used for a laser target: centered on the target
    /// with fixed normal +z.
    pub fn at_target(target: Vec3) -> Self {
        Self {
            center: target,
            normal: Vec3::Z,
        }
    }

    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal.dot(p - self.center)
    }
}

/// The commanded laser motion plane: origin plus two (unit, not necessarily
/// orthogonal) axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFrame {
    pub origin: Vec3,
    pub v_x: Vec3,
    pub v_y: Vec3,
}

impl ReferenceFrame {
    pub fn new(origin: Vec3, v_x: Vec3, v_y: Vec3) -> Result<Self, GeometryError> {
        let v_x = v_x.normalized().ok_or(GeometryError::ZeroVector)?;
        let v_y = v_y.normalized().ok_or(GeometryError::ZeroVector)?;
        let c = v_x.dot(v_y).abs();
        if c >= 0.999 {
            return Err(GeometryError::DegenerateAxes(c));
        }
        Ok(Self { origin, v_x, v_y })
    }

    /// Axis-aligned frame at `origin`.
    pub fn axis_aligned(origin: Vec3) -> Self {
        Self {
            origin,
            v_x: Vec3::X,
            v_y: Vec3::Y,
        }
    }

    /// `origin + a·v_x + b·v_y`.
    pub fn point(&self, a: f64, b: f64) -> Vec3 {
        self.origin + self.v_x * a + self.v_y * b
    }
}

/// Pathology tag attached to a surface point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Healthy,
    Tumor,
    Unknown,
}

/// A gridded, row-major surface: one point per (row, col).
///
/// Points with `valid[i] == false` carry placeholder coordinates and are
/// skipped by triangulation, nearest-neighbor lookups and colorization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCloud {
    pub rows: usize,
    pub cols: usize,
    pub points: Vec<Vec3>,
    pub valid: Vec<bool>,
    pub color: Option<Vec<[u8; 3]>>,
    pub label: Option<Vec<Label>>,
}

impl SurfaceCloud {
    pub fn new(rows: usize, cols: usize, points: Vec<Vec3>) -> Result<Self, GeometryError> {
        if rows * cols != points.len() {
            return Err(GeometryError::ShapeMismatch {
                rows,
                cols,
                points: points.len(),
            });
        }
        let valid = vec![true; points.len()];
        Ok(Self {
            rows,
            cols,
            points,
            valid,
            color: None,
            label: None,
        })
    }

    /// Samples `height(x, y)` on a regular grid; row index walks y, column
    /// index walks x.
    pub fn from_height_fn(
        x0: f64,
        y0: f64,
        dx: f64,
        dy: f64,
        rows: usize,
        cols: usize,
        height: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let mut points = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let y = y0 + r as f64 * dy;
            for c in 0..cols {
                let x = x0 + c as f64 * dx;
                points.push(Vec3::new(x, y, height(x, y)));
            }
        }
        Self {
            rows,
            cols,
            valid: vec![true; points.len()],
            points,
            color: None,
            label: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// Iterator over `(index, point)` for valid points only.
    pub fn valid_points(&self) -> impl Iterator<Item = (usize, Vec3)> + '_ {
        self.points
            .iter()
            .zip(&self.valid)
            .enumerate()
            .filter_map(|(i, (&p, &v))| v.then_some((i, p)))
    }
}

/// Intersection of a ray with a plane:
/// `p = o − [n·(o − c) / (n·d)]·d`.
///
/// The ray is treated as a line: the hit may lie behind the origin, which is
/// what the laser forward model needs when a target plane sits above the
/// waypoint.
pub fn ray_plane_intersect(ray: &Ray, plane: &PlaneFrame) -> Result<Vec3, GeometryError> {
    let denom = plane.normal.dot(ray.direction);
    if denom.abs() <= PARALLEL_EPS {
        return Err(GeometryError::ParallelRay(denom.abs()));
    }
    let s = plane.normal.dot(ray.origin - plane.center) / denom;
    Ok(ray.origin - ray.direction * s)
}

/// Points usable by [`nearest_neighbor`].
pub trait Metric: Copy {
    fn dist(self, other: Self) -> f64;
}

impl Metric for Vec2 {
    fn dist(self, other: Self) -> f64 {
        self.distance(other)
    }
}

impl Metric for Vec3 {
    fn dist(self, other: Self) -> f64 {
        self.distance(other)
    }
}

/// Exact linear-scan nearest neighbor. Ties go to the lowest index.
pub fn nearest_neighbor<P: Metric>(query: P, cloud: &[P]) -> Result<(usize, f64), GeometryError> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &p) in cloud.iter().enumerate() {
        let d = query.dist(p);
        match best {
            Some((_, bd)) if d >= bd => {}
            _ => best = Some((i, d)),
        }
    }
    best.ok_or(GeometryError::EmptyCloud)
}

/// Projection along z onto the XY plane.
pub fn project_to_plane_z(points: &[Vec3]) -> Vec<Vec2> {
    points.iter().map(|p| p.xy()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ground() -> PlaneFrame {
        PlaneFrame::new(Vec3::ZERO, Vec3::Z).unwrap()
    }

    #[test]
    fn plane_hit_normal_incidence() {
        let ray = Ray::new(Vec3::new(0.0, 0.0, 10.0), Vec3::new(0.0, 0.0, -1.0)).unwrap();
        let p = ray_plane_intersect(&ray, &ground()).unwrap();
        assert!(p.distance(Vec3::ZERO) < 1e-15);
    }

    #[test]
    fn plane_hit_at_45_degrees() {
        let ray = Ray::new(Vec3::new(0.0, 0.0, 10.0), Vec3::new(1.0, 0.0, -1.0)).unwrap();
        let p = ray_plane_intersect(&ray, &ground()).unwrap();
        assert!(p.distance(Vec3::new(10.0, 0.0, 0.0)) < 1e-12);
    }

    #[test]
    fn plane_parallel_ray() {
        let ray = Ray::new(Vec3::new(0.0, 0.0, 10.0), Vec3::X).unwrap();
        assert!(matches!(
            ray_plane_intersect(&ray, &ground()),
            Err(GeometryError::ParallelRay(_))
        ));
    }

    #[test]
    fn ray_direction_is_normalized() {
        let ray = Ray::new(Vec3::ZERO, Vec3::new(3.0, 4.0, 0.0)).unwrap();
        assert!((ray.direction().norm() - 1.0).abs() < UNIT_TOL);
        assert!(Ray::new(Vec3::ZERO, Vec3::ZERO).is_err());
    }

    #[test]
    fn reference_frame_accepts_skewed_axes() {
        let tilt = 85f64.to_radians();
        let f = ReferenceFrame::new(Vec3::ZERO, Vec3::X, Vec3::new(tilt.cos(), tilt.sin(), 0.0)).unwrap();
        assert!((f.v_x.dot(f.v_y) - tilt.cos()).abs() < 1e-15);
        assert!(ReferenceFrame::new(Vec3::ZERO, Vec3::X, Vec3::X).is_err());
    }

    #[test]
    fn nearest_exact_member() {
        let cloud = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)];
        assert_eq!(nearest_neighbor(Vec2::new(0.0, 0.0), &cloud).unwrap(), (0, 0.0));
    }

    #[test]
    fn nearest_simple() {
        let cloud = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)];
        let (i, d) = nearest_neighbor(Vec2::new(0.6, 0.0), &cloud).unwrap();
        assert_eq!(i, 1);
        assert!((d - 0.4).abs() < 1e-15);
    }

    #[test]
    fn nearest_tie_goes_to_lowest_index() {
        let cloud = [
            Vec2::new(9.0, 9.0),
            Vec2::new(8.0, 8.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(7.0, 7.0),
            Vec2::new(6.0, 6.0),
            Vec2::new(-1.0, 0.0),
        ];
        assert_eq!(nearest_neighbor(Vec2::ZERO, &cloud).unwrap().0, 2);
    }

    #[test]
    fn nearest_empty() {
        let cloud: [Vec3; 0] = [];
        assert_eq!(nearest_neighbor(Vec3::ZERO, &cloud), Err(GeometryError::EmptyCloud));
    }

    #[test]
    fn projection_drops_z() {
        assert_eq!(project_to_plane_z(&[Vec3::new(1.0, 2.0, 3.0)]), vec![Vec2::new(1.0, 2.0)]);
        assert!(project_to_plane_z(&[]).is_empty());
    }

    #[test]
    fn surface_shape_checked() {
        assert!(SurfaceCloud::new(2, 2, vec![Vec3::ZERO; 3]).is_err());
    }
}
