use serde::{Deserialize, Serialize};

use super::{GeometryError, Ray, SurfaceCloud, Vec3};

/// Indexed triangle mesh.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
}

impl TriMesh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle(&self, i: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[i];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|i| {
                let [a, b, c] = self.triangle(i);
                0.5 * (b - a).cross(c - a).norm()
            })
            .sum()
    }
}

fn is_degenerate(a: Vec3, b: Vec3, c: Vec3) -> bool {
    let e1 = b - a;
    let e2 = c - a;
    let scale = e1.norm() * e2.norm();
    scale == 0.0 || e1.cross(e2).norm() <= 1e-12 * scale
}

/// Splits every grid cell along the (r,c)–(r+1,c+1) diagonal.
///
/// Vertices are the surface points verbatim (so vertex `i` is surface point
/// `i`). Triangles touching an invalid point, and zero-area triangles, are
/// skipped; the second return value counts the skipped triangles.
pub fn triangulate_grid(surface: &SurfaceCloud) -> Result<(TriMesh, usize), GeometryError> {
    let (rows, cols) = (surface.rows, surface.cols);
    if rows < 2 || cols < 2 {
        return Err(GeometryError::GridTooSmall { rows, cols });
    }
    let mut triangles = Vec::with_capacity(2 * (rows - 1) * (cols - 1));
    let mut skipped = 0;
    for r in 0..rows - 1 {
        for c in 0..cols - 1 {
            let a = surface.index(r, c);
            let b = surface.index(r, c + 1);
            let d = surface.index(r + 1, c + 1);
            let e = surface.index(r + 1, c);
            for tri in [[a, b, d], [a, d, e]] {
                let ok = tri.iter().all(|&i| surface.valid[i])
                    && !is_degenerate(
                        surface.points[tri[0]],
                        surface.points[tri[1]],
                        surface.points[tri[2]],
                    );
                if ok {
                    triangles.push(tri);
                } else {
                    skipped += 1;
                }
            }
        }
    }
    Ok((
        TriMesh {
            vertices: surface.points.clone(),
            triangles,
        },
        skipped,
    ))
}

/// Möller–Trumbore ray/triangle test. Returns the ray parameter of a hit
/// strictly in front of the origin.
pub fn ray_triangle_intersect(ray: &Ray, tri: [Vec3; 3]) -> Option<f64> {
    const EPS: f64 = 1e-14;
    let [v0, v1, v2] = tri;
    let e1 = v1 - v0;
    let e2 = v2 - v0;
    let d = ray.direction();
    let p = d.cross(e2);
    let det = e1.dot(p);
    if det.abs() < EPS * e1.norm() * e2.norm() {
        return None;
    }
    let inv = 1.0 / det;
    let s = ray.origin() - v0;
    let u = s.dot(p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(e1);
    let v = d.dot(q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(q) * inv;
    (t > EPS).then_some(t)
}

/// Nearest hit with positive ray parameter, as `(point, triangle index)`.
/// Equal distances resolve to the lowest triangle index.
pub fn ray_mesh_intersect(ray: &Ray, mesh: &TriMesh) -> Option<(Vec3, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for i in 0..mesh.triangles.len() {
        if let Some(t) = ray_triangle_intersect(ray, mesh.triangle(i)) {
            if best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, i));
            }
        }
    }
    best.map(|(t, i)| (ray.at(t), i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planar(rows: usize, cols: usize, z: f64) -> SurfaceCloud {
        let dx = 2.0 / (cols - 1) as f64;
        let dy = 2.0 / (rows - 1) as f64;
        SurfaceCloud::from_height_fn(-1.0, -1.0, dx, dy, rows, cols, |_, _| z)
    }

    #[test]
    fn single_cell_gives_two_triangles() {
        let (mesh, skipped) = triangulate_grid(&planar(2, 2, 0.0)).unwrap();
        assert_eq!(mesh.triangles.len(), 2);
        assert_eq!(skipped, 0);
        assert_eq!(mesh.vertices.len(), 4);
    }

    #[test]
    fn three_by_three_gives_eight() {
        let (mesh, _) = triangulate_grid(&planar(3, 3, 1.0)).unwrap();
        assert_eq!(mesh.triangles.len(), 8);
    }

    #[test]
    fn repeated_point_skips_degenerates() {
        // 3x3 grid; collapse the centre (1,1) onto (0,0). Cells touching
        // both corners along the fixed diagonal lose area:
        //   cell(0,0): tris [00,01,11] and [00,11,10] -> both contain 00 and 11, both degenerate
        //   other cells contain 11 but not 00 -> still non-degenerate (shape changes only)
        let mut s = planar(3, 3, 0.0);
        s.points[4] = s.points[0];
        let (mesh, skipped) = triangulate_grid(&s).unwrap();
        assert_eq!(skipped, 2);
        assert_eq!(mesh.triangles.len(), 6);
    }

    #[test]
    fn grid_too_small() {
        let s = SurfaceCloud::new(1, 3, vec![Vec3::ZERO; 3]).unwrap();
        assert!(matches!(triangulate_grid(&s), Err(GeometryError::GridTooSmall { .. })));
    }

    #[test]
    fn planar_area_conserved() {
        let (mesh, _) = triangulate_grid(&planar(7, 5, 2.0)).unwrap();
        assert!((mesh.area() - 4.0).abs() < 1e-9 * 4.0);
    }

    #[test]
    fn vertical_ray_hits_plane_centre() {
        let (mesh, _) = triangulate_grid(&planar(2, 2, 0.0)).unwrap();
        let ray = Ray::new(Vec3::new(0.0, 0.0, 10.0), Vec3::new(0.0, 0.0, -1.0)).unwrap();
        let (p, _) = ray_mesh_intersect(&ray, &mesh).unwrap();
        assert!(p.distance(Vec3::ZERO) < 1e-12);
    }

    #[test]
    fn miss_returns_none() {
        let s = SurfaceCloud::from_height_fn(6.0, -1.0, 1.0, 1.0, 3, 3, |_, _| 0.0);
        let (mesh, _) = triangulate_grid(&s).unwrap();
        let ray = Ray::new(Vec3::new(0.0, 0.0, 10.0), Vec3::new(0.0, 0.0, -1.0)).unwrap();
        assert!(ray_mesh_intersect(&ray, &mesh).is_none());
    }

    #[test]
    fn hits_behind_origin_are_ignored() {
        let (mesh, _) = triangulate_grid(&planar(2, 2, 0.0)).unwrap();
        let ray = Ray::new(Vec3::new(0.0, 0.0, 10.0), Vec3::Z).unwrap();
        assert!(ray_mesh_intersect(&ray, &mesh).is_none());
    }
}
