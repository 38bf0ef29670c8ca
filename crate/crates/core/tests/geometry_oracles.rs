use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resect_core::geometry::{polygon, ray_mesh_intersect, triangulate_grid, Ray, SurfaceCloud, Vec2, Vec3};

/// Hit parameter by Cramer's rule on `o + t·d = a + u·(b−a) + v·(c−a)`.
fn cramer_hit(o: Vec3, d: Vec3, [a, b, c]: [Vec3; 3]) -> Option<f64> {
    let (e1, e2, s) = (b - a, c - a, o - a);
    let det = |x: Vec3, y: Vec3, z: Vec3| x.dot(y.cross(z));
    let m = det(-d, e1, e2);
    if m.abs() < 1e-14 {
        return None;
    }
    let t = det(s, e1, e2) / m;
    let u = det(-d, s, e2) / m;
    let v = det(-d, e1, s) / m;
    (u >= 0.0 && v >= 0.0 && u + v <= 1.0 && t >= 0.0).then_some(t)
}

#[test]
fn ray_mesh_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let heights: Vec<f64> = (0..400).map(|_| rng.random_range(0.0..2.0)).collect();
    let surface = SurfaceCloud::from_height_fn(0.0, 0.0, 1.0, 1.0, 20, 20, |x, y| heights[y as usize * 20 + x as usize]);
    let (mesh, skipped) = triangulate_grid(&surface).unwrap();
    assert_eq!(skipped, 0);
    assert_eq!(mesh.triangles.len(), 2 * 19 * 19);
    let mut hits = 0;
    for _ in 0..1000 {
        let o = Vec3::new(rng.random_range(-2.0..21.0), rng.random_range(-2.0..21.0), 10.0);
        let d = Vec3::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5), -1.0);
        let ray = Ray::new(o, d).unwrap();
        let dir = ray.direction();
        let oracle = (0..mesh.triangles.len())
            .filter_map(|i| cramer_hit(o, dir, mesh.triangle(i)).map(|t| (t, i)))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match (ray_mesh_intersect(&ray, &mesh), oracle) {
            (None, None) => {}
            (Some((p, i)), Some((t, j))) => {
                hits += 1;
                assert!(p.distance(o + dir * t) < 1e-9, "point mismatch");
                assert_eq!(i, j);
            }
            (a, b) => panic!("disagreement: {a:?} vs {b:?}"),
        }
    }
    assert!(hits > 500);
}

/// Directed hull edges `i → j` with every other point strictly to the left.
fn brute_force_hull_edges(pts: &[Vec2]) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            if i != j && (0..pts.len()).filter(|&k| k != i && k != j).all(|k| (pts[j] - pts[i]).cross(pts[k] - pts[i]) > 0.0) {
                edges.push((i, j));
            }
        }
    }
    edges.sort_unstable();
    edges
}

#[test]
fn hull_matches_brute_force_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let n = rng.random_range(3..=50);
        let pts: Vec<Vec2> = (0..n).map(|_| Vec2::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0))).collect();
        let hull = polygon::convex_hull(&pts);
        let mut edges: Vec<(usize, usize)> = (0..hull.len()).map(|k| (hull[k], hull[(k + 1) % hull.len()])).collect();
        edges.sort_unstable();
        assert_eq!(edges, brute_force_hull_edges(&pts));
    }
}

fn winding_number(p: Vec2, poly: &[Vec2]) -> i32 {
    let mut w = 0;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let side = (b - a).cross(p - a);
        if a.y <= p.y && b.y > p.y && side > 0.0 {
            w += 1;
        } else if a.y > p.y && b.y <= p.y && side < 0.0 {
            w -= 1;
        }
    }
    w
}

fn star_polygon(rng: &mut ChaCha8Rng) -> Vec<Vec2> {
    let n = rng.random_range(3..20);
    let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    angles.sort_by(f64::total_cmp);
    angles.iter().map(|&a| Vec2::new(a.cos(), a.sin()) * rng.random_range(0.5..3.0)).collect()
}

#[test]
fn point_in_polygon_matches_winding_number() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let poly = star_polygon(&mut rng);
        for _ in 0..200 {
            let p = Vec2::new(rng.random_range(-3.5..3.5), rng.random_range(-3.5..3.5));
            let near = (0..poly.len()).any(|i| polygon::point_segment_distance(p, poly[i], poly[(i + 1) % poly.len()]) < 1e-6);
            if !near {
                assert_eq!(polygon::contains_inclusive(p, &poly), winding_number(p, &poly) != 0);
            }
        }
        for &v in &poly {
            assert!(polygon::contains_inclusive(v, &poly));
        }
    }
}

proptest! {
    #[test]
    fn hull_contains_everything_and_is_convex(raw in prop::collection::vec((-20i32..20, -20i32..20), 3..60)) {
        let pts: Vec<Vec2> = raw.iter().map(|&(x, y)| Vec2::new(x as f64, y as f64)).collect();
        let hull = polygon::convex_hull(&pts);
        prop_assume!(hull.len() >= 3);
        let poly: Vec<Vec2> = hull.iter().map(|&i| pts[i]).collect();
        for k in 0..poly.len() {
            let (a, b, c) = (poly[k], poly[(k + 1) % poly.len()], poly[(k + 2) % poly.len()]);
            prop_assert!((b - a).cross(c - b) > 0.0);
        }
        for &p in &pts {
            prop_assert!(polygon::contains_inclusive(p, &poly));
        }
        prop_assert!(polygon::signed_area(&poly) > 0.0);
    }

    #[test]
    fn boundary_samples_respect_step(raw in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 3..12), step in 0.05f64..1.0) {
        let pts: Vec<Vec2> = raw.iter().map(|&(x, y)| Vec2::new(x, y)).collect();
        let hull = polygon::convex_hull(&pts);
        prop_assume!(hull.len() >= 3);
        let poly: Vec<Vec2> = hull.iter().map(|&i| pts[i]).collect();
        let s = polygon::sample_boundary(&poly, step);
        for k in 0..s.len() {
            prop_assert!(s[k].distance(s[(k + 1) % s.len()]) <= step + 1e-12);
            prop_assert!(polygon::on_boundary(s[k], &poly));
        }
    }
}
