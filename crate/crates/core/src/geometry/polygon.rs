//! Planar polygon helpers: convex hull, area, point-in-polygon and
//! boundary sampling.

use super::Vec2;

/// Distance below which a point counts as lying on a polygon edge.
pub const ON_EDGE_TOL: f64 = 1e-9;

fn orient(o: Vec2, a: Vec2, b: Vec2) -> f64 {
    (a - o).cross(b - o)
}

/// Andrew's monotone chain. Returns indices into `points` of the hull
/// vertices in counter-clockwise order, starting from the lowest-x
/// (then lowest-y) point. Collinear boundary points are dropped. Duplicate
/// points resolve to their lowest index.
pub fn convex_hull(points: &[Vec2]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (points[i], points[j]);
        a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)).then(i.cmp(&j))
    });
    order.dedup_by(|a, b| points[*a] == points[*b]);
    if order.len() < 3 {
        return order;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * order.len());
    for &i in &order {
        while hull.len() >= 2
            && orient(points[hull[hull.len() - 2]], points[hull[hull.len() - 1]], points[i]) <= 0.0
        {
            hull.pop();
        }
        hull.push(i);
    }
    let lower = hull.len() + 1;
    for &i in order.iter().rev().skip(1) {
        while hull.len() >= lower
            && orient(points[hull[hull.len() - 2]], points[hull[hull.len() - 1]], points[i]) <= 0.0
        {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    hull
}

/// Shoelace signed area; positive for counter-clockwise vertex order.
pub fn signed_area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    0.5 * (0..n).map(|i| poly[i].cross(poly[(i + 1) % n])).sum::<f64>()
}

pub fn area(poly: &[Vec2]) -> f64 {
    signed_area(poly).abs()
}

/// Euclidean distance from `p` to segment `ab`.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Whether `p` lies within [`ON_EDGE_TOL`] of the polygon outline.
pub fn on_boundary(p: Vec2, poly: &[Vec2]) -> bool {
    let n = poly.len();
    (0..n).any(|i| point_segment_distance(p, poly[i], poly[(i + 1) % n]) <= ON_EDGE_TOL)
}

/// Even–odd crossing test, without boundary handling.
pub fn crossing_test(p: Vec2, poly: &[Vec2]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Even–odd point-in-polygon; points on the outline count as inside.
pub fn contains_inclusive(p: Vec2, poly: &[Vec2]) -> bool {
    if poly.len() < 3 {
        return on_boundary(p, poly);
    }
    on_boundary(p, poly) || crossing_test(p, poly)
}

fn segments_properly_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    // Touching / collinear overlap also breaks simplicity.
    let on = |p: Vec2, q: Vec2, r: Vec2| point_segment_distance(r, p, q) <= ON_EDGE_TOL;
    (d1 == 0.0 && on(c, d, a))
        || (d2 == 0.0 && on(c, d, b))
        || (d3 == 0.0 && on(a, b, c))
        || (d4 == 0.0 && on(a, b, d))
}

/// No two non-adjacent edges meet. O(n²).
pub fn is_simple(poly: &[Vec2]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if a == b {
            return false;
        }
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (c, d) = (poly[j], poly[(j + 1) % n]);
            if segments_properly_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Points along the closed outline with spacing at most `step`, always
/// including every vertex.
pub fn sample_boundary(poly: &[Vec2], step: f64) -> Vec<Vec2> {
    let n = poly.len();
    let mut out = Vec::new();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let len = a.distance(b);
        let k = ((len / step).ceil() as usize).max(1);
        for s in 0..k {
            out.push(a + (b - a) * (s as f64 / k as f64));
        }
    }
    out
}

/// Circle outline sampled with `n` points, counter-clockwise.
pub fn sample_circle(center: Vec2, radius: f64, n: usize) -> Vec<Vec2> {
    (0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            center + Vec2::new(t.cos(), t.sin()) * radius
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Vec2> {
        vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ]
    }

    #[test]
    fn hull_of_square_with_centre() {
        let mut pts = square();
        pts.push(Vec2::new(0.5, 0.5));
        pts.push(Vec2::new(0.5, 0.0)); // collinear, dropped
        let hull = convex_hull(&pts);
        assert_eq!(hull, vec![0, 1, 2, 3]);
    }

    #[test]
    fn area_of_unit_square() {
        assert_eq!(signed_area(&square()), 1.0);
    }

    #[test]
    fn inclusive_containment() {
        let sq = square();
        assert!(contains_inclusive(Vec2::new(0.5, 0.5), &sq));
        assert!(contains_inclusive(Vec2::new(1.0, 0.5), &sq));
        assert!(contains_inclusive(Vec2::new(0.0, 0.0), &sq));
        assert!(!contains_inclusive(Vec2::new(1.5, 0.5), &sq));
    }

    #[test]
    fn bow_tie_is_not_simple() {
        let bow = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
        ];
        assert!(!is_simple(&bow));
        assert!(is_simple(&square()));
    }

    #[test]
    fn boundary_samples_respect_step() {
        let s = sample_boundary(&square(), 0.3);
        assert_eq!(s.len(), 16);
        for w in s.windows(2) {
            assert!(w[0].distance(w[1]) <= 0.3 + 1e-12);
        }
    }
}
