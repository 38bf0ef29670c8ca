//! Region comparison metrics: rasterized IoU, undercut and overcut ratios,
//! nearest-neighbor edge error, error summaries and the Welch t-test.

mod report;
mod stats;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{nearest_neighbor, polygon, Vec2};

pub use report::{append_ledger, compare_regions, read_report_json, write_report_json, ComparisonKind, RegionReport};
pub use stats::{ln_gamma, student_t_pdf, student_t_two_sided_p, summarize, two_sample_t_test, ErrorSummary, TTest};

/// Default raster pitch for area computations (mm).
pub const DEFAULT_PITCH: f64 = 0.02;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("both regions are empty")]
    EmptyUnion,
    #[error("reference region is empty")]
    EmptyTrueRegion,
    #[error("boundary needs at least 3 samples")]
    EmptyBoundary,
    #[error("samples need length >= 2 and nonzero variance")]
    DegenerateSamples,
    #[error("no values to summarize")]
    EmptyInput,
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("metrics I/O: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionRole {
    Predicted,
    Actual,
    True,
}

/// Boolean cell grid; cell `(ix, iy)` covers
/// `[origin + (ix, iy)·pitch, origin + (ix+1, iy+1)·pitch)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mask {
    pub origin: Vec2,
    pub pitch: f64,
    pub nx: usize,
    pub ny: usize,
    pub cells: Vec<bool>,
}

impl Mask {
    pub fn new(origin: Vec2, pitch: f64, nx: usize, ny: usize, cells: Vec<bool>) -> Result<Self, MetricsError> {
        if !(pitch > 0.0) || cells.len() != nx * ny {
            return Err(MetricsError::InvalidRegion("mask needs pitch > 0 and nx*ny cells".into()));
        }
        Ok(Self { origin, pitch, nx, ny, cells })
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let fx = ((p.x - self.origin.x) / self.pitch).floor();
        let fy = ((p.y - self.origin.y) / self.pitch).floor();
        if fx < 0.0 || fy < 0.0 || fx >= self.nx as f64 || fy >= self.ny as f64 {
            return false;
        }
        self.cells[fy as usize * self.nx + fx as usize]
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Vec2 {
        self.origin + Vec2::new((ix as f64 + 0.5) * self.pitch, (iy as f64 + 0.5) * self.pitch)
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    fn bounds(&self) -> Option<(Vec2, Vec2)> {
        if self.count() == 0 {
            return None;
        }
        Some((self.origin, self.origin + Vec2::new(self.nx as f64, self.ny as f64) * self.pitch))
    }

    /// Set cells with at least one unset (or off-grid) 4-neighbor.
    fn edge_cells(&self) -> Vec<Vec2> {
        let at = |ix: isize, iy: isize| {
            ix >= 0 && iy >= 0 && (ix as usize) < self.nx && (iy as usize) < self.ny && self.cells[iy as usize * self.nx + ix as usize]
        };
        let mut out = Vec::new();
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let (x, y) = (ix as isize, iy as isize);
                if at(x, y) && !(at(x - 1, y) && at(x + 1, y) && at(x, y - 1) && at(x, y + 1)) {
                    out.push(self.cell_center(ix, iy));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Polygon { vertices: Vec<Vec2> },
    Disc { center: Vec2, radius: f64 },
    Mask(Mask),
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region2D {
    pub shape: Shape,
    pub role: RegionRole,
}

impl Region2D {
    /// Polygon region; the outline must be simple with at least 3 vertices.
    pub fn polygon(vertices: Vec<Vec2>, role: RegionRole) -> Result<Self, MetricsError> {
        if vertices.len() < 3 || !polygon::is_simple(&vertices) || polygon::area(&vertices) == 0.0 {
            return Err(MetricsError::InvalidRegion("polygon must be simple with nonzero area".into()));
        }
        Ok(Self { shape: Shape::Polygon { vertices }, role })
    }

    pub fn disc(center: Vec2, radius: f64, role: RegionRole) -> Result<Self, MetricsError> {
        if !(radius > 0.0) {
            return Err(MetricsError::InvalidRegion("disc radius must be positive".into()));
        }
        Ok(Self { shape: Shape::Disc { center, radius }, role })
    }

    pub fn mask(mask: Mask, role: RegionRole) -> Self {
        Self { shape: Shape::Mask(mask), role }
    }

    pub fn empty(role: RegionRole) -> Self {
        Self { shape: Shape::Empty, role }
    }

    /// Boundary points counted as inside.
    pub fn contains(&self, p: Vec2) -> bool {
        match &self.shape {
            Shape::Polygon { vertices } => polygon::contains_inclusive(p, vertices),
            Shape::Disc { center, radius } => p.distance(*center) <= *radius,
            Shape::Mask(m) => m.contains(p),
            Shape::Empty => false,
        }
    }

    pub fn bounds(&self) -> Option<(Vec2, Vec2)> {
        match &self.shape {
            Shape::Polygon { vertices } => {
                let lo = vertices.iter().fold(Vec2::new(f64::INFINITY, f64::INFINITY), |a, v| Vec2::new(a.x.min(v.x), a.y.min(v.y)));
                let hi = vertices.iter().fold(Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY), |a, v| Vec2::new(a.x.max(v.x), a.y.max(v.y)));
                Some((lo, hi))
            }
            Shape::Disc { center, radius } => Some((*center - Vec2::new(*radius, *radius), *center + Vec2::new(*radius, *radius))),
            Shape::Mask(m) => m.bounds(),
            Shape::Empty => None,
        }
    }

    /// Outline samples with spacing at most `step`. Masks yield the centers
    /// of their edge cells.
    pub fn boundary_samples(&self, step: f64) -> Vec<Vec2> {
        match &self.shape {
            Shape::Polygon { vertices } => polygon::sample_boundary(vertices, step),
            Shape::Disc { center, radius } => {
                let n = ((std::f64::consts::TAU * radius / step).ceil() as usize).max(3);
                polygon::sample_circle(*center, *radius, n)
            }
            Shape::Mask(m) => m.edge_cells(),
            Shape::Empty => Vec::new(),
        }
    }

    pub fn rasterize(&self, grid: &RasterGrid) -> Vec<bool> {
        let Some((lo, hi)) = self.bounds() else {
            return vec![false; grid.nx * grid.ny];
        };
        let mut out = vec![false; grid.nx * grid.ny];
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let c = grid.cell_center(ix, iy);
                if c.x >= lo.x && c.x <= hi.x && c.y >= lo.y && c.y <= hi.y {
                    out[iy * grid.nx + ix] = self.contains(c);
                }
            }
        }
        out
    }
}

/// Axis-aligned grid anchored at integer multiples of the pitch, so any two
/// grids with the same pitch share cell centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterGrid {
    pub pitch: f64,
    pub i0: i64,
    pub j0: i64,
    pub nx: usize,
    pub ny: usize,
}

impl RasterGrid {
    /// Smallest anchored grid covering every nonempty region, or `None` if
    /// all are empty.
    pub fn covering(regions: &[&Region2D], pitch: f64) -> Option<Self> {
        let (lo, hi) = regions.iter().filter_map(|r| r.bounds()).reduce(|(a, b), (c, d)| {
            (Vec2::new(a.x.min(c.x), a.y.min(c.y)), Vec2::new(b.x.max(d.x), b.y.max(d.y)))
        })?;
        let i0 = (lo.x / pitch).floor() as i64 - 1;
        let j0 = (lo.y / pitch).floor() as i64 - 1;
        let i1 = (hi.x / pitch).ceil() as i64 + 1;
        let j1 = (hi.y / pitch).ceil() as i64 + 1;
        Some(Self { pitch, i0, j0, nx: (i1 - i0) as usize, ny: (j1 - j0) as usize })
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Vec2 {
        Vec2::new(
            ((self.i0 + ix as i64) as f64 + 0.5) * self.pitch,
            ((self.j0 + iy as i64) as f64 + 0.5) * self.pitch,
        )
    }

    pub fn cell_area(&self) -> f64 {
        self.pitch * self.pitch
    }
}

/// Cell counts of two regions rasterized on their common grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overlap {
    pub a: usize,
    pub b: usize,
    pub both: usize,
}

impl Overlap {
    pub fn union(&self) -> usize {
        self.a + self.b - self.both
    }
}

pub fn overlap(a: &Region2D, b: &Region2D, pitch: f64) -> Overlap {
    let Some(grid) = RasterGrid::covering(&[a, b], pitch) else {
        return Overlap { a: 0, b: 0, both: 0 };
    };
    let (ra, rb) = (a.rasterize(&grid), b.rasterize(&grid));
    Overlap {
        a: ra.iter().filter(|&&x| x).count(),
        b: rb.iter().filter(|&&x| x).count(),
        both: ra.iter().zip(&rb).filter(|(&x, &y)| x && y).count(),
    }
}

/// Area of a region by rasterization (mm²).
pub fn raster_area(r: &Region2D, pitch: f64) -> f64 {
    let o = overlap(r, &Region2D::empty(r.role), pitch);
    o.a as f64 * pitch * pitch
}

pub fn region_iou(a: &Region2D, b: &Region2D, pitch: f64) -> Result<f64, MetricsError> {
    let o = overlap(a, b, pitch);
    if o.union() == 0 {
        return Err(MetricsError::EmptyUnion);
    }
    Ok(o.both as f64 / o.union() as f64)
}

/// `|True \ Actual| / |True|`.
pub fn undercut_ratio(true_r: &Region2D, actual: &Region2D, pitch: f64) -> Result<f64, MetricsError> {
    let o = overlap(true_r, actual, pitch);
    if o.a == 0 {
        return Err(MetricsError::EmptyTrueRegion);
    }
    Ok((o.a - o.both) as f64 / o.a as f64)
}

/// `|Actual \ True| / |True|`; may exceed 1.
pub fn overcut_ratio(true_r: &Region2D, actual: &Region2D, pitch: f64) -> Result<f64, MetricsError> {
    let o = overlap(true_r, actual, pitch);
    if o.a == 0 {
        return Err(MetricsError::EmptyTrueRegion);
    }
    Ok((o.b - o.both) as f64 / o.a as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeError {
    pub errors: Vec<f64>,
    pub rmse: f64,
}

/// For each sample of `a`, the distance to its nearest sample of `b`.
pub fn edge_error(a: &[Vec2], b: &[Vec2]) -> Result<EdgeError, MetricsError> {
    if a.len() < 3 || b.len() < 3 {
        return Err(MetricsError::EmptyBoundary);
    }
    let errors: Vec<f64> = a
        .iter()
        .map(|&p| nearest_neighbor(p, b).map(|(_, d)| d).map_err(|_| MetricsError::EmptyBoundary))
        .collect::<Result<_, _>>()?;
    let rmse = (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt();
    Ok(EdgeError { errors, rmse })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(x0: f64, y0: f64, w: f64, h: f64) -> Region2D {
        Region2D::polygon(
            vec![Vec2::new(x0, y0), Vec2::new(x0 + w, y0), Vec2::new(x0 + w, y0 + h), Vec2::new(x0, y0 + h)],
            RegionRole::Predicted,
        )
        .unwrap()
    }

    #[test]
    fn iou_basics() {
        let a = rect(0.0, 0.0, 1.0, 1.0);
        assert_eq!(region_iou(&a, &a, DEFAULT_PITCH).unwrap(), 1.0);
        assert_eq!(region_iou(&a, &rect(3.0, 0.0, 1.0, 1.0), DEFAULT_PITCH).unwrap(), 0.0);
        let half = region_iou(&a, &rect(0.5, 0.0, 1.0, 1.0), DEFAULT_PITCH).unwrap();
        assert!((half - 1.0 / 3.0).abs() < 0.01, "{half}");
        let e = Region2D::empty(RegionRole::True);
        assert_eq!(region_iou(&e, &e, DEFAULT_PITCH).unwrap_err(), MetricsError::EmptyUnion);
    }

    #[test]
    fn cut_ratios() {
        let t = Region2D::disc(Vec2::ZERO, 2.0, RegionRole::True).unwrap();
        assert_eq!(undercut_ratio(&t, &t, DEFAULT_PITCH).unwrap(), 0.0);
        assert_eq!(overcut_ratio(&t, &t, DEFAULT_PITCH).unwrap(), 0.0);
        let none = Region2D::empty(RegionRole::Actual);
        assert_eq!(undercut_ratio(&t, &none, DEFAULT_PITCH).unwrap(), 1.0);
        assert_eq!(overcut_ratio(&t, &none, DEFAULT_PITCH).unwrap(), 0.0);
        // Twice the area: radius scaled by sqrt(2).
        let big = Region2D::disc(Vec2::ZERO, 2.0 * 2f64.sqrt(), RegionRole::Actual).unwrap();
        assert_eq!(undercut_ratio(&t, &big, DEFAULT_PITCH).unwrap(), 0.0);
        assert!((overcut_ratio(&t, &big, DEFAULT_PITCH).unwrap() - 1.0).abs() < 0.02);
        assert_eq!(undercut_ratio(&none, &t, DEFAULT_PITCH).unwrap_err(), MetricsError::EmptyTrueRegion);
    }

    #[test]
    fn mask_matches_polygon_on_same_grid() {
        let a = rect(-1.0, -1.0, 2.0, 1.5);
        let grid = RasterGrid::covering(&[&a], 0.1).unwrap();
        let cells = a.rasterize(&grid);
        let origin = Vec2::new(grid.i0 as f64 * 0.1, grid.j0 as f64 * 0.1);
        let m = Region2D::mask(Mask::new(origin, 0.1, grid.nx, grid.ny, cells).unwrap(), RegionRole::Actual);
        assert_eq!(region_iou(&a, &m, 0.1).unwrap(), 1.0);
        assert!(Mask::new(origin, 0.0, 1, 1, vec![true]).is_err());
        assert!(!m.boundary_samples(0.1).is_empty());
    }

    #[test]
    fn edge_error_cases() {
        let sq = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)];
        let a = polygon::sample_boundary(&sq, 0.01);
        let e = edge_error(&a, &a).unwrap();
        assert!(e.errors.iter().all(|&d| d == 0.0) && e.rmse == 0.0);
        let shifted: Vec<Vec2> = a.iter().map(|p| *p + Vec2::new(0.1, 0.0)).collect();
        let e = edge_error(&a, &shifted).unwrap();
        assert!(e.errors.iter().all(|&d| (0.0..=0.1 + 1e-12).contains(&d)));
        assert!((e.errors.iter().cloned().fold(0.0, f64::max) - 0.1).abs() < 1e-9);
        assert_eq!(edge_error(&a[..2], &a).unwrap_err(), MetricsError::EmptyBoundary);
    }

    #[test]
    fn polygon_validation() {
        let bow = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        assert!(Region2D::polygon(bow, RegionRole::True).is_err());
        assert!(Region2D::disc(Vec2::ZERO, 0.0, RegionRole::True).is_err());
    }
}
