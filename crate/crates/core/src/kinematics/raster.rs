use serde::{Deserialize, Serialize};

use super::KinematicsError;
use crate::geometry::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    RowMajor,
    /// Alternate rows run backwards.
    Serpentine,
}

/// Grid density: a nominal step (counts `round(extent/step) + 1`) or
/// explicit per-axis counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RasterSpec {
    Step(f64),
    Counts(usize, usize),
}

/// Raster grid centered on the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPattern {
    pub points: Vec<Vec2>,
    pub extent: (f64, f64),
    pub counts: (usize, usize),
    /// Actual spacing `extent / (count − 1)` per axis.
    pub spacing: (f64, f64),
    pub ordering: Ordering,
}

impl ScanPattern {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn translated(&self, offset: Vec2) -> Vec<Vec2> {
        self.points.iter().map(|&p| p + offset).collect()
    }

    pub fn max_consecutive_gap(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(w[1])).fold(0.0, f64::max)
    }
}

fn axis(extent: f64, n: usize) -> (Vec<f64>, f64) {
    if n == 1 {
        return (vec![0.0], 0.0);
    }
    let spacing = extent / (n - 1) as f64;
    ((0..n).map(|i| -extent / 2.0 + i as f64 * spacing).collect(), spacing)
}

pub fn raster_pattern(extent: (f64, f64), spec: RasterSpec, ordering: Ordering) -> Result<ScanPattern, KinematicsError> {
    let (nx, ny) = match spec {
        RasterSpec::Step(step) => {
            if !(step > 0.0) || extent.0 < step || extent.1 < step {
                return Err(KinematicsError::BadStep);
            }
            ((extent.0 / step).round() as usize + 1, (extent.1 / step).round() as usize + 1)
        }
        RasterSpec::Counts(nx, ny) => {
            if nx == 0 || ny == 0 || !(extent.0 >= 0.0 && extent.1 >= 0.0) {
                return Err(KinematicsError::BadStep);
            }
            (nx, ny)
        }
    };
    let (xs, sx) = axis(extent.0, nx);
    let (ys, sy) = axis(extent.1, ny);
    let mut points = Vec::with_capacity(nx * ny);
    for (r, &y) in ys.iter().enumerate() {
        let reverse = ordering == Ordering::Serpentine && r % 2 == 1;
        let row = xs.iter().map(|&x| Vec2::new(x, y));
        if reverse {
            points.extend(row.rev());
        } else {
            points.extend(row);
        }
    }
    Ok(ScanPattern {
        points,
        extent,
        counts: (nx, ny),
        spacing: (sx, sy),
        ordering,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hundred_point_grid() {
        let p = raster_pattern((13.0, 13.0), RasterSpec::Step(1.44), Ordering::RowMajor).unwrap();
        assert_eq!(p.counts, (10, 10));
        assert!((p.spacing.0 - 13.0 / 9.0).abs() < 1e-12);
        assert_eq!(p.len(), 100);
    }

    #[test]
    fn sixty_four_point_grid() {
        let p = raster_pattern((13.0, 13.0), RasterSpec::Counts(8, 8), Ordering::RowMajor).unwrap();
        assert_eq!(p.len(), 64);
        assert!((p.spacing.0 - 13.0 / 7.0).abs() < 1e-12);
        let q = raster_pattern((13.0, 13.0), RasterSpec::Step(13.0 / 7.0), Ordering::RowMajor).unwrap();
        assert_eq!(q.counts, (8, 8));
    }

    #[test]
    fn serpentine_order() {
        let p = raster_pattern((1.0, 1.0), RasterSpec::Counts(2, 2), Ordering::Serpentine).unwrap();
        let idx: Vec<(f64, f64)> = p.points.iter().map(|v| (v.x + 0.5, v.y + 0.5)).collect();
        assert_eq!(idx, vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let s = raster_pattern((13.0, 13.0), RasterSpec::Step(1.44), Ordering::Serpentine).unwrap();
        assert!(s.max_consecutive_gap() <= 1.44 * 2f64.sqrt());
    }

    #[test]
    fn bad_steps() {
        for step in [0.0, -1.0, 20.0, f64::NAN] {
            assert_eq!(
                raster_pattern((13.0, 13.0), RasterSpec::Step(step), Ordering::RowMajor),
                Err(KinematicsError::BadStep)
            );
        }
    }
}
