//! The tumor map: 3D spot localization, labeled tags, the 2D boundary of
//! tumor-labeled tags and the targets that fall inside it.

pub mod export;
mod spot;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{polygon, project_to_plane_z, Label, Vec2, Vec3};
use crate::kinematics::ScanPattern;
use crate::spectra::TissueClass;

pub use spot::{colorize_surface, estimate_spot_3d, CameraView, RgbImage, SpotEstimate, OFF_IMAGE_COLOR};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MappingError {
    #[error("laser ray does not hit the surface")]
    NoRayHit,
    #[error("no surface point is visible to the camera")]
    NoVisibleSurface,
    #[error("input lengths differ")]
    LengthMismatch,
    #[error("need at least 3 tumor tags, got {0}")]
    TooFewTumorTags(usize),
    #[error("tumor tags are collinear")]
    CollinearTags,
    #[error("no tag falls inside the boundary")]
    EmptyRegion,
    #[error("camera is not calibrated")]
    NoCalibration,
    #[error("map I/O: {0}")]
    Io(String),
}

/// One classified probe location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TumorTag {
    pub position: Vec3,
    pub label: Label,
    pub color: [u8; 3],
    pub spectrum_id: usize,
}

impl TumorTag {
    pub fn is_tumor(&self) -> bool {
        self.label == Label::Tumor
    }
}

/// Tag color convention: red for tumor, green for healthy.
pub fn label_color(label: Label) -> [u8; 3] {
    match label {
        Label::Tumor => [220, 30, 30],
        Label::Healthy => [30, 180, 60],
        Label::Unknown => [128, 128, 128],
    }
}

impl From<TissueClass> for Label {
    fn from(c: TissueClass) -> Self {
        match c {
            TissueClass::Tumor => Label::Tumor,
            TissueClass::Healthy => Label::Healthy,
        }
    }
}

/// Zips spots, labels and colors in scan order. `spectrum_id` is the scan
/// index.
pub fn build_tumor_tags(
    scan: &ScanPattern,
    spots: &[Vec3],
    labels: &[TissueClass],
    colors: &[[u8; 3]],
) -> Result<Vec<TumorTag>, MappingError> {
    let n = scan.len();
    if spots.len() != n || labels.len() != n || colors.len() != n {
        return Err(MappingError::LengthMismatch);
    }
    Ok((0..n)
        .map(|k| TumorTag {
            position: spots[k],
            label: labels[k].into(),
            color: colors[k],
            spectrum_id: k,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPolygon {
    /// Counter-clockwise, implicitly closed.
    pub vertices: Vec<Vec2>,
    /// Tag index for each vertex.
    pub source_tags: Vec<usize>,
    pub shrink: f64,
}

impl BoundaryPolygon {
    pub fn contains(&self, p: Vec2) -> bool {
        polygon::contains_inclusive(p, &self.vertices)
    }

    pub fn area(&self) -> f64 {
        polygon::area(&self.vertices)
    }
}

/// Boundary of the tumor-labeled tags projected along z.
///
/// `shrink = 0` gives the convex hull. For `shrink > 0` hull edges longer
/// than `(1 − shrink)·(longest hull edge)` are split at the nearest unused
/// tumor tag, provided the polygon stays simple and still contains every
/// tumor tag; the longest eligible edge is handled first and the process
/// repeats until no edge can be split.
pub fn boundary_from_tags(tags: &[TumorTag], shrink: f64) -> Result<BoundaryPolygon, MappingError> {
    let tumor: Vec<usize> = (0..tags.len()).filter(|&i| tags[i].is_tumor()).collect();
    if tumor.len() < 3 {
        return Err(MappingError::TooFewTumorTags(tumor.len()));
    }
    let pts = project_to_plane_z(&tumor.iter().map(|&i| tags[i].position).collect::<Vec<_>>());
    let hull = polygon::convex_hull(&pts);
    if hull.len() < 3 {
        return Err(MappingError::CollinearTags);
    }
    let shrink = shrink.clamp(0.0, 1.0);
    let mut ring = hull;
    if shrink > 0.0 {
        dig(&pts, &mut ring, shrink);
    }
    Ok(BoundaryPolygon {
        vertices: ring.iter().map(|&k| pts[k]).collect(),
        source_tags: ring.iter().map(|&k| tumor[k]).collect(),
        shrink,
    })
}

fn edge_len(pts: &[Vec2], ring: &[usize], i: usize) -> f64 {
    pts[ring[i]].distance(pts[ring[(i + 1) % ring.len()]])
}

fn dig(pts: &[Vec2], ring: &mut Vec<usize>, shrink: f64) {
    let longest = (0..ring.len()).map(|i| edge_len(pts, ring, i)).fold(0.0, f64::max);
    let limit = (1.0 - shrink) * longest;
    // Edges (by endpoint pair) that have no admissible split.
    let mut stuck: Vec<(usize, usize)> = Vec::new();
    loop {
        let n = ring.len();
        let mut edges: Vec<usize> = (0..n)
            .filter(|&i| edge_len(pts, ring, i) > limit && !stuck.contains(&(ring[i], ring[(i + 1) % n])))
            .collect();
        if edges.is_empty() {
            return;
        }
        edges.sort_by(|&a, &b| edge_len(pts, ring, b).total_cmp(&edge_len(pts, ring, a)).then(a.cmp(&b)));
        let e = edges[0];
        let (a, b) = (ring[e], ring[(e + 1) % n]);
        let mut candidates: Vec<usize> = (0..pts.len()).filter(|k| !ring.contains(k)).collect();
        candidates.sort_by(|&p, &q| {
            polygon::point_segment_distance(pts[p], pts[a], pts[b])
                .total_cmp(&polygon::point_segment_distance(pts[q], pts[a], pts[b]))
                .then(p.cmp(&q))
        });
        let accepted = candidates.into_iter().find(|&c| {
            let mut trial = ring.clone();
            trial.insert(e + 1, c);
            let poly: Vec<Vec2> = trial.iter().map(|&k| pts[k]).collect();
            polygon::is_simple(&poly) && pts.iter().all(|&p| polygon::contains_inclusive(p, &poly))
        });
        match accepted {
            Some(c) => ring.insert(e + 1, c),
            None => stuck.push((a, b)),
        }
    }
}

/// Tags whose projection lies inside or on the boundary, in scan order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutRegion {
    pub members: Vec<usize>,
    pub targets: Vec<Vec3>,
    pub boundary: BoundaryPolygon,
}

pub fn select_cut_targets(tags: &[TumorTag], boundary: &BoundaryPolygon) -> Result<CutRegion, MappingError> {
    let members: Vec<usize> = (0..tags.len()).filter(|&i| boundary.contains(tags[i].position.xy())).collect();
    if !members.iter().any(|&i| tags[i].is_tumor()) {
        return Err(MappingError::EmptyRegion);
    }
    Ok(CutRegion {
        targets: members.iter().map(|&i| tags[i].position).collect(),
        members,
        boundary: boundary.clone(),
    })
}
