//! File formats for the tumor map: ASCII PLY clouds, boundary JSON and the
//! target list consumed by the planner.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BoundaryPolygon, CutRegion, MappingError, TumorTag};
use crate::geometry::{Label, SurfaceCloud, Vec3};

fn io_err(e: impl std::fmt::Display) -> MappingError {
    MappingError::Io(e.to_string())
}

fn ply_header(n: usize) -> String {
    format!(
        "ply\nformat ascii 1.0\nelement vertex {n}\nproperty float64 x\nproperty float64 y\nproperty float64 z\n\
         property uchar red\nproperty uchar green\nproperty uchar blue\nproperty uchar label\nend_header\n"
    )
}

fn label_byte(l: Label) -> u8 {
    u8::from(l == Label::Tumor)
}

fn ply_body(rows: impl Iterator<Item = (Vec3, [u8; 3], u8)>, out: &mut String) {
    for (p, c, l) in rows {
        let _ = writeln!(out, "{} {} {} {} {} {} {}", p.x, p.y, p.z, c[0], c[1], c[2], l);
    }
}

/// Tags as PLY text; label is 1 for tumor, 0 otherwise.
pub fn tags_to_ply(tags: &[TumorTag]) -> String {
    let mut s = ply_header(tags.len());
    ply_body(tags.iter().map(|t| (t.position, t.color, label_byte(t.label))), &mut s);
    s
}

/// Valid surface points as PLY text. Missing colors are written grey,
/// missing labels as 0.
pub fn surface_to_ply(surface: &SurfaceCloud) -> String {
    let pts: Vec<(usize, Vec3)> = surface.valid_points().collect();
    let mut s = ply_header(pts.len());
    ply_body(
        pts.into_iter().map(|(i, p)| {
            let c = surface.color.as_ref().map_or([128, 128, 128], |c| c[i]);
            let l = surface.label.as_ref().map_or(0, |l| label_byte(l[i]));
            (p, c, l)
        }),
        &mut s,
    );
    s
}

pub fn write_tags_ply(path: &Path, tags: &[TumorTag]) -> Result<(), MappingError> {
    std::fs::write(path, tags_to_ply(tags)).map_err(io_err)
}

pub fn write_surface_ply(path: &Path, surface: &SurfaceCloud) -> Result<(), MappingError> {
    std::fs::write(path, surface_to_ply(surface)).map_err(io_err)
}

/// Reads back a PLY written by [`write_tags_ply`].
pub fn read_tags_ply(path: &Path) -> Result<Vec<TumorTag>, MappingError> {
    let text = std::fs::read_to_string(path).map_err(io_err)?;
    let (_, body) = text.split_once("end_header\n").ok_or_else(|| io_err("missing end_header"))?;
    body.lines()
        .enumerate()
        .map(|(k, line)| {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 7 {
                return Err(io_err(format!("vertex {k}: expected 7 fields")));
            }
            let num = |i: usize| f[i].parse::<f64>().map_err(io_err);
            let byte = |i: usize| f[i].parse::<u8>().map_err(io_err);
            Ok(TumorTag {
                position: Vec3::new(num(0)?, num(1)?, num(2)?),
                color: [byte(3)?, byte(4)?, byte(5)?],
                label: if byte(6)? == 1 { Label::Tumor } else { Label::Healthy },
                spectrum_id: k,
            })
        })
        .collect()
}

pub fn write_boundary_json(path: &Path, b: &BoundaryPolygon) -> Result<(), MappingError> {
    std::fs::write(path, serde_json::to_string_pretty(b).map_err(io_err)?).map_err(io_err)
}

pub fn read_boundary_json(path: &Path) -> Result<BoundaryPolygon, MappingError> {
    serde_json::from_str(&std::fs::read_to_string(path).map_err(io_err)?).map_err(io_err)
}

#[derive(Debug, Serialize, Deserialize)]
struct TargetRow {
    k: usize,
    px: f64,
    py: f64,
    pz: f64,
}

/// Cut targets in planning order.
pub fn write_targets_csv(path: &Path, region: &CutRegion) -> Result<(), MappingError> {
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    for (k, p) in region.targets.iter().enumerate() {
        w.serialize(TargetRow { k, px: p.x, py: p.y, pz: p.z }).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_targets_csv(path: &Path) -> Result<Vec<Vec3>, MappingError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(io_err)?;
    let mut rows: Vec<TargetRow> = r.deserialize().collect::<Result<_, _>>().map_err(io_err)?;
    rows.sort_by_key(|row| row.k);
    Ok(rows.into_iter().map(|row| Vec3::new(row.px, row.py, row.pz)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::{boundary_from_tags, label_color, select_cut_targets};

    fn tags() -> Vec<TumorTag> {
        [(0.0, 0.0, true), (1.5, 0.0, true), (0.1, 2.25, true), (3.0, 3.0, false), (0.5, 0.5, false)]
            .iter()
            .enumerate()
            .map(|(k, &(x, y, t))| {
                let label = if t { Label::Tumor } else { Label::Healthy };
                TumorTag { position: Vec3::new(x, y, 0.3 * k as f64), label, color: label_color(label), spectrum_id: k }
            })
            .collect()
    }

    #[test]
    fn ply_round_trip_and_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tags.ply");
        let t = tags();
        write_tags_ply(&path, &t).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("element vertex 5\n"));
        assert!(text.contains("property uchar label\n"));
        assert_eq!(text.lines().last().unwrap(), format!("0.5 0.5 {} 30 180 60 0", 0.3 * 4.0));
        assert_eq!(read_tags_ply(&path).unwrap(), t);
    }

    #[test]
    fn boundary_and_targets_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t = tags();
        let b = boundary_from_tags(&t, 0.0).unwrap();
        let bp = dir.path().join("boundary.json");
        write_boundary_json(&bp, &b).unwrap();
        assert_eq!(read_boundary_json(&bp).unwrap(), b);
        let region = select_cut_targets(&t, &b).unwrap();
        let tp = dir.path().join("targets.csv");
        write_targets_csv(&tp, &region).unwrap();
        assert!(std::fs::read_to_string(&tp).unwrap().starts_with("k,px,py,pz\n"));
        assert_eq!(read_targets_csv(&tp).unwrap(), region.targets);
    }

    #[test]
    fn surface_ply_skips_invalid() {
        let mut s = SurfaceCloud::from_height_fn(0.0, 0.0, 1.0, 1.0, 2, 2, |_, _| 1.0);
        s.valid[3] = false;
        let text = surface_to_ply(&s);
        assert!(text.contains("element vertex 3\n"));
        assert_eq!(text.lines().filter(|l| l.ends_with(" 128 128 128 0")).count(), 3);
    }
}
