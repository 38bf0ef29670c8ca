//! Browser demo. Each operation has a plain Rust entry point (used by the
//! tests) and a thin `wasm_bindgen` wrapper.

use resect_core::calibration::{incidence_from_angles, LaserCalibration, DEFAULT_WORKING_DISTANCE};
use resect_core::geometry::{Label, ReferenceFrame, Vec2, Vec3};
use resect_core::kinematics::{raster_pattern, solve_ik, IkOptions, Ordering, RasterSpec};
use resect_core::mapping::{boundary_from_tags, label_color, TumorTag};
use resect_core::metrics::{compare_regions, ComparisonKind, Region2D, RegionRole};
use resect_core::sensor::{synth_spectrum_with, SpectrumSynthConfig};
use resect_core::spectra::{preprocess, PreprocessConfig, TissueClass};
use wasm_bindgen::prelude::*;

/// Side of the square scan field, mm.
pub const FIELD: f64 = 13.0;
const PITCH: f64 = 0.02;

/// Scan of a disc-shaped tumor and the boundary mapped from it.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct MapView {
    tags: Vec<f64>,
    vertices: Vec<f64>,
    pub iou: f64,
    pub undercut: f64,
    pub overcut: f64,
    pub edge_mean: f64,
}

#[wasm_bindgen]
impl MapView {
    /// `[x, y, is_tumor]` per scan point.
    #[wasm_bindgen(getter)]
    pub fn tags(&self) -> Vec<f64> {
        self.tags.clone()
    }

    /// Boundary outline as `[x0, y0, x1, y1, ...]`.
    #[wasm_bindgen(getter)]
    pub fn vertices(&self) -> Vec<f64> {
        self.vertices.clone()
    }
}

/// Rasters the field with `per_side²` points, labels those inside the disc
/// as tumor, maps the boundary and scores it against the disc.
pub fn map_disc(cx: f64, cy: f64, radius: f64, per_side: usize, shrink: f64) -> Result<MapView, String> {
    let scan = raster_pattern((FIELD, FIELD), RasterSpec::Counts(per_side, per_side), Ordering::Serpentine).map_err(|e| e.to_string())?;
    let disc = Region2D::disc(Vec2::new(cx, cy), radius, RegionRole::True).map_err(|e| e.to_string())?;
    let tags: Vec<TumorTag> = scan
        .points
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let label = if disc.contains(*p) { Label::Tumor } else { Label::Healthy };
            TumorTag { position: Vec3::new(p.x, p.y, 0.0), label, color: label_color(label), spectrum_id: k }
        })
        .collect();
    let boundary = boundary_from_tags(&tags, shrink).map_err(|e| e.to_string())?;
    let predicted = Region2D::polygon(boundary.vertices.clone(), RegionRole::Predicted).map_err(|e| e.to_string())?;
    let r = compare_regions(ComparisonKind::Algorithm, &disc, &predicted, PITCH).map_err(|e| e.to_string())?;
    Ok(MapView {
        tags: tags.iter().flat_map(|t| [t.position.x, t.position.y, t.is_tumor() as u8 as f64]).collect(),
        vertices: boundary.vertices.iter().flat_map(|v| [v.x, v.y]).collect(),
        iou: r.iou,
        undercut: r.undercut,
        overcut: r.overcut,
        edge_mean: r.mean,
    })
}

#[wasm_bindgen(js_name = mapDisc)]
pub fn map_disc_js(cx: f64, cy: f64, radius: f64, per_side: usize, shrink: f64) -> Result<MapView, JsError> {
    map_disc(cx, cy, radius, per_side, shrink).map_err(|e| JsError::new(&e))
}

/// A laser head a little off vertical, tipped further by `tilt_deg` about y.
pub fn demo_calibration(tilt_deg: f64) -> Result<LaserCalibration, String> {
    let yaw = 1f64.to_radians();
    let frame = ReferenceFrame::new(
        Vec3::new(0.0, 0.0, DEFAULT_WORKING_DISTANCE),
        Vec3::new(yaw.cos(), yaw.sin(), 0.0),
        Vec3::new(-yaw.sin(), yaw.cos(), 0.0),
    )
    .map_err(|e| e.to_string())?;
    let v = incidence_from_angles(2f64.to_radians(), (tilt_deg - 3.0).to_radians());
    LaserCalibration::new(frame, [0.8, -0.5], v).map_err(|e| e.to_string())
}

/// Stage commands that put the beam on each point of a raster at height
/// `z`, as `[βx0, βy0, βx1, ...]` in scan order.
pub fn aim_raster(tilt_deg: f64, z: f64, per_side: usize) -> Result<Vec<f64>, String> {
    let cal = demo_calibration(tilt_deg)?;
    let scan = raster_pattern((FIELD, FIELD), RasterSpec::Counts(per_side, per_side), Ordering::Serpentine).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(2 * scan.len());
    for p in &scan.points {
        let s = solve_ik(&cal, Vec3::new(p.x, p.y, z), &IkOptions::default()).map_err(|e| e.to_string())?;
        out.extend([s.beta.x, s.beta.y]);
    }
    Ok(out)
}

/// `[βx, βy, residual]` for a single target.
pub fn aim_point(tilt_deg: f64, x: f64, y: f64, z: f64) -> Result<Vec<f64>, String> {
    let cal = demo_calibration(tilt_deg)?;
    let s = solve_ik(&cal, Vec3::new(x, y, z), &IkOptions::default()).map_err(|e| e.to_string())?;
    Ok(vec![s.beta.x, s.beta.y, s.residual])
}

#[wasm_bindgen(js_name = aimRaster)]
pub fn aim_raster_js(tilt_deg: f64, z: f64, per_side: usize) -> Result<Vec<f64>, JsError> {
    aim_raster(tilt_deg, z, per_side).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = aimPoint)]
pub fn aim_point_js(tilt_deg: f64, x: f64, y: f64, z: f64) -> Result<Vec<f64>, JsError> {
    aim_point(tilt_deg, x, y, z).map_err(|e| JsError::new(&e))
}

/// A synthetic probe spectrum before and after preprocessing.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct SpectrumView {
    wavelengths: Vec<f64>,
    raw: Vec<f64>,
    smoothed: Vec<f64>,
}

#[wasm_bindgen]
impl SpectrumView {
    #[wasm_bindgen(getter)]
    pub fn wavelengths(&self) -> Vec<f64> {
        self.wavelengths.clone()
    }

    /// Cropped to the band and max-normalized, not smoothed.
    #[wasm_bindgen(getter)]
    pub fn raw(&self) -> Vec<f64> {
        self.raw.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn smoothed(&self) -> Vec<f64> {
        self.smoothed.clone()
    }
}

pub fn spectrum(tumor: bool, seed: u64, noise: f64, window: usize, order: usize) -> Result<SpectrumView, String> {
    let class = if tumor { TissueClass::Tumor } else { TissueClass::Healthy };
    let synth = SpectrumSynthConfig { noise, ..SpectrumSynthConfig::default() };
    let s = synth_spectrum_with(class, seed, &synth);
    let cfg = PreprocessConfig { window, order, ..PreprocessConfig::default() };
    let smoothed = preprocess(&s, &cfg).map_err(|e| e.to_string())?;
    // Smoothing order 0 with window 1 is the identity, which gives the
    // normalized input on exactly the same wavelengths.
    let raw = preprocess(&s, &PreprocessConfig { window: 1, order: 0, ..cfg }).map_err(|e| e.to_string())?;
    Ok(SpectrumView {
        wavelengths: smoothed.wavelengths().to_vec(),
        raw: raw.intensities().to_vec(),
        smoothed: smoothed.intensities().to_vec(),
    })
}

#[wasm_bindgen(js_name = spectrum)]
pub fn spectrum_js(tumor: bool, seed: u32, noise: f64, window: usize, order: usize) -> Result<SpectrumView, JsError> {
    spectrum(tumor, seed as u64, noise, window, order).map_err(|e| JsError::new(&e))
}
