use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::scene::{Rect, ScenePhantom};
use super::SensorError;
use crate::geometry::{SurfaceCloud, Vec2, Vec3};

/// Width of the rendered surface peak, in axial pixels.
pub const PEAK_SIGMA_PX: f64 = 2.0;

/// A-scans whose maximum stays below this are treated as unsegmentable.
pub const DEFAULT_SURFACE_THRESHOLD: f32 = 0.15;

/// C-scan sampling layout. Defaults reproduce the bench device: 128 B-scans
/// of 512 A-scans × 512 axial pixels at 14.6 µm, covering 12.6 × 12.8 mm
/// laterally.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OctGeometry {
    pub ascans_per_bscan: usize,
    pub bscans: usize,
    pub depth_pixels: usize,
    /// mm per axial pixel.
    pub axial_pitch: f64,
    /// Lateral coverage along x (A-scan direction) and y (B-scan stacking).
    pub extent_x: f64,
    pub extent_y: f64,
}

impl Default for OctGeometry {
    fn default() -> Self {
        Self {
            ascans_per_bscan: 512,
            bscans: 128,
            depth_pixels: 512,
            axial_pitch: 0.0146,
            extent_x: 12.6,
            extent_y: 12.8,
        }
    }
}

impl OctGeometry {
    /// mm between neighbouring A-scans (12.6/512 by default).
    pub fn pitch_x(&self) -> f64 {
        self.extent_x / self.ascans_per_bscan as f64
    }

    /// mm between neighbouring B-scans (12.8/128 by default).
    pub fn pitch_y(&self) -> f64 {
        self.extent_y / self.bscans as f64
    }

    pub fn depth_range(&self) -> f64 {
        self.depth_pixels as f64 * self.axial_pitch
    }

    pub fn voxel_count(&self) -> usize {
        self.ascans_per_bscan * self.bscans * self.depth_pixels
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderOptions {
    /// Uniform background noise in `[0, noise_amplitude)`; must stay below 0.1.
    pub noise_amplitude: f32,
    pub seed: u64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            noise_amplitude: 0.0,
            seed: 0,
        }
    }
}

/// A stack of B-scans. Voxel `(b, a, k)` lives at `(b·A + a)·D + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct OctVolume {
    pub geometry: OctGeometry,
    /// XY position of A-scan (0, 0).
    pub origin: Vec2,
    pub data: Vec<f32>,
}

/// Metadata written next to a raw volume export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeSidecar {
    /// `[bscans, ascans_per_bscan, depth_pixels]`.
    pub shape: [usize; 3],
    pub order: String,
    pub dtype: String,
    pub lateral_pitch_x: f64,
    pub lateral_pitch_y: f64,
    pub axial_pitch: f64,
    pub origin: Vec2,
    pub geometry: OctGeometry,
}

impl OctVolume {
    fn offset(&self, b: usize, a: usize) -> usize {
        (b * self.geometry.ascans_per_bscan + a) * self.geometry.depth_pixels
    }

    pub fn ascan(&self, b: usize, a: usize) -> &[f32] {
        let o = self.offset(b, a);
        &self.data[o..o + self.geometry.depth_pixels]
    }

    /// World XY of A-scan `(b, a)`.
    pub fn lateral_position(&self, b: usize, a: usize) -> Vec2 {
        Vec2::new(
            self.origin.x + a as f64 * self.geometry.pitch_x(),
            self.origin.y + b as f64 * self.geometry.pitch_y(),
        )
    }

    pub fn sidecar(&self) -> VolumeSidecar {
        let g = self.geometry;
        VolumeSidecar {
            shape: [g.bscans, g.ascans_per_bscan, g.depth_pixels],
            order: "bscan,ascan,depth".into(),
            dtype: "float32-le".into(),
            lateral_pitch_x: g.pitch_x(),
            lateral_pitch_y: g.pitch_y(),
            axial_pitch: g.axial_pitch,
            origin: self.origin,
            geometry: g,
        }
    }

    /// Writes `<stem>.raw` (little-endian float32) and `<stem>.json`.
    pub fn export(&self, dir: &Path, stem: &str) -> Result<(), SensorError> {
        let mut raw = std::io::BufWriter::new(std::fs::File::create(dir.join(format!("{stem}.raw")))?);
        for v in &self.data {
            raw.write_all(&v.to_le_bytes())?;
        }
        raw.flush()?;
        let json = serde_json::to_string_pretty(&self.sidecar()).map_err(|e| SensorError::Config(e.to_string()))?;
        std::fs::write(dir.join(format!("{stem}.json")), json)?;
        Ok(())
    }

    /// Reads back a volume written by [`OctVolume::export`].
    pub fn import(dir: &Path, stem: &str) -> Result<Self, SensorError> {
        let json = std::fs::read_to_string(dir.join(format!("{stem}.json")))?;
        let side: VolumeSidecar = serde_json::from_str(&json).map_err(|e| SensorError::Config(e.to_string()))?;
        let bytes = std::fs::read(dir.join(format!("{stem}.raw")))?;
        if bytes.len() != side.geometry.voxel_count() * 4 {
            return Err(SensorError::Config(format!(
                "raw volume has {} bytes, sidecar implies {}",
                bytes.len(),
                side.geometry.voxel_count() * 4
            )));
        }
        let data = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Ok(Self {
            geometry: side.geometry,
            origin: side.origin,
            data,
        })
    }
}

/// Renders a synthetic C-scan of `scene` over `window`.
///
/// Every A-scan holds a Gaussian peak (σ = 2 axial pixels) centred on the
/// surface depth `z / axial_pitch`, with amplitude equal to the local
/// albedo, plus optional uniform background noise. The window width and
/// height override the geometry's lateral extents.
pub fn render_oct_volume(
    scene: &ScenePhantom,
    window: &Rect,
    geometry: &OctGeometry,
    options: &RenderOptions,
) -> Result<OctVolume, SensorError> {
    if !scene.domain.contains_rect(window) {
        return Err(SensorError::WindowOutOfDomain);
    }
    if !(0.0..0.1).contains(&options.noise_amplitude) {
        return Err(SensorError::Config("noise amplitude must be in [0, 0.1)".into()));
    }
    let g = OctGeometry {
        extent_x: window.width,
        extent_y: window.height,
        ..*geometry
    };
    let mut volume = OctVolume {
        geometry: g,
        origin: Vec2::new(window.x0, window.y0),
        data: vec![0.0; g.voxel_count()],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let depth = g.depth_pixels;
    let reach = (8.0 * PEAK_SIGMA_PX).ceil() as isize;
    for b in 0..g.bscans {
        for a in 0..g.ascans_per_bscan {
            let p = volume.lateral_position(b, a);
            let centre = scene.height(p.x, p.y) / g.axial_pitch;
            let albedo = scene.albedo_at(p);
            let offset = volume.offset(b, a);
            let ascan = &mut volume.data[offset..offset + depth];
            if options.noise_amplitude > 0.0 {
                for v in ascan.iter_mut() {
                    *v = rng.random::<f32>() * options.noise_amplitude;
                }
            }
            if albedo > 0.0 && centre.is_finite() {
                let k0 = centre.round() as isize;
                for k in (k0 - reach).max(0)..(k0 + reach + 1).min(depth as isize) {
                    let d = k as f64 - centre;
                    let peak = albedo * (-d * d / (2.0 * PEAK_SIGMA_PX * PEAK_SIGMA_PX)).exp();
                    let v = &mut ascan[k as usize];
                    *v = (*v + peak as f32).clamp(0.0, 1.0);
                }
            }
        }
    }
    Ok(volume)
}

/// Surface by per-A-scan argmax: `z = argmax · axial_pitch`.
///
/// A-scans whose maximum is below `threshold` are marked invalid (their
/// point is kept as a placeholder at z = 0 so the grid stays rectangular).
pub fn segment_surface(volume: &OctVolume, threshold: f32) -> Result<SurfaceCloud, SensorError> {
    let g = volume.geometry;
    let mut points = Vec::with_capacity(g.bscans * g.ascans_per_bscan);
    let mut valid = Vec::with_capacity(points.capacity());
    for b in 0..g.bscans {
        for a in 0..g.ascans_per_bscan {
            let ascan = volume.ascan(b, a);
            let (k, max) = ascan
                .iter()
                .enumerate()
                .fold((0usize, f32::NEG_INFINITY), |best, (k, &v)| if v > best.1 { (k, v) } else { best });
            let xy = volume.lateral_position(b, a);
            if max >= threshold {
                points.push(Vec3::new(xy.x, xy.y, k as f64 * g.axial_pitch));
                valid.push(true);
            } else {
                points.push(Vec3::new(xy.x, xy.y, 0.0));
                valid.push(false);
            }
        }
    }
    if !valid.iter().any(|&v| v) {
        return Err(SensorError::EmptySurface);
    }
    let mut cloud = SurfaceCloud::new(g.bscans, g.ascans_per_bscan, points).expect("grid shape by construction");
    cloud.valid = valid;
    Ok(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensor::scene::Primitive;

    fn small() -> OctGeometry {
        OctGeometry {
            ascans_per_bscan: 64,
            bscans: 16,
            ..OctGeometry::default()
        }
    }

    fn window() -> Rect {
        Rect::centered(Vec2::ZERO, 12.6, 12.8)
    }

    #[test]
    fn default_pitches() {
        let g = OctGeometry::default();
        assert!((g.pitch_x() - 12.6 / 512.0).abs() < 1e-15);
        assert!((g.pitch_y() - 0.1).abs() < 1e-15);
        assert!((g.depth_range() - 7.4752).abs() < 1e-9);
    }

    #[test]
    fn flat_scene_peaks_at_index_205() {
        let scene = ScenePhantom {
            primitives: vec![Primitive::Plane { z: 3.0 }],
            ..ScenePhantom::flat_with_disc(0.0, Vec2::ZERO, 0.0)
        };
        let scene = ScenePhantom { regions: vec![], ..scene };
        let vol = render_oct_volume(&scene, &window(), &small(), &RenderOptions::default()).unwrap();
        for b in 0..16 {
            for a in 0..64 {
                let s = vol.ascan(b, a);
                let k = (0..s.len()).max_by(|&i, &j| s[i].total_cmp(&s[j])).unwrap();
                assert_eq!(k, 205);
            }
        }
        let surf = segment_surface(&vol, DEFAULT_SURFACE_THRESHOLD).unwrap();
        for (_, p) in surf.valid_points() {
            assert!((p.z - 3.0).abs() <= 0.0146 / 2.0);
        }
    }

    #[test]
    fn intensities_stay_in_unit_interval() {
        let scene = ScenePhantom::flat_with_disc(2.0, Vec2::ZERO, 3.0);
        let opts = RenderOptions {
            noise_amplitude: 0.09,
            seed: 3,
        };
        let vol = render_oct_volume(&scene, &window(), &small(), &opts).unwrap();
        assert!(vol.data.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn zero_albedo_region_is_unsegmentable() {
        let mut scene = ScenePhantom::flat_with_disc(2.0, Vec2::ZERO, 3.0);
        scene.albedo.insert("tumor".into(), 0.0);
        let opts = RenderOptions {
            noise_amplitude: 0.05,
            seed: 1,
        };
        let vol = render_oct_volume(&scene, &window(), &small(), &opts).unwrap();
        let surf = segment_surface(&vol, DEFAULT_SURFACE_THRESHOLD).unwrap();
        for (i, p) in surf.points.iter().enumerate() {
            let inside = p.xy().norm() <= 3.0;
            assert_eq!(surf.valid[i], !inside, "point {i} at {p:?}");
        }
    }

    #[test]
    fn sphere_cap_apex_is_the_extreme_index() {
        let scene = ScenePhantom {
            primitives: vec![
                Primitive::Plane { z: 2.0 },
                Primitive::SphereCap {
                    center: Vec2::ZERO,
                    radius: 4.0,
                    height: 2.0,
                },
            ],
            regions: vec![],
            ..ScenePhantom::flat_with_disc(0.0, Vec2::ZERO, 0.0)
        };
        let g = OctGeometry {
            ascans_per_bscan: 63,
            bscans: 15,
            ..OctGeometry::default()
        };
        // Odd counts centred on the origin put A-scan (7, 31) on the apex.
        let w = Rect {
            x0: -31.0 * 0.2,
            y0: -7.0 * 0.2,
            width: 63.0 * 0.2,
            height: 15.0 * 0.2,
        };
        let vol = render_oct_volume(&scene, &w, &g, &RenderOptions::default()).unwrap();
        let surf = segment_surface(&vol, DEFAULT_SURFACE_THRESHOLD).unwrap();
        let apex = surf.index(7, 31);
        assert!(surf.points[apex].xy().norm() < 1e-12);
        let top = surf.points.iter().map(|p| p.z).fold(f64::MIN, f64::max);
        assert_eq!(surf.points[apex].z, top);
        assert!((top - 4.0).abs() <= 0.0073);
    }

    #[test]
    fn all_zero_volume_is_empty() {
        let vol = OctVolume {
            geometry: small(),
            origin: Vec2::ZERO,
            data: vec![0.0; small().voxel_count()],
        };
        assert!(matches!(segment_surface(&vol, 0.15), Err(SensorError::EmptySurface)));
    }

    #[test]
    fn window_outside_domain() {
        let scene = ScenePhantom::flat_with_disc(2.0, Vec2::ZERO, 3.0);
        let w = Rect::centered(Vec2::new(40.0, 0.0), 12.6, 12.8);
        assert!(matches!(
            render_oct_volume(&scene, &w, &small(), &RenderOptions::default()),
            Err(SensorError::WindowOutOfDomain)
        ));
    }

    #[test]
    fn raw_export_round_trip() {
        let dir = std::env::temp_dir().join(format!("oct-export-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let scene = ScenePhantom::flat_with_disc(1.0, Vec2::ZERO, 2.0);
        let g = OctGeometry {
            ascans_per_bscan: 8,
            bscans: 4,
            depth_pixels: 128,
            ..OctGeometry::default()
        };
        let vol = render_oct_volume(&scene, &window(), &g, &RenderOptions::default()).unwrap();
        vol.export(&dir, "vol").unwrap();
        assert_eq!(std::fs::metadata(dir.join("vol.raw")).unwrap().len(), 8 * 4 * 128 * 4);
        let back = OctVolume::import(&dir, "vol").unwrap();
        assert_eq!(back, vol);
        std::fs::remove_dir_all(&dir).ok();
    }
}
