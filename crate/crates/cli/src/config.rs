use std::path::{Path, PathBuf};

use resect_core::geometry::Vec2;
use resect_core::kinematics::{Ordering, RasterSpec};
use resect_core::sensor::{OctGeometry, Primitive, ScenePhantom};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

/// Synthetic stand-ins for the three laser modules. They differ only in
/// calibration truth and spot noise; the numbers are simulation settings,
/// not hardware measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum LaserProfile {
    #[default]
    Diode,
    Tumorid,
    Fiber,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileTruth {
    /// Incidence angles (θ, φ) in degrees before any configured tilt.
    pub angles_deg: (f64, f64),
    pub alpha: [f64; 2],
    /// In-plane rotation of the waypoint axes (degrees).
    pub yaw_deg: f64,
    /// Lateral spot scatter, per axis (mm).
    pub spot_sigma: f64,
}

impl LaserProfile {
    pub const ALL: [LaserProfile; 3] = [LaserProfile::Diode, LaserProfile::Tumorid, LaserProfile::Fiber];

    pub fn truth(self) -> ProfileTruth {
        match self {
            LaserProfile::Diode => ProfileTruth { angles_deg: (2.0, -3.0), alpha: [0.8, -0.5], yaw_deg: 1.0, spot_sigma: 0.2 },
            LaserProfile::Tumorid => ProfileTruth { angles_deg: (1.0, 2.0), alpha: [-0.4, 0.6], yaw_deg: -0.5, spot_sigma: 0.15 },
            LaserProfile::Fiber => ProfileTruth { angles_deg: (-2.0, 1.0), alpha: [0.3, 0.3], yaw_deg: 0.3, spot_sigma: 0.1 },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LaserProfile::Diode => "diode",
            LaserProfile::Tumorid => "tumorid",
            LaserProfile::Fiber => "fiber",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierChoice {
    /// Band-mean rule on 480–520 nm.
    #[default]
    Threshold,
    Mlp,
    /// Ground-truth labels; stands in for a perfect classifier.
    Oracle,
    /// Labels everything healthy; exercises the empty-region path.
    Healthy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub extent: [f64; 2],
    /// Total raster points; must be a square number.
    pub points: usize,
    pub center: [f64; 2],
    pub ordering: Ordering,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { extent: [13.0, 13.0], points: 100, center: [0.0, 0.0], ordering: Ordering::Serpentine }
    }
}

impl ScanConfig {
    pub fn side(&self) -> Option<usize> {
        let n = (self.points as f64).sqrt().round() as usize;
        (n * n == self.points && n >= 2).then_some(n)
    }

    pub fn spec(&self) -> RasterSpec {
        let n = self.side().unwrap_or(2);
        RasterSpec::Counts(n, n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpConfig {
    pub hidden: Vec<usize>,
    pub epochs: usize,
    /// Generated training spectra per class.
    pub train_per_class: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self { hidden: vec![64, 32], epochs: 20, train_per_class: 150, batch_size: 16, learning_rate: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarkerConfig {
    /// Spacing of the 3×3 fiducial grid (mm).
    pub spacing: f64,
    /// Fiducial heights, cycled over the grid.
    pub heights: Vec<f64>,
}

impl Default for MarkerConfig {
    fn default() -> Self {
        Self { spacing: 4.0, heights: vec![0.0, 1.5, 3.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectoryConfig {
    /// Target samples along the S-curve.
    pub samples: usize,
    /// Laser shots, spread evenly over the samples.
    pub shots: usize,
    /// Lateral swing of the curve (mm).
    pub amplitude: f64,
    /// Length along y (mm).
    pub length: f64,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        Self { samples: 200, shots: 200, amplitude: 3.0, length: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Inline scene; ignored when `scene_file` is set.
    pub scene: ScenePhantom,
    pub scene_file: Option<PathBuf>,
    pub scan: ScanConfig,
    pub profile: LaserProfile,
    /// Extra beam tilt off vertical (degrees), applied about the y axis.
    pub tilt_deg: f64,
    pub classifier: ClassifierChoice,
    pub mlp: MlpConfig,
    /// Switches off every noise source.
    pub noiseless: bool,
    /// Use the true laser and camera calibrations instead of estimating them.
    pub perfect_calibration: bool,
    /// Overrides the profile's spot sigma (mm).
    pub spot_sigma: Option<f64>,
    /// Camera pixel noise (px).
    pub pixel_sigma: f64,
    /// Fiducial jog noise during axis calibration (mm).
    pub axis_sigma: f64,
    pub oct: OctGeometry,
    pub oct_noise: f32,
    pub write_volume: bool,
    pub shrink: f64,
    /// Raster pitch for region metrics (mm).
    pub pitch: f64,
    /// Laser footprint for virtual resection (mm).
    pub spot_diameter: f64,
    pub markers: MarkerConfig,
    pub trajectory: TrajectoryConfig,
    pub seed: Option<u64>,
}

/// Flat tissue at a depth the OCT samples exactly (205 axial pixels) with a
/// 5-mm tumor disc at the origin.
pub fn default_scene() -> ScenePhantom {
    ScenePhantom::flat_with_disc(205.0 * 0.0146, Vec2::ZERO, 5.0)
}

/// Spherical phantom: a cap on a base plane with the tumor on its crown.
pub fn sphere_scene() -> ScenePhantom {
    let mut s = ScenePhantom::flat_with_disc(1.0, Vec2::new(0.5, -0.3), 4.0);
    s.primitives.push(Primitive::SphereCap { center: Vec2::ZERO, radius: 7.0, height: 2.5 });
    s
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scene: default_scene(),
            scene_file: None,
            scan: ScanConfig::default(),
            profile: LaserProfile::Diode,
            tilt_deg: 0.0,
            classifier: ClassifierChoice::Threshold,
            mlp: MlpConfig::default(),
            noiseless: false,
            perfect_calibration: false,
            spot_sigma: None,
            pixel_sigma: 0.3,
            axis_sigma: 0.01,
            oct: OctGeometry { extent_x: 14.0, extent_y: 14.0, ..OctGeometry::default() },
            oct_noise: 0.02,
            write_volume: true,
            shrink: 0.0,
            pitch: resect_core::metrics::DEFAULT_PITCH,
            spot_diameter: 0.4,
            markers: MarkerConfig::default(),
            trajectory: TrajectoryConfig::default(),
            seed: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::config("config", e))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::config("config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn seed(&self) -> u64 {
        self.seed.expect("validated config has a seed")
    }

    pub fn spot_sigma(&self) -> f64 {
        if self.noiseless {
            0.0
        } else {
            self.spot_sigma.unwrap_or(self.profile.truth().spot_sigma)
        }
    }

    pub fn pixel_sigma(&self) -> f64 {
        if self.noiseless { 0.0 } else { self.pixel_sigma }
    }

    pub fn axis_sigma(&self) -> f64 {
        if self.noiseless { 0.0 } else { self.axis_sigma }
    }

    pub fn oct_noise(&self) -> f32 {
        if self.noiseless { 0.0 } else { self.oct_noise }
    }

    /// Loads `scene_file` if set, otherwise returns the inline scene.
    pub fn resolve_scene(&self) -> Result<ScenePhantom, HarnessError> {
        match &self.scene_file {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| HarnessError::config("config", format!("scene file {}: {e}", p.display())))?;
                ScenePhantom::from_json(&text).map_err(|e| HarnessError::config("config", e))
            }
            None => {
                self.scene.validate().map_err(|e| HarnessError::config("config", e))?;
                Ok(self.scene.clone())
            }
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::config("config", m));
        if self.seed.is_none() {
            return bad("a seed is required (config \"seed\" or --seed)");
        }
        if self.scan.side().is_none() {
            return bad("scan.points must be a square number >= 4");
        }
        if !(self.scan.extent[0] > 0.0 && self.scan.extent[1] > 0.0) {
            return bad("scan.extent must be positive");
        }
        if self.scan.extent[0] > self.oct.extent_x || self.scan.extent[1] > self.oct.extent_y {
            return bad("the OCT window must cover the scan extent");
        }
        if !(self.pitch > 0.0) || !(self.spot_diameter > 0.0) {
            return bad("pitch and spot_diameter must be positive");
        }
        if !(0.0..=1.0).contains(&self.shrink) {
            return bad("shrink must be in [0, 1]");
        }
        if !(0.0..60.0).contains(&self.tilt_deg.abs()) {
            return bad("tilt_deg must be within ±60");
        }
        if self.markers.heights.is_empty() || self.trajectory.samples < 3 || self.trajectory.shots < 3 || self.trajectory.shots > self.trajectory.samples {
            return bad("marker heights must be non-empty and 3 <= trajectory.shots <= trajectory.samples");
        }
        self.resolve_scene().map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_once_seeded() {
        let mut c = ExperimentConfig::default();
        assert!(c.validate().is_err());
        c.seed = Some(1);
        c.validate().unwrap();
        assert_eq!(c.scan.side(), Some(10));
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c = ExperimentConfig::from_json(r#"{"seed": 3, "profile": "fiber", "scan": {"points": 64}}"#).unwrap();
        assert_eq!(c.profile, LaserProfile::Fiber);
        assert_eq!(c.scan.side(), Some(8));
        assert_eq!(c.scan.extent, [13.0, 13.0]);
        assert!(ExperimentConfig::from_json(r#"{"sede": 3}"#).is_err());
    }

    #[test]
    fn missing_scene_file_is_a_config_error() {
        let c = ExperimentConfig { seed: Some(0), scene_file: Some("/nonexistent/scene.json".into()), ..Default::default() };
        let e = c.validate().unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn non_square_scan_rejected() {
        let c = ExperimentConfig { seed: Some(0), scan: ScanConfig { points: 50, ..Default::default() }, ..Default::default() };
        assert!(c.validate().is_err());
    }
}
