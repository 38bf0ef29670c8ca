//! Synthetic scenes and virtual sensors: OCT volumes, pinhole cameras and a
//! point spectrum source.

pub mod camera;
pub mod oct;
pub mod scene;
pub mod spectrum_source;

use thiserror::Error;

pub use camera::{project_world_to_image, Intrinsics, PinholeCamera, Pose};
pub use oct::{render_oct_volume, segment_surface, OctGeometry, OctVolume, RenderOptions, DEFAULT_SURFACE_THRESHOLD};
pub use scene::{Primitive, Rect, Region, RegionShape, ScenePhantom};
pub use spectrum_source::{synth_spectrum, synth_spectrum_with, SpectrumSynthConfig};

#[derive(Debug, Error)]
pub enum SensorError {
    #[error("scan window lies outside the scene domain")]
    WindowOutOfDomain,
    #[error("no A-scan exceeds the surface threshold")]
    EmptySurface,
    #[error("point is behind the camera")]
    BehindCamera,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
