use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SensorError;
use crate::geometry::{polygon, Label, Vec2};

/// One additive term of the analytic height field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Primitive {
    /// Constant offset `z`.
    Plane { z: f64 },
    /// Spherical cap with base `radius` and apex `height` above the base.
    SphereCap { center: Vec2, radius: f64, height: f64 },
    /// `height · exp(−d² / 2σ²)`.
    GaussianBump { center: Vec2, sigma: f64, height: f64 },
}

impl Primitive {
    pub fn height_at(&self, p: Vec2) -> f64 {
        match *self {
            Primitive::Plane { z } => z,
            Primitive::SphereCap { center, radius, height } => {
                let d2 = (p - center).dot(p - center);
                if height <= 0.0 || d2 >= radius * radius {
                    return 0.0;
                }
                let sphere_r = (radius * radius + height * height) / (2.0 * height);
                (sphere_r * sphere_r - d2).sqrt() - (sphere_r - height)
            }
            Primitive::GaussianBump { center, sigma, height } => {
                let d2 = (p - center).dot(p - center);
                height * (-d2 / (2.0 * sigma * sigma)).exp()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionShape {
    Disc { center: Vec2, radius: f64 },
    Polygon { vertices: Vec<Vec2> },
}

impl RegionShape {
    pub fn contains(&self, p: Vec2) -> bool {
        match self {
            RegionShape::Disc { center, radius } => p.distance(*center) <= *radius,
            RegionShape::Polygon { vertices } => polygon::contains_inclusive(p, vertices),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub label: String,
    #[serde(flatten)]
    pub shape: RegionShape,
}

/// Axis-aligned rectangle in the XY plane (mm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub width: f64,
    pub height: f64,
}

impl Rect {
    pub fn centered(center: Vec2, width: f64, height: f64) -> Self {
        Self {
            x0: center.x - width / 2.0,
            y0: center.y - height / 2.0,
            width,
            height,
        }
    }

    pub fn contains_rect(&self, o: &Rect) -> bool {
        o.x0 >= self.x0
            && o.y0 >= self.y0
            && o.x0 + o.width <= self.x0 + self.width
            && o.y0 + o.height <= self.y0 + self.height
    }
}

fn default_domain() -> Rect {
    Rect {
        x0: -25.0,
        y0: -25.0,
        width: 50.0,
        height: 50.0,
    }
}

/// Analytic phantom: a height field built from primitives plus labeled
/// regions with per-label reflectivity.
///
/// `albedo` maps region labels to reflectivity in `[0, 1]`; the key
/// `"background"` covers points outside every region (default 1.0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenePhantom {
    pub primitives: Vec<Primitive>,
    #[serde(default)]
    pub regions: Vec<Region>,
    #[serde(default)]
    pub albedo: BTreeMap<String, f64>,
    #[serde(default = "default_domain")]
    pub domain: Rect,
}

impl ScenePhantom {
    pub fn from_json(s: &str) -> Result<Self, SensorError> {
        let scene: ScenePhantom = serde_json::from_str(s).map_err(|e| SensorError::Config(e.to_string()))?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<(), SensorError> {
        for (k, &a) in &self.albedo {
            if !(0.0..=1.0).contains(&a) {
                return Err(SensorError::Config(format!("albedo for {k:?} must be in [0,1], got {a}")));
            }
        }
        for p in &self.primitives {
            let ok = match *p {
                Primitive::Plane { z } => z.is_finite(),
                Primitive::SphereCap { radius, height, .. } => radius > 0.0 && height > 0.0 && height <= radius,
                Primitive::GaussianBump { sigma, height, .. } => sigma > 0.0 && height.is_finite(),
            };
            if !ok {
                return Err(SensorError::Config(format!("invalid primitive {p:?}")));
            }
        }
        Ok(())
    }

    pub fn height(&self, x: f64, y: f64) -> f64 {
        let p = Vec2::new(x, y);
        self.primitives.iter().map(|prim| prim.height_at(p)).sum()
    }

    /// First region containing `p`.
    pub fn region_at(&self, p: Vec2) -> Option<&Region> {
        self.regions.iter().find(|r| r.shape.contains(p))
    }

    pub fn label_at(&self, p: Vec2) -> Label {
        match self.region_at(p).map(|r| r.label.as_str()) {
            Some("tumor") => Label::Tumor,
            _ => Label::Healthy,
        }
    }

    pub fn albedo_at(&self, p: Vec2) -> f64 {
        let key = self.region_at(p).map_or("background", |r| r.label.as_str());
        self.albedo
            .get(key)
            .or_else(|| self.albedo.get("background"))
            .copied()
            .unwrap_or(1.0)
    }

    /// The first disc region labeled `"tumor"`, if any.
    pub fn tumor_disc(&self) -> Option<(Vec2, f64)> {
        self.regions.iter().find_map(|r| match (&r.label[..], &r.shape) {
            ("tumor", RegionShape::Disc { center, radius }) => Some((*center, *radius)),
            _ => None,
        })
    }

    /// Flat phantom at height `z` with a tumor disc.
    pub fn flat_with_disc(z: f64, center: Vec2, radius: f64) -> Self {
        Self {
            primitives: vec![Primitive::Plane { z }],
            regions: vec![Region {
                label: "tumor".into(),
                shape: RegionShape::Disc { center, radius },
            }],
            albedo: BTreeMap::from([("background".into(), 1.0), ("tumor".into(), 0.6)]),
            domain: default_domain(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_json() {
        let s = r#"{"primitives":[{"kind":"plane","z":3.0},
            {"kind":"sphere_cap","center":[1.0,2.0],"radius":4.0,"height":1.5}],
            "regions":[{"label":"tumor","kind":"disc","center":[0.0,0.0],"radius":5.0}],
            "albedo":{"background":0.9,"tumor":0.4}}"#;
        let scene = ScenePhantom::from_json(s).unwrap();
        assert_eq!(scene.primitives.len(), 2);
        assert!((scene.height(1.0, 2.0) - 4.5).abs() < 1e-12);
        assert_eq!(scene.albedo_at(Vec2::ZERO), 0.4);
        assert_eq!(scene.albedo_at(Vec2::new(10.0, 0.0)), 0.9);
        assert_eq!(scene.label_at(Vec2::ZERO), Label::Tumor);
    }

    #[test]
    fn sphere_cap_profile() {
        let cap = Primitive::SphereCap {
            center: Vec2::ZERO,
            radius: 3.0,
            height: 1.0,
        };
        assert!((cap.height_at(Vec2::ZERO) - 1.0).abs() < 1e-12);
        assert!(cap.height_at(Vec2::new(3.0, 0.0)).abs() < 1e-12);
        assert_eq!(cap.height_at(Vec2::new(4.0, 0.0)), 0.0);
    }

    #[test]
    fn rejects_bad_albedo() {
        let s = r#"{"primitives":[{"kind":"plane","z":1.0}],"albedo":{"background":1.5}}"#;
        assert!(ScenePhantom::from_json(s).is_err());
    }
}
