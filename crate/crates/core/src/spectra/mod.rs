//! Fluorescence spectra: preprocessing, the band-mean threshold classifier,
//! a small from-scratch MLP, subject-level split planning and binary
//! classification metrics.

pub mod io;
pub mod metrics;
pub mod mlp;
pub mod savgol;
pub mod splits;
pub mod threshold;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use metrics::{classification_metrics, ClassificationMetrics};
pub use mlp::{gradient_check, mlp_train, MlpModel, TrainConfig, TrainHistory};
pub use splits::{make_splits, LabeledSample, SplitPlan};
pub use threshold::{fit_threshold, threshold_classify, Polarity, ThresholdClassifier, ThresholdOutcome};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("no wavelengths fall inside the band [{0}, {1}] nm")]
    EmptyBand(f64, f64),
    #[error("spectrum is identically zero in the band")]
    AllZero,
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("invalid smoothing config: window {window}, order {order}")]
    BadSmoother { window: usize, order: usize },
    #[error("band holds {len} samples, fewer than the smoothing window {window}")]
    WindowTooLong { len: usize, window: usize },
    #[error("a class has no spectra")]
    EmptyClass,
    #[error("tumor and healthy band means coincide; polarity is undefined")]
    DegenerateClasses,
    #[error("input width {got} does not match model width {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("training set contains a single class")]
    SingleClassTrainingSet,
    #[error("need at least {needed} subjects, got {got}")]
    TooFewSubjects { needed: usize, got: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("spectra I/O: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumState {
    Raw,
    Preprocessed,
}

/// Tissue class of a spectrum. `Tumor` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TissueClass {
    Healthy,
    Tumor,
}

impl TissueClass {
    pub fn index(self) -> usize {
        match self {
            TissueClass::Healthy => 0,
            TissueClass::Tumor => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 1 {
            TissueClass::Tumor
        } else {
            TissueClass::Healthy
        }
    }
}

/// Intensities on a strictly increasing wavelength grid (nm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    wavelengths: Vec<f64>,
    intensities: Vec<f64>,
    state: SpectrumState,
}

impl Spectrum {
    pub fn new(wavelengths: Vec<f64>, intensities: Vec<f64>) -> Result<Self, SpectraError> {
        if wavelengths.len() != intensities.len() {
            return Err(SpectraError::InvalidSpectrum(format!(
                "{} wavelengths vs {} intensities",
                wavelengths.len(),
                intensities.len()
            )));
        }
        if wavelengths.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SpectraError::InvalidSpectrum("wavelengths must be strictly increasing".into()));
        }
        if intensities.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(SpectraError::InvalidSpectrum("intensities must be finite and non-negative".into()));
        }
        Ok(Self {
            wavelengths,
            intensities,
            state: SpectrumState::Raw,
        })
    }

    pub fn wavelengths(&self) -> &[f64] {
        &self.wavelengths
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn state(&self) -> SpectrumState {
        self.state
    }

    pub fn len(&self) -> usize {
        self.wavelengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavelengths.is_empty()
    }

    /// Mean intensity over `[lo, hi]` nm.
    pub fn band_mean(&self, band: (f64, f64)) -> Result<f64, SpectraError> {
        let (sum, n) = self
            .wavelengths
            .iter()
            .zip(&self.intensities)
            .filter(|(w, _)| (band.0..=band.1).contains(*w))
            .fold((0.0, 0usize), |(s, n), (_, v)| (s + v, n + 1));
        if n == 0 {
            return Err(SpectraError::EmptyBand(band.0, band.1));
        }
        Ok(sum / n as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    /// Kept wavelength band (nm), inclusive.
    pub band: (f64, f64),
    /// Savitzky–Golay window (odd).
    pub window: usize,
    /// Savitzky–Golay polynomial order.
    pub order: usize,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            band: (450.0, 750.0),
            window: 11,
            order: 3,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<(), SpectraError> {
        if self.window % 2 == 0 || self.window <= self.order {
            return Err(SpectraError::BadSmoother {
                window: self.window,
                order: self.order,
            });
        }
        Ok(())
    }
}

/// Crop to the band, divide by the band maximum, then Savitzky–Golay smooth.
///
/// Smoothed values are clipped to `[0, 1]` so the output keeps the
/// non-negative, max-normalized contract even where the filter rings.
pub fn preprocess(s: &Spectrum, cfg: &PreprocessConfig) -> Result<Spectrum, SpectraError> {
    cfg.validate()?;
    let (wavelengths, values): (Vec<f64>, Vec<f64>) = s
        .wavelengths
        .iter()
        .zip(&s.intensities)
        .filter(|(w, _)| (cfg.band.0..=cfg.band.1).contains(*w))
        .map(|(&w, &v)| (w, v))
        .unzip();
    if wavelengths.is_empty() {
        return Err(SpectraError::EmptyBand(cfg.band.0, cfg.band.1));
    }
    if wavelengths.len() < cfg.window {
        return Err(SpectraError::WindowTooLong {
            len: wavelengths.len(),
            window: cfg.window,
        });
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(SpectraError::AllZero);
    }
    let normalized: Vec<f64> = values.iter().map(|v| v / max).collect();
    let intensities = savgol::smooth(&normalized, cfg.window, cfg.order)
        .into_iter()
        .map(|v| v.clamp(0.0, 1.0))
        .collect();
    Ok(Spectrum {
        wavelengths,
        intensities,
        state: SpectrumState::Preprocessed,
    })
}

/// 1-nm grid from `start` to `end` inclusive.
pub fn nm_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step).round() as usize + 1;
    (0..n).map(|i| start + i as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        nm_grid(350.0, 700.0, 1.0)
    }

    #[test]
    fn constant_spectrum_becomes_unit() {
        let s = Spectrum::new(grid(), vec![5.0; 351]).unwrap();
        let p = preprocess(&s, &PreprocessConfig::default()).unwrap();
        assert_eq!(p.wavelengths().first(), Some(&450.0));
        assert_eq!(p.wavelengths().last(), Some(&700.0));
        assert_eq!(p.len(), 251);
        assert!(p.intensities().iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert_eq!(p.state(), SpectrumState::Preprocessed);
    }

    #[test]
    fn ramp_is_preserved_in_the_interior() {
        let g = grid();
        let s = Spectrum::new(g.clone(), g.iter().map(|w| w - 300.0).collect()).unwrap();
        let p = preprocess(&s, &PreprocessConfig::default()).unwrap();
        let max = 400.0;
        let half = 5;
        for i in half..p.len() - half {
            let expect = (p.wavelengths()[i] - 300.0) / max;
            assert!((p.intensities()[i] - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn idempotent_on_a_unit_constant() {
        let s = Spectrum::new(grid(), vec![1.0; 351]).unwrap();
        let cfg = PreprocessConfig::default();
        let once = preprocess(&s, &cfg).unwrap();
        let again = preprocess(&Spectrum::new(once.wavelengths().to_vec(), once.intensities().to_vec()).unwrap(), &cfg).unwrap();
        for (a, b) in once.intensities().iter().zip(again.intensities()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn errors() {
        let s = Spectrum::new(grid(), vec![0.0; 351]).unwrap();
        assert_eq!(preprocess(&s, &PreprocessConfig::default()), Err(SpectraError::AllZero));
        let cfg = PreprocessConfig {
            band: (800.0, 900.0),
            ..Default::default()
        };
        assert!(matches!(preprocess(&s, &cfg), Err(SpectraError::EmptyBand(..))));
        let cfg = PreprocessConfig {
            window: 10,
            ..Default::default()
        };
        assert!(matches!(preprocess(&s, &cfg), Err(SpectraError::BadSmoother { .. })));
        assert!(Spectrum::new(vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
    }
}
