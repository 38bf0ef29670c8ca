use serde::{Deserialize, Serialize};

use super::{SpectraError, Spectrum, TissueClass};

/// Which side of the threshold is tumor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// Band-mean below the threshold means tumor.
    Low,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdOutcome {
    Tumor,
    Healthy,
    Uncertain,
}

impl ThresholdOutcome {
    /// Resolves `Uncertain` to healthy, which biases toward undercutting.
    pub fn resolve(self) -> TissueClass {
        match self {
            ThresholdOutcome::Tumor => TissueClass::Tumor,
            _ => TissueClass::Healthy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdClassifier {
    pub band: (f64, f64),
    pub threshold: f64,
    pub half_width: f64,
    pub polarity: Polarity,
}

impl ThresholdClassifier {
    /// Fixed phantom rule: band-mean below 0.5 on 480–520 nm is tumor.
    pub fn phantom_rule() -> Self {
        Self {
            band: (480.0, 520.0),
            threshold: 0.5,
            half_width: 0.0,
            polarity: Polarity::Low,
        }
    }

    pub fn classify_value(&self, m: f64) -> ThresholdOutcome {
        let (lo, hi) = (self.threshold - self.half_width, self.threshold + self.half_width);
        let (tumor, healthy) = match self.polarity {
            Polarity::Low => (m < lo, m > hi),
            Polarity::High => (m > hi, m < lo),
        };
        if tumor {
            ThresholdOutcome::Tumor
        } else if healthy {
            ThresholdOutcome::Healthy
        } else if self.half_width == 0.0 {
            // Exactly on a zero-width threshold: not past it on the tumor side.
            ThresholdOutcome::Healthy
        } else {
            ThresholdOutcome::Uncertain
        }
    }
}

pub fn threshold_classify(clf: &ThresholdClassifier, s: &Spectrum) -> Result<ThresholdOutcome, SpectraError> {
    Ok(clf.classify_value(s.band_mean(clf.band)?))
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Fits the threshold from band-means of labeled, preprocessed spectra.
pub fn fit_threshold(tumor: &[Spectrum], healthy: &[Spectrum], band: (f64, f64)) -> Result<ThresholdClassifier, SpectraError> {
    if tumor.is_empty() || healthy.is_empty() {
        return Err(SpectraError::EmptyClass);
    }
    let t: Vec<f64> = tumor.iter().map(|s| s.band_mean(band)).collect::<Result<_, _>>()?;
    let h: Vec<f64> = healthy.iter().map(|s| s.band_mean(band)).collect::<Result<_, _>>()?;
    fit_from_band_means(&t, &h, band)
}

pub fn fit_from_band_means(tumor: &[f64], healthy: &[f64], band: (f64, f64)) -> Result<ThresholdClassifier, SpectraError> {
    if tumor.is_empty() || healthy.is_empty() {
        return Err(SpectraError::EmptyClass);
    }
    let (mt, mh) = (mean(tumor), mean(healthy));
    if mt == mh {
        return Err(SpectraError::DegenerateClasses);
    }
    let all = tumor.iter().chain(healthy);
    let max = all.clone().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = all.copied().fold(f64::INFINITY, f64::min);
    Ok(ThresholdClassifier {
        band,
        threshold: (mt + mh) / 2.0,
        half_width: 0.10 * (max - min),
        polarity: if mt < mh { Polarity::Low } else { Polarity::High },
    })
}
