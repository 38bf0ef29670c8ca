//! Synthetic point-probe fluorescence spectra.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::spectra::{nm_grid, Spectrum, TissueClass};

/// Two Gaussian emission bands whose amplitude ratio depends on the class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSynthConfig {
    pub grid: (f64, f64),
    pub centers: [f64; 2],
    pub widths: [f64; 2],
    pub healthy_amplitudes: [f64; 2],
    pub tumor_amplitudes: [f64; 2],
    /// Relative standard deviation of each band amplitude.
    pub jitter: f64,
    /// Additive noise standard deviation, relative to `scale`.
    pub noise: f64,
    /// Detector counts at unit amplitude.
    pub scale: f64,
}

impl Default for SpectrumSynthConfig {
    fn default() -> Self {
        Self {
            grid: (350.0, 700.0),
            centers: [500.0, 630.0],
            widths: [30.0, 25.0],
            healthy_amplitudes: [1.0, 0.3],
            tumor_amplitudes: [0.3, 1.0],
            jitter: 0.05,
            noise: 0.01,
            scale: 1000.0,
        }
    }
}

impl SpectrumSynthConfig {
    pub fn noiseless() -> Self {
        Self {
            jitter: 0.0,
            noise: 0.0,
            ..Self::default()
        }
    }

    pub fn amplitudes(&self, class: TissueClass) -> [f64; 2] {
        match class {
            TissueClass::Healthy => self.healthy_amplitudes,
            TissueClass::Tumor => self.tumor_amplitudes,
        }
    }
}

fn gaussian(w: f64, c: f64, s: f64) -> f64 {
    (-(w - c).powi(2) / (2.0 * s * s)).exp()
}

/// Deterministic in `(class, seed, cfg)`; intensities are clamped at 0.
pub fn synth_spectrum_with(class: TissueClass, seed: u64, cfg: &SpectrumSynthConfig) -> Spectrum {
    let salt = match class {
        TissueClass::Healthy => 0x4845_414c,
        TissueClass::Tumor => 0x5455_4d52,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (salt << 32));
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    let base = cfg.amplitudes(class);
    let amp = [0, 1].map(|k| (base[k] * (1.0 + cfg.jitter * std.sample(&mut rng))).max(0.0));
    let grid = nm_grid(cfg.grid.0, cfg.grid.1, 1.0);
    let values = grid
        .iter()
        .map(|&w| {
            let clean = amp[0] * gaussian(w, cfg.centers[0], cfg.widths[0]) + amp[1] * gaussian(w, cfg.centers[1], cfg.widths[1]);
            let noisy = clean + if cfg.noise > 0.0 { cfg.noise * std.sample(&mut rng) } else { 0.0 };
            (cfg.scale * noisy).max(0.0)
        })
        .collect();
    Spectrum::new(grid, values).expect("grid is increasing and values non-negative")
}

pub fn synth_spectrum(class: TissueClass, seed: u64) -> Spectrum {
    synth_spectrum_with(class, seed, &SpectrumSynthConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a = synth_spectrum(TissueClass::Tumor, 17);
        let b = synth_spectrum(TissueClass::Tumor, 17);
        assert_eq!(a, b);
        assert_ne!(a, synth_spectrum(TissueClass::Tumor, 18));
        assert_eq!(a.len(), 351);
    }

    #[test]
    fn noiseless_is_the_exact_mixture() {
        let cfg = SpectrumSynthConfig::noiseless();
        let s = synth_spectrum_with(TissueClass::Healthy, 3, &cfg);
        for (w, v) in s.wavelengths().iter().zip(s.intensities()) {
            let expect = 1000.0 * (gaussian(*w, 500.0, 30.0) + 0.3 * gaussian(*w, 630.0, 25.0));
            assert!((v - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn classes_separate_in_the_blue_band() {
        // Monte-Carlo: class band means differ by many per-spectrum sigmas.
        let band = (480.0, 520.0);
        let stats = |class| {
            let m: Vec<f64> = (0..1000).map(|s| synth_spectrum(class, s).band_mean(band).unwrap()).collect();
            let mean = m.iter().sum::<f64>() / m.len() as f64;
            let var = m.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m.len() - 1) as f64;
            (mean, var.sqrt())
        };
        let (mh, sh) = stats(TissueClass::Healthy);
        let (mt, st) = stats(TissueClass::Tumor);
        assert!((mh - mt).abs() > 5.0 * sh.max(st));
    }
}
