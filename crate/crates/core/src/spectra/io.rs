//! Spectra CSV (first row wavelengths, one spectrum per following row) and
//! its JSON sidecar (subject and label per row).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{SpectraError, Spectrum, TissueClass};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowMeta {
    pub subject: String,
    pub label: TissueClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectraSidecar {
    pub rows: Vec<RowMeta>,
}

fn io_err(e: impl std::fmt::Display) -> SpectraError {
    SpectraError::Io(e.to_string())
}

pub fn write_spectra_csv(path: &Path, spectra: &[Spectrum]) -> Result<(), SpectraError> {
    let first = spectra.first().ok_or(SpectraError::EmptyInput)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(io_err)?;
    w.write_record(first.wavelengths().iter().map(|v| v.to_string())).map_err(io_err)?;
    for s in spectra {
        if s.wavelengths() != first.wavelengths() {
            return Err(SpectraError::InvalidSpectrum("spectra must share one wavelength grid".into()));
        }
        w.write_record(s.intensities().iter().map(|v| v.to_string())).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_spectra_csv(path: &Path) -> Result<Vec<Spectrum>, SpectraError> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path).map_err(io_err)?;
    let mut rows = r.records();
    let parse = |rec: csv::StringRecord| -> Result<Vec<f64>, SpectraError> {
        rec.iter().map(|f| f.trim().parse::<f64>().map_err(io_err)).collect()
    };
    let grid = parse(rows.next().ok_or(SpectraError::EmptyInput)?.map_err(io_err)?)?;
    rows.map(|rec| Spectrum::new(grid.clone(), parse(rec.map_err(io_err)?)?))
        .collect()
}

pub fn write_sidecar(path: &Path, sidecar: &SpectraSidecar) -> Result<(), SpectraError> {
    std::fs::write(path, serde_json::to_string_pretty(sidecar).map_err(io_err)?).map_err(io_err)
}

pub fn read_sidecar(path: &Path) -> Result<SpectraSidecar, SpectraError> {
    serde_json::from_str(&std::fs::read_to_string(path).map_err(io_err)?).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let dir = std::env::temp_dir().join(format!("spectra-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("s.csv");
        let a = Spectrum::new(vec![450.0, 451.0, 452.0], vec![0.1, 0.25, 1.0]).unwrap();
        let b = Spectrum::new(vec![450.0, 451.0, 452.0], vec![0.0, 3.5, 2.0]).unwrap();
        write_spectra_csv(&path, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(read_spectra_csv(&path).unwrap(), vec![a, b]);
        let side = SpectraSidecar {
            rows: vec![
                RowMeta {
                    subject: "m1".into(),
                    label: TissueClass::Tumor,
                },
                RowMeta {
                    subject: "m2".into(),
                    label: TissueClass::Healthy,
                },
            ],
        };
        write_sidecar(&dir.join("s.json"), &side).unwrap();
        assert_eq!(read_sidecar(&dir.join("s.json")).unwrap(), side);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
