use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{edge_error, overlap, summarize, MetricsError, Region2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonKind {
    /// Actual (laser-traced) against true.
    System,
    /// Predicted against true.
    Algorithm,
    /// Actual against predicted.
    Calibration,
}

impl ComparisonKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::System => "system",
            Self::Algorithm => "algorithm",
            Self::Calibration => "calibration",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub kind: ComparisonKind,
    /// Edge errors run from the candidate outline to the reference outline.
    pub edge_direction: String,
    pub edge_errors: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub rmse: f64,
    pub iou: f64,
    pub undercut: f64,
    pub overcut: f64,
    pub pitch: f64,
}

/// Compares `candidate` against `reference` (which plays the role of the
/// true region for undercut/overcut). Outlines are sampled at `pitch`.
pub fn compare_regions(
    kind: ComparisonKind,
    reference: &Region2D,
    candidate: &Region2D,
    pitch: f64,
) -> Result<RegionReport, MetricsError> {
    let o = overlap(reference, candidate, pitch);
    if o.a == 0 {
        return Err(MetricsError::EmptyTrueRegion);
    }
    let edge = edge_error(&candidate.boundary_samples(pitch), &reference.boundary_samples(pitch))?;
    let s = summarize(&edge.errors)?;
    Ok(RegionReport {
        kind,
        edge_direction: format!("{:?}->{:?}", candidate.role, reference.role).to_lowercase(),
        mean: s.mean,
        std: s.std,
        rmse: edge.rmse,
        edge_errors: edge.errors,
        iou: o.both as f64 / o.union() as f64,
        undercut: (o.a - o.both) as f64 / o.a as f64,
        overcut: (o.b - o.both) as f64 / o.a as f64,
        pitch,
    })
}

fn io_err(e: impl std::fmt::Display) -> MetricsError {
    MetricsError::Io(e.to_string())
}

pub fn write_report_json(path: &Path, reports: &[RegionReport]) -> Result<(), MetricsError> {
    std::fs::write(path, serde_json::to_string_pretty(reports).map_err(io_err)?).map_err(io_err)
}

pub fn read_report_json(path: &Path) -> Result<Vec<RegionReport>, MetricsError> {
    serde_json::from_str(&std::fs::read_to_string(path).map_err(io_err)?).map_err(io_err)
}

#[derive(Serialize)]
struct LedgerRow<'a> {
    trial: &'a str,
    kind: &'a str,
    n_edge: usize,
    mean: f64,
    std: f64,
    rmse: f64,
    iou: f64,
    undercut: f64,
    overcut: f64,
    test: &'a str,
}

/// Appends one row per report to a CSV ledger, writing the header when the
/// file is new or empty.
pub fn append_ledger(path: &Path, trial: &str, reports: &[RegionReport]) -> Result<(), MetricsError> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = std::fs::OpenOptions::new().create(true).append(true).open(path).map_err(io_err)?;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    for r in reports {
        w.serialize(LedgerRow {
            trial,
            kind: r.kind.as_str(),
            n_edge: r.edge_errors.len(),
            mean: r.mean,
            std: r.std,
            rmse: r.rmse,
            iou: r.iou,
            undercut: r.undercut,
            overcut: r.overcut,
            test: "welch",
        })
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}
