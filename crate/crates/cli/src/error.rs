use std::fmt;

use resect_core::calibration::CalibrationError;
use resect_core::geometry::GeometryError;
use resect_core::kinematics::KinematicsError;
use resect_core::mapping::MappingError;
use resect_core::metrics::MetricsError;
use resect_core::sensor::SensorError;
use resect_core::spectra::SpectraError;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Config,
    DegenerateRegion,
    Solver,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Config => 2,
            ErrorKind::DegenerateRegion => 3,
            ErrorKind::Solver => 4,
        }
    }
}

/// A failure tagged with the pipeline stage that raised it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnessError {
    pub stage: String,
    pub kind: ErrorKind,
    pub message: String,
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {:?}: {}", self.stage, self.kind, self.message)
    }
}

impl std::error::Error for HarnessError {}

impl HarnessError {
    pub fn new(stage: &str, kind: ErrorKind, message: impl fmt::Display) -> Self {
        Self { stage: stage.into(), kind, message: message.to_string() }
    }

    pub fn config(stage: &str, message: impl fmt::Display) -> Self {
        Self::new(stage, ErrorKind::Config, message)
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }
}

/// Core errors know which exit class they belong to.
pub trait Classify: fmt::Display {
    fn kind(&self) -> ErrorKind;
}

impl Classify for MappingError {
    fn kind(&self) -> ErrorKind {
        match self {
            MappingError::TooFewTumorTags(_) | MappingError::CollinearTags | MappingError::EmptyRegion => ErrorKind::DegenerateRegion,
            MappingError::NoRayHit | MappingError::NoVisibleSurface => ErrorKind::Solver,
            _ => ErrorKind::Config,
        }
    }
}

impl Classify for MetricsError {
    fn kind(&self) -> ErrorKind {
        match self {
            MetricsError::EmptyUnion | MetricsError::EmptyTrueRegion | MetricsError::EmptyBoundary | MetricsError::InvalidRegion(_) => {
                ErrorKind::DegenerateRegion
            }
            _ => ErrorKind::Config,
        }
    }
}

impl Classify for CalibrationError {
    fn kind(&self) -> ErrorKind {
        match self {
            CalibrationError::NonConvergence(_)
            | CalibrationError::IllConditioned(_)
            | CalibrationError::DegenerateConfiguration(_)
            | CalibrationError::NotDownward => ErrorKind::Solver,
            _ => ErrorKind::Config,
        }
    }
}

impl Classify for KinematicsError {
    fn kind(&self) -> ErrorKind {
        match self {
            KinematicsError::Unreachable { .. } | KinematicsError::Geometry(_) => ErrorKind::Solver,
            _ => ErrorKind::Config,
        }
    }
}

impl Classify for GeometryError {
    fn kind(&self) -> ErrorKind {
        ErrorKind::Solver
    }
}

impl Classify for SensorError {
    fn kind(&self) -> ErrorKind {
        ErrorKind::Config
    }
}

impl Classify for SpectraError {
    fn kind(&self) -> ErrorKind {
        ErrorKind::Config
    }
}

impl Classify for std::io::Error {
    fn kind(&self) -> ErrorKind {
        ErrorKind::Config
    }
}

impl Classify for serde_json::Error {
    fn kind(&self) -> ErrorKind {
        ErrorKind::Config
    }
}

impl Classify for csv::Error {
    fn kind(&self) -> ErrorKind {
        ErrorKind::Config
    }
}

/// `result.at("stage")?` attaches the stage name and exit class.
pub trait AtStage<T> {
    fn at(self, stage: &str) -> Result<T, HarnessError>;
}

impl<T, E: Classify> AtStage<T> for Result<T, E> {
    fn at(self, stage: &str) -> Result<T, HarnessError> {
        self.map_err(|e| HarnessError::new(stage, e.kind(), &e))
    }
}
