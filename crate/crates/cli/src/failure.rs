use polyframe::assembly::AssemblyError;
use polyframe::generative::GenerationError;
use polyframe::geometry::GeometryError;
use polyframe::io::IoError;
use polyframe::metrics::MetricsError;
use polyframe::polymer::PolymerError;
use thiserror::Error;

/// Command failure, split by exit code: bad inputs exit 1, everything else 2.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Internal(_) => 2,
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

impl From<PolymerError> for Failure {
    fn from(e: PolymerError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<AssemblyError> for Failure {
    fn from(e: AssemblyError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<GenerationError> for Failure {
    fn from(e: GenerationError) -> Self {
        match e {
            GenerationError::InvalidTimesteps(_)
            | GenerationError::InvalidSchedule(_)
            | GenerationError::InvalidK { .. }
            | GenerationError::Polymer(_) => Failure::Validation(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<MetricsError> for Failure {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::OracleFailure(_) => Failure::Internal(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}
