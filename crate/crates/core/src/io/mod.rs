//! File formats and process adapters.
//!
//! * polymer spec files (TOML), see [`parse_polymer_spec_str`]
//! * conformation files (line-oriented text), see [`read_conformations_str`]
//! * decomposition and report files (JSON)
//! * evaluation manifests (TOML)
//! * external energy commands and JSON-lines denoiser processes

mod conformation;
mod decomposition;
mod external;
mod manifest;
mod report;
mod spec;

pub use conformation::{
    format_coordinate, read_conformations, read_conformations_str, write_conformations,
    write_conformations_string, CONFORMATION_FORMAT_VERSION,
};
pub use decomposition::{
    decomposition_from_json, decomposition_to_json, DecompositionFile, UnitRecord,
};
pub use external::{ExternalDenoiser, ExternalEnergy};
pub use manifest::{parse_manifest_str, read_manifest, EvaluationManifest, ManifestEntry};
pub use report::{report_from_json, report_to_json, round12, ReportFile, ReportPolymer, ReportRun};
pub use spec::{
    parse_polymer_spec, parse_polymer_spec_str, read_polymer_spec, serialize_polymer_spec, spec_hash,
    PolymerSpec,
};

use std::fmt;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

fn at(origin: &str, line: &Option<usize>) -> String {
    match line {
        Some(l) => format!("{origin}:{l}"),
        None => origin.to_string(),
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IoError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: no such file")]
    Missing { path: String },
    #[error("{}: parse error: {message}", at(origin, line))]
    Parse {
        origin: String,
        line: Option<usize>,
        message: String,
    },
    #[error("{}: invalid {field}: {message}", at(origin, line))]
    InvalidSpec {
        origin: String,
        line: Option<usize>,
        field: String,
        message: String,
    },
    #[error("{origin}: spec hash mismatch: file has {found}, polymer spec gives {expected}")]
    HashMismatch {
        origin: String,
        expected: String,
        found: String,
    },
    #[error("{origin}:{line}: malformed record: {message}")]
    MalformedRecord {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("external command `{command}`: {message}")]
    External { command: String, message: String },
}

impl IoError {
    fn io(path: &Path, e: impl fmt::Display) -> Self {
        IoError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    /// True for problems with the inputs (as opposed to the environment).
    pub fn is_validation(&self) -> bool {
        !matches!(self, IoError::Io { .. } | IoError::External { .. })
    }
}

/// One-based line number of byte `offset` in `text`.
pub(crate) fn line_of(text: &str, offset: usize) -> usize {
    let end = offset.min(text.len());
    text.as_bytes()[..end].iter().filter(|&&b| b == b'\n').count() + 1
}

pub(crate) fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => IoError::Missing {
            path: path.display().to_string(),
        },
        _ => IoError::io(path, e),
    })
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), IoError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| IoError::io(path, e))?;
    tmp.write_all(contents).map_err(|e| IoError::io(path, e))?;
    tmp.persist(path).map_err(|e| IoError::io(path, e.error))?;
    Ok(())
}
