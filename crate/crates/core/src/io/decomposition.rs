//! Decomposition files (JSON): per-unit standardized coordinates and frames.
//!
//! ```json
//! {
//!   "format": "polyframe-decomposition",
//!   "version": 1,
//!   "spec_hash": "3f2a9c0d1e4b5a67",
//!   "units": [
//!     { "unit": 1, "rotation": [[1,0,0],[0,1,0],[0,0,1]], "translation": [0,0,0],
//!       "coords": [[0.0, 0.0, 0.0], ...] }
//!   ]
//! }
//! ```
//!
//! Rotations are row-major. Numbers use the shortest representation that
//! reads back to the same double.

use super::{spec_hash, IoError};
use crate::geometry::{RigidTransform, Rotation, Vec3};
use crate::polymer::{DecompositionResult, PolymerGraph, UnitConformation};
use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

const FORMAT: &str = "polyframe-decomposition";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitRecord {
    pub unit: usize,
    pub rotation: [[f64; 3]; 3],
    pub translation: [f64; 3],
    pub coords: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionFile {
    pub format: String,
    pub version: u32,
    pub spec_hash: String,
    pub units: Vec<UnitRecord>,
}

impl DecompositionFile {
    pub fn from_result(graph: &PolymerGraph, result: &DecompositionResult) -> Self {
        let units = result
            .units
            .iter()
            .zip(&result.frames)
            .enumerate()
            .map(|(i, (u, f))| {
                let m = f.rotation.matrix();
                UnitRecord {
                    unit: i + 1,
                    rotation: [
                        [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
                        [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
                        [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
                    ],
                    translation: [f.translation.x, f.translation.y, f.translation.z],
                    coords: u.coords.iter().map(|c| [c.x, c.y, c.z]).collect(),
                }
            })
            .collect();
        DecompositionFile {
            format: FORMAT.to_string(),
            version: 1,
            spec_hash: spec_hash(graph),
            units,
        }
    }

    /// Checks the file against `graph` and rebuilds the decomposition.
    pub fn to_result(&self, graph: &PolymerGraph, origin: &str) -> Result<DecompositionResult, IoError> {
        let invalid = |field: String, message: String| IoError::InvalidSpec {
            origin: origin.to_string(),
            line: None,
            field,
            message,
        };
        if self.format != FORMAT || self.version != 1 {
            return Err(invalid(
                "format".into(),
                format!("expected {FORMAT} version 1, found {} version {}", self.format, self.version),
            ));
        }
        let expected = spec_hash(graph);
        if self.spec_hash != expected {
            return Err(IoError::HashMismatch {
                origin: origin.to_string(),
                expected,
                found: self.spec_hash.clone(),
            });
        }
        if self.units.len() != graph.n_units() {
            return Err(invalid(
                "units".into(),
                format!("{} unit records for {} units", self.units.len(), graph.n_units()),
            ));
        }
        let mut units = Vec::with_capacity(self.units.len());
        let mut frames = Vec::with_capacity(self.units.len());
        for (i, rec) in self.units.iter().enumerate() {
            let field = format!("units[{i}]");
            if rec.unit != i + 1 {
                return Err(invalid(field, format!("unit index {} out of order, expected {}", rec.unit, i + 1)));
            }
            let expected_atoms = graph.unit(i).n_atoms();
            if rec.coords.len() != expected_atoms {
                return Err(invalid(field, format!("{} coordinates for {expected_atoms} atoms", rec.coords.len())));
            }
            let flat: Vec<f64> = rec
                .rotation
                .iter()
                .flatten()
                .chain(&rec.translation)
                .chain(rec.coords.iter().flatten())
                .copied()
                .collect();
            if flat.iter().any(|v| !v.is_finite()) {
                return Err(invalid(field, "non-finite number".into()));
            }
            let r = &rec.rotation;
            let m = Matrix3::new(
                r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2],
            );
            let rotation = Rotation::from_matrix(m).map_err(|e| invalid(format!("{field}.rotation"), e.to_string()))?;
            frames.push(RigidTransform::new(rotation, Vec3::from(rec.translation)));
            units.push(UnitConformation::new(i, rec.coords.iter().map(|c| Vec3::from(*c)).collect()));
        }
        Ok(DecompositionResult { units, frames })
    }
}

pub fn decomposition_to_json(file: &DecompositionFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("decomposition serializes");
    s.push('\n');
    s
}

pub fn decomposition_from_json(text: &str, origin: &str) -> Result<DecompositionFile, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Parse {
        origin: origin.to_string(),
        line: Some(e.line()),
        message: e.to_string(),
    })
}
