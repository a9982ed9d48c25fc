//! Polymer topology and the unit/frame decomposition of chain conformations.

mod conformation;
pub mod elements;
mod graph;
mod template;
mod topology;
mod torsion;

pub use conformation::{
    decompose, decompose_with, extract_frame, standardize, to_standard, DecompositionResult,
    PolymerConformation, UnitConformation, DEFAULT_JUNCTION_THRESHOLD,
};
pub(crate) use conformation::flatten_units;
pub use graph::{AtomOwner, JunctionBond, PolymerGraph};
pub use template::idealized_template;
pub use topology::{Bond, KeyAtoms, KeyRole, UnitTopology};
pub use torsion::{
    list_rotatable_bonds, rotate_torsion, set_torsions, torsion_angles, RotatableBond, TorsionSet,
};

use crate::geometry::GeometryError;
use thiserror::Error;

/// Materializes a homopolymer chain of `n_units` copies of `unit`.
pub fn build_polymer_graph(unit: UnitTopology, n_units: usize) -> Result<PolymerGraph, PolymerError> {
    PolymerGraph::homopolymer(unit, n_units)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolymerError {
    #[error("invalid unit specification: {0}")]
    InvalidUnitSpec(String),
    #[error("expected {expected} atoms, found {found}")]
    AtomCountMismatch { expected: usize, found: usize },
    #[error("expected {expected} units, found {found}")]
    UnitCountMismatch { expected: usize, found: usize },
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("junction after unit {unit} is {distance:.3} Å long (limit {threshold} Å)")]
    JunctionViolation {
        unit: usize,
        distance: f64,
        threshold: f64,
    },
    #[error("degenerate frame{}: {reason}", .unit.map(|u| format!(" in unit {u}")).unwrap_or_default())]
    DegenerateFrame { unit: Option<usize>, reason: String },
    #[error("bond {a}-{b} is not rotatable")]
    NotRotatable { a: usize, b: usize },
    #[error(transparent)]
    Geometry(GeometryError),
}

impl PolymerError {
    pub(crate) fn in_unit(self, unit: usize) -> Self {
        match self {
            PolymerError::DegenerateFrame { reason, .. } => PolymerError::DegenerateFrame {
                unit: Some(unit),
                reason,
            },
            other => other,
        }
    }
}

impl From<GeometryError> for PolymerError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::DegenerateFrame(reason) => PolymerError::DegenerateFrame { unit: None, reason },
            GeometryError::NonFinite => PolymerError::NonFinite,
            other => PolymerError::Geometry(other),
        }
    }
}
