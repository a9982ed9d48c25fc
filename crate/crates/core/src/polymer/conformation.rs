use super::graph::PolymerGraph;
use super::topology::{KeyRole, UnitTopology};
use super::PolymerError;
use crate::geometry::{gram_schmidt_rotation, RigidTransform, Vec3};

/// Default upper bound on a junction bond length, in Å.
pub const DEFAULT_JUNCTION_THRESHOLD: f64 = 2.0;

/// Coordinates of one extended repeating unit, overlap atoms included.
/// `unit_index` is zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitConformation {
    pub unit_index: usize,
    pub coords: Vec<Vec3>,
}

impl UnitConformation {
    pub fn new(unit_index: usize, coords: Vec<Vec3>) -> Self {
        UnitConformation { unit_index, coords }
    }

    pub fn key(&self, topo: &UnitTopology, role: KeyRole) -> Vec3 {
        self.coords[topo.key(role)]
    }

    pub fn transformed(&self, frame: &RigidTransform) -> UnitConformation {
        UnitConformation::new(self.unit_index, frame.apply_all(&self.coords))
    }

    pub(crate) fn check(&self, topo: &UnitTopology) -> Result<(), PolymerError> {
        if self.coords.len() != topo.n_atoms() {
            return Err(PolymerError::AtomCountMismatch {
                expected: topo.n_atoms(),
                found: self.coords.len(),
            });
        }
        if self.coords.iter().any(|c| c.iter().any(|v| !v.is_finite())) {
            return Err(PolymerError::NonFinite);
        }
        Ok(())
    }
}

/// Full chain coordinates, one entry per global atom of a [`PolymerGraph`].
#[derive(Debug, Clone, PartialEq)]
pub struct PolymerConformation {
    pub coords: Vec<Vec3>,
    pub unit_of_atom: Vec<usize>,
}

impl PolymerConformation {
    /// Checks the atom count and finiteness against `graph`.
    pub fn new(graph: &PolymerGraph, coords: Vec<Vec3>) -> Result<Self, PolymerError> {
        if coords.len() != graph.total_atoms() {
            return Err(PolymerError::AtomCountMismatch {
                expected: graph.total_atoms(),
                found: coords.len(),
            });
        }
        if coords.iter().any(|c| c.iter().any(|v| !v.is_finite())) {
            return Err(PolymerError::NonFinite);
        }
        Ok(PolymerConformation {
            coords,
            unit_of_atom: graph.unit_of_atom(),
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.coords.len()
    }

    /// Fails with `JunctionViolation` if any junction bond exceeds `threshold`.
    pub fn check_junctions(&self, graph: &PolymerGraph, threshold: f64) -> Result<(), PolymerError> {
        for j in graph.junctions() {
            let d = (self.coords[j.atom3] - self.coords[j.atom2]).norm();
            if !(d < threshold) {
                return Err(PolymerError::JunctionViolation {
                    unit: j.unit,
                    distance: d,
                    threshold,
                });
            }
        }
        Ok(())
    }

    /// Coordinates of unit `i`, overlap atoms included.
    pub fn unit_coords(&self, graph: &PolymerGraph, i: usize) -> UnitConformation {
        UnitConformation::new(i, graph.unit_atoms(i).iter().map(|&g| self.coords[g]).collect())
    }
}

/// Standardized units plus the frames that place them in the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub units: Vec<UnitConformation>,
    pub frames: Vec<RigidTransform>,
}

impl DecompositionResult {
    /// Places every unit with its own frame and keeps each physical atom from
    /// the unit that owns it.
    pub fn recompose(&self, graph: &PolymerGraph) -> Result<PolymerConformation, PolymerError> {
        if self.units.len() != graph.n_units() || self.frames.len() != graph.n_units() {
            return Err(PolymerError::UnitCountMismatch {
                expected: graph.n_units(),
                found: self.units.len().min(self.frames.len()),
            });
        }
        let placed: Vec<UnitConformation> = self
            .units
            .iter()
            .zip(&self.frames)
            .map(|(u, f)| u.transformed(f))
            .collect();
        Ok(flatten_units(graph, &placed))
    }
}

/// Builds the flat chain from placed units, dropping duplicate overlap atoms.
pub(crate) fn flatten_units(graph: &PolymerGraph, placed: &[UnitConformation]) -> PolymerConformation {
    let coords = graph
        .owners()
        .iter()
        .map(|o| placed[o.unit].coords[o.local])
        .collect();
    PolymerConformation {
        coords,
        unit_of_atom: graph.unit_of_atom(),
    }
}

/// Frame of a unit: origin at atom-3, axes by Gram-Schmidt on
/// `atom-1 − atom-3` and `atom-4 − atom-3`.
pub fn extract_frame(unit: &UnitConformation, topo: &UnitTopology) -> Result<RigidTransform, PolymerError> {
    unit.check(topo)?;
    let a1 = unit.key(topo, KeyRole::Atom1);
    let a3 = unit.key(topo, KeyRole::Atom3);
    let a4 = unit.key(topo, KeyRole::Atom4);
    let rotation = gram_schmidt_rotation(&(a1 - a3), &(a4 - a3))?;
    Ok(RigidTransform::new(rotation, a3))
}

/// Expresses `unit` in the local coordinates of `frame`: `Rᵀ (c − t)`.
pub fn to_standard(unit: &UnitConformation, frame: &RigidTransform) -> UnitConformation {
    UnitConformation::new(
        unit.unit_index,
        unit.coords.iter().map(|c| frame.apply_inverse(c)).collect(),
    )
}

/// Extracts the frame of `unit` and returns the unit in standard pose.
pub fn standardize(
    unit: &UnitConformation,
    topo: &UnitTopology,
) -> Result<(UnitConformation, RigidTransform), PolymerError> {
    let frame = extract_frame(unit, topo)?;
    Ok((to_standard(unit, &frame), frame))
}

/// Splits a chain into standardized units and their frames.
pub fn decompose(conf: &PolymerConformation, graph: &PolymerGraph) -> Result<DecompositionResult, PolymerError> {
    decompose_with(conf, graph, DEFAULT_JUNCTION_THRESHOLD)
}

pub fn decompose_with(
    conf: &PolymerConformation,
    graph: &PolymerGraph,
    junction_threshold: f64,
) -> Result<DecompositionResult, PolymerError> {
    if conf.coords.len() != graph.total_atoms() {
        return Err(PolymerError::AtomCountMismatch {
            expected: graph.total_atoms(),
            found: conf.coords.len(),
        });
    }
    conf.check_junctions(graph, junction_threshold)?;
    let mut units = Vec::with_capacity(graph.n_units());
    let mut frames = Vec::with_capacity(graph.n_units());
    for i in 0..graph.n_units() {
        let unit = conf.unit_coords(graph, i);
        let (std, frame) = standardize(&unit, graph.unit(i)).map_err(|e| e.in_unit(i))?;
        units.push(std);
        frames.push(frame);
    }
    Ok(DecompositionResult { units, frames })
}
