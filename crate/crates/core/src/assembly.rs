//! Reassembly of a chain from standardized units and per-unit rotations.
//!
//! Only rotations are needed: each unit's translation follows from making
//! its atom-1 coincide with atom-3 of the already placed predecessor.

use crate::geometry::{kabsch_align, GeometryError, Rotation, Vec3};
use crate::polymer::{
    decompose, extract_frame, flatten_units, KeyRole, PolymerConformation, PolymerError, PolymerGraph,
    UnitConformation, UnitTopology,
};
use thiserror::Error;

/// Largest frame deviation from identity accepted as "standard pose".
pub const STANDARD_POSE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("unit {unit} is not in standard pose (frame deviation {deviation:.3e})")]
    NotStandardized { unit: usize, deviation: f64 },
    #[error("expected {expected} units and rotations, got {units} units and {rotations} rotations")]
    CountMismatch {
        expected: usize,
        units: usize,
        rotations: usize,
    },
    #[error(transparent)]
    Polymer(#[from] PolymerError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Standardized units and their generated rotations for one chain.
#[derive(Debug, Clone)]
pub struct AssemblyInput<'a> {
    pub std_units: Vec<UnitConformation>,
    pub rotations: Vec<Rotation>,
    pub graph: &'a PolymerGraph,
}

impl<'a> AssemblyInput<'a> {
    /// Repeats the unit and rotation sequences to fill `graph`, which must
    /// have a multiple of the current unit count (the doubling protocol uses
    /// twice as many units).
    pub fn repeated_onto(&self, graph: &'a PolymerGraph) -> Result<AssemblyInput<'a>, AssemblyError> {
        let n = self.std_units.len();
        if n == 0 || graph.n_units() % n != 0 || self.rotations.len() != n {
            return Err(AssemblyError::CountMismatch {
                expected: graph.n_units(),
                units: n,
                rotations: self.rotations.len(),
            });
        }
        let std_units = (0..graph.n_units())
            .map(|i| {
                let mut u = self.std_units[i % n].clone();
                u.unit_index = i;
                u
            })
            .collect();
        let rotations = (0..graph.n_units()).map(|i| self.rotations[i % n]).collect();
        Ok(AssemblyInput {
            std_units,
            rotations,
            graph,
        })
    }
}

fn frame_deviation(unit: &UnitConformation, topo: &UnitTopology) -> Result<f64, PolymerError> {
    let f = extract_frame(unit, topo)?;
    let rot_dev = (f.rotation.matrix() - Rotation::identity().matrix())
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    Ok(rot_dev.max(f.translation.amax()))
}

/// Rotates a standard-pose unit by `r` about the origin (its atom-3).
pub fn apply_rotation(
    std_unit: &UnitConformation,
    topo: &UnitTopology,
    r: &Rotation,
) -> Result<UnitConformation, AssemblyError> {
    let deviation = frame_deviation(std_unit, topo).map_err(|e| e.in_unit(std_unit.unit_index))?;
    if deviation > STANDARD_POSE_TOLERANCE {
        return Err(AssemblyError::NotStandardized {
            unit: std_unit.unit_index,
            deviation,
        });
    }
    Ok(UnitConformation::new(
        std_unit.unit_index,
        std_unit.coords.iter().map(|c| r.apply(c)).collect(),
    ))
}

/// Translations that chain rotated units: the first unit stays put and each
/// following unit is shifted so its atom-1 lands on the placed atom-3 of its
/// predecessor. Equivalent to `t_i = Σ_{j<i} (c_{j,3} − c_{j+1,1})`, evaluated
/// incrementally.
pub fn derive_translations(rotated_units: &[UnitConformation], graph: &PolymerGraph) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(rotated_units.len());
    for (i, unit) in rotated_units.iter().enumerate() {
        if i == 0 {
            out.push(Vec3::zeros());
            continue;
        }
        let prev = &rotated_units[i - 1];
        let placed_a3 = prev.key(graph.unit(i - 1), KeyRole::Atom3) + out[i - 1];
        out.push(placed_a3 - unit.key(graph.unit(i), KeyRole::Atom1));
    }
    out
}

/// Rotates, translates and merges the units into a full chain.
pub fn assemble(input: &AssemblyInput) -> Result<PolymerConformation, AssemblyError> {
    let graph = input.graph;
    let n = graph.n_units();
    if input.std_units.len() != n || input.rotations.len() != n {
        return Err(AssemblyError::CountMismatch {
            expected: n,
            units: input.std_units.len(),
            rotations: input.rotations.len(),
        });
    }
    let rotated = input
        .std_units
        .iter()
        .zip(&input.rotations)
        .enumerate()
        .map(|(i, (u, r))| {
            u.check(graph.unit(i)).map_err(|e| AssemblyError::Polymer(e.in_unit(i)))?;
            apply_rotation(u, graph.unit(i), r)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let translations = derive_translations(&rotated, graph);
    let placed: Vec<UnitConformation> = rotated
        .into_iter()
        .zip(&translations)
        .map(|(mut u, t)| {
            for c in &mut u.coords {
                *c += t;
            }
            u
        })
        .collect();
    Ok(flatten_units(graph, &placed))
}

/// Aligned RMSD between `conf` and the chain reassembled from its own
/// decomposition.
pub fn roundtrip_residual(conf: &PolymerConformation, graph: &PolymerGraph) -> Result<f64, AssemblyError> {
    let dec = decompose(conf, graph)?;
    let rotations = dec.frames.iter().map(|f| f.rotation).collect();
    let rebuilt = assemble(&AssemblyInput {
        std_units: dec.units,
        rotations,
        graph,
    })?;
    Ok(kabsch_align(&rebuilt.coords, &conf.coords)?.rmsd)
}
