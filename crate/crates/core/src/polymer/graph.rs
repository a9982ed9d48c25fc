use super::topology::{Bond, KeyRole, UnitTopology};
use super::PolymerError;
use std::collections::HashSet;
use std::sync::Arc;

/// Which unit, and which local atom of it, a global atom belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AtomOwner {
    pub unit: usize,
    pub local: usize,
}

/// Bond between atom-3 of unit `unit` and atom-2 of unit `unit + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JunctionBond {
    pub unit: usize,
    pub atom3: usize,
    pub atom2: usize,
}

/// Covalent topology of a full chain of extended repeating units.
///
/// Global atoms are numbered unit by unit in local order. The overlap atoms
/// are stored once: atom-1 of unit `i > 0` is atom-3 of unit `i − 1` and
/// atom-4 of unit `i < N_u − 1` is atom-2 of unit `i + 1`. Atom-1 of the first
/// unit and atom-4 of the last unit are kept as chain caps, so
/// `N = Σ (atoms_i − 2) + 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolymerGraph {
    units: Vec<Arc<UnitTopology>>,
    atom_map: Vec<Vec<usize>>,
    owners: Vec<AtomOwner>,
    elements: Vec<String>,
    bonds: Vec<Bond>,
    junctions: Vec<JunctionBond>,
}

impl PolymerGraph {
    /// Homopolymer chain of `n_units` copies of `unit`.
    pub fn homopolymer(unit: UnitTopology, n_units: usize) -> Result<Self, PolymerError> {
        Self::with_termini(None, unit, None, n_units)
    }

    /// Chain whose first and/or last unit may use a different topology.
    pub fn with_termini(
        head: Option<UnitTopology>,
        body: UnitTopology,
        tail: Option<UnitTopology>,
        n_units: usize,
    ) -> Result<Self, PolymerError> {
        if n_units < 2 {
            return Err(PolymerError::InvalidUnitSpec(format!(
                "a chain needs at least 2 units, got {n_units}"
            )));
        }
        let body = Arc::new(body);
        let mut units: Vec<Arc<UnitTopology>> = vec![Arc::clone(&body); n_units];
        if let Some(h) = head {
            units[0] = Arc::new(h);
        }
        if let Some(t) = tail {
            units[n_units - 1] = Arc::new(t);
        }
        Self::from_units(units)
    }

    /// Builds the chain from an explicit per-unit topology list.
    pub fn from_units(units: Vec<Arc<UnitTopology>>) -> Result<Self, PolymerError> {
        let n_units = units.len();
        if n_units < 2 {
            return Err(PolymerError::InvalidUnitSpec(format!(
                "a chain needs at least 2 units, got {n_units}"
            )));
        }
        for i in 0..n_units - 1 {
            check_junction(&units[i], &units[i + 1], i)?;
        }

        let mut atom_map: Vec<Vec<usize>> = units.iter().map(|u| vec![usize::MAX; u.n_atoms()]).collect();
        let mut owners = Vec::new();
        let mut elements = Vec::new();
        for (ui, unit) in units.iter().enumerate() {
            let k = unit.key_atoms();
            for local in 0..unit.n_atoms() {
                let borrowed = (local == k.atom1 && ui > 0) || (local == k.atom4 && ui + 1 < n_units);
                if borrowed {
                    continue;
                }
                atom_map[ui][local] = owners.len();
                owners.push(AtomOwner { unit: ui, local });
                elements.push(unit.element(local).to_string());
            }
        }
        // Resolve the borrowed overlap atoms to their owners in the neighbors.
        for ui in 0..n_units {
            let k = units[ui].key_atoms();
            if ui > 0 {
                let prev_a3 = units[ui - 1].key(KeyRole::Atom3);
                atom_map[ui][k.atom1] = atom_map[ui - 1][prev_a3];
            }
            if ui + 1 < n_units {
                let next_a2 = units[ui + 1].key(KeyRole::Atom2);
                atom_map[ui][k.atom4] = atom_map[ui + 1][next_a2];
            }
        }

        let mut seen = HashSet::new();
        let mut bonds = Vec::new();
        for (ui, unit) in units.iter().enumerate() {
            for b in unit.bonds() {
                let g = Bond::new(atom_map[ui][b.a], atom_map[ui][b.b], b.order);
                if seen.insert(g.key()) {
                    bonds.push(g);
                }
            }
        }
        let junctions = (0..n_units - 1)
            .map(|i| JunctionBond {
                unit: i,
                atom3: atom_map[i][units[i].key(KeyRole::Atom3)],
                atom2: atom_map[i + 1][units[i + 1].key(KeyRole::Atom2)],
            })
            .collect();

        Ok(PolymerGraph {
            units,
            atom_map,
            owners,
            elements,
            bonds,
            junctions,
        })
    }

    /// The unit sequence repeated `factor` times (the chain-length scaling
    /// used for doubling).
    pub fn repeated(&self, factor: usize) -> Result<Self, PolymerError> {
        if factor == 0 {
            return Err(PolymerError::InvalidUnitSpec("repeat factor must be positive".into()));
        }
        let n = self.units.len();
        Self::from_units((0..n * factor).map(|i| Arc::clone(&self.units[i % n])).collect())
    }

    pub fn n_units(&self) -> usize {
        self.units.len()
    }

    pub fn total_atoms(&self) -> usize {
        self.owners.len()
    }

    pub fn unit(&self, i: usize) -> &UnitTopology {
        &self.units[i]
    }

    pub fn units(&self) -> &[Arc<UnitTopology>] {
        &self.units
    }

    /// Global atom indices of unit `i`'s local atoms, overlap atoms included.
    pub fn unit_atoms(&self, i: usize) -> &[usize] {
        &self.atom_map[i]
    }

    pub fn owner(&self, global: usize) -> AtomOwner {
        self.owners[global]
    }

    pub fn owners(&self) -> &[AtomOwner] {
        &self.owners
    }

    /// Unit label of every global atom.
    pub fn unit_of_atom(&self) -> Vec<usize> {
        self.owners.iter().map(|o| o.unit).collect()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    /// Global bond list, each physical bond once.
    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn junctions(&self) -> &[JunctionBond] {
        &self.junctions
    }

    /// True when every unit shares the same topology.
    pub fn is_homopolymer(&self) -> bool {
        self.units.windows(2).all(|w| w[0] == w[1])
    }
}

fn check_junction(left: &UnitTopology, right: &UnitTopology, i: usize) -> Result<(), PolymerError> {
    let lk = left.key_atoms();
    let rk = right.key_atoms();
    let pairs = [
        (left.element(lk.atom3), right.element(rk.atom1), "atom-3", "atom-1"),
        (left.element(lk.atom4), right.element(rk.atom2), "atom-4", "atom-2"),
    ];
    for (a, b, ra, rb) in pairs {
        if a != b {
            return Err(PolymerError::InvalidUnitSpec(format!(
                "junction {i}: {ra} of unit {i} is {a} but {rb} of unit {} is {b}",
                i + 1
            )));
        }
    }
    let left_order = left.bond_between(lk.atom3, lk.atom4).map(|b| b.order);
    let right_order = right.bond_between(rk.atom1, rk.atom2).map(|b| b.order);
    if left_order != right_order {
        return Err(PolymerError::InvalidUnitSpec(format!(
            "junction {i}: bond orders of the shared bond disagree ({left_order:?} vs {right_order:?})"
        )));
    }
    Ok(())
}
