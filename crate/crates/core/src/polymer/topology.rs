use super::PolymerError;
use serde::{Deserialize, Serialize};
use std::collections::{HashSet, VecDeque};
use std::fmt;

/// Key-atom roles of an extended repeating unit.
///
/// Atom-1 is borrowed from the preceding unit (it coincides with that unit's
/// atom-3) and atom-4 from the following unit (it coincides with that unit's
/// atom-2). Atom-3 anchors the unit frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KeyRole {
    Atom1,
    Atom2,
    Atom3,
    Atom4,
}

impl KeyRole {
    pub const ALL: [KeyRole; 4] = [KeyRole::Atom1, KeyRole::Atom2, KeyRole::Atom3, KeyRole::Atom4];

    pub fn name(self) -> &'static str {
        match self {
            KeyRole::Atom1 => "atom-1",
            KeyRole::Atom2 => "atom-2",
            KeyRole::Atom3 => "atom-3",
            KeyRole::Atom4 => "atom-4",
        }
    }
}

impl fmt::Display for KeyRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Local indices of the four key atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KeyAtoms {
    pub atom1: usize,
    pub atom2: usize,
    pub atom3: usize,
    pub atom4: usize,
}

impl KeyAtoms {
    pub fn get(&self, role: KeyRole) -> usize {
        match role {
            KeyRole::Atom1 => self.atom1,
            KeyRole::Atom2 => self.atom2,
            KeyRole::Atom3 => self.atom3,
            KeyRole::Atom4 => self.atom4,
        }
    }
}

/// Covalent bond between two local atom indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: u8,
}

impl Bond {
    pub fn new(a: usize, b: usize, order: u8) -> Self {
        Bond { a, b, order }
    }

    /// Endpoints in ascending order.
    pub fn key(&self) -> (usize, usize) {
        (self.a.min(self.b), self.a.max(self.b))
    }

    pub fn connects(&self, x: usize, y: usize) -> bool {
        self.key() == (x.min(y), x.max(y))
    }

    pub fn other(&self, x: usize) -> Option<usize> {
        if self.a == x {
            Some(self.b)
        } else if self.b == x {
            Some(self.a)
        } else {
            None
        }
    }
}

/// Topology of one extended repeating unit.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitTopology {
    elements: Vec<String>,
    bonds: Vec<Bond>,
    key_atoms: KeyAtoms,
    adjacency: Vec<Vec<usize>>,
}

fn invalid(msg: impl Into<String>) -> PolymerError {
    PolymerError::InvalidUnitSpec(msg.into())
}

impl UnitTopology {
    pub fn new(
        elements: Vec<String>,
        bonds: Vec<Bond>,
        key_atoms: KeyAtoms,
    ) -> Result<Self, PolymerError> {
        let n = elements.len();
        if n < 3 {
            return Err(invalid(format!("a unit needs at least 3 atoms, got {n}")));
        }
        if let Some(i) = elements.iter().position(|e| e.trim().is_empty()) {
            return Err(invalid(format!("atom {i} has an empty element symbol")));
        }
        let mut seen = HashSet::new();
        let mut adjacency = vec![Vec::new(); n];
        for (i, bond) in bonds.iter().enumerate() {
            if bond.a >= n || bond.b >= n {
                return Err(invalid(format!(
                    "bond {i} ({}-{}) references an atom outside 0..{n}",
                    bond.a, bond.b
                )));
            }
            if bond.a == bond.b {
                return Err(invalid(format!("bond {i} connects atom {} to itself", bond.a)));
            }
            if !(1..=3).contains(&bond.order) {
                return Err(invalid(format!("bond {i} has unsupported order {}", bond.order)));
            }
            if !seen.insert(bond.key()) {
                return Err(invalid(format!("bond {i} ({}-{}) is duplicated", bond.a, bond.b)));
            }
            adjacency[bond.a].push(bond.b);
            adjacency[bond.b].push(bond.a);
        }
        for role in KeyRole::ALL {
            let idx = key_atoms.get(role);
            if idx >= n {
                return Err(invalid(format!("{role} index {idx} is out of range 0..{n}")));
            }
        }
        let keys = [key_atoms.atom1, key_atoms.atom2, key_atoms.atom3, key_atoms.atom4];
        for i in 0..4 {
            for j in i + 1..4 {
                // a single-atom backbone uses one atom as both atom-2 and atom-3
                if keys[i] == keys[j] && !(i == 1 && j == 2) {
                    return Err(invalid(format!(
                        "{} and {} both refer to atom {}",
                        KeyRole::ALL[i],
                        KeyRole::ALL[j],
                        keys[i]
                    )));
                }
            }
        }
        let topo = UnitTopology {
            elements,
            bonds,
            key_atoms,
            adjacency,
        };
        if topo.component_from(0, None).len() != n {
            return Err(invalid("bond graph is not connected"));
        }
        let k = key_atoms;
        if topo.adjacency[k.atom1] != [k.atom2] {
            return Err(invalid(
                "atom-1 must be bonded to atom-2 and to nothing else in the unit",
            ));
        }
        if topo.adjacency[k.atom4] != [k.atom3] {
            return Err(invalid(
                "atom-4 must be bonded to atom-3 and to nothing else in the unit",
            ));
        }
        Ok(topo)
    }

    pub fn n_atoms(&self) -> usize {
        self.elements.len()
    }

    /// Atoms that belong to this unit alone (all but the two overlap atoms).
    pub fn interior_atoms(&self) -> usize {
        self.elements.len() - 2
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn key_atoms(&self) -> KeyAtoms {
        self.key_atoms
    }

    pub fn key(&self, role: KeyRole) -> usize {
        self.key_atoms.get(role)
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn bond_between(&self, x: usize, y: usize) -> Option<&Bond> {
        self.bonds.iter().find(|b| b.connects(x, y))
    }

    /// Sum of bond orders at atom `i`.
    pub fn order_sum(&self, i: usize) -> u32 {
        self.bonds
            .iter()
            .filter(|b| b.a == i || b.b == i)
            .map(|b| b.order as u32)
            .sum()
    }

    /// Atoms reachable from `start`, optionally ignoring one bond.
    pub(crate) fn component_from(&self, start: usize, cut: Option<(usize, usize)>) -> Vec<usize> {
        let mut visited = vec![false; self.n_atoms()];
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        let mut out = Vec::new();
        while let Some(v) = queue.pop_front() {
            out.push(v);
            for &w in &self.adjacency[v] {
                if let Some((x, y)) = cut {
                    if (v == x && w == y) || (v == y && w == x) {
                        continue;
                    }
                }
                if !visited[w] {
                    visited[w] = true;
                    queue.push_back(w);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Angle triples (end, center, end) with `end1 < end2`.
    pub fn angles(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (center, nbrs) in self.adjacency.iter().enumerate() {
            for (i, &a) in nbrs.iter().enumerate() {
                for &c in &nbrs[i + 1..] {
                    out.push((a.min(c), center, a.max(c)));
                }
            }
        }
        out
    }
}
