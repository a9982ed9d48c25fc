use super::conformation::UnitConformation;
use super::topology::{Bond, KeyRole, UnitTopology};
use super::PolymerError;
use crate::geometry::{dihedral, wrap_angle, Rotation};

/// A torsion degree of freedom of a unit.
#[derive(Debug, Clone, PartialEq)]
pub struct RotatableBond {
    pub bond: Bond,
    /// Reference atoms `a-b-c-d` of the measured dihedral. `b-c` is the bond
    /// and `c` lies on the moving side.
    pub dihedral: [usize; 4],
    /// Atoms displaced by a change of this torsion: the side of the cut that
    /// does not contain atom-3.
    pub moving: Vec<usize>,
}

/// All torsions of a unit topology, in bond-list order.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionSet {
    bonds: Vec<RotatableBond>,
}

/// Bridges of the unit's bond graph (bonds on no cycle), by lowlink DFS.
fn bridges(topo: &UnitTopology) -> Vec<(usize, usize)> {
    let n = topo.n_atoms();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut out = Vec::new();
    let mut timer = 0;
    // (vertex, parent, next neighbor position)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(&mut (v, parent, ref mut pos)) = stack.last_mut() {
            let nbrs = topo.neighbors(v);
            if *pos < nbrs.len() {
                let w = nbrs[*pos];
                *pos += 1;
                if w == parent {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, v, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        out.push((parent.min(v), parent.max(v)));
                    }
                }
            }
        }
    }
    out
}

impl TorsionSet {
    pub fn new(topo: &UnitTopology) -> Self {
        let bridge_set = bridges(topo);
        let anchor = topo.key(KeyRole::Atom3);
        let n = topo.n_atoms();
        let mut bonds = Vec::new();
        for bond in topo.bonds() {
            if bond.order != 1 || !bridge_set.contains(&bond.key()) {
                continue;
            }
            let fixed = topo.component_from(anchor, Some(bond.key()));
            if fixed.len() < 2 || n - fixed.len() < 2 {
                continue;
            }
            let (b, c) = if fixed.binary_search(&bond.a).is_ok() {
                (bond.a, bond.b)
            } else {
                (bond.b, bond.a)
            };
            let moving: Vec<usize> = (0..n).filter(|i| fixed.binary_search(i).is_err()).collect();
            let a = *topo.neighbors(b).iter().filter(|&&x| x != c).min().expect("side has >= 2 atoms");
            let d = *topo.neighbors(c).iter().filter(|&&x| x != b).min().expect("side has >= 2 atoms");
            bonds.push(RotatableBond {
                bond: *bond,
                dihedral: [a, b, c, d],
                moving,
            });
        }
        TorsionSet { bonds }
    }

    pub fn len(&self) -> usize {
        self.bonds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bonds.is_empty()
    }

    pub fn bonds(&self) -> &[RotatableBond] {
        &self.bonds
    }

    pub fn find(&self, x: usize, y: usize) -> Option<usize> {
        self.bonds.iter().position(|r| r.bond.connects(x, y))
    }

    /// Current value of every torsion, in (−π, π].
    pub fn angles(&self, unit: &UnitConformation) -> Vec<f64> {
        self.bonds
            .iter()
            .map(|r| {
                let [a, b, c, d] = r.dihedral;
                let p = &unit.coords;
                dihedral(&p[a], &p[b], &p[c], &p[d])
            })
            .collect()
    }

    /// Rotates torsion `k` by `delta` radians in place.
    pub fn rotate(&self, unit: &mut UnitConformation, k: usize, delta: f64) {
        let r = &self.bonds[k];
        let [_, b, c, _] = r.dihedral;
        let origin = unit.coords[c];
        let axis = origin - unit.coords[b];
        let rot = Rotation::from_axis_angle(&axis, delta);
        for &i in &r.moving {
            unit.coords[i] = origin + rot.apply(&(unit.coords[i] - origin));
        }
    }

    /// Sets every torsion to the matching entry of `targets`.
    pub fn set(&self, unit: &mut UnitConformation, targets: &[f64]) {
        assert_eq!(targets.len(), self.bonds.len(), "one target per torsion");
        // Each rotation leaves every other torsion unchanged, so one pass suffices.
        let current = self.angles(unit);
        for (k, (&t, &c)) in targets.iter().zip(&current).enumerate() {
            self.rotate(unit, k, wrap_angle(t - c));
        }
    }
}

/// Single, acyclic bonds whose removal leaves at least two atoms on each side.
pub fn list_rotatable_bonds(topo: &UnitTopology) -> Vec<Bond> {
    TorsionSet::new(topo).bonds.into_iter().map(|r| r.bond).collect()
}

/// Rotates the side of `bond` not containing atom-3 by `delta` radians.
pub fn rotate_torsion(
    unit: &UnitConformation,
    topo: &UnitTopology,
    bond: &Bond,
    delta: f64,
) -> Result<UnitConformation, PolymerError> {
    unit.check(topo)?;
    let set = TorsionSet::new(topo);
    let k = set.find(bond.a, bond.b).ok_or(PolymerError::NotRotatable { a: bond.a, b: bond.b })?;
    let mut out = unit.clone();
    set.rotate(&mut out, k, delta);
    Ok(out)
}

pub fn torsion_angles(unit: &UnitConformation, topo: &UnitTopology) -> Vec<f64> {
    TorsionSet::new(topo).angles(unit)
}

/// Returns `unit` with its torsions set to `targets` (one per rotatable bond).
pub fn set_torsions(
    unit: &UnitConformation,
    topo: &UnitTopology,
    targets: &[f64],
) -> Result<UnitConformation, PolymerError> {
    unit.check(topo)?;
    let set = TorsionSet::new(topo);
    if targets.len() != set.len() {
        return Err(PolymerError::InvalidUnitSpec(format!(
            "expected {} torsion values, got {}",
            set.len(),
            targets.len()
        )));
    }
    let mut out = unit.clone();
    set.set(&mut out, targets);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymer::KeyAtoms;
    use crate::testing;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn topo(elements: &[&str], bonds: &[(usize, usize, u8)], keys: [usize; 4]) -> UnitTopology {
        UnitTopology::new(
            elements.iter().map(|s| s.to_string()).collect(),
            bonds.iter().map(|&(a, b, o)| Bond::new(a, b, o)).collect(),
            KeyAtoms {
                atom1: keys[0],
                atom2: keys[1],
                atom3: keys[2],
                atom4: keys[3],
            },
        )
        .unwrap()
    }

    /// Ethane: C0-C1 with three H on each carbon. Two of the hydrogens serve
    /// as the overlap atoms.
    fn ethane() -> UnitTopology {
        topo(
            &["C", "C", "H", "H", "H", "H", "H", "H"],
            &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (0, 4, 1), (1, 5, 1), (1, 6, 1), (1, 7, 1)],
            [2, 0, 1, 5],
        )
    }

    fn benzene() -> UnitTopology {
        let mut bonds: Vec<(usize, usize, u8)> = (0..6).map(|i| (i, (i + 1) % 6, if i % 2 == 0 { 2 } else { 1 })).collect();
        bonds.extend((0..6).map(|i| (i, i + 6, 1)));
        topo(
            &["C", "C", "C", "C", "C", "C", "H", "H", "H", "H", "H", "H"],
            &bonds,
            [6, 0, 3, 9],
        )
    }

    #[test]
    fn ethane_has_one_rotor() {
        let bonds = list_rotatable_bonds(&ethane());
        assert_eq!(bonds.len(), 1);
        assert_eq!(bonds[0].key(), (0, 1));
    }

    #[test]
    fn benzene_has_no_rotor() {
        assert!(list_rotatable_bonds(&benzene()).is_empty());
    }

    #[test]
    fn double_bond_is_not_rotatable() {
        let t = topo(
            &["C", "C", "C", "C", "C", "C"],
            &[(0, 1, 1), (1, 2, 1), (2, 3, 2), (3, 4, 1), (4, 5, 1)],
            [0, 1, 4, 5],
        );
        let keys: Vec<_> = list_rotatable_bonds(&t).iter().map(|b| b.key()).collect();
        assert_eq!(keys, vec![(1, 2), (3, 4)]);
    }

    #[test]
    fn rotate_zero_and_full_turn() {
        let t = ethane();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let unit = testing::random_unit_coords(&t, &mut rng);
        let bond = list_rotatable_bonds(&t)[0];
        assert_eq!(rotate_torsion(&unit, &t, &bond, 0.0).unwrap(), unit);
        let full = rotate_torsion(&unit, &t, &bond, 2.0 * PI).unwrap();
        for (a, b) in full.coords.iter().zip(&unit.coords) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn rotate_changes_dihedral_by_delta() {
        let t = ethane();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let unit = testing::random_unit_coords(&t, &mut rng);
        let set = TorsionSet::new(&t);
        let before = set.angles(&unit)[0];
        let out = rotate_torsion(&unit, &t, &set.bonds()[0].bond, PI / 3.0).unwrap();
        let after = set.angles(&out)[0];
        assert!(wrap_angle(after - before - PI / 3.0).abs() < 1e-9);
        // atom-3 never moves
        assert_eq!(out.coords[1], unit.coords[1]);
    }

    #[test]
    fn non_rotatable_bond_errors() {
        let t = ethane();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let unit = testing::random_unit_coords(&t, &mut rng);
        let err = rotate_torsion(&unit, &t, &Bond::new(0, 2, 1), 1.0).unwrap_err();
        assert_eq!(err, PolymerError::NotRotatable { a: 0, b: 2 });
    }

    #[test]
    fn set_torsions_hits_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let t = testing::random_unit_topology(&mut rng, 14);
        let unit = testing::random_unit_coords(&t, &mut rng);
        let n = list_rotatable_bonds(&t).len();
        let targets: Vec<f64> = (0..n).map(|k| wrap_angle(0.7 * k as f64 - 2.0)).collect();
        let out = set_torsions(&unit, &t, &targets).unwrap();
        for (got, want) in torsion_angles(&out, &t).iter().zip(&targets) {
            assert!(wrap_angle(got - want).abs() < 1e-9);
        }
    }
}
