use super::MetricsError;
use crate::geometry::{bond_angle, Vec3};
use crate::polymer::elements::{ideal_bond_angle, ideal_bond_length};
use crate::polymer::{Bond, PolymerConformation, PolymerGraph};
use std::collections::VecDeque;

/// Bond stretch force constant.
pub const K_BOND: f64 = 300.0;
/// Angle bend force constant (per rad²).
pub const K_ANGLE: f64 = 50.0;
/// Lennard-Jones well depth.
pub const LJ_EPSILON: f64 = 0.1;
/// Lennard-Jones diameter, Å.
pub const LJ_SIGMA: f64 = 3.4;
/// Smallest bond-path separation of a nonbonded pair.
pub const NONBONDED_MIN_SEPARATION: usize = 4;

/// Potential energy of a conformation, in units defined by the oracle.
pub trait EnergyOracle: Send + Sync {
    fn energy(&self, conf: &PolymerConformation, graph: &PolymerGraph) -> Result<f64, MetricsError>;

    /// Identifier recorded in reports; energies from different oracles are
    /// not comparable.
    fn id(&self) -> String;
}

/// Harmonic bonds and angles plus Lennard-Jones between atoms at least
/// four bonds apart.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyForceField {
    n_atoms: usize,
    bonds: Vec<(usize, usize, f64)>,
    angles: Vec<(usize, usize, usize, f64)>,
    pairs: Vec<(usize, usize)>,
}

impl ToyForceField {
    pub fn new(graph: &PolymerGraph) -> Self {
        Self::from_bonds(graph.elements(), graph.bonds())
    }

    /// Force field for an arbitrary labelled molecular graph.
    pub fn from_bonds(elements: &[String], bonds: &[Bond]) -> Self {
        let n = elements.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut order_sum = vec![0u32; n];
        for b in bonds {
            adjacency[b.a].push(b.b);
            adjacency[b.b].push(b.a);
            order_sum[b.a] += b.order as u32;
            order_sum[b.b] += b.order as u32;
        }
        let bond_terms = bonds
            .iter()
            .map(|b| (b.a, b.b, ideal_bond_length(&elements[b.a], &elements[b.b], b.order)))
            .collect();
        let mut angles = Vec::new();
        for (center, nbrs) in adjacency.iter().enumerate() {
            let theta0 = ideal_bond_angle(&elements[center], nbrs.len(), order_sum[center]);
            for (i, &a) in nbrs.iter().enumerate() {
                for &c in &nbrs[i + 1..] {
                    angles.push((a, center, c, theta0));
                }
            }
        }
        let mut pairs = Vec::new();
        for i in 0..n {
            let dist = bfs_distances(&adjacency, i);
            for (j, d) in dist.iter().enumerate().skip(i + 1) {
                if d.is_none_or(|d| d >= NONBONDED_MIN_SEPARATION) {
                    pairs.push((i, j));
                }
            }
        }
        ToyForceField {
            n_atoms: n,
            bonds: bond_terms,
            angles,
            pairs,
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn energy(&self, coords: &[Vec3]) -> Result<f64, MetricsError> {
        if coords.len() != self.n_atoms {
            return Err(MetricsError::AtomCountMismatch {
                expected: self.n_atoms,
                found: coords.len(),
            });
        }
        let mut e = 0.0;
        for &(a, b, l0) in &self.bonds {
            let d = (coords[a] - coords[b]).norm() - l0;
            e += K_BOND * d * d;
        }
        for &(a, c, b, theta0) in &self.angles {
            let d = bond_angle(&coords[a], &coords[c], &coords[b]) - theta0;
            e += K_ANGLE * d * d;
        }
        for &(i, j) in &self.pairs {
            let r = (coords[i] - coords[j]).norm();
            let s6 = (LJ_SIGMA / r).powi(6);
            e += 4.0 * LJ_EPSILON * (s6 * s6 - s6);
        }
        Ok(e)
    }
}

fn bfs_distances(adjacency: &[Vec<usize>], start: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adjacency.len()];
    dist[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].expect("visited");
        for &w in &adjacency[v] {
            if dist[w].is_none() {
                dist[w] = Some(dv + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Toy force-field energy of a chain conformation.
pub fn toy_energy(conf: &PolymerConformation, graph: &PolymerGraph) -> Result<f64, MetricsError> {
    ToyForceField::new(graph).energy(&conf.coords)
}

/// [`EnergyOracle`] backed by [`ToyForceField`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ToyEnergy;

impl EnergyOracle for ToyEnergy {
    fn energy(&self, conf: &PolymerConformation, graph: &PolymerGraph) -> Result<f64, MetricsError> {
        toy_energy(conf, graph)
    }

    fn id(&self) -> String {
        "toy".to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diatomic() -> ToyForceField {
        ToyForceField::from_bonds(&["C".to_string(), "O".to_string()], &[Bond::new(0, 1, 1)])
    }

    #[test]
    fn relaxed_bond_is_zero() {
        let ff = diatomic();
        let l0 = ideal_bond_length("C", "O", 1);
        let e = ff.energy(&[Vec3::zeros(), Vec3::new(l0, 0.0, 0.0)]).unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn stretch_is_quadratic() {
        let ff = diatomic();
        let l0 = ideal_bond_length("C", "O", 1);
        let d = 0.125;
        let e = ff.energy(&[Vec3::zeros(), Vec3::new(l0 + d, 0.0, 0.0)]).unwrap();
        assert!((e - K_BOND * d * d).abs() < 1e-12);
    }

    #[test]
    fn nonbonded_pairs_skip_close_neighbours() {
        let elements = vec!["C".to_string(); 6];
        let bonds: Vec<Bond> = (0..5).map(|i| Bond::new(i, i + 1, 1)).collect();
        let ff = ToyForceField::from_bonds(&elements, &bonds);
        assert_eq!(ff.pairs, vec![(0, 4), (0, 5), (1, 5)]);
    }
}
