//! Fixtures and random generators shared by unit tests, integration tests
//! and fuzz targets. Not part of the stable API.

use crate::geometry::{bond_angle, RigidTransform, Rotation, Vec3};
use crate::polymer::{
    Bond, KeyAtoms, KeyRole, PolymerConformation, PolymerGraph, UnitConformation, UnitTopology,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::VecDeque;
use std::ops::RangeInclusive;

/// Polyethylene-like unit: atom-1, C (atom-2), C (atom-3), atom-4 and four H.
pub fn ethylene_unit() -> UnitTopology {
    let elements = ["C", "C", "C", "C", "H", "H", "H", "H"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let bonds = vec![
        Bond::new(0, 1, 1),
        Bond::new(1, 2, 1),
        Bond::new(2, 3, 1),
        Bond::new(1, 4, 1),
        Bond::new(1, 5, 1),
        Bond::new(2, 6, 1),
        Bond::new(2, 7, 1),
    ];
    UnitTopology::new(
        elements,
        bonds,
        KeyAtoms {
            atom1: 0,
            atom2: 1,
            atom3: 2,
            atom4: 3,
        },
    )
    .expect("fixture is valid")
}

/// Single-carbon backbone unit: atom-2 and atom-3 are the same atom.
pub fn methylene_unit() -> UnitTopology {
    let elements = ["C", "C", "C", "H", "H"].iter().map(|s| s.to_string()).collect();
    let bonds = vec![Bond::new(0, 1, 1), Bond::new(1, 2, 1), Bond::new(1, 3, 1), Bond::new(1, 4, 1)];
    UnitTopology::new(
        elements,
        bonds,
        KeyAtoms {
            atom1: 0,
            atom2: 1,
            atom3: 1,
            atom4: 2,
        },
    )
    .expect("fixture is valid")
}

/// Butane-like unit: four backbone carbons between the overlap atoms, with hydrogens.
pub fn butane_unit() -> UnitTopology {
    // 0: atom-1, 1..=4: backbone C (1 = atom-2, 4 = atom-3), 5: atom-4, 6..: H
    let mut elements: Vec<String> = ["C", "C", "C", "C", "C", "C"].iter().map(|s| s.to_string()).collect();
    let mut bonds = vec![
        Bond::new(0, 1, 1),
        Bond::new(1, 2, 1),
        Bond::new(2, 3, 1),
        Bond::new(3, 4, 1),
        Bond::new(4, 5, 1),
    ];
    for c in 1..=4 {
        for _ in 0..2 {
            bonds.push(Bond::new(c, elements.len(), 1));
            elements.push("H".to_string());
        }
    }
    UnitTopology::new(
        elements,
        bonds,
        KeyAtoms {
            atom1: 0,
            atom2: 1,
            atom3: 4,
            atom4: 5,
        },
    )
    .expect("fixture is valid")
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

/// Uniformly distributed rotation.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    let axis = random_unit_vector(rng);
    // angle density ∝ 1 − cos θ, sampled by rejection
    let angle = loop {
        let t: f64 = rng.random_range(0.0..std::f64::consts::PI);
        if rng.random::<f64>() * 2.0 < 1.0 - t.cos() {
            break t;
        }
    };
    Rotation::exp(&(axis * angle))
}

pub fn random_rigid<R: Rng + ?Sized>(rng: &mut R, translation_scale: f64) -> RigidTransform {
    RigidTransform::new(random_rotation(rng), random_unit_vector(rng) * rng.random_range(0.0..translation_scale))
}

/// Random tree-shaped unit with `n_atoms ≥ 5` atoms (local order shuffled).
pub fn random_unit_topology<R: Rng + ?Sized>(rng: &mut R, n_atoms: usize) -> UnitTopology {
    assert!(n_atoms >= 5);
    // canonical layout: 0 = atom-1, 1 = atom-2, backbone ..= atom-3, side atoms, last = atom-4
    let free = n_atoms - 3;
    let backbone = rng.random_range(1..=free.min(8));
    let atom3 = 1 + backbone;
    let atom4 = n_atoms - 1;
    let mut bonds = vec![(0, 1)];
    for i in 1..atom3 {
        bonds.push((i, i + 1));
    }
    let mut has_child = vec![false; n_atoms];
    for i in 0..atom3 {
        has_child[i] = true;
    }
    for s in atom3 + 1..atom4 {
        let parent = rng.random_range(1..s);
        has_child[parent] = true;
        bonds.push((parent, s));
    }
    bonds.push((atom3, atom4));
    let elements: Vec<&str> = (0..n_atoms)
        .map(|i| {
            if i <= atom3 || i == atom4 || has_child[i] {
                "C"
            } else {
                ["H", "H", "O", "N", "C"][rng.random_range(0..5)]
            }
        })
        .collect();

    let mut perm: Vec<usize> = (0..n_atoms).collect();
    perm.shuffle(rng);
    let mut shuffled = vec![""; n_atoms];
    for (old, &new) in perm.iter().enumerate() {
        shuffled[new] = elements[old];
    }
    let bonds = bonds.iter().map(|&(a, b)| Bond::new(perm[a], perm[b], 1)).collect();
    UnitTopology::new(
        shuffled.iter().map(|s| s.to_string()).collect(),
        bonds,
        KeyAtoms {
            atom1: perm[0],
            atom2: perm[1],
            atom3: perm[atom3],
            atom4: perm[atom4],
        },
    )
    .expect("generated unit is valid")
}

pub fn random_homopolymer<R: Rng + ?Sized>(
    rng: &mut R,
    n_units: usize,
    atoms_per_unit: RangeInclusive<usize>,
) -> PolymerGraph {
    let n = rng.random_range(atoms_per_unit);
    PolymerGraph::homopolymer(random_unit_topology(rng, n), n_units).expect("valid chain")
}

/// Places atoms breadth-first along the bonds with random directions and
/// bond lengths in [1.0, 1.6) Å. Rejects placements with nearly collinear
/// frame vectors.
fn embed_tree<R: Rng + ?Sized>(n: usize, adjacency: &[Vec<usize>], rng: &mut R) -> Vec<Vec3> {
    let mut coords = vec![Vec3::zeros(); n];
    let mut placed = vec![false; n];
    for root in 0..n {
        if placed[root] {
            continue;
        }
        coords[root] = random_unit_vector(rng) * rng.random_range(0.0..5.0);
        placed[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if !placed[w] {
                    coords[w] = coords[v] + random_unit_vector(rng) * rng.random_range(1.0..1.6);
                    placed[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    coords
}

fn frame_ok(coords: &[Vec3], topo: &UnitTopology, map: impl Fn(usize) -> usize) -> bool {
    let a1 = coords[map(topo.key(KeyRole::Atom1))];
    let a3 = coords[map(topo.key(KeyRole::Atom3))];
    let a4 = coords[map(topo.key(KeyRole::Atom4))];
    let theta = bond_angle(&a1, &a3, &a4);
    theta > 0.1 && theta < std::f64::consts::PI - 0.1
}

/// Random coordinates for a single unit.
pub fn random_unit_coords<R: Rng + ?Sized>(topo: &UnitTopology, rng: &mut R) -> UnitConformation {
    let adjacency: Vec<Vec<usize>> = (0..topo.n_atoms()).map(|i| topo.neighbors(i).to_vec()).collect();
    loop {
        let coords = embed_tree(topo.n_atoms(), &adjacency, rng);
        if frame_ok(&coords, topo, |i| i) {
            return UnitConformation::new(0, coords);
        }
    }
}

/// Random chain conformation with bonded distances in [1.0, 1.6) Å.
pub fn random_conformation<R: Rng + ?Sized>(graph: &PolymerGraph, rng: &mut R) -> PolymerConformation {
    let n = graph.total_atoms();
    let mut adjacency = vec![Vec::new(); n];
    for b in graph.bonds() {
        adjacency[b.a].push(b.b);
        adjacency[b.b].push(b.a);
    }
    loop {
        let coords = embed_tree(n, &adjacency, rng);
        let ok = (0..graph.n_units()).all(|i| {
            let map = graph.unit_atoms(i);
            frame_ok(&coords, graph.unit(i), |l| map[l])
        });
        if ok {
            return PolymerConformation::new(graph, coords).expect("sizes match");
        }
    }
}
