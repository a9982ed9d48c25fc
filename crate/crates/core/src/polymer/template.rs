use super::conformation::{standardize, UnitConformation};
use super::elements::{ideal_bond_angle, ideal_bond_length};
use super::topology::UnitTopology;
use super::PolymerError;
use crate::geometry::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ITERATIONS: usize = 4000;
const CLASH_DISTANCE: f64 = 2.2;

struct Restraint {
    i: usize,
    j: usize,
    target: f64,
    weight: f64,
}

/// Standard-pose unit with idealized bond lengths and angles.
///
/// Bond lengths come from covalent radii and angles from the steric number of
/// each center; coordinates are found by relaxing distance restraints from a
/// fixed-seed start, so the result is deterministic for a given topology.
pub fn idealized_template(topo: &UnitTopology) -> Result<UnitConformation, PolymerError> {
    let n = topo.n_atoms();
    let mut restraints = Vec::new();
    let mut bonded = vec![vec![false; n]; n];
    for b in topo.bonds() {
        bonded[b.a][b.b] = true;
        bonded[b.b][b.a] = true;
        restraints.push(Restraint {
            i: b.a,
            j: b.b,
            target: ideal_bond_length(topo.element(b.a), topo.element(b.b), b.order),
            weight: 1.0,
        });
    }
    for (a, center, c) in topo.angles() {
        let la = ideal_len(topo, a, center);
        let lc = ideal_len(topo, c, center);
        let theta = ideal_bond_angle(
            topo.element(center),
            topo.neighbors(center).len(),
            topo.order_sum(center),
        );
        let target = (la * la + lc * lc - 2.0 * la * lc * theta.cos()).sqrt();
        bonded[a][c] = true;
        bonded[c][a] = true;
        restraints.push(Restraint {
            i: a,
            j: c,
            target,
            weight: 0.5,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x7e3f_1a2b);
    let scale = 1.2 * (n as f64).cbrt();
    let mut x: Vec<Vec3> = (0..n)
        .map(|_| {
            Vec3::new(
                rng.random_range(-scale..scale),
                rng.random_range(-scale..scale),
                rng.random_range(-scale..scale),
            )
        })
        .collect();

    let mut step = 0.05;
    let mut energy = restraint_energy(&x, &restraints, &bonded);
    for _ in 0..ITERATIONS {
        let grad = restraint_gradient(&x, &restraints, &bonded);
        let trial: Vec<Vec3> = x.iter().zip(&grad).map(|(p, g)| p - g * step).collect();
        let e = restraint_energy(&trial, &restraints, &bonded);
        if e <= energy {
            x = trial;
            energy = e;
            step = (step * 1.1).min(0.5);
        } else {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }

    let (std, _) = standardize(&UnitConformation::new(0, x), topo)?;
    Ok(std)
}

fn ideal_len(topo: &UnitTopology, a: usize, b: usize) -> f64 {
    let order = topo.bond_between(a, b).map(|b| b.order).unwrap_or(1);
    ideal_bond_length(topo.element(a), topo.element(b), order)
}

fn restraint_energy(x: &[Vec3], restraints: &[Restraint], bonded: &[Vec<bool>]) -> f64 {
    let mut e = 0.0;
    for r in restraints {
        let d = (x[r.i] - x[r.j]).norm();
        e += r.weight * (d - r.target).powi(2);
    }
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            if bonded[i][j] {
                continue;
            }
            let d = (x[i] - x[j]).norm();
            if d < CLASH_DISTANCE {
                e += 0.1 * (CLASH_DISTANCE - d).powi(2);
            }
        }
    }
    e
}

fn restraint_gradient(x: &[Vec3], restraints: &[Restraint], bonded: &[Vec<bool>]) -> Vec<Vec3> {
    let mut g = vec![Vec3::zeros(); x.len()];
    let mut pair = |i: usize, j: usize, coeff: f64, target: f64, only_below: bool| {
        let diff = x[i] - x[j];
        let d = diff.norm().max(1e-9);
        if only_below && d >= target {
            return;
        }
        let f = diff * (2.0 * coeff * (d - target) / d);
        g[i] += f;
        g[j] -= f;
    };
    for r in restraints {
        pair(r.i, r.j, r.weight, r.target, false);
    }
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            if !bonded[i][j] {
                pair(i, j, 0.1, CLASH_DISTANCE, true);
            }
        }
    }
    g
}
