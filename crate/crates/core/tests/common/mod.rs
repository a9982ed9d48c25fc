//! Independent reference implementations used by the integration and
//! acceptance tests.
#![allow(dead_code)]

use polyframe::geometry::{kabsch_align, Rotation, Vec3};
use polyframe::polymer::elements::{ideal_bond_angle, ideal_bond_length};
use polyframe::polymer::Bond;
use std::f64::consts::PI;

fn centered(points: &[Vec3]) -> Vec<Vec3> {
    let c = points.iter().fold(Vec3::zeros(), |a, p| a + p) / points.len() as f64;
    points.iter().map(|p| p - c).collect()
}

fn rotated_rmsd(p: &[Vec3], q: &[Vec3], omega: &Vec3) -> f64 {
    let r = Rotation::exp(omega);
    let sum: f64 = p.iter().zip(q).map(|(a, b)| (r.apply(a) - b).norm_squared()).sum();
    (sum / p.len() as f64).sqrt()
}

/// Smallest RMSD over a rotation-vector grid, refined around the best cell.
pub fn brute_force_rmsd(p: &[Vec3], q: &[Vec3]) -> f64 {
    let (p, q) = (centered(p), centered(q));
    let mut center = Vec3::zeros();
    let mut half = PI;
    let mut best = f64::INFINITY;
    let n = 24i32;
    for _ in 0..14 {
        let step = 2.0 * half / n as f64;
        let mut best_here = (f64::INFINITY, center);
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    let w = center + Vec3::new(-half + i as f64 * step, -half + j as f64 * step, -half + k as f64 * step);
                    let v = rotated_rmsd(&p, &q, &w);
                    if v < best_here.0 {
                        best_here = (v, w);
                    }
                }
            }
        }
        best = best.min(best_here.0);
        center = best_here.1;
        half = 2.0 * step;
    }
    best
}

/// `∫ ω² p(ω) dω` for the IGSO3 angle density, by Simpson's rule on a
/// directly summed series.
pub fn igso3_second_moment(sigma: f64) -> f64 {
    let terms = (12.0 / sigma).ceil() as usize + 10;
    let f = |w: f64| -> f64 {
        let mut s = 0.0;
        for l in 0..=terms {
            let l = l as f64;
            let base = (-l * (l + 1.0) * sigma * sigma / 2.0).exp();
            let ratio = if w < 1e-9 {
                2.0 * l + 1.0
            } else {
                ((l + 0.5) * w).sin() / (w / 2.0).sin()
            };
            s += (2.0 * l + 1.0) * base * ratio;
        }
        (1.0 - w.cos()) / PI * s
    };
    let upper = (14.0 * sigma).min(PI);
    let n = 4000;
    let h = upper / n as f64;
    let (mut mass, mut moment) = (0.0, 0.0);
    for i in 0..=n {
        let w = i as f64 * h;
        let c = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let d = f(w);
        mass += c * d;
        moment += c * d * w * w;
    }
    moment / mass
}

/// Recall/precision and coverage by explicit double loops. `cost(r, g)` is
/// the pairwise cost; returns `(recall, precision, cov_recall, cov_precision)`.
pub fn exhaustive_matching(
    n_ref: usize,
    n_gen: usize,
    cost: impl Fn(usize, usize) -> f64,
    delta: f64,
) -> (f64, f64, f64, f64) {
    let (mut recall, mut cov_r) = (0.0, 0.0);
    for r in 0..n_ref {
        let mut best = f64::INFINITY;
        for g in 0..n_gen {
            let c = cost(r, g);
            if c < best {
                best = c;
            }
        }
        recall += best;
        cov_r += if best <= delta { 1.0 } else { 0.0 };
    }
    let (mut precision, mut cov_p) = (0.0, 0.0);
    for g in 0..n_gen {
        let mut best = f64::INFINITY;
        for r in 0..n_ref {
            let c = cost(r, g);
            if c < best {
                best = c;
            }
        }
        precision += best;
        cov_p += if best <= delta { 1.0 } else { 0.0 };
    }
    (
        recall / n_ref as f64,
        precision / n_gen as f64,
        cov_r / n_ref as f64,
        cov_p / n_gen as f64,
    )
}

/// Aligned RMSD cost used by the matching metrics (generated onto reference).
pub fn aligned_rmsd(generated: &[Vec3], reference: &[Vec3]) -> f64 {
    kabsch_align(generated, reference).unwrap().rmsd
}

fn angle(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let (u, v) = (a - b, c - b);
    (u.dot(&v) / (u.norm() * v.norm())).clamp(-1.0, 1.0).acos()
}

/// Toy force field evaluated term by term: harmonic bonds (k = 300),
/// harmonic angles (k = 50) and 12-6 Lennard-Jones (ε = 0.1, σ = 3.4) between
/// atoms at least four bonds apart or in different components.
pub fn toy_energy_terms(elements: &[String], bonds: &[Bond], coords: &[Vec3]) -> f64 {
    let n = elements.len();
    let mut adj = vec![vec![false; n]; n];
    let mut order_sum = vec![0u32; n];
    for b in bonds {
        adj[b.a][b.b] = true;
        adj[b.b][b.a] = true;
        order_sum[b.a] += b.order as u32;
        order_sum[b.b] += b.order as u32;
    }
    // Floyd–Warshall on hop counts.
    let inf = usize::MAX / 4;
    let mut dist = vec![vec![inf; n]; n];
    for i in 0..n {
        dist[i][i] = 0;
        for j in 0..n {
            if adj[i][j] {
                dist[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if dist[i][k] + dist[k][j] < dist[i][j] {
                    dist[i][j] = dist[i][k] + dist[k][j];
                }
            }
        }
    }
    let mut e = 0.0;
    for b in bonds {
        let d = (coords[b.a] - coords[b.b]).norm() - ideal_bond_length(&elements[b.a], &elements[b.b], b.order);
        e += 300.0 * d * d;
    }
    for c in 0..n {
        let degree = (0..n).filter(|&x| adj[c][x]).count();
        let theta0 = ideal_bond_angle(&elements[c], degree, order_sum[c]);
        for a in 0..n {
            for b in a + 1..n {
                if adj[c][a] && adj[c][b] {
                    let d = angle(&coords[a], &coords[c], &coords[b]) - theta0;
                    e += 50.0 * d * d;
                }
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if dist[i][j] >= 4 {
                let r = (coords[i] - coords[j]).norm();
                let x = (3.4 / r).powi(6);
                e += 0.4 * (x * x - x);
            }
        }
    }
    e
}

/// Ground truth for the oracle denoisers: random torsions per unit applied
/// to the pipeline's templates, random unit rotations and the chain they
/// assemble into.
pub struct OracleReference {
    pub torsions: Vec<Vec<f64>>,
    pub rotations: Vec<Rotation>,
    pub conformation: polyframe::polymer::PolymerConformation,
}

pub fn oracle_reference(graph: &polyframe::polymer::PolymerGraph, seed: u64) -> OracleReference {
    use polyframe::assembly::{assemble, AssemblyInput};
    use polyframe::generative::unit_templates;
    use polyframe::polymer::{set_torsions, standardize, torsion_angles};
    use rand::{Rng, SeedableRng};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let templates = unit_templates(graph).unwrap();
    let mut torsions = Vec::new();
    let mut std_units = Vec::new();
    for (i, tpl) in templates.iter().enumerate() {
        let topo = graph.unit(i);
        let n = torsion_angles(tpl, topo).len();
        // within one radian of anti
        let target: Vec<f64> = (0..n).map(|_| PI + rng.random_range(-1.0..1.0)).map(polyframe::geometry::wrap_angle).collect();
        let unit = set_torsions(tpl, topo, &target).unwrap();
        let (mut std, _) = standardize(&unit, topo).unwrap();
        std.unit_index = i;
        torsions.push(torsion_angles(&std, topo));
        std_units.push(std);
    }
    let rotations: Vec<Rotation> = (0..graph.n_units())
        .map(|_| polyframe::testing::random_rotation(&mut rng))
        .collect();
    let conformation = assemble(&AssemblyInput {
        std_units,
        rotations: rotations.clone(),
        graph,
    })
    .unwrap();
    OracleReference {
        torsions,
        rotations,
        conformation,
    }
}

/// Random polymer with generated and reference sets of the given sizes. Some
/// members are scaled up so that aligned RMSDs straddle the coverage
/// threshold.
pub fn metric_case<R: rand::Rng>(
    rng: &mut R,
    n_gen: usize,
    n_ref: usize,
) -> (std::sync::Arc<polyframe::polymer::PolymerGraph>, Vec<polyframe::polymer::PolymerConformation>, Vec<polyframe::polymer::PolymerConformation>) {
    let n_units = rng.random_range(2..12);
    let graph = std::sync::Arc::new(polyframe::testing::random_homopolymer(rng, n_units, 5..=12));
    let member = |rng: &mut R| {
        let mut c = polyframe::testing::random_conformation(&graph, rng);
        if rng.random_bool(0.3) {
            let s = rng.random_range(5.0..40.0);
            for p in &mut c.coords {
                *p *= s;
            }
        }
        c
    };
    let generated = (0..n_gen).map(|_| member(rng)).collect();
    let reference = (0..n_ref).map(|_| member(rng)).collect();
    (graph, generated, reference)
}
