mod common;

use approx::assert_relative_eq;
use polyframe::geometry::{
    dihedral, geodesic_distance, gram_schmidt_rotation, igso3_sample, kabsch_align, wrap_angle, RigidTransform,
    Rotation, Vec3,
};
use polyframe::testing;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn vec3() -> impl Strategy<Value = Vec3> {
    (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn rotation() -> impl Strategy<Value = Rotation> {
    any::<u64>().prop_map(|s| testing::random_rotation(&mut ChaCha8Rng::seed_from_u64(s)))
}

proptest! {
    #[test]
    fn gram_schmidt_is_proper_rotation(v1 in vec3(), v2 in vec3()) {
        prop_assume!(v1.norm() > 1e-3 && v2.norm() > 1e-3);
        prop_assume!(v1.cross(&v2).norm() > 1e-3 * v1.norm() * v2.norm());
        let r = gram_schmidt_rotation(&v1, &v2).unwrap();
        prop_assert!(r.orthonormality_error() < 1e-10);
        prop_assert!((r.matrix().determinant() - 1.0).abs() < 1e-10);
        // first column along v1, second in the v1-v2 plane
        prop_assert!((r.matrix().column(0) - v1.normalize()).norm() < 1e-10);
        prop_assert!(r.matrix().column(1).dot(&v1.cross(&v2)).abs() < 1e-9 * v1.cross(&v2).norm().max(1.0));
    }

    #[test]
    fn gram_schmidt_is_equivariant(v1 in vec3(), v2 in vec3(), g in rotation()) {
        prop_assume!(v1.cross(&v2).norm() > 1e-2);
        let r = gram_schmidt_rotation(&v1, &v2).unwrap();
        let rg = gram_schmidt_rotation(&g.apply(&v1), &g.apply(&v2)).unwrap();
        prop_assert!((rg.matrix() - g.matrix() * r.matrix()).norm() < 1e-9);
    }

    #[test]
    fn exp_log_roundtrip(w in vec3()) {
        let w = if w.norm() >= std::f64::consts::PI - 1e-3 { w.normalize() * 3.0 } else { w };
        let r = Rotation::exp(&w);
        prop_assert!((r.log() - w).norm() < 1e-9);
        prop_assert!((r.angle() - w.norm()).abs() < 1e-9);
    }

    #[test]
    fn geodesic_distance_is_invariant(a in rotation(), b in rotation(), g in rotation()) {
        let d = geodesic_distance(&a, &b);
        prop_assert!((geodesic_distance(&(g * a), &(g * b)) - d).abs() < 1e-9);
        prop_assert!((geodesic_distance(&b, &a) - d).abs() < 1e-12);
    }

    #[test]
    fn kabsch_recovers_rigid_motion(seed in any::<u64>(), n in 3usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p: Vec<Vec3> = (0..n).map(|_| testing::random_unit_vector(&mut rng) * 4.0).collect();
        let motion = testing::random_rigid(&mut rng, 20.0);
        let q = motion.apply_all(&p);
        let a = kabsch_align(&p, &q).unwrap();
        prop_assert!(a.rmsd < 1e-9);
        for (x, y) in p.iter().zip(&q) {
            prop_assert!((a.transform.apply(x) - y).norm() < 1e-8);
        }
        prop_assert!((a.transform.rotation.matrix().determinant() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kabsch_never_beats_identity_lower_bound(seed in any::<u64>(), n in 3usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p: Vec<Vec3> = (0..n).map(|_| testing::random_unit_vector(&mut rng) * 3.0).collect();
        let q: Vec<Vec3> = (0..n).map(|_| testing::random_unit_vector(&mut rng) * 3.0).collect();
        let a = kabsch_align(&p, &q).unwrap();
        let c = |s: &[Vec3]| s.iter().fold(Vec3::zeros(), |x, y| x + y) / s.len() as f64;
        let (cp, cq) = (c(&p), c(&q));
        let plain: f64 = p.iter().zip(&q).map(|(x, y)| ((x - cp) - (y - cq)).norm_squared()).sum::<f64>() / n as f64;
        prop_assert!(a.rmsd <= plain.sqrt() + 1e-12);
        let moved = a.transform.apply_all(&p);
        let direct: f64 = moved.iter().zip(&q).map(|(x, y)| (x - y).norm_squared()).sum::<f64>() / n as f64;
        prop_assert!((direct.sqrt() - a.rmsd).abs() < 1e-9);
    }

    #[test]
    fn dihedral_sign_and_invariance(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec3> = (0..4).map(|_| testing::random_unit_vector(&mut rng) * 2.0).collect();
        let d = dihedral(&pts[0], &pts[1], &pts[2], &pts[3]);
        let g: RigidTransform = testing::random_rigid(&mut rng, 5.0);
        let m = g.apply_all(&pts);
        prop_assert!(wrap_angle(dihedral(&m[0], &m[1], &m[2], &m[3]) - d).abs() < 1e-9);
        let mirrored: Vec<Vec3> = pts.iter().map(|p| Vec3::new(-p.x, p.y, p.z)).collect();
        let dm = dihedral(&mirrored[0], &mirrored[1], &mirrored[2], &mirrored[3]);
        prop_assert!(wrap_angle(dm + d).abs() < 1e-9);
    }
}

#[test]
fn kabsch_matches_brute_force_grid_on_three_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..5 {
        let p: Vec<Vec3> = (0..3).map(|_| testing::random_unit_vector(&mut rng) * 2.0).collect();
        let q: Vec<Vec3> = (0..3).map(|_| testing::random_unit_vector(&mut rng) * 2.0).collect();
        let k = kabsch_align(&p, &q).unwrap().rmsd;
        let b = common::brute_force_rmsd(&p, &q);
        assert!(k <= b + 1e-9, "kabsch {k} worse than grid {b}");
        assert!(b - k < 1e-3, "kabsch {k} vs grid {b}");
    }
}

#[test]
fn igso3_second_moment_matches_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for &sigma in &[0.05, 0.3, 1.0] {
        let draws = 20_000;
        let m: f64 = (0..draws).map(|_| igso3_sample(sigma, &mut rng).angle().powi(2)).sum::<f64>() / draws as f64;
        let q = common::igso3_second_moment(sigma);
        assert_relative_eq!(m, q, max_relative = 0.05);
    }
}

#[test]
fn degenerate_inputs_are_rejected() {
    let v = Vec3::new(1.0, 2.0, 3.0);
    assert!(gram_schmidt_rotation(&v, &(v * 2.0)).is_err());
    assert!(gram_schmidt_rotation(&Vec3::zeros(), &v).is_err());
    assert!(kabsch_align(&[], &[]).is_err());
    assert!(kabsch_align(&[v], &[v, v]).is_err());
    let bad = nalgebra::Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0);
    assert!(Rotation::from_matrix(bad).is_err());
}
