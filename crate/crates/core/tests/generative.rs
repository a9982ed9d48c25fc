mod common;

use polyframe::generative::{
    generate_conformation, make_schedule, mar_schedule, mask_rows, mean_pool, so3_forward, torsion_forward,
    EmbeddingMatrix, GenerationConfig, GenerationError, MarSchedule, OracleRotationDenoiser, OracleTorsionDenoiser,
    ScheduleKind, ToyEncoder, ToyRotationDenoiser, ToyTorsionDenoiser,
};
use polyframe::geometry::{kabsch_align, wrap_angle};
use polyframe::polymer::PolymerGraph;
use polyframe::testing;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check_partition(s: &MarSchedule, n: usize, k: usize) {
    assert_eq!(s.subsets().len(), k);
    let mut seen = vec![false; n];
    for subset in s.subsets() {
        assert!(!subset.is_empty());
        for &i in subset {
            assert!(!seen[i], "unit {i} scheduled twice");
            seen[i] = true;
        }
    }
    assert!(seen.iter().all(|&x| x));
}

proptest! {
    #[test]
    fn mar_subsets_partition_units(n in 1usize..40, k_frac in 0.0..1.0f64, seed in any::<u64>()) {
        let k = 1 + ((n - 1) as f64 * k_frac) as usize;
        let s = mar_schedule(n, k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        check_partition(&s, n, k);
        let again = mar_schedule(n, k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(s, again);
    }

    #[test]
    fn masking_zeroes_exactly_the_masked_rows(rows in 1usize..12, dim in 1usize..8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<Vec<f64>> = (0..rows).map(|_| (0..dim).map(|_| testing::random_unit_vector(&mut rng).x).collect()).collect();
        let x = EmbeddingMatrix::from_rows(&data).unwrap();
        let masked: Vec<usize> = (0..rows).filter(|i| i % 3 == 1).collect();
        let y = mask_rows(&x, &masked).unwrap();
        for i in 0..rows {
            if masked.contains(&i) {
                prop_assert!(y.row(i).iter().all(|&v| v == 0.0));
            } else {
                prop_assert_eq!(y.row(i), x.row(i));
            }
        }
        let pooled = mean_pool(&x).unwrap();
        prop_assert_eq!(pooled.rows(), 1);
        for j in 0..dim {
            let m = data.iter().map(|r| r[j]).sum::<f64>() / rows as f64;
            prop_assert!((pooled.row(0)[j] - m).abs() < 1e-12);
        }
    }
}

#[test]
fn mar_exhaustive_small_sizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for n in 1..=20 {
        for k in 1..=n {
            check_partition(&mar_schedule(n, k, &mut rng).unwrap(), n, k);
        }
    }
    assert!(matches!(mar_schedule(3, 0, &mut rng), Err(GenerationError::InvalidK { .. })));
    assert!(matches!(mar_schedule(3, 4, &mut rng), Err(GenerationError::InvalidK { .. })));
    assert!(MarSchedule::from_permutation(vec![0, 0, 1], 2).is_err());
}

#[test]
fn forward_processes_are_identities_at_zero() {
    let sched = make_schedule(ScheduleKind::Cosine, 100).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let phi = vec![0.3, -2.0, 3.1];
    assert_eq!(torsion_forward(&phi, 0, &sched, 1.0, &mut rng).unwrap(), phi);
    let r = testing::random_rotation(&mut rng);
    assert_eq!(so3_forward(&r, 0, &sched, &mut rng).unwrap(), r);
    assert!(torsion_forward(&phi, 101, &sched, 1.0, &mut rng).is_err());
}

#[test]
fn torsion_forward_variance_matches_schedule() {
    let sched = make_schedule(ScheduleKind::Cosine, 1000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let t = 500;
    let sigma = sched.torsion_sigma(t, 1.0);
    let phi0 = [0.7];
    let draws = 10_000;
    let var = (0..draws)
        .map(|_| wrap_angle(torsion_forward(&phi0, t, &sched, 1.0, &mut rng).unwrap()[0] - phi0[0]).powi(2))
        .sum::<f64>()
        / draws as f64;
    assert!((var / (sigma * sigma) - 1.0).abs() < 0.05, "{var} vs {}", sigma * sigma);
}

#[test]
fn so3_forward_second_moment_matches_quadrature() {
    let sched = make_schedule(ScheduleKind::Linear, 200).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for t in [20, 100, 200] {
        let r0 = testing::random_rotation(&mut rng);
        let draws = 10_000;
        let m = (0..draws)
            .map(|_| (r0.inverse() * so3_forward(&r0, t, &sched, &mut rng).unwrap()).angle().powi(2))
            .sum::<f64>()
            / draws as f64;
        let q = common::igso3_second_moment(sched.sigma_rot()[t]);
        assert!((m / q - 1.0).abs() < 0.05, "t={t}: {m} vs {q}");
    }
}

fn oracle_run(graph: &PolymerGraph, k: Option<usize>, seed: u64) -> (f64, polyframe::polymer::PolymerConformation) {
    let truth = common::oracle_reference(graph, 99);
    let out = generate_conformation(
        graph,
        &ToyEncoder::new(1),
        &OracleTorsionDenoiser::new(truth.torsions.clone()),
        &OracleRotationDenoiser::new(truth.rotations.clone()),
        &GenerationConfig {
            timesteps: 100,
            k_steps: k,
            seed,
            ..GenerationConfig::default()
        },
    )
    .unwrap();
    let rmsd = kabsch_align(&out.conformation.coords, &truth.conformation.coords).unwrap().rmsd;
    (rmsd, out.conformation)
}

#[test]
fn oracle_denoisers_reproduce_reference() {
    let graph = PolymerGraph::homopolymer(testing::butane_unit(), 10).unwrap();
    let (rmsd, one) = oracle_run(&graph, Some(1), 4);
    assert!(rmsd < 0.1, "rmsd {rmsd}");
    let (_, all) = oracle_run(&graph, None, 4);
    for (a, b) in one.coords.iter().zip(&all.coords) {
        assert!((a - b).norm() < 1e-6);
    }
}

#[test]
fn toy_generation_is_seeded_and_valid() {
    let graph = PolymerGraph::homopolymer(testing::butane_unit(), 5).unwrap();
    let run = |seed| {
        generate_conformation(
            &graph,
            &ToyEncoder::new(0),
            &ToyTorsionDenoiser,
            &ToyRotationDenoiser,
            &GenerationConfig {
                timesteps: 50,
                seed,
                ..GenerationConfig::default()
            },
        )
        .unwrap()
    };
    let (a, b, c) = (run(1), run(1), run(2));
    assert_eq!(a.conformation, b.conformation);
    assert_ne!(a.conformation, c.conformation);
    assert_eq!(a.conformation.coords.len(), graph.total_atoms());
    a.conformation.check_junctions(&graph, 2.0).unwrap();
    assert_eq!(a.global_embedding.rows(), 1);
    for r in &a.rotations {
        assert!(r.orthonormality_error() < 1e-9);
    }
}

#[test]
fn schedules_are_monotone() {
    for kind in [ScheduleKind::Cosine, ScheduleKind::Linear] {
        let s = make_schedule(kind, 500).unwrap();
        assert_eq!(s.alpha_bar()[0], 1.0);
        for w in s.alpha_bar().windows(2) {
            assert!(w[1] <= w[0]);
        }
        for w in s.sigma_rot().windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!((s.torsion_sigma(0, 1.0)).abs() < 1e-12);
    }
    assert!(make_schedule(ScheduleKind::Cosine, 0).is_err());
}
