use super::{DiffusionSchedule, GenerationError, TorsionDenoiser, TorsionQuery};
use crate::geometry::wrap_angle;
use crate::polymer::{standardize, TorsionSet, UnitConformation, UnitTopology};
use rand::Rng;
use rand_distr::StandardNormal;

/// Default torsion noise scale at `ᾱ → 0`.
pub const DEFAULT_TORSION_SIGMA_MAX: f64 = std::f64::consts::FRAC_PI_2;

fn check_t(t: usize, sched: &DiffusionSchedule) -> Result<(), GenerationError> {
    if t > sched.timesteps() {
        return Err(GenerationError::TimestepOutOfRange { t, max: sched.timesteps() });
    }
    Ok(())
}

/// Wrapped-Gaussian noising `φ_t = wrap(φ_0 + σ(t)·ε)`. At `t = 0` the input
/// is returned as is and no randomness is drawn.
pub fn torsion_forward<R: Rng + ?Sized>(
    phi0: &[f64],
    t: usize,
    sched: &DiffusionSchedule,
    sigma_max: f64,
    rng: &mut R,
) -> Result<Vec<f64>, GenerationError> {
    check_t(t, sched)?;
    if t == 0 {
        return Ok(phi0.to_vec());
    }
    let sigma = sched.torsion_sigma(t, sigma_max);
    Ok(phi0
        .iter()
        .map(|&p| {
            let e: f64 = rng.sample(StandardNormal);
            wrap_angle(p + sigma * e)
        })
        .collect())
}

/// Reverse walk over the torsions of one unit, starting from noise around
/// the template torsions at `t = T`.
///
/// Each step applies `φ ← φ + (σ_t² − σ_{t−1}²)·s + sqrt(σ_t² − σ_{t−1}²)·z`
/// with score `s = −ε̂/σ_t`; the final step (`t = 1`) adds no noise. The
/// result is the template with its torsions set to the sampled values, in
/// standard pose.
#[allow(clippy::too_many_arguments)]
pub fn torsion_reverse_sample<R: Rng + ?Sized>(
    template: &UnitConformation,
    topo: &UnitTopology,
    unit_index: usize,
    denoiser: &dyn TorsionDenoiser,
    condition: &[f64],
    sched: &DiffusionSchedule,
    sigma_max: f64,
    rng: &mut R,
) -> Result<UnitConformation, GenerationError> {
    let set = TorsionSet::new(topo);
    let mut unit = template.clone();
    unit.unit_index = unit_index;
    if set.is_empty() {
        return Ok(unit);
    }
    let big_t = sched.timesteps();
    let sigma_t = sched.torsion_sigma(big_t, sigma_max);
    let mut x: Vec<f64> = set
        .angles(template)
        .iter()
        .map(|&p| {
            let e: f64 = rng.sample(StandardNormal);
            wrap_angle(p + sigma_t * e)
        })
        .collect();
    for t in (1..=big_t).rev() {
        let s_t = sched.torsion_sigma(t, sigma_max);
        let s_prev = sched.torsion_sigma(t - 1, sigma_max);
        let eps = denoiser.predict_noise(&TorsionQuery {
            unit: unit_index,
            torsions: &x,
            t,
            sigma: s_t,
            condition,
        })?;
        if eps.len() != x.len() {
            return Err(GenerationError::DimensionMismatch {
                expected: x.len(),
                found: eps.len(),
            });
        }
        let g2 = s_t * s_t - s_prev * s_prev;
        for (xi, ei) in x.iter_mut().zip(&eps) {
            if !ei.is_finite() {
                return Err(GenerationError::NonFinite);
            }
            let mut next = *xi - g2 / s_t * ei;
            if t > 1 {
                let z: f64 = rng.sample(StandardNormal);
                next += g2.sqrt() * z;
            }
            *xi = wrap_angle(next);
        }
    }
    set.set(&mut unit, &x);
    let (std, _) = standardize(&unit, topo)?;
    Ok(UnitConformation::new(unit_index, std.coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generative::{make_schedule, OracleTorsionDenoiser, ScheduleKind};
    use crate::polymer::idealized_template;
    use crate::testing;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn forward_identity_at_zero() {
        let s = make_schedule(ScheduleKind::Cosine, 100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let phi = vec![0.3, -3.0, 3.14159];
        assert_eq!(torsion_forward(&phi, 0, &s, 1.0, &mut rng).unwrap(), phi);
        assert!(torsion_forward(&phi, 101, &s, 1.0, &mut rng).is_err());
    }

    #[test]
    fn no_torsions_returns_template() {
        let topo = testing::methylene_unit();
        let template = idealized_template(&topo).unwrap();
        let s = make_schedule(ScheduleKind::Cosine, 10).unwrap();
        let den = OracleTorsionDenoiser::new(vec![vec![]]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = torsion_reverse_sample(&template, &topo, 0, &den, &[], &s, 1.0, &mut rng).unwrap();
        assert_eq!(out, template);
    }

    #[test]
    fn oracle_recovers_torsions() {
        let topo = testing::butane_unit();
        let template = idealized_template(&topo).unwrap();
        let set = TorsionSet::new(&topo);
        assert!(!set.is_empty());
        let gt: Vec<f64> = (0..set.len()).map(|k| 2.5 - 1.3 * k as f64).collect();
        let den = OracleTorsionDenoiser::new(vec![gt.clone()]);
        let s = make_schedule(ScheduleKind::Cosine, 200).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = torsion_reverse_sample(&template, &topo, 0, &den, &[], &s, 1.0, &mut rng).unwrap();
        for (a, b) in set.angles(&out).iter().zip(&gt) {
            assert!(wrap_angle(a - b).abs() < 0.05);
        }
    }
}
