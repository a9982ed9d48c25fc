use super::{DiffusionSchedule, EmbeddingMatrix, GenerationError, RotationDenoiser, RotationQuery};
use crate::assembly::{apply_rotation, derive_translations};
use crate::geometry::{igso3_sample, GeometryError, Igso3Table, RigidTransform, Rotation};
use crate::polymer::{PolymerGraph, UnitConformation};
use rand::Rng;

/// Forward noising `r_t = r0 · IGSO3(σ_rot[t])`; `t = 0` returns `r0`.
pub fn so3_forward<R: Rng + ?Sized>(
    r0: &Rotation,
    t: usize,
    sched: &DiffusionSchedule,
    rng: &mut R,
) -> Result<Rotation, GenerationError> {
    if t > sched.timesteps() {
        return Err(GenerationError::TimestepOutOfRange { t, max: sched.timesteps() });
    }
    if t == 0 {
        return Ok(*r0);
    }
    Ok(*r0 * igso3_sample(sched.sigma_rot()[t], rng))
}

/// Reverse sampling of one rotation per unit.
///
/// Starts from `IGSO3(σ_rot[T])`. At every step the current orientations
/// (rotations plus translations chained through the overlap atoms) go to the
/// denoiser, whose outputs are projected to the nearest rotations `R̂0`. For
/// `t > 1` each rotation moves along the geodesic towards `R̂0`, keeping the
/// fraction `γ = σ_{t−1}²/σ_t²` of the remaining offset, then receives
/// `IGSO3(σ_{t−1}·sqrt(1 − γ))` noise. The projected prediction of the last
/// step is returned.
pub fn so3_reverse_sample<R: Rng + ?Sized>(
    denoiser: &dyn RotationDenoiser,
    condition: &EmbeddingMatrix,
    std_units: &[UnitConformation],
    graph: &PolymerGraph,
    sched: &DiffusionSchedule,
    rng: &mut R,
) -> Result<Vec<Rotation>, GenerationError> {
    let n = graph.n_units();
    if std_units.len() != n {
        return Err(GenerationError::DimensionMismatch {
            expected: n,
            found: std_units.len(),
        });
    }
    let sigma = sched.sigma_rot();
    let big_t = sched.timesteps();
    let start = Igso3Table::cached(sigma[big_t]);
    let mut current: Vec<Rotation> = (0..n).map(|_| start.sample(rng)).collect();
    let mut prediction = current.clone();
    for t in (1..=big_t).rev() {
        let rotated = std_units
            .iter()
            .zip(&current)
            .enumerate()
            .map(|(i, (u, r))| apply_rotation(u, graph.unit(i), r))
            .collect::<Result<Vec<_>, _>>()?;
        let translations = derive_translations(&rotated, graph);
        let frames: Vec<RigidTransform> = current
            .iter()
            .zip(&translations)
            .map(|(r, tr)| RigidTransform::new(*r, *tr))
            .collect();
        let raw = denoiser.predict_rotations(&RotationQuery {
            t,
            sigma: sigma[t],
            frames: &frames,
            condition,
            units: std_units,
            graph,
        })?;
        if raw.len() != n {
            return Err(GenerationError::DimensionMismatch {
                expected: n,
                found: raw.len(),
            });
        }
        prediction = raw
            .iter()
            .enumerate()
            .map(|(unit, m)| {
                Rotation::nearest(m).map_err(|e| match e {
                    GeometryError::ProjectionFailure | GeometryError::NonFinite => {
                        GenerationError::ProjectionFailure { unit }
                    }
                    other => other.into(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if t > 1 {
            let gamma = (sigma[t - 1] / sigma[t]).powi(2);
            let noise = Igso3Table::new(sigma[t - 1] * (1.0 - gamma).max(1e-12).sqrt());
            for (r, p) in current.iter_mut().zip(&prediction) {
                let offset = (p.inverse() * *r).log();
                *r = *p * Rotation::exp(&(offset * gamma)) * noise.sample(rng);
            }
        }
    }
    Ok(prediction)
}
