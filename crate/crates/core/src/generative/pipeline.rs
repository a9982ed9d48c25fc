use super::{
    make_schedule, mar_schedule, mask_rows, mean_pool, so3_reverse_sample, torsion_reverse_sample,
    EmbeddingMatrix, EncoderOracle, GenerationError, MarSchedule, RotationDenoiser, ScheduleKind,
    TorsionDenoiser, DEFAULT_TORSION_SIGMA_MAX,
};
use crate::assembly::{assemble, AssemblyInput};
use crate::geometry::Rotation;
use crate::polymer::{idealized_template, PolymerConformation, PolymerGraph, UnitConformation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationConfig {
    pub timesteps: usize,
    pub schedule: ScheduleKind,
    /// MAR step count; `None` means one unit per step.
    pub k_steps: Option<usize>,
    pub seed: u64,
    pub torsion_sigma_max: f64,
    /// Standard-pose starting geometry per unit; idealized templates when
    /// `None`.
    pub templates: Option<Vec<UnitConformation>>,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            timesteps: 1000,
            schedule: ScheduleKind::Cosine,
            k_steps: None,
            seed: 0,
            torsion_sigma_max: DEFAULT_TORSION_SIGMA_MAX,
            templates: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedChain {
    pub conformation: PolymerConformation,
    pub std_units: Vec<UnitConformation>,
    pub rotations: Vec<Rotation>,
    pub order: MarSchedule,
    pub context: EmbeddingMatrix,
    pub global_embedding: EmbeddingMatrix,
}

/// Idealized standard-pose template for every unit, computed once per
/// distinct topology.
pub fn unit_templates(graph: &PolymerGraph) -> Result<Vec<UnitConformation>, GenerationError> {
    let mut cache: Vec<(*const _, UnitConformation)> = Vec::new();
    let mut out = Vec::with_capacity(graph.n_units());
    for (i, topo) in graph.units().iter().enumerate() {
        let key = Arc::as_ptr(topo);
        let tpl = match cache.iter().find(|(k, _)| *k == key) {
            Some((_, t)) => t.clone(),
            None => {
                let t = idealized_template(topo)?;
                cache.push((key, t.clone()));
                t
            }
        };
        out.push(UnitConformation::new(i, tpl.coords));
    }
    Ok(out)
}

/// Full generation: units in MAR order (each step conditioned on the units
/// generated so far), then unit rotations, then assembly.
pub fn generate_conformation(
    graph: &PolymerGraph,
    encoder: &dyn EncoderOracle,
    tden: &dyn TorsionDenoiser,
    rden: &dyn RotationDenoiser,
    config: &GenerationConfig,
) -> Result<GeneratedChain, GenerationError> {
    let n = graph.n_units();
    let sched = make_schedule(config.schedule, config.timesteps)?;
    let templates = match &config.templates {
        Some(t) if t.len() != n => {
            return Err(GenerationError::DimensionMismatch {
                expected: n,
                found: t.len(),
            })
        }
        Some(t) => t.clone(),
        None => unit_templates(graph)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let order = mar_schedule(n, config.k_steps.unwrap_or(n), &mut rng)?;

    let mut generated: Vec<Option<UnitConformation>> = vec![None; n];
    for subset in order.subsets() {
        let known: Vec<Option<&UnitConformation>> = generated.iter().map(Option::as_ref).collect();
        let x = encoder.embed(graph, &known)?;
        let masked: Vec<usize> = (0..n).filter(|&i| generated[i].is_none()).collect();
        let z = encoder.contextualize(&mask_rows(&x, &masked)?)?;
        for &i in subset {
            let unit = torsion_reverse_sample(
                &templates[i],
                graph.unit(i),
                i,
                tden,
                &z.row(i),
                &sched,
                config.torsion_sigma_max,
                &mut rng,
            )?;
            generated[i] = Some(unit);
        }
    }
    let std_units: Vec<UnitConformation> = generated.into_iter().map(|u| u.expect("every unit generated")).collect();

    let known: Vec<Option<&UnitConformation>> = std_units.iter().map(Some).collect();
    let context = encoder.contextualize(&encoder.embed(graph, &known)?)?;
    let rotations = so3_reverse_sample(rden, &context, &std_units, graph, &sched, &mut rng)?;
    let conformation = assemble(&AssemblyInput {
        std_units: std_units.clone(),
        rotations: rotations.clone(),
        graph,
    })?;
    let global_embedding = mean_pool(&context)?;
    Ok(GeneratedChain {
        conformation,
        std_units,
        rotations,
        order,
        context,
        global_embedding,
    })
}
