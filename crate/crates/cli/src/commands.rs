use crate::failure::Failure;
use crate::{AssembleArgs, DecomposeArgs, EvaluateArgs, RoundtripArgs, SampleArgs, ScheduleArgs, ScheduleOpts};
use polyframe::assembly::{assemble as assemble_chain, roundtrip_residual, AssemblyInput};
use polyframe::generative::{
    generate_conformation, make_schedule, unit_templates, DiffusionSchedule, EncoderOracle, GenerationConfig,
    RotationDenoiser, ScheduleKind, ToyEncoder, ToyRotationDenoiser, ToyTorsionDenoiser, TorsionDenoiser,
};
use polyframe::io::{
    decomposition_from_json, decomposition_to_json, format_coordinate, read_conformations, read_manifest,
    read_polymer_spec, report_to_json, serialize_polymer_spec, write_atomic, write_conformations,
    DecompositionFile, ExternalDenoiser, ExternalEnergy, PolymerSpec, ReportFile,
};
use polyframe::metrics::{
    evaluate_polymer, Aggregation, ConformationSet, EnergyOracle, EvalOptions, MetricReport, PolymerPair,
    SetRole, ToyEnergy,
};
use polyframe::polymer::{decompose as decompose_chain, PolymerGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

type Result<T> = std::result::Result<T, Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

fn load_graph(path: &Path) -> Result<(PolymerSpec, PolymerGraph)> {
    let spec = read_polymer_spec(path)?;
    let graph = spec.build_graph()?;
    Ok((spec, graph))
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(invalid("--parallel must be at least 1"));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Failure::Internal(e.to_string()))
}

pub fn decompose(a: DecomposeArgs) -> Result<()> {
    let (_, graph) = load_graph(&a.spec)?;
    let confs = read_conformations(&a.input, &graph)?;
    if a.index == 0 || a.index > confs.len() {
        return Err(invalid(format!(
            "--index {} is outside 1..={} for {}",
            a.index,
            confs.len(),
            a.input.display()
        )));
    }
    let result = decompose_chain(&confs[a.index - 1], &graph)?;
    let file = DecompositionFile::from_result(&graph, &result);
    write_atomic(&a.out, decomposition_to_json(&file).as_bytes())?;
    Ok(())
}

pub fn assemble(a: AssembleArgs) -> Result<()> {
    let (spec, graph) = load_graph(&a.spec)?;
    let text = std::fs::read_to_string(&a.input).map_err(|e| invalid(format!("{}: {e}", a.input.display())))?;
    let origin = a.input.display().to_string();
    let result = decomposition_from_json(&text, &origin)?.to_result(&graph, &origin)?;
    let input = AssemblyInput {
        std_units: result.units,
        rotations: result.frames.iter().map(|f| f.rotation).collect(),
        graph: &graph,
    };
    if a.double {
        let doubled = graph.repeated(2)?;
        let conf = assemble_chain(&input.repeated_onto(&doubled)?)?;
        write_conformations(&a.out, &doubled, &[conf])?;
        if let Some(path) = &a.out_spec {
            let out = PolymerSpec::from_graph(&doubled, spec.name.clone())?;
            write_atomic(path, serialize_polymer_spec(&out).as_bytes())?;
        }
    } else {
        let conf = assemble_chain(&input)?;
        write_conformations(&a.out, &graph, &[conf])?;
    }
    Ok(())
}

pub fn roundtrip(a: RoundtripArgs) -> Result<()> {
    let (_, graph) = load_graph(&a.spec)?;
    let confs = read_conformations(&a.input, &graph)?;
    let mut worst: f64 = 0.0;
    for (i, conf) in confs.iter().enumerate() {
        let r = roundtrip_residual(conf, &graph)?;
        worst = worst.max(r);
        println!("conformation {}: residual {} Å", i + 1, format_coordinate(r));
    }
    println!("max residual {} Å over {} conformations", format_coordinate(worst), confs.len());
    Ok(())
}

fn schedule_kind(opts: &ScheduleOpts) -> Result<ScheduleKind> {
    Ok(opts.schedule.parse::<ScheduleKind>()?)
}

fn torsion_denoiser(choice: &str) -> Result<Box<dyn TorsionDenoiser>> {
    match choice {
        "toy" => Ok(Box::new(ToyTorsionDenoiser)),
        other => match other.strip_prefix("external:") {
            Some(cmd) if !cmd.trim().is_empty() => Ok(Box::new(ExternalDenoiser::spawn(cmd)?)),
            _ => Err(invalid(format!("unknown denoiser '{other}' (expected toy or external:<command>)"))),
        },
    }
}

fn rotation_denoiser(choice: &str) -> Result<Box<dyn RotationDenoiser>> {
    match choice {
        "toy" => Ok(Box::new(ToyRotationDenoiser)),
        other => match other.strip_prefix("external:") {
            Some(cmd) if !cmd.trim().is_empty() => Ok(Box::new(ExternalDenoiser::spawn(cmd)?)),
            _ => Err(invalid(format!("unknown denoiser '{other}' (expected toy or external:<command>)"))),
        },
    }
}

pub fn sample(a: SampleArgs) -> Result<()> {
    let (_, graph) = load_graph(&a.spec)?;
    if a.n_samples == 0 {
        return Err(invalid("--n-samples must be at least 1"));
    }
    if !(a.sigma_max.is_finite() && a.sigma_max > 0.0) {
        return Err(invalid("--sigma-max must be a positive real"));
    }
    let kind = schedule_kind(&a.schedule)?;
    make_schedule(kind, a.schedule.timesteps)?;
    let encoder = ToyEncoder::new(a.encoder_seed);
    let tden = torsion_denoiser(&a.torsion_denoiser)?;
    let rden = rotation_denoiser(&a.rotation_denoiser)?;
    let templates = unit_templates(&graph)?;
    let mut master = ChaCha8Rng::seed_from_u64(a.seed);
    let seeds: Vec<u64> = (0..a.n_samples).map(|_| master.random()).collect();
    let config = |seed: u64| GenerationConfig {
        timesteps: a.schedule.timesteps,
        schedule: kind,
        k_steps: a.k_steps,
        seed,
        torsion_sigma_max: a.sigma_max,
        templates: Some(templates.clone()),
    };
    let run = |seed: &u64| {
        generate_conformation(&graph, &encoder as &dyn EncoderOracle, tden.as_ref(), rden.as_ref(), &config(*seed))
            .map(|g| g.conformation)
    };
    let confs = pool(a.parallel)?.install(|| seeds.par_iter().map(run).collect::<std::result::Result<Vec<_>, _>>())?;
    write_conformations(&a.out, &graph, &confs)?;
    Ok(())
}

fn energy_oracle(choice: &str) -> Result<Box<dyn EnergyOracle>> {
    match choice {
        "toy" => Ok(Box::new(ToyEnergy)),
        other => match other.strip_prefix("external:") {
            Some(cmd) if !cmd.trim().is_empty() => Ok(Box::new(ExternalEnergy::new(cmd))),
            _ => Err(invalid(format!("unknown energy '{other}' (expected toy or external:<command>)"))),
        },
    }
}

fn load_pair(name: String, spec: &Path, generated: &Path, reference: &Path) -> Result<PolymerPair> {
    let (_, graph) = load_graph(spec)?;
    let graph = Arc::new(graph);
    let gen = read_conformations(generated, &graph)?;
    let refs = read_conformations(reference, &graph)?;
    let set = |members, role, path: &Path| {
        ConformationSet::new(Arc::clone(&graph), members, role).map_err(|e| invalid(format!("{}: {e}", path.display())))
    };
    Ok(PolymerPair {
        name,
        generated: set(gen, SetRole::Generated, generated)?,
        reference: set(refs, SetRole::Reference, reference)?,
    })
}

pub fn evaluate(a: EvaluateArgs) -> Result<()> {
    if a.delta.is_nan() || a.delta <= 0.0 {
        return Err(invalid(format!("--delta must be positive, got {}", a.delta)));
    }
    let pairs: Vec<PolymerPair> = match (&a.manifest, &a.spec, &a.input, &a.reference) {
        (Some(m), ..) => read_manifest(m)?
            .entries
            .into_iter()
            .map(|e| load_pair(e.name, &e.spec, &e.generated, &e.reference))
            .collect::<Result<_>>()?,
        (None, Some(s), Some(g), Some(r)) => {
            let name = s.file_stem().map_or("polymer".into(), |x| x.to_string_lossy().into_owned());
            vec![load_pair(name, s, g, r)?]
        }
        _ => return Err(invalid("evaluate needs --manifest or all of --spec, --in and --ref")),
    };
    let oracle = energy_oracle(&a.energy)?;
    let options = EvalOptions {
        delta: a.delta,
        coverage: a.coverage,
        heavy_atoms_only: a.heavy_atoms,
        aggregation: if a.per_conformation {
            Aggregation::PerConformation
        } else {
            Aggregation::PerPolymer
        },
    };
    let oracle_ref = oracle.as_ref();
    let polymers = pool(a.parallel)?.install(|| {
        pairs
            .par_iter()
            .map(|p| evaluate_polymer(p, oracle_ref, &options))
            .collect::<std::result::Result<Vec<_>, _>>()
    })?;
    let report = MetricReport::from_polymers(polymers, options, oracle.id())?;
    let file = ReportFile::from_report(&report, a.seed);
    print!("{}", summary_table(&file));
    if let Some(path) = &a.report {
        write_atomic(path, report_to_json(&file).as_bytes())?;
    }
    Ok(())
}

fn summary_table(file: &ReportFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<8} {:>20} {:>20}", "metric", "mean", "median");
    for (name, s) in &file.summary {
        let _ = writeln!(out, "{name:<8} {:>20} {:>20}", s.mean, s.median);
    }
    let _ = writeln!(out, "polymers: {}  energy: {}", file.polymers.len(), file.run.oracle);
    out
}

fn schedule_table(sched: &DiffusionSchedule, sigma_max: f64) -> String {
    let mut out = String::from("t\talpha_bar\tsigma_rot\tsigma_tor\n");
    for t in 0..=sched.timesteps() {
        let _ = writeln!(
            out,
            "{t}\t{}\t{}\t{}",
            format_coordinate(sched.alpha_bar()[t]),
            format_coordinate(sched.sigma_rot()[t]),
            format_coordinate(sched.torsion_sigma(t, sigma_max))
        );
    }
    out
}

pub fn schedule(a: ScheduleArgs) -> Result<()> {
    if !(a.sigma_max.is_finite() && a.sigma_max > 0.0) {
        return Err(invalid("--sigma-max must be a positive real"));
    }
    let sched = make_schedule(schedule_kind(&a.schedule)?, a.schedule.timesteps)?;
    let table = schedule_table(&sched, a.sigma_max);
    match &a.out {
        Some(path) => write_atomic(path, table.as_bytes())?,
        None => print!("{table}"),
    }
    Ok(())
}
