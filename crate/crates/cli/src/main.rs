mod commands;
mod failure;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "polyframe", version, about = "Frame-based polymer conformation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split a chain conformation into standardized units and frames
    Decompose(DecomposeArgs),
    /// Rebuild a chain from a decomposition file (rotations only)
    Assemble(AssembleArgs),
    /// Decompose and reassemble every conformation, printing the residual
    Roundtrip(RoundtripArgs),
    /// Generate conformations with the MAR / diffusion pipeline
    Sample(SampleArgs),
    /// Compute S-MAT, E-MAT and optionally S-COV
    Evaluate(EvaluateArgs),
    /// Print a noise schedule
    Schedule(ScheduleArgs),
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// One-based index of the conformation to decompose
    #[arg(long, default_value_t = 1)]
    index: usize,
}

#[derive(Args, Debug)]
struct AssembleArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Repeat the unit sequence twice before assembling
    #[arg(long)]
    double: bool,
    /// Where to write the spec of the doubled chain
    #[arg(long, requires = "double")]
    out_spec: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RoundtripArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct ScheduleOpts {
    #[arg(long, default_value_t = 1000)]
    timesteps: usize,
    #[arg(long, default_value = "cosine", value_parser = ["cosine", "linear"])]
    schedule: String,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    schedule: ScheduleOpts,
    /// MAR steps (default: one unit per step)
    #[arg(long)]
    k_steps: Option<usize>,
    #[arg(long, default_value_t = 1)]
    n_samples: usize,
    /// Torsion noise scale at full noise
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    sigma_max: f64,
    /// toy | external:<command>
    #[arg(long, default_value = "toy")]
    torsion_denoiser: String,
    /// toy | external:<command>
    #[arg(long, default_value = "toy")]
    rotation_denoiser: String,
    #[arg(long, default_value_t = 0)]
    encoder_seed: u64,
    /// Worker threads for independent chains
    #[arg(long)]
    parallel: Option<usize>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// Manifest listing polymers (alternative to --spec/--in/--ref)
    #[arg(long, conflicts_with_all = ["spec", "input", "reference"])]
    manifest: Option<PathBuf>,
    #[arg(long, requires_all = ["input", "reference"])]
    spec: Option<PathBuf>,
    /// Generated conformations
    #[arg(long = "in", requires = "spec")]
    input: Option<PathBuf>,
    /// Reference conformations
    #[arg(long = "ref", requires = "spec")]
    reference: Option<PathBuf>,
    /// toy | external:<command>
    #[arg(long, default_value = "toy")]
    energy: String,
    /// Coverage threshold in Å
    #[arg(long, default_value_t = 25.0)]
    delta: f64,
    /// Include S-COV in the report
    #[arg(long)]
    coverage: bool,
    /// Align and score heavy atoms only
    #[arg(long)]
    heavy_atoms: bool,
    /// Aggregate mean/median over conformations instead of polymers
    #[arg(long)]
    per_conformation: bool,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Worker threads over polymers
    #[arg(long)]
    parallel: Option<usize>,
    /// Recorded in the report
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct ScheduleArgs {
    #[command(flatten)]
    schedule: ScheduleOpts,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    sigma_max: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Decompose(a) => commands::decompose(a),
        Command::Assemble(a) => commands::assemble(a),
        Command::Roundtrip(a) => commands::roundtrip(a),
        Command::Sample(a) => commands::sample(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Schedule(a) => commands::schedule(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
