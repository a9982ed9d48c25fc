//! Samplers for unit torsions and unit orientations, the masked
//! autoregressive (MAR) generation order, and the end-to-end pipeline.
//!
//! Every learned component sits behind a trait ([`EncoderOracle`],
//! [`TorsionDenoiser`], [`RotationDenoiser`]). Toy and ground-truth
//! implementations are provided; trained models plug in through the
//! subprocess adapter in [`crate::io`].

mod mar;
mod oracles;
mod pipeline;
mod schedule;
mod so3_diffusion;
mod torsion_diffusion;

pub use mar::{mar_schedule, mask_rows, mean_pool, EmbeddingMatrix, MarSchedule};
pub use oracles::{
    EncoderOracle, OracleRotationDenoiser, OracleTorsionDenoiser, RotationDenoiser, RotationQuery,
    ToyEncoder, ToyRotationDenoiser, ToyTorsionDenoiser, TorsionDenoiser, TorsionQuery, TOY_EMBEDDING_DIM,
};
pub use pipeline::{generate_conformation, unit_templates, GeneratedChain, GenerationConfig};
pub use schedule::{make_schedule, DiffusionSchedule, ScheduleKind, SIGMA_ROT_MAX, SIGMA_ROT_MIN};
pub use so3_diffusion::{so3_forward, so3_reverse_sample};
pub use torsion_diffusion::{torsion_forward, torsion_reverse_sample, DEFAULT_TORSION_SIGMA_MAX};

use crate::assembly::AssemblyError;
use crate::geometry::GeometryError;
use crate::polymer::PolymerError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerationError {
    #[error("timestep count must be at least 1, got {0}")]
    InvalidTimesteps(usize),
    #[error("timestep {t} is outside 0..={max}")]
    TimestepOutOfRange { t: usize, max: usize },
    #[error("unknown schedule kind '{0}' (expected cosine or linear)")]
    InvalidSchedule(String),
    #[error("K must satisfy 1 <= K <= {n_units}, got {k}")]
    InvalidK { k: usize, n_units: usize },
    #[error("not a permutation of the unit indices")]
    InvalidPermutation,
    #[error("row index {index} out of range for {rows} rows")]
    IndexOutOfRange { index: usize, rows: usize },
    #[error("cannot pool an empty matrix")]
    EmptyMatrix,
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value")]
    NonFinite,
    #[error("denoiser output for unit {unit} cannot be projected to a rotation")]
    ProjectionFailure { unit: usize },
    #[error("oracle failure: {0}")]
    Oracle(String),
    #[error(transparent)]
    Polymer(#[from] PolymerError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
