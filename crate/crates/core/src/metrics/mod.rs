//! Evaluation of generated conformer sets against reference sets:
//! structure matching (S-MAT), energy matching (E-MAT) and coverage (S-COV).

mod energy;
mod matching;
mod report;

pub use energy::{
    toy_energy, EnergyOracle, ToyEnergy, ToyForceField, K_ANGLE, K_BOND, LJ_EPSILON, LJ_SIGMA,
    NONBONDED_MIN_SEPARATION,
};
pub use matching::{
    coverage_costs, e_mat, energy_costs, match_costs, member_energies, rmsd_matrix, s_cov, s_mat,
    ConformationSet, MatchOptions, MatchResult, SetRole, DEFAULT_COVERAGE_DELTA,
};
pub use report::{
    evaluate_corpus, evaluate_polymer, mean, median, Aggregation, CorpusSummary, EvalOptions, MetricReport,
    PolymerMetrics, PolymerPair, Summary,
};

use crate::geometry::GeometryError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("the {0:?} conformation set is empty")]
    EmptySet(SetRole),
    #[error("generated and reference sets belong to different polymers")]
    GraphMismatch,
    #[error("expected {expected} atoms, found {found}")]
    AtomCountMismatch { expected: usize, found: usize },
    #[error("coverage threshold must be positive, got {0}")]
    InvalidDelta(f64),
    #[error("energy oracle failed: {0}")]
    OracleFailure(String),
    #[error("nothing to evaluate")]
    EmptyCorpus,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
