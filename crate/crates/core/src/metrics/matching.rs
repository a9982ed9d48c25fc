use super::{EnergyOracle, MetricsError};
use crate::geometry::{kabsch_align, Vec3};
use crate::polymer::elements::is_hydrogen;
use crate::polymer::{PolymerConformation, PolymerGraph};
use std::sync::Arc;

/// Default coverage threshold, Å.
pub const DEFAULT_COVERAGE_DELTA: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetRole {
    Generated,
    Reference,
}

/// Conformations of one polymer.
#[derive(Debug, Clone)]
pub struct ConformationSet {
    graph: Arc<PolymerGraph>,
    members: Vec<PolymerConformation>,
    role: SetRole,
}

impl ConformationSet {
    pub fn new(
        graph: Arc<PolymerGraph>,
        members: Vec<PolymerConformation>,
        role: SetRole,
    ) -> Result<Self, MetricsError> {
        if members.is_empty() {
            return Err(MetricsError::EmptySet(role));
        }
        let n = graph.total_atoms();
        if let Some(m) = members.iter().find(|m| m.n_atoms() != n) {
            return Err(MetricsError::AtomCountMismatch {
                expected: n,
                found: m.n_atoms(),
            });
        }
        Ok(ConformationSet { graph, members, role })
    }

    pub fn graph(&self) -> &PolymerGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<PolymerGraph> {
        &self.graph
    }

    pub fn members(&self) -> &[PolymerConformation] {
        &self.members
    }

    pub fn role(&self) -> SetRole {
        self.role
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Atom subset used for RMSD.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatchOptions {
    pub heavy_atoms_only: bool,
}

/// Aggregated matching result with the per-member minima behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub recall: f64,
    pub precision: f64,
    /// Minimum cost of each reference member to the generated set.
    pub recall_terms: Vec<f64>,
    /// Minimum cost of each generated member to the reference set.
    pub precision_terms: Vec<f64>,
}

fn check_pair(gen: &ConformationSet, reference: &ConformationSet) -> Result<(), MetricsError> {
    if !Arc::ptr_eq(&gen.graph, &reference.graph) && *gen.graph != *reference.graph {
        return Err(MetricsError::GraphMismatch);
    }
    Ok(())
}

fn selected(coords: &[Vec3], mask: Option<&[bool]>) -> Vec<Vec3> {
    match mask {
        None => coords.to_vec(),
        Some(m) => coords.iter().zip(m).filter(|(_, keep)| **keep).map(|(c, _)| *c).collect(),
    }
}

/// `cost[r][g]`: aligned RMSD after superposing generated member `g` onto
/// reference member `r`.
pub fn rmsd_matrix(
    gen: &ConformationSet,
    reference: &ConformationSet,
    options: MatchOptions,
) -> Result<Vec<Vec<f64>>, MetricsError> {
    check_pair(gen, reference)?;
    let mask: Option<Vec<bool>> = options
        .heavy_atoms_only
        .then(|| gen.graph.elements().iter().map(|e| !is_hydrogen(e)).collect());
    let g: Vec<Vec<Vec3>> = gen.members.iter().map(|m| selected(&m.coords, mask.as_deref())).collect();
    let r: Vec<Vec<Vec3>> = reference.members.iter().map(|m| selected(&m.coords, mask.as_deref())).collect();
    r.iter()
        .map(|rc| {
            g.iter()
                .map(|gc| Ok(kabsch_align(gc, rc)?.rmsd))
                .collect::<Result<Vec<f64>, MetricsError>>()
        })
        .collect()
}

fn min_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::INFINITY, f64::min)
}

fn mean_of(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Recall/precision matching over a cost matrix indexed `[reference][generated]`.
pub fn match_costs(cost: &[Vec<f64>]) -> MatchResult {
    let n_gen = cost.first().map_or(0, Vec::len);
    let recall_terms: Vec<f64> = cost.iter().map(|row| min_of(row.iter().copied())).collect();
    let precision_terms: Vec<f64> = (0..n_gen).map(|g| min_of(cost.iter().map(|row| row[g]))).collect();
    MatchResult {
        recall: mean_of(&recall_terms),
        precision: mean_of(&precision_terms),
        recall_terms,
        precision_terms,
    }
}

/// Fraction of members whose minimum cost is within `delta`.
pub fn coverage_costs(cost: &[Vec<f64>], delta: f64) -> MatchResult {
    let m = match_costs(cost);
    let hit = |v: &f64| if *v <= delta { 1.0 } else { 0.0 };
    let recall_terms: Vec<f64> = m.recall_terms.iter().map(hit).collect();
    let precision_terms: Vec<f64> = m.precision_terms.iter().map(hit).collect();
    MatchResult {
        recall: mean_of(&recall_terms),
        precision: mean_of(&precision_terms),
        recall_terms,
        precision_terms,
    }
}

/// Structure matching: mean minimum aligned RMSD (recall over the
/// reference set, precision over the generated set).
pub fn s_mat(gen: &ConformationSet, reference: &ConformationSet) -> Result<(f64, f64), MetricsError> {
    let m = match_costs(&rmsd_matrix(gen, reference, MatchOptions::default())?);
    Ok((m.recall, m.precision))
}

/// Per-member energies from `oracle`, rejecting non-finite values.
pub fn member_energies(set: &ConformationSet, oracle: &dyn EnergyOracle) -> Result<Vec<f64>, MetricsError> {
    set.members
        .iter()
        .map(|m| {
            let e = oracle.energy(m, &set.graph)?;
            if e.is_finite() {
                Ok(e)
            } else {
                Err(MetricsError::OracleFailure(format!("{} returned {e}", oracle.id())))
            }
        })
        .collect()
}

/// `cost[r][g] = |E(g) − E(r)|`.
pub fn energy_costs(gen_energies: &[f64], ref_energies: &[f64]) -> Vec<Vec<f64>> {
    ref_energies
        .iter()
        .map(|er| gen_energies.iter().map(|eg| (eg - er).abs()).collect())
        .collect()
}

/// Energy matching with `|E(C) − E(Ĉ)|` as the pairwise cost.
pub fn e_mat(
    gen: &ConformationSet,
    reference: &ConformationSet,
    oracle: &dyn EnergyOracle,
) -> Result<(f64, f64), MetricsError> {
    check_pair(gen, reference)?;
    let eg = member_energies(gen, oracle)?;
    let er = member_energies(reference, oracle)?;
    let m = match_costs(&energy_costs(&eg, &er));
    Ok((m.recall, m.precision))
}

/// Coverage: fraction of members matched within `delta` Å.
pub fn s_cov(gen: &ConformationSet, reference: &ConformationSet, delta: f64) -> Result<(f64, f64), MetricsError> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(MetricsError::InvalidDelta(delta));
    }
    let m = coverage_costs(&rmsd_matrix(gen, reference, MatchOptions::default())?, delta);
    Ok((m.recall, m.precision))
}
