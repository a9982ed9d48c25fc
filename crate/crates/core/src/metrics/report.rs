use super::matching::{coverage_costs, energy_costs, match_costs, member_energies, rmsd_matrix};
use super::{ConformationSet, EnergyOracle, MatchOptions, MatchResult, MetricsError, DEFAULT_COVERAGE_DELTA};
use serde::{Deserialize, Serialize};

/// What the corpus mean and median run over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    /// One value per polymer.
    #[default]
    PerPolymer,
    /// One value per matched conformation, pooled over polymers.
    PerConformation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub delta: f64,
    pub coverage: bool,
    pub heavy_atoms_only: bool,
    pub aggregation: Aggregation,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            delta: DEFAULT_COVERAGE_DELTA,
            coverage: false,
            heavy_atoms_only: false,
            aggregation: Aggregation::PerPolymer,
        }
    }
}

/// Generated and reference sets of one named polymer.
#[derive(Debug, Clone)]
pub struct PolymerPair {
    pub name: String,
    pub generated: ConformationSet,
    pub reference: ConformationSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolymerMetrics {
    pub name: String,
    pub n_generated: usize,
    pub n_reference: usize,
    pub s_mat: MatchResult,
    pub e_mat: MatchResult,
    pub s_cov: Option<MatchResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
}

impl Summary {
    fn of(values: &[f64]) -> Summary {
        Summary {
            mean: mean(values),
            median: median(values),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub s_mat_r: Summary,
    pub s_mat_p: Summary,
    pub e_mat_r: Summary,
    pub e_mat_p: Summary,
    pub s_cov_r: Option<Summary>,
    pub s_cov_p: Option<Summary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub polymers: Vec<PolymerMetrics>,
    pub summary: CorpusSummary,
    pub options: EvalOptions,
    pub oracle_id: String,
}

/// Arithmetic mean; NaN for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Median; for an even count the average of the two middle values.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// All matching metrics of one polymer.
pub fn evaluate_polymer(
    pair: &PolymerPair,
    oracle: &dyn EnergyOracle,
    options: &EvalOptions,
) -> Result<PolymerMetrics, MetricsError> {
    if options.coverage && (options.delta.is_nan() || options.delta <= 0.0) {
        return Err(MetricsError::InvalidDelta(options.delta));
    }
    let rmsd = rmsd_matrix(
        &pair.generated,
        &pair.reference,
        MatchOptions {
            heavy_atoms_only: options.heavy_atoms_only,
        },
    )?;
    let eg = member_energies(&pair.generated, oracle)?;
    let er = member_energies(&pair.reference, oracle)?;
    Ok(PolymerMetrics {
        name: pair.name.clone(),
        n_generated: pair.generated.len(),
        n_reference: pair.reference.len(),
        s_mat: match_costs(&rmsd),
        e_mat: match_costs(&energy_costs(&eg, &er)),
        s_cov: options.coverage.then(|| coverage_costs(&rmsd, options.delta)),
    })
}

fn pick_s(p: &PolymerMetrics) -> Option<&MatchResult> {
    Some(&p.s_mat)
}

fn pick_e(p: &PolymerMetrics) -> Option<&MatchResult> {
    Some(&p.e_mat)
}

fn pick_c(p: &PolymerMetrics) -> Option<&MatchResult> {
    p.s_cov.as_ref()
}

fn summarize(
    polymers: &[PolymerMetrics],
    aggregation: Aggregation,
    pick: fn(&PolymerMetrics) -> Option<&MatchResult>,
    recall: bool,
) -> Option<Summary> {
    let mut values = Vec::new();
    for p in polymers {
        let m = pick(p)?;
        match (aggregation, recall) {
            (Aggregation::PerPolymer, true) => values.push(m.recall),
            (Aggregation::PerPolymer, false) => values.push(m.precision),
            (Aggregation::PerConformation, true) => values.extend(&m.recall_terms),
            (Aggregation::PerConformation, false) => values.extend(&m.precision_terms),
        }
    }
    Some(Summary::of(&values))
}

impl MetricReport {
    /// Corpus statistics over already evaluated polymers, in the given order.
    pub fn from_polymers(
        polymers: Vec<PolymerMetrics>,
        options: EvalOptions,
        oracle_id: String,
    ) -> Result<MetricReport, MetricsError> {
        if polymers.is_empty() {
            return Err(MetricsError::EmptyCorpus);
        }
        let agg = options.aggregation;
        let summary = CorpusSummary {
            s_mat_r: summarize(&polymers, agg, pick_s, true).expect("always present"),
            s_mat_p: summarize(&polymers, agg, pick_s, false).expect("always present"),
            e_mat_r: summarize(&polymers, agg, pick_e, true).expect("always present"),
            e_mat_p: summarize(&polymers, agg, pick_e, false).expect("always present"),
            s_cov_r: summarize(&polymers, agg, pick_c, true),
            s_cov_p: summarize(&polymers, agg, pick_c, false),
        };
        Ok(MetricReport {
            polymers,
            summary,
            options,
            oracle_id,
        })
    }
}

/// Evaluates every polymer in order and aggregates the corpus.
pub fn evaluate_corpus(
    pairs: &[PolymerPair],
    oracle: &dyn EnergyOracle,
    options: &EvalOptions,
) -> Result<MetricReport, MetricsError> {
    let polymers = pairs
        .iter()
        .map(|p| evaluate_polymer(p, oracle, options))
        .collect::<Result<Vec<_>, _>>()?;
    MetricReport::from_polymers(polymers, *options, oracle.id())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_conventions() {
        assert_eq!(median(&[3.0]), 3.0);
        assert_eq!(median(&[4.0, 2.0]), 3.0);
        assert_eq!(median(&[5.0, 1.0, 3.0]), 3.0);
        assert_eq!(median(&[1.0, 10.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }
}
