//! Report files (JSON). All reals carry at most 12 significant digits.

use super::IoError;
use crate::metrics::{Aggregation, MetricReport, Summary};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

const FORMAT: &str = "polyframe-report";

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportRun {
    pub seed: Option<u64>,
    pub oracle: String,
    pub delta: f64,
    pub coverage: bool,
    pub heavy_atoms_only: bool,
    pub aggregation: Aggregation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportPolymer {
    pub name: String,
    pub n_generated: usize,
    pub n_reference: usize,
    #[serde(rename = "S-MAT-R")]
    pub s_mat_r: f64,
    #[serde(rename = "S-MAT-P")]
    pub s_mat_p: f64,
    #[serde(rename = "E-MAT-R")]
    pub e_mat_r: f64,
    #[serde(rename = "E-MAT-P")]
    pub e_mat_p: f64,
    #[serde(rename = "S-COV-R", default, skip_serializing_if = "Option::is_none")]
    pub s_cov_r: Option<f64>,
    #[serde(rename = "S-COV-P", default, skip_serializing_if = "Option::is_none")]
    pub s_cov_p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub format: String,
    pub version: u32,
    pub tool: String,
    pub tool_version: String,
    pub run: ReportRun,
    pub polymers: Vec<ReportPolymer>,
    /// Corpus mean and median keyed by metric name.
    pub summary: BTreeMap<String, Summary>,
}

fn rounded(s: Summary) -> Summary {
    Summary {
        mean: round12(s.mean),
        median: round12(s.median),
    }
}

impl ReportFile {
    pub fn from_report(report: &MetricReport, seed: Option<u64>) -> Self {
        let polymers = report
            .polymers
            .iter()
            .map(|p| ReportPolymer {
                name: p.name.clone(),
                n_generated: p.n_generated,
                n_reference: p.n_reference,
                s_mat_r: round12(p.s_mat.recall),
                s_mat_p: round12(p.s_mat.precision),
                e_mat_r: round12(p.e_mat.recall),
                e_mat_p: round12(p.e_mat.precision),
                s_cov_r: p.s_cov.as_ref().map(|c| round12(c.recall)),
                s_cov_p: p.s_cov.as_ref().map(|c| round12(c.precision)),
            })
            .collect();
        let s = &report.summary;
        let mut summary = BTreeMap::new();
        summary.insert("S-MAT-R".to_string(), rounded(s.s_mat_r));
        summary.insert("S-MAT-P".to_string(), rounded(s.s_mat_p));
        summary.insert("E-MAT-R".to_string(), rounded(s.e_mat_r));
        summary.insert("E-MAT-P".to_string(), rounded(s.e_mat_p));
        if let (Some(r), Some(p)) = (s.s_cov_r, s.s_cov_p) {
            summary.insert("S-COV-R".to_string(), rounded(r));
            summary.insert("S-COV-P".to_string(), rounded(p));
        }
        ReportFile {
            format: FORMAT.to_string(),
            version: 1,
            tool: "polyframe".to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            run: ReportRun {
                seed,
                oracle: report.oracle_id.clone(),
                delta: round12(report.options.delta),
                coverage: report.options.coverage,
                heavy_atoms_only: report.options.heavy_atoms_only,
                aggregation: report.options.aggregation,
            },
            polymers,
            summary,
        }
    }
}

pub fn report_to_json(report: &ReportFile) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn report_from_json(text: &str, origin: &str) -> Result<ReportFile, IoError> {
    let file: ReportFile = serde_json::from_str(text).map_err(|e| IoError::Parse {
        origin: origin.to_string(),
        line: Some(e.line()),
        message: e.to_string(),
    })?;
    if file.format != FORMAT {
        return Err(IoError::InvalidSpec {
            origin: origin.to_string(),
            line: None,
            field: "format".into(),
            message: format!("expected {FORMAT}, found {}", file.format),
        });
    }
    Ok(file)
}
