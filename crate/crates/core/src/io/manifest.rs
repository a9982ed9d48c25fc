//! Evaluation manifests (TOML): one entry per polymer.
//!
//! ```toml
//! [[polymer]]
//! name = "pe-10"
//! spec = "pe.toml"
//! generated = "pe-generated.conf"
//! reference = "pe-reference.conf"
//! ```
//!
//! Relative paths resolve against the manifest's directory. `name` defaults
//! to the file stem of `spec`.

use super::{line_of, read_text, IoError};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub name: String,
    pub spec: PathBuf,
    pub generated: PathBuf,
    pub reference: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationManifest {
    pub entries: Vec<ManifestEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    #[serde(default)]
    polymer: Vec<toml::Spanned<RawEntry>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    name: Option<String>,
    spec: PathBuf,
    generated: PathBuf,
    reference: PathBuf,
}

pub fn parse_manifest_str(text: &str, origin: &str, base_dir: &Path) -> Result<EvaluationManifest, IoError> {
    let raw: RawManifest = toml::from_str(text).map_err(|e| IoError::Parse {
        origin: origin.to_string(),
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    if raw.polymer.is_empty() {
        return Err(IoError::InvalidSpec {
            origin: origin.to_string(),
            line: None,
            field: "polymer".into(),
            message: "the manifest lists no polymers".into(),
        });
    }
    let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base_dir.join(p) };
    let mut entries: Vec<ManifestEntry> = Vec::with_capacity(raw.polymer.len());
    for (i, e) in raw.polymer.iter().enumerate() {
        let span = e.span();
        let e = e.get_ref();
        let name = e.name.clone().unwrap_or_else(|| {
            e.spec
                .file_stem()
                .map_or_else(|| format!("polymer-{}", i + 1), |s| s.to_string_lossy().into_owned())
        });
        if entries.iter().any(|x| x.name == name) {
            return Err(IoError::InvalidSpec {
                origin: origin.to_string(),
                line: Some(line_of(text, span.start)),
                field: format!("polymer[{i}].name"),
                message: format!("duplicate polymer name {name}"),
            });
        }
        entries.push(ManifestEntry {
            name,
            spec: resolve(&e.spec),
            generated: resolve(&e.generated),
            reference: resolve(&e.reference),
        });
    }
    Ok(EvaluationManifest { entries })
}

pub fn read_manifest(path: &Path) -> Result<EvaluationManifest, IoError> {
    let text = read_text(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_manifest_str(&text, &path.display().to_string(), base)
}
