//! Polymer spec files (TOML).
//!
//! ```toml
//! name = "polyethylene"
//! n_units = 10
//!
//! [unit]
//! atoms = [
//!     { index = 0, element = "C" },
//!     { index = 1, element = "C" },
//!     { index = 2, element = "C" },
//!     { index = 3, element = "C" },
//! ]
//! bonds = [
//!     { a = 0, b = 1 },
//!     { a = 1, b = 2, order = 1 },
//!     { a = 2, b = 3 },
//! ]
//! key_atoms = { atom-1 = 0, atom-2 = 1, atom-3 = 2, atom-4 = 3 }
//! ```
//!
//! Optional `[head]` and `[tail]` tables, shaped like `[unit]`, replace the
//! first and last unit.

use super::{line_of, IoError};
use crate::polymer::{Bond, KeyAtoms, KeyRole, PolymerGraph, UnitTopology};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;
use toml::Spanned;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: Option<String>,
    n_units: Spanned<i64>,
    unit: Spanned<RawUnit>,
    head: Option<Spanned<RawUnit>>,
    tail: Option<Spanned<RawUnit>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUnit {
    atoms: Vec<Spanned<RawAtom>>,
    #[serde(default)]
    bonds: Vec<Spanned<RawBond>>,
    key_atoms: Spanned<RawKeys>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    index: i64,
    element: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBond {
    a: i64,
    b: i64,
    order: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKeys {
    #[serde(rename = "atom-1")]
    atom1: Option<i64>,
    #[serde(rename = "atom-2")]
    atom2: Option<i64>,
    #[serde(rename = "atom-3")]
    atom3: Option<i64>,
    #[serde(rename = "atom-4")]
    atom4: Option<i64>,
}

#[derive(Serialize)]
struct OutSpec<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<&'a str>,
    n_units: usize,
    unit: OutUnit,
    #[serde(skip_serializing_if = "Option::is_none")]
    head: Option<OutUnit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail: Option<OutUnit>,
}

#[derive(Serialize)]
struct OutUnit {
    atoms: Vec<OutAtom>,
    bonds: Vec<OutBond>,
    key_atoms: OutKeys,
}

#[derive(Serialize)]
struct OutAtom {
    index: usize,
    element: String,
}

#[derive(Serialize)]
struct OutBond {
    a: usize,
    b: usize,
    order: u8,
}

#[derive(Serialize)]
struct OutKeys {
    #[serde(rename = "atom-1")]
    atom1: usize,
    #[serde(rename = "atom-2")]
    atom2: usize,
    #[serde(rename = "atom-3")]
    atom3: usize,
    #[serde(rename = "atom-4")]
    atom4: usize,
}

/// Parsed spec: one body unit, optional terminal units and the chain length.
#[derive(Debug, Clone, PartialEq)]
pub struct PolymerSpec {
    pub name: Option<String>,
    pub n_units: usize,
    pub unit: UnitTopology,
    pub head: Option<UnitTopology>,
    pub tail: Option<UnitTopology>,
}

impl PolymerSpec {
    pub fn build_graph(&self) -> Result<PolymerGraph, IoError> {
        PolymerGraph::with_termini(self.head.clone(), self.unit.clone(), self.tail.clone(), self.n_units)
            .map_err(|e| IoError::InvalidSpec {
                origin: String::new(),
                line: None,
                field: "n_units".into(),
                message: e.to_string(),
            })
    }

    /// Recovers head/body/tail from a graph whose interior units share one
    /// topology.
    pub fn from_graph(graph: &PolymerGraph, name: Option<String>) -> Result<Self, IoError> {
        let units = graph.units();
        let n = units.len();
        let body: &Arc<UnitTopology> = if n >= 3 { &units[1] } else { &units[0] };
        if units[1..n - 1].iter().any(|u| u != body) {
            return Err(IoError::InvalidSpec {
                origin: String::new(),
                line: None,
                field: "unit".into(),
                message: "interior units differ; the spec format holds one body unit".into(),
            });
        }
        let head = (units[0] != *body).then(|| (*units[0]).clone());
        let tail = (units[n - 1] != *body).then(|| (*units[n - 1]).clone());
        Ok(PolymerSpec {
            name,
            n_units: n,
            unit: (**body).clone(),
            head,
            tail,
        })
    }
}

struct Ctx<'a> {
    origin: &'a str,
    text: &'a str,
}

impl Ctx<'_> {
    fn invalid(&self, span: std::ops::Range<usize>, field: impl Into<String>, message: impl Into<String>) -> IoError {
        IoError::InvalidSpec {
            origin: self.origin.to_string(),
            line: Some(line_of(self.text, span.start)),
            field: field.into(),
            message: message.into(),
        }
    }

    fn index(&self, v: i64, span: std::ops::Range<usize>, field: &str) -> Result<usize, IoError> {
        usize::try_from(v).map_err(|_| self.invalid(span, field, format!("index {v} is negative")))
    }

    fn unit(&self, raw: &Spanned<RawUnit>, table: &str) -> Result<UnitTopology, IoError> {
        let unit = raw.get_ref();
        let n = unit.atoms.len();
        let mut elements: Vec<Option<String>> = vec![None; n];
        for (i, atom) in unit.atoms.iter().enumerate() {
            let field = format!("{table}.atoms[{i}]");
            let idx = self.index(atom.get_ref().index, atom.span(), &field)?;
            if idx >= n {
                return Err(self.invalid(
                    atom.span(),
                    field,
                    format!("atom index {idx} is outside 0..{n}; indices must be contiguous"),
                ));
            }
            if elements[idx].is_some() {
                return Err(self.invalid(atom.span(), field, format!("atom index {idx} is listed twice")));
            }
            elements[idx] = Some(atom.get_ref().element.clone());
        }
        let elements: Vec<String> = elements.into_iter().map(|e| e.expect("all indices present")).collect();
        let mut bonds = Vec::with_capacity(unit.bonds.len());
        for (i, bond) in unit.bonds.iter().enumerate() {
            let field = format!("{table}.bonds[{i}]");
            let b = bond.get_ref();
            let order = b.order.unwrap_or(1);
            if !(1..=3).contains(&order) {
                return Err(self.invalid(bond.span(), field, format!("bond order {order} is not 1, 2 or 3")));
            }
            let (x, y) = (self.index(b.a, bond.span(), &field)?, self.index(b.b, bond.span(), &field)?);
            if x >= n || y >= n {
                return Err(self.invalid(bond.span(), field, format!("bond {x}-{y} refers to an atom outside 0..{n}")));
            }
            if x == y {
                return Err(self.invalid(bond.span(), field, format!("atom {x} is bonded to itself")));
            }
            bonds.push(Bond::new(x, y, order as u8));
        }
        let keys = unit.key_atoms.get_ref();
        let kspan = unit.key_atoms.span();
        let field = format!("{table}.key_atoms");
        let mut resolved = [0usize; 4];
        for (slot, (role, value)) in resolved.iter_mut().zip([
            (KeyRole::Atom1, keys.atom1),
            (KeyRole::Atom2, keys.atom2),
            (KeyRole::Atom3, keys.atom3),
            (KeyRole::Atom4, keys.atom4),
        ]) {
            let v = value.ok_or_else(|| self.invalid(kspan.clone(), &field, format!("missing key-atom role {role}")))?;
            *slot = self.index(v, kspan.clone(), &field)?;
        }
        let key_atoms = KeyAtoms {
            atom1: resolved[0],
            atom2: resolved[1],
            atom3: resolved[2],
            atom4: resolved[3],
        };
        UnitTopology::new(elements, bonds, key_atoms).map_err(|e| self.invalid(raw.span(), table, e.to_string()))
    }
}

/// Parses spec text; `origin` names the source in diagnostics.
pub fn parse_polymer_spec_str(text: &str, origin: &str) -> Result<PolymerSpec, IoError> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| IoError::Parse {
        origin: origin.to_string(),
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    let ctx = Ctx { origin, text };
    let n_units = *raw.n_units.get_ref();
    if n_units < 2 {
        return Err(ctx.invalid(raw.n_units.span(), "n_units", format!("a chain needs at least 2 units, got {n_units}")));
    }
    let spec = PolymerSpec {
        name: raw.name,
        n_units: n_units as usize,
        unit: ctx.unit(&raw.unit, "unit")?,
        head: raw.head.as_ref().map(|h| ctx.unit(h, "head")).transpose()?,
        tail: raw.tail.as_ref().map(|t| ctx.unit(t, "tail")).transpose()?,
    };
    // Junction compatibility between neighbouring unit kinds.
    spec.build_graph().map_err(|e| match e {
        IoError::InvalidSpec { field, message, .. } => ctx.invalid(raw.unit.span(), field, message),
        other => other,
    })?;
    Ok(spec)
}

/// Reads and validates a spec file into a chain graph.
pub fn parse_polymer_spec(path: &Path) -> Result<PolymerGraph, IoError> {
    read_polymer_spec(path)?.build_graph()
}

/// Reads a spec file without building the graph.
pub fn read_polymer_spec(path: &Path) -> Result<PolymerSpec, IoError> {
    let text = super::read_text(path)?;
    parse_polymer_spec_str(&text, &path.display().to_string())
}

fn out_unit(u: &UnitTopology) -> OutUnit {
    let k = u.key_atoms();
    OutUnit {
        atoms: u
            .elements()
            .iter()
            .enumerate()
            .map(|(index, e)| OutAtom {
                index,
                element: e.clone(),
            })
            .collect(),
        bonds: u
            .bonds()
            .iter()
            .map(|b| OutBond {
                a: b.a,
                b: b.b,
                order: b.order,
            })
            .collect(),
        key_atoms: OutKeys {
            atom1: k.atom1,
            atom2: k.atom2,
            atom3: k.atom3,
            atom4: k.atom4,
        },
    }
}

pub fn serialize_polymer_spec(spec: &PolymerSpec) -> String {
    let out = OutSpec {
        name: spec.name.as_deref(),
        n_units: spec.n_units,
        unit: out_unit(&spec.unit),
        head: spec.head.as_ref().map(out_unit),
        tail: spec.tail.as_ref().map(out_unit),
    };
    toml::to_string(&out).expect("spec serializes")
}

fn canonical_unit(out: &mut String, u: &UnitTopology) {
    let k = u.key_atoms();
    let _ = writeln!(out, "atoms {}", u.elements().join(" "));
    let mut bonds: Vec<(usize, usize, u8)> = u.bonds().iter().map(|b| (b.key().0, b.key().1, b.order)).collect();
    bonds.sort_unstable();
    for (a, b, o) in bonds {
        let _ = writeln!(out, "bond {a} {b} {o}");
    }
    let _ = writeln!(out, "keys {} {} {} {}", k.atom1, k.atom2, k.atom3, k.atom4);
}

/// First 16 hex digits of SHA-256 over a canonical text form of the graph
/// (unit topologies in chain order). Formatting of the spec file does not
/// affect it.
pub fn spec_hash(graph: &PolymerGraph) -> String {
    let mut text = String::from("polyframe-graph-v1\n");
    let _ = writeln!(text, "units {}", graph.n_units());
    for u in graph.units() {
        text.push_str("unit\n");
        canonical_unit(&mut text, u);
    }
    let digest = Sha256::digest(text.as_bytes());
    hex::encode(&digest[..8])
}
