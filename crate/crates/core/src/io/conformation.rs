//! Conformation files.
//!
//! ```text
//! polyframe-conformations 1
//! spec_hash 3f2a9c0d1e4b5a67
//! n_units 2
//! n_atoms 8
//! conformation 1
//! 1 0 C 1.00000000000e0 0.00000000000e0 0.00000000000e0
//! ...
//! end
//! ```
//!
//! Each atom record holds the one-based unit index, the local index within
//! that unit, the element and x, y, z in Å with 12 significant digits.
//! Records follow global atom order. Blank lines and lines starting with `#`
//! are ignored.

use super::{read_text, spec_hash, write_atomic, IoError};
use crate::geometry::Vec3;
use crate::polymer::{PolymerConformation, PolymerGraph};
use std::fmt::Write as _;
use std::path::Path;

pub const CONFORMATION_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "polyframe-conformations";

/// Coordinate text with 12 significant digits.
pub fn format_coordinate(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn write_conformations_string(graph: &PolymerGraph, confs: &[PolymerConformation]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {CONFORMATION_FORMAT_VERSION}");
    let _ = writeln!(out, "spec_hash {}", spec_hash(graph));
    let _ = writeln!(out, "n_units {}", graph.n_units());
    let _ = writeln!(out, "n_atoms {}", graph.total_atoms());
    for (k, conf) in confs.iter().enumerate() {
        let _ = writeln!(out, "conformation {}", k + 1);
        for (g, c) in conf.coords.iter().enumerate() {
            let owner = graph.owner(g);
            let _ = writeln!(
                out,
                "{} {} {} {} {} {}",
                owner.unit + 1,
                owner.local,
                graph.elements()[g],
                format_coordinate(c.x),
                format_coordinate(c.y),
                format_coordinate(c.z)
            );
        }
        out.push_str("end\n");
    }
    out
}

pub fn write_conformations(path: &Path, graph: &PolymerGraph, confs: &[PolymerConformation]) -> Result<(), IoError> {
    write_atomic(path, write_conformations_string(graph, confs).as_bytes())
}

pub fn read_conformations(path: &Path, graph: &PolymerGraph) -> Result<Vec<PolymerConformation>, IoError> {
    let text = read_text(path)?;
    read_conformations_str(&text, &path.display().to_string(), graph)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    origin: &'a str,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_record(&mut self) -> Option<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            return Some((i + 1, t));
        }
        None
    }

    fn malformed(&self, line: usize, message: impl Into<String>) -> IoError {
        IoError::MalformedRecord {
            origin: self.origin.to_string(),
            line,
            message: message.into(),
        }
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), IoError> {
        self.next_record()
            .ok_or_else(|| self.malformed(self.last.max(1), format!("unexpected end of file, expected {what}")))
    }

    fn header_value(&mut self, key: &str) -> Result<(usize, &'a str), IoError> {
        let (n, line) = self.expect(key)?;
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(k), Some(v), None) if k == key => Ok((n, v)),
            _ => Err(self.malformed(n, format!("expected `{key} <value>`"))),
        }
    }

    fn header_count(&mut self, key: &str, expected: usize) -> Result<(), IoError> {
        let (n, v) = self.header_value(key)?;
        let value: usize = v.parse().map_err(|_| self.malformed(n, format!("{key} is not a count: {v}")))?;
        if value != expected {
            return Err(self.malformed(n, format!("{key} is {value} but the polymer spec gives {expected}")));
        }
        Ok(())
    }
}

fn parse_coordinate(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses conformation text for `graph`; `origin` names the source in
/// diagnostics.
pub fn read_conformations_str(
    text: &str,
    origin: &str,
    graph: &PolymerGraph,
) -> Result<Vec<PolymerConformation>, IoError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        origin,
        last: 0,
    };
    let (n, version) = lines.header_value(MAGIC)?;
    if version != CONFORMATION_FORMAT_VERSION.to_string() {
        return Err(lines.malformed(n, format!("unsupported format version {version}")));
    }
    let (_, hash) = lines.header_value("spec_hash")?;
    let expected = spec_hash(graph);
    if hash != expected {
        return Err(IoError::HashMismatch {
            origin: origin.to_string(),
            expected,
            found: hash.to_string(),
        });
    }
    lines.header_count("n_units", graph.n_units())?;
    lines.header_count("n_atoms", graph.total_atoms())?;

    let n_atoms = graph.total_atoms();
    let mut out = Vec::new();
    while let Some((n, line)) = lines.next_record() {
        let expected_marker = format!("conformation {}", out.len() + 1);
        if line.split_whitespace().collect::<Vec<_>>().join(" ") != expected_marker {
            return Err(lines.malformed(n, format!("expected `{expected_marker}`")));
        }
        let mut coords = Vec::with_capacity(n_atoms);
        for g in 0..n_atoms {
            let (n, line) = lines.expect("an atom record")?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 6 {
                return Err(lines.malformed(n, format!("atom record needs 6 fields, found {}", fields.len())));
            }
            let owner = graph.owner(g);
            let unit: usize = fields[0]
                .parse()
                .map_err(|_| lines.malformed(n, format!("unit index is not a count: {}", fields[0])))?;
            let local: usize = fields[1]
                .parse()
                .map_err(|_| lines.malformed(n, format!("local index is not a count: {}", fields[1])))?;
            if unit != owner.unit + 1 || local != owner.local {
                return Err(lines.malformed(
                    n,
                    format!(
                        "atom {g} should be unit {} local {}, found unit {unit} local {local}",
                        owner.unit + 1,
                        owner.local
                    ),
                ));
            }
            if fields[2] != graph.elements()[g] {
                return Err(lines.malformed(
                    n,
                    format!("atom {g} should be {}, found {}", graph.elements()[g], fields[2]),
                ));
            }
            let xyz: Option<Vec<f64>> = fields[3..6].iter().map(|s| parse_coordinate(s)).collect();
            let xyz = xyz.ok_or_else(|| lines.malformed(n, "coordinates must be finite reals"))?;
            coords.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
        }
        let (n, line) = lines.expect("`end`")?;
        if line != "end" {
            return Err(lines.malformed(n, "expected `end`"));
        }
        out.push(PolymerConformation::new(graph, coords).map_err(|e| lines.malformed(n, e.to_string()))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_list_round_trips() {
        let graph = PolymerGraph::homopolymer(testing::ethylene_unit(), 2).unwrap();
        let text = write_conformations_string(&graph, &[]);
        assert!(read_conformations_str(&text, "mem", &graph).unwrap().is_empty());
    }

    #[test]
    fn one_conformation_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let graph = PolymerGraph::homopolymer(testing::butane_unit(), 3).unwrap();
        let conf = testing::random_conformation(&graph, &mut rng);
        let text = write_conformations_string(&graph, std::slice::from_ref(&conf));
        let back = read_conformations_str(&text, "mem", &graph).unwrap();
        for (a, b) in back[0].coords.iter().zip(&conf.coords) {
            assert!((a - b).amax() < 1e-9);
        }
    }

    #[test]
    fn hash_mismatch() {
        let a = PolymerGraph::homopolymer(testing::ethylene_unit(), 2).unwrap();
        let b = PolymerGraph::homopolymer(testing::ethylene_unit(), 3).unwrap();
        let text = write_conformations_string(&a, &[]);
        assert!(matches!(read_conformations_str(&text, "mem", &b), Err(IoError::HashMismatch { .. })));
    }

    #[test]
    fn truncated_record_names_line() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let graph = PolymerGraph::homopolymer(testing::ethylene_unit(), 2).unwrap();
        let conf = testing::random_conformation(&graph, &mut rng);
        let text = write_conformations_string(&graph, &[conf]);
        let broken: String = text.lines().take(7).map(|l| format!("{l}\n")).collect::<String>() + "1 2 C 0 0\n";
        match read_conformations_str(&broken, "mem", &graph) {
            Err(IoError::MalformedRecord { line, .. }) => assert_eq!(line, 8),
            other => panic!("{other:?}"),
        }
    }
}
