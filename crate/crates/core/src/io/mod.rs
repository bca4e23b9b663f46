//! Instance text format, generators and run reports.
//!
//! ```text
//! c free comment
//! p pumpkin <n> <m>
//! m <key> <value>
//! e <u> <v> <multiplicity>
//! ```
//!
//! Vertices are `1..=n` in the file and `0..n` in memory. `m` counts edge
//! records. Metadata lines are optional; comments are dropped on parse.

mod gen;
mod report;

pub use gen::{generate, Family, Glue};
pub use report::{RunReport, Timing};

use crate::error::{PumpkinError, Result};
use crate::graph::{MultiGraph, VertexId};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InstanceFile {
    pub n: usize,
    /// 1-based endpoints, u < v, one record per pair in canonical form.
    pub edges: Vec<(u32, u32, u32)>,
    pub meta: BTreeMap<String, String>,
}

fn perr(line: usize, msg: impl Into<String>) -> PumpkinError {
    PumpkinError::Parse { line, msg: msg.into() }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| perr(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| perr(line, format!("bad {what}")))
}

impl InstanceFile {
    /// Parses an instance. Repeated pairs are merged with a warning, or
    /// rejected when `strict` is set.
    pub fn parse(text: &str, strict: bool) -> Result<(Self, Vec<String>)> {
        let mut out = InstanceFile::default();
        let mut warnings = vec![];
        let mut declared_m = None;
        let mut records = 0usize;
        let mut seen: BTreeMap<(u32, u32), usize> = BTreeMap::new();
        let mut mult: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let mut tok = raw.split_whitespace();
            let Some(kind) = tok.next() else { continue };
            match kind {
                "c" => continue,
                "p" => {
                    if declared_m.is_some() {
                        return Err(perr(line, "second problem line"));
                    }
                    if tok.next() != Some("pumpkin") {
                        return Err(perr(line, "expected `p pumpkin <n> <m>`"));
                    }
                    out.n = field(tok.next(), line, "vertex count")?;
                    declared_m = Some(field::<usize>(tok.next(), line, "edge count")?);
                }
                "m" => {
                    if declared_m.is_none() {
                        return Err(perr(line, "metadata before the problem line"));
                    }
                    let key = tok.next().ok_or_else(|| perr(line, "missing metadata key"))?;
                    let value: Vec<&str> = tok.by_ref().collect();
                    out.meta.insert(key.to_string(), value.join(" "));
                }
                "e" => {
                    if declared_m.is_none() {
                        return Err(perr(line, "edge before the problem line"));
                    }
                    let u: u32 = field(tok.next(), line, "endpoint")?;
                    let v: u32 = field(tok.next(), line, "endpoint")?;
                    let k: u32 = field(tok.next(), line, "multiplicity")?;
                    if u == v {
                        return Err(perr(line, format!("self-loop at {u}")));
                    }
                    for x in [u, v] {
                        if x == 0 || x as usize > out.n {
                            return Err(perr(line, format!("vertex {x} outside 1..={}", out.n)));
                        }
                    }
                    if k == 0 {
                        return Err(perr(line, "multiplicity must be at least 1"));
                    }
                    let key = (u.min(v), u.max(v));
                    if let Some(first) = seen.get(&key) {
                        if strict {
                            return Err(perr(line, format!("duplicate edge {u}-{v} (first on line {first})")));
                        }
                        warnings.push(format!("line {line}: duplicate edge {u}-{v} merged"));
                    } else {
                        seen.insert(key, line);
                    }
                    let slot = mult.entry(key).or_default();
                    *slot = slot.checked_add(k).ok_or_else(|| perr(line, "multiplicity overflow"))?;
                    records += 1;
                }
                other => return Err(perr(line, format!("unknown record `{other}`"))),
            }
            if tok.next().is_some() {
                return Err(perr(line, "trailing tokens"));
            }
        }
        let m = declared_m.ok_or_else(|| perr(0, "missing problem line"))?;
        if m != records {
            return Err(perr(0, format!("problem line declares {m} edges, found {records}")));
        }
        out.edges = mult.into_iter().map(|((u, v), k)| (u, v, k)).collect();
        Ok((out, warnings))
    }

    /// Canonical text: problem line, metadata by key, edges by endpoints.
    pub fn serialize(&self) -> String {
        let mut s = format!("p pumpkin {} {}\n", self.n, self.edges.len());
        for (k, v) in &self.meta {
            writeln!(s, "m {k} {v}").unwrap();
        }
        let mut edges = self.edges.clone();
        edges.sort();
        for (u, v, k) in edges {
            writeln!(s, "e {u} {v} {k}").unwrap();
        }
        s
    }

    pub fn to_graph(&self) -> Result<MultiGraph> {
        let mut g = MultiGraph::with_max_multiplicity(u32::MAX);
        for _ in 0..self.n {
            g.add_vertex();
        }
        for &(u, v, k) in &self.edges {
            g.add_edge(VertexId(u - 1), VertexId(v - 1), k)?;
        }
        Ok(g)
    }

    /// Writes `g` with its vertices renumbered `1..=n` in id order. When the
    /// ids are not `0..n`, the original ids are kept under the `ids` key.
    pub fn from_graph(g: &MultiGraph) -> Self {
        let ids: Vec<VertexId> = g.vertices().collect();
        let pos: BTreeMap<VertexId, u32> = ids.iter().enumerate().map(|(i, &v)| (v, i as u32 + 1)).collect();
        let mut edges: Vec<(u32, u32, u32)> = g
            .edges()
            .map(|(u, v, k)| {
                let (a, b) = (pos[&u], pos[&v]);
                (a.min(b), a.max(b), k)
            })
            .collect();
        edges.sort();
        let mut meta = BTreeMap::new();
        if ids.iter().enumerate().any(|(i, v)| v.0 as usize != i) {
            meta.insert(
                "ids".into(),
                ids.iter().map(|v| v.0.to_string()).collect::<Vec<_>>().join(","),
            );
        }
        InstanceFile { n: ids.len(), edges, meta }
    }
}

pub fn parse_graph(text: &str, strict: bool) -> Result<MultiGraph> {
    InstanceFile::parse(text, strict)?.0.to_graph()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let (f, w) = InstanceFile::parse("p pumpkin 2 1\ne 1 2 3\n", true).unwrap();
        assert!(w.is_empty());
        let g = f.to_graph().unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.multiplicity(VertexId(0), VertexId(1)), 3);
    }

    #[test]
    fn round_trip_is_canonical() {
        let text = "c hello\np pumpkin 4 3\nm seed 7\ne 3 2 1\ne 1 2 2\ne 4 1 5\n";
        let (f, _) = InstanceFile::parse(text, false).unwrap();
        let canon = f.serialize();
        assert_eq!(canon, "p pumpkin 4 3\nm seed 7\ne 1 2 2\ne 1 4 5\ne 2 3 1\n");
        let (again, _) = InstanceFile::parse(&canon, true).unwrap();
        assert_eq!(again.serialize(), canon);
    }

    #[test]
    fn loops_rejected_with_line() {
        let err = InstanceFile::parse("p pumpkin 2 2\ne 1 2 1\ne 1 1 1\n", false).unwrap_err();
        assert_eq!(err, PumpkinError::Parse { line: 3, msg: "self-loop at 1".into() });
    }

    #[test]
    fn duplicates_merge_or_fail() {
        let text = "p pumpkin 2 2\ne 1 2 1\ne 2 1 2\n";
        let (f, w) = InstanceFile::parse(text, false).unwrap();
        assert_eq!(f.edges, vec![(1, 2, 3)]);
        assert_eq!(w.len(), 1);
        assert!(matches!(InstanceFile::parse(text, true), Err(PumpkinError::Parse { line: 3, .. })));
    }

    #[test]
    fn malformed_lines() {
        for bad in ["e 1 2 1\n", "p pumpkin 2 1\ne 1 3 1\n", "p pumpkin 2 1\ne 1 2 0\n", "p pumpkin 2 2\ne 1 2 1\n", "p pumpkin x 1\n", "p pumpkin 2 0\nq\n"] {
            assert!(InstanceFile::parse(bad, false).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn from_graph_keeps_sparse_ids() {
        let mut g = MultiGraph::from_edges(3, &[(0, 2, 1)]).unwrap();
        g.remove_vertex(VertexId(1));
        let f = InstanceFile::from_graph(&g);
        assert_eq!(f.serialize(), "p pumpkin 2 1\nm ids 0,2\ne 1 2 1\n");
    }
}
