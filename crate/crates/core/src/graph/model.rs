use super::{MultiGraph, VertexId, VertexSet};
use crate::error::{PumpkinError, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// An unordered pair {A, B} of disjoint connected vertex sets together with
/// the number of edges running between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PumpkinModel {
    pub side_a: VertexSet,
    pub side_b: VertexSet,
    pub cross_edges: u64,
}

impl PumpkinModel {
    /// Builds a model and counts its cross edges in `g`. No validity check.
    pub fn from_sides(g: &MultiGraph, side_a: VertexSet, side_b: VertexSet) -> Self {
        let cross_edges = g.edges_between(&side_a, &side_b);
        PumpkinModel {
            side_a,
            side_b,
            cross_edges,
        }
    }

    /// |A| + |B|.
    pub fn size(&self) -> usize {
        self.side_a.len() + self.side_b.len()
    }

    pub fn vertices(&self) -> VertexSet {
        self.side_a.union(&self.side_b).copied().collect()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.side_a.contains(&v) || self.side_b.contains(&v)
    }

    /// Swaps sides so that `v` ends up in `side_a` (no-op if it is absent).
    pub fn oriented_towards(mut self, v: VertexId) -> Self {
        if self.side_b.contains(&v) {
            std::mem::swap(&mut self.side_a, &mut self.side_b);
        }
        self
    }

    /// Same model with the side holding the smallest vertex first.
    pub fn canonical(mut self) -> Self {
        if self.side_b.first() < self.side_a.first() && !self.side_b.is_empty() {
            std::mem::swap(&mut self.side_a, &mut self.side_b);
        }
        self
    }
}

/// First violated clause when checking a model against a host graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelDefect {
    EmptySide,
    SidesOverlap(VertexId),
    UnknownVertex(VertexId),
    DisconnectedSide { side: char },
    TooFewCrossEdges { found: u64, needed: u64 },
}

impl fmt::Display for ModelDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelDefect::EmptySide => write!(f, "a side is empty"),
            ModelDefect::SidesOverlap(v) => write!(f, "vertex {v} is on both sides"),
            ModelDefect::UnknownVertex(v) => write!(f, "vertex {v} is not in the graph"),
            ModelDefect::DisconnectedSide { side } => write!(f, "side {side} is not connected"),
            ModelDefect::TooFewCrossEdges { found, needed } => {
                write!(f, "{found} cross edges, {needed} needed")
            }
        }
    }
}

/// Checks that `m` is a `c`-pumpkin-model of `g`. Clauses are tested in a
/// fixed order and the first failure is reported.
pub fn verify_model(g: &MultiGraph, m: &PumpkinModel, c: u32) -> std::result::Result<(), ModelDefect> {
    if m.side_a.is_empty() || m.side_b.is_empty() {
        return Err(ModelDefect::EmptySide);
    }
    if let Some(&v) = m.side_a.intersection(&m.side_b).next() {
        return Err(ModelDefect::SidesOverlap(v));
    }
    if let Some(&v) = m.side_a.iter().chain(&m.side_b).find(|&&v| !g.contains(v)) {
        return Err(ModelDefect::UnknownVertex(v));
    }
    if !g.is_connected_set(&m.side_a) {
        return Err(ModelDefect::DisconnectedSide { side: 'A' });
    }
    if !g.is_connected_set(&m.side_b) {
        return Err(ModelDefect::DisconnectedSide { side: 'B' });
    }
    let found = g.edges_between(&m.side_a, &m.side_b);
    if found < c as u64 {
        return Err(ModelDefect::TooFewCrossEdges {
            found,
            needed: c as u64,
        });
    }
    Ok(())
}

/// Shrinks a valid model to a minimal one by deleting single vertices in
/// ascending id order until no deletion keeps the model valid.
///
/// A single-vertex fixpoint is minimal: if some A' ⊊ A is connected then
/// some leaf of a spanning tree of G[A]/A' lies outside A' and can go.
pub fn minimize_model(g: &MultiGraph, m: &PumpkinModel, c: u32) -> Result<PumpkinModel> {
    verify_model(g, m, c).map_err(|d| PumpkinError::InvalidModel(d.to_string()))?;
    let mut a = m.side_a.clone();
    let mut b = m.side_b.clone();
    let mut cross = g.edges_between(&a, &b);
    loop {
        let mut changed = false;
        let candidates: Vec<(VertexId, bool)> = a
            .iter()
            .map(|&v| (v, true))
            .chain(b.iter().map(|&v| (v, false)))
            .collect::<std::collections::BTreeMap<_, _>>()
            .into_iter()
            .collect();
        for (v, in_a) in candidates {
            let (side, other) = if in_a { (&mut a, &b) } else { (&mut b, &a) };
            if side.len() == 1 {
                continue;
            }
            let lost: u64 = g
                .neighbors(v)
                .filter(|(w, _)| other.contains(w))
                .map(|(_, k)| k as u64)
                .sum();
            if cross - lost < c as u64 {
                continue;
            }
            side.remove(&v);
            if g.is_connected_set(side) {
                cross -= lost;
                changed = true;
            } else {
                side.insert(v);
            }
        }
        if !changed {
            break;
        }
    }
    Ok(PumpkinModel {
        side_a: a,
        side_b: b,
        cross_edges: cross,
    })
}

/// Checks that `models` are pairwise vertex-disjoint `c`-pumpkin-models.
pub fn verify_packing(g: &MultiGraph, models: &[PumpkinModel], c: u32) -> Result<()> {
    let mut used = VertexSet::new();
    for (i, m) in models.iter().enumerate() {
        verify_model(g, m, c)
            .map_err(|d| PumpkinError::InvalidPacking(format!("model {i}: {d}")))?;
        for v in m.vertices() {
            if !used.insert(v) {
                return Err(PumpkinError::InvalidPacking(format!(
                    "vertex {v} is used by two models"
                )));
            }
        }
    }
    Ok(())
}
