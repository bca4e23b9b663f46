//! Loopless multigraphs with stable vertex identities.
//!
//! Vertex ids are opaque tokens handed out by a per-graph generation
//! counter. Deleting or contracting never recycles an id, so a reduction
//! trace can keep referring to vertices that no longer exist in the
//! current graph.

mod blocks;
mod contraction;
mod model;

pub use contraction::{lift_model, lift_model_at, ContractionMap};
pub use model::{minimize_model, verify_model, verify_packing, ModelDefect, PumpkinModel};

use crate::error::{PumpkinError, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

/// Default cap on a single edge multiplicity.
pub const DEFAULT_MAX_MULTIPLICITY: u32 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type VertexSet = BTreeSet<VertexId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    adj: BTreeMap<VertexId, BTreeMap<VertexId, u32>>,
    next_id: u32,
    max_mult: u32,
}

impl Default for MultiGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl MultiGraph {
    pub fn new() -> Self {
        MultiGraph {
            adj: BTreeMap::new(),
            next_id: 0,
            max_mult: DEFAULT_MAX_MULTIPLICITY,
        }
    }

    pub fn with_max_multiplicity(max_mult: u32) -> Self {
        MultiGraph {
            max_mult: max_mult.max(1),
            ..Self::new()
        }
    }

    /// A graph on `n` fresh vertices `0..n` and no edges.
    pub fn with_vertices(n: usize) -> Self {
        let mut g = Self::new();
        for _ in 0..n {
            g.add_vertex();
        }
        g
    }

    /// Builds a graph on vertices `0..n` from `(u, v, multiplicity)` triples.
    /// Repeated pairs accumulate.
    pub fn from_edges(n: usize, edges: &[(u32, u32, u32)]) -> Result<Self> {
        let mut g = Self::with_vertices(n);
        for &(u, v, m) in edges {
            g.add_edge(VertexId(u), VertexId(v), m)?;
        }
        Ok(g)
    }

    pub fn max_multiplicity_cap(&self) -> u32 {
        self.max_mult
    }

    /// The next id [`MultiGraph::add_vertex`] will hand out.
    pub fn generation(&self) -> u32 {
        self.next_id
    }

    pub fn add_vertex(&mut self) -> VertexId {
        let id = VertexId(self.next_id);
        self.next_id += 1;
        self.adj.insert(id, BTreeMap::new());
        id
    }

    /// Inserts a vertex with a caller-chosen id. The generation counter is
    /// bumped past it so fresh ids never collide.
    pub fn insert_vertex(&mut self, id: VertexId) {
        self.adj.entry(id).or_default();
        self.next_id = self.next_id.max(id.0 + 1);
    }

    /// Bumps the generation counter so that fresh ids start at `gen` or later.
    pub fn reserve_ids(&mut self, gen: u32) {
        self.next_id = self.next_id.max(gen);
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, mult: u32) -> Result<()> {
        if u == v {
            return Err(PumpkinError::Loop(u));
        }
        if !self.contains(u) {
            return Err(PumpkinError::UnknownVertex(u));
        }
        if !self.contains(v) {
            return Err(PumpkinError::UnknownVertex(v));
        }
        if mult == 0 {
            return Ok(());
        }
        let cur = self.multiplicity(u, v);
        let new = cur
            .checked_add(mult)
            .filter(|&m| m <= self.max_mult)
            .ok_or(PumpkinError::MultiplicityOverflow {
                u,
                v,
                cap: self.max_mult,
            })?;
        self.adj.get_mut(&u).unwrap().insert(v, new);
        self.adj.get_mut(&v).unwrap().insert(u, new);
        Ok(())
    }

    pub fn remove_vertex(&mut self, v: VertexId) {
        if let Some(nbrs) = self.adj.remove(&v) {
            for w in nbrs.keys() {
                if let Some(m) = self.adj.get_mut(w) {
                    m.remove(&v);
                }
            }
        }
    }

    /// Removes every edge between `u` and `v`.
    pub fn remove_edges_between(&mut self, u: VertexId, v: VertexId) {
        if let Some(m) = self.adj.get_mut(&u) {
            m.remove(&v);
        }
        if let Some(m) = self.adj.get_mut(&v) {
            m.remove(&u);
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.adj.keys().copied().collect()
    }

    /// Neighbors of `v` with edge multiplicities, in ascending id order.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, u32)> + '_ {
        self.adj
            .get(&v)
            .into_iter()
            .flat_map(|m| m.iter().map(|(&w, &k)| (w, k)))
    }

    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> u32 {
        self.adj
            .get(&u)
            .and_then(|m| m.get(&v))
            .copied()
            .unwrap_or(0)
    }

    /// deg(v): incident edges counted with multiplicity.
    pub fn degree(&self, v: VertexId) -> u64 {
        self.neighbors(v).map(|(_, m)| m as u64).sum()
    }

    /// deg*(v): number of distinct neighbors.
    pub fn simple_degree(&self, v: VertexId) -> usize {
        self.adj.get(&v).map_or(0, |m| m.len())
    }

    /// Edges as `(u, v, multiplicity)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, u32)> + '_ {
        self.adj.iter().flat_map(|(&u, nbrs)| {
            nbrs.iter()
                .filter(move |(&w, _)| u < w)
                .map(move |(&w, &m)| (u, w, m))
        })
    }

    /// |E| with multiplicity.
    pub fn edge_count(&self) -> u64 {
        self.edges().map(|(_, _, m)| m as u64).sum()
    }

    pub fn simple_edge_count(&self) -> usize {
        self.edges().count()
    }

    /// μ(G), 0 for an edgeless graph.
    pub fn max_multiplicity(&self) -> u32 {
        self.edges().map(|(_, _, m)| m).max().unwrap_or(0)
    }

    /// δ(G), 0 for the empty graph.
    pub fn min_degree(&self) -> u64 {
        self.vertices().map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// Δ(G), 0 for the empty graph.
    pub fn max_degree(&self) -> u64 {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Number of edges (with multiplicity) between two vertex sets.
    pub fn edges_between(&self, a: &VertexSet, b: &VertexSet) -> u64 {
        let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        small
            .iter()
            .flat_map(|&x| self.neighbors(x))
            .filter(|(w, _)| large.contains(w))
            .map(|(_, m)| m as u64)
            .sum()
    }

    /// G[X]. Keeps the generation counter.
    pub fn induced(&self, keep: &VertexSet) -> MultiGraph {
        let adj = self
            .adj
            .iter()
            .filter(|(v, _)| keep.contains(v))
            .map(|(&v, nbrs)| {
                let nbrs = nbrs
                    .iter()
                    .filter(|(w, _)| keep.contains(w))
                    .map(|(&w, &m)| (w, m))
                    .collect();
                (v, nbrs)
            })
            .collect();
        MultiGraph {
            adj,
            next_id: self.next_id,
            max_mult: self.max_mult,
        }
    }

    /// G \ X.
    pub fn without(&self, drop: &VertexSet) -> MultiGraph {
        let keep: VertexSet = self.vertices().filter(|v| !drop.contains(v)).collect();
        self.induced(&keep)
    }

    pub fn without_vertex(&self, v: VertexId) -> MultiGraph {
        let mut g = self.clone();
        g.remove_vertex(v);
        g
    }

    /// Merges `v` into `u` whether or not they are adjacent. Multiplicities
    /// to common neighbors add up and all `u`-`v` edges vanish.
    pub fn identify(&self, u: VertexId, v: VertexId) -> Result<MultiGraph> {
        if u == v {
            return Err(PumpkinError::Precondition(format!(
                "cannot identify vertex {u} with itself"
            )));
        }
        for x in [u, v] {
            if !self.contains(x) {
                return Err(PumpkinError::UnknownVertex(x));
            }
        }
        let mut g = self.clone();
        let moved: Vec<(VertexId, u32)> = self.neighbors(v).filter(|&(w, _)| w != u).collect();
        g.remove_vertex(v);
        for (w, m) in moved {
            g.add_edge(u, w, m)?;
        }
        Ok(g)
    }

    /// G/uv. The merged vertex keeps the id `u`; parallel edges are kept and
    /// the loops the contracted pair would form are dropped.
    pub fn contract_edge(&self, u: VertexId, v: VertexId) -> Result<MultiGraph> {
        if self.multiplicity(u, v) == 0 {
            return Err(PumpkinError::Precondition(format!(
                "no edge between {u} and {v}"
            )));
        }
        self.identify(u, v)
    }

    /// Connected components in ascending order of their smallest vertex.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut seen = VertexSet::new();
        let mut out = Vec::new();
        for s in self.vertices() {
            if seen.contains(&s) {
                continue;
            }
            let comp = self.reach(s, |_| true);
            seen.extend(comp.iter().copied());
            out.push(comp);
        }
        out
    }

    /// cc(G).
    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    /// Vertices reachable from `s` through vertices accepted by `allow`
    /// (`s` itself is always included).
    pub fn reach(&self, s: VertexId, allow: impl Fn(VertexId) -> bool) -> VertexSet {
        let mut seen = VertexSet::new();
        if !self.contains(s) {
            return seen;
        }
        seen.insert(s);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for (w, _) in self.neighbors(x) {
                if allow(w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Whether `set` is non-empty and induces a connected subgraph.
    pub fn is_connected_set(&self, set: &VertexSet) -> bool {
        match set.iter().next() {
            None => false,
            Some(&s) => {
                if !self.contains(s) {
                    return false;
                }
                self.reach(s, |w| set.contains(&w)).len() == set.len()
            }
        }
    }

    /// BFS distances from `s` inside G[allowed].
    pub fn distances_within(&self, s: VertexId, allowed: &VertexSet) -> BTreeMap<VertexId, usize> {
        let mut dist = BTreeMap::new();
        dist.insert(s, 0);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            let d = dist[&x];
            for (w, _) in self.neighbors(x) {
                if allowed.contains(&w) && !dist.contains_key(&w) {
                    dist.insert(w, d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// A shortest path from `s` to `t` inside G[allowed], preferring
    /// lower-id predecessors on ties.
    pub fn shortest_path_within(
        &self,
        s: VertexId,
        t: VertexId,
        allowed: &VertexSet,
    ) -> Option<Vec<VertexId>> {
        let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        let mut seen = VertexSet::from([s]);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            if x == t {
                let mut path = vec![t];
                let mut cur = t;
                while let Some(&p) = parent.get(&cur) {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for (w, _) in self.neighbors(x) {
                if allowed.contains(&w) && seen.insert(w) {
                    parent.insert(w, x);
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Diameter of G[set] (number of edges), `None` if disconnected or empty.
    pub fn induced_diameter(&self, set: &VertexSet) -> Option<usize> {
        let mut best = 0;
        for &s in set {
            let dist = self.distances_within(s, set);
            if dist.len() != set.len() {
                return None;
            }
            best = best.max(dist.values().copied().max().unwrap_or(0));
        }
        if set.is_empty() {
            None
        } else {
            Some(best)
        }
    }

    /// Biconnected components of the underlying simple graph. Bridges are
    /// two-vertex blocks and isolated vertices singleton blocks.
    pub fn blocks(&self) -> Vec<VertexSet> {
        blocks::blocks(self)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: Vec<VertexId>,
    edges: Vec<(VertexId, VertexId, u32)>,
    next_id: u32,
}

impl Serialize for MultiGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr {
            vertices: self.vertices().collect(),
            edges: self.edges().collect(),
            next_id: self.next_id,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(d)?;
        let mut g = MultiGraph::new();
        for v in repr.vertices {
            g.insert_vertex(v);
        }
        for (u, v, m) in repr.edges {
            g.add_edge(u, v, m).map_err(serde::de::Error::custom)?;
        }
        g.reserve_ids(repr.next_id);
        Ok(g)
    }
}
