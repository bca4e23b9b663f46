use super::{minimize_model, verify_model, MultiGraph, PumpkinModel, VertexId, VertexSet};
use crate::error::{PumpkinError, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Bags of original vertices standing behind each vertex of a contracted
/// graph. Each contracted vertex keeps the smallest id of its bag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionMap {
    pub bags: BTreeMap<VertexId, VertexSet>,
    pub diameters: BTreeMap<VertexId, usize>,
}

impl ContractionMap {
    /// Contracts the given disjoint connected bags of `g`. Vertices outside
    /// every bag stay as singletons.
    pub fn contract(g: &MultiGraph, bags: &[VertexSet]) -> Result<(MultiGraph, ContractionMap)> {
        let mut owner: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        let mut map = ContractionMap {
            bags: BTreeMap::new(),
            diameters: BTreeMap::new(),
        };
        for bag in bags {
            let Some(&rep) = bag.first() else {
                return Err(PumpkinError::Contraction("empty bag".into()));
            };
            let diam = g
                .induced_diameter(bag)
                .ok_or_else(|| PumpkinError::Contraction(format!("bag at {rep} is not connected")))?;
            for &v in bag {
                if !g.contains(v) {
                    return Err(PumpkinError::UnknownVertex(v));
                }
                if owner.insert(v, rep).is_some() {
                    return Err(PumpkinError::Contraction(format!("vertex {v} is in two bags")));
                }
            }
            map.bags.insert(rep, bag.clone());
            map.diameters.insert(rep, diam);
        }
        for v in g.vertices() {
            if !owner.contains_key(&v) {
                owner.insert(v, v);
                map.bags.insert(v, VertexSet::from([v]));
                map.diameters.insert(v, 0);
            }
        }
        let h = map.build(g, &owner)?;
        Ok((h, map))
    }

    fn build(&self, g: &MultiGraph, owner: &BTreeMap<VertexId, VertexId>) -> Result<MultiGraph> {
        let mut h = MultiGraph::with_max_multiplicity(u32::MAX);
        for &rep in self.bags.keys() {
            h.insert_vertex(rep);
        }
        h.reserve_ids(g.generation());
        for (x, y, m) in g.edges() {
            let (a, b) = (owner[&x], owner[&y]);
            if a != b {
                h.add_edge(a, b, m)?;
            }
        }
        Ok(h)
    }

    fn owners(&self) -> BTreeMap<VertexId, VertexId> {
        self.bags
            .iter()
            .flat_map(|(&rep, bag)| bag.iter().map(move |&v| (v, rep)))
            .collect()
    }

    /// Rebuilds the contracted graph after checking the map against `g`.
    pub fn contracted_graph(&self, g: &MultiGraph) -> Result<MultiGraph> {
        let mut owner = BTreeMap::new();
        for (&rep, bag) in &self.bags {
            if !bag.contains(&rep) {
                return Err(PumpkinError::Contraction(format!("bag {rep} does not contain its key")));
            }
            let diam = g
                .induced_diameter(bag)
                .ok_or_else(|| PumpkinError::Contraction(format!("bag {rep} is not connected in g")))?;
            if diam > self.diameters.get(&rep).copied().unwrap_or(0) {
                return Err(PumpkinError::Contraction(format!(
                    "bag {rep} has diameter {diam} above its recorded bound"
                )));
            }
            for &v in bag {
                if owner.insert(v, rep).is_some() {
                    return Err(PumpkinError::Contraction(format!("vertex {v} is in two bags")));
                }
            }
        }
        if let Some(v) = g.vertices().find(|v| !owner.contains_key(v)) {
            return Err(PumpkinError::Contraction(format!("vertex {v} is not covered")));
        }
        self.build(g, &owner)
    }

    pub fn max_diameter(&self) -> usize {
        self.diameters.values().copied().max().unwrap_or(0)
    }
}

/// Expands a model of the contracted graph into a model of `g` keeping at
/// least as many cross edges. See [`lift_model_at`].
pub fn lift_model(g: &MultiGraph, cm: &ContractionMap, m: &PumpkinModel, k: usize) -> Result<PumpkinModel> {
    let c = u32::try_from(m.cross_edges).unwrap_or(u32::MAX);
    lift_model_at(g, cm, m, c, k)
}

/// Expands a `c`-model of the contracted graph into a `c`-model of `g` with
/// at most `k·c·s` vertices, `s` being the size of `m` (`k = 0` counts as 1).
///
/// The model is minimized first. Then `c` cross edges and a spanning tree
/// of each side pin down a few port vertices per bag, and the ports of a
/// bag are joined by shortest paths inside it.
pub fn lift_model_at(
    g: &MultiGraph,
    cm: &ContractionMap,
    m: &PumpkinModel,
    c: u32,
    k: usize,
) -> Result<PumpkinModel> {
    let k = k.max(1);
    if cm.max_diameter() > k {
        return Err(PumpkinError::Contraction(format!(
            "bag diameter {} exceeds the bound {k}",
            cm.max_diameter()
        )));
    }
    let h = cm.contracted_graph(g)?;
    verify_model(&h, m, c).map_err(|d| PumpkinError::InvalidModel(format!("in contracted graph: {d}")))?;
    let m = minimize_model(&h, m, c)?;
    let owner = cm.owners();

    // ports per contracted vertex
    let mut ports: BTreeMap<VertexId, VertexSet> = BTreeMap::new();
    let mut take = c as u64;
    'cross: for &x in &m.side_a {
        for &y in &m.side_b {
            if h.multiplicity(x, y) == 0 {
                continue;
            }
            for &p in &cm.bags[&x] {
                for (q, mult) in g.neighbors(p) {
                    if owner[&q] != y {
                        continue;
                    }
                    ports.entry(x).or_default().insert(p);
                    ports.entry(y).or_default().insert(q);
                    take = take.saturating_sub(mult as u64);
                    if take == 0 {
                        break 'cross;
                    }
                }
            }
        }
    }
    for side in [&m.side_a, &m.side_b] {
        for (x, y) in spanning_tree(&h, side) {
            let (p, q) = cm.bags[&x]
                .iter()
                .find_map(|&p| g.neighbors(p).find(|(q, _)| owner[q] == y).map(|(q, _)| (p, q)))
                .ok_or_else(|| PumpkinError::Internal(format!("no edge behind {x}-{y}")))?;
            ports.entry(x).or_default().insert(p);
            ports.entry(y).or_default().insert(q);
        }
    }

    let expand = |side: &VertexSet| -> Result<VertexSet> {
        let mut out = VertexSet::new();
        for x in side {
            let bag = &cm.bags[x];
            match ports.get(x).and_then(|p| p.first().map(|&r| (r, p))) {
                None => {
                    out.insert(*bag.first().unwrap());
                }
                Some((root, ps)) => {
                    for &p in ps {
                        let path = g
                            .shortest_path_within(root, p, bag)
                            .ok_or_else(|| PumpkinError::Contraction(format!("bag {x} is not connected")))?;
                        out.extend(path);
                    }
                }
            }
        }
        Ok(out)
    };
    let a = expand(&m.side_a)?;
    let b = expand(&m.side_b)?;
    let lifted = PumpkinModel::from_sides(g, a, b);
    verify_model(g, &lifted, c).map_err(|d| PumpkinError::Internal(format!("lifted model: {d}")))?;
    Ok(lifted)
}

/// BFS tree edges of G[side] rooted at its smallest vertex.
fn spanning_tree(h: &MultiGraph, side: &VertexSet) -> Vec<(VertexId, VertexId)> {
    let Some(&root) = side.first() else { return vec![] };
    let mut seen = VertexSet::from([root]);
    let mut queue = std::collections::VecDeque::from([root]);
    let mut out = vec![];
    while let Some(x) = queue.pop_front() {
        for (w, _) in h.neighbors(x) {
            if side.contains(&w) && seen.insert(w) {
                out.push((x, w));
                queue.push_back(w);
            }
        }
    }
    out
}
