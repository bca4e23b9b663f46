//! Exact pumpkin detection by branch-and-bound over connected bipartitions.
//!
//! Any model {A, B} inside a connected component K can be grown until
//! A ∪ B = V(K) without losing cross edges or connectivity. So the largest
//! pumpkin equals the largest cut of K into two connected halves. The
//! search grows A from a root, deciding frontier vertices one at a time;
//! excluded vertices (set X) must end up in B.

use crate::error::{PumpkinError, Result};
use crate::graph::{verify_model, MultiGraph, PumpkinModel, VertexId, VertexSet};
use crate::reduce::Outgrowth;

#[derive(Clone, Copy, Debug)]
pub struct AnchoredQuery<'a> {
    pub graph: &'a MultiGraph,
    pub anchor_a: Option<VertexId>,
    pub anchor_b: Option<VertexId>,
    pub cap: u32,
}

impl<'a> AnchoredQuery<'a> {
    pub fn new(graph: &'a MultiGraph, cap: u32) -> Self {
        AnchoredQuery {
            graph,
            anchor_a: None,
            anchor_b: None,
            cap,
        }
    }

    pub fn anchored(mut self, a: Option<VertexId>, b: Option<VertexId>) -> Self {
        self.anchor_a = a;
        self.anchor_b = b;
        self
    }
}

const UNDECIDED: u8 = 0;
const IN_A: u8 = 1;
const IN_X: u8 = 2;

struct Search<'b> {
    adj: Vec<Vec<(usize, u64)>>,
    state: Vec<u8>,
    ea: Vec<u64>,
    ex: Vec<u64>,
    eu: Vec<u64>,
    cross: u64,
    sum_max: u64,
    uu: u64,
    x_count: usize,
    u_count: usize,
    best: u64,
    best_a: Option<Vec<bool>>,
    cap: u64,
    expansions: &'b mut u64,
    budget: u64,
}

impl Search<'_> {
    fn assign(&mut self, w: usize, to: u8) {
        self.sum_max -= self.ea[w].max(self.ex[w]);
        self.uu -= self.eu[w];
        self.cross += if to == IN_A { self.ex[w] } else { self.ea[w] };
        self.state[w] = to;
        self.u_count -= 1;
        if to == IN_X {
            self.x_count += 1;
        }
        for i in 0..self.adj[w].len() {
            let (t, m) = self.adj[w][i];
            let free = self.state[t] == UNDECIDED;
            if free {
                self.sum_max -= self.ea[t].max(self.ex[t]);
                self.eu[t] -= m;
            }
            if to == IN_A {
                self.ea[t] += m;
            } else {
                self.ex[t] += m;
            }
            if free {
                self.sum_max += self.ea[t].max(self.ex[t]);
            }
        }
    }

    fn unassign(&mut self, w: usize) {
        let to = self.state[w];
        for i in 0..self.adj[w].len() {
            let (t, m) = self.adj[w][i];
            let free = self.state[t] == UNDECIDED;
            if free {
                self.sum_max -= self.ea[t].max(self.ex[t]);
                self.eu[t] += m;
            }
            if to == IN_A {
                self.ea[t] -= m;
            } else {
                self.ex[t] -= m;
            }
            if free {
                self.sum_max += self.ea[t].max(self.ex[t]);
            }
        }
        self.state[w] = UNDECIDED;
        self.u_count += 1;
        if to == IN_X {
            self.x_count -= 1;
        }
        self.cross -= if to == IN_A { self.ex[w] } else { self.ea[w] };
        self.uu += self.eu[w];
        self.sum_max += self.ea[w].max(self.ex[w]);
    }

    /// Vertices outside A reachable from `s` without entering A.
    fn reach_outside_a(&self, s: usize) -> (usize, usize) {
        let mut seen = vec![false; self.state.len()];
        seen[s] = true;
        let mut stack = vec![s];
        let (mut total, mut xs) = (0, 0);
        while let Some(x) = stack.pop() {
            total += 1;
            if self.state[x] == IN_X {
                xs += 1;
            }
            for &(t, _) in &self.adj[x] {
                if !seen[t] && self.state[t] != IN_A {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        (total, xs)
    }

    fn dfs(&mut self) -> Result<()> {
        *self.expansions += 1;
        if *self.expansions > self.budget {
            return Err(PumpkinError::BudgetExceeded {
                expansions: *self.expansions,
            });
        }
        if self.best >= self.cap || self.cross + self.sum_max + self.uu <= self.best {
            return Ok(());
        }
        if self.x_count + self.u_count == 0 {
            return Ok(());
        }
        if self.x_count > 0 {
            let s = self.state.iter().position(|&st| st == IN_X).unwrap();
            if self.reach_outside_a(s).1 < self.x_count {
                return Ok(());
            }
        }
        let frontier = (0..self.state.len()).find(|&w| self.state[w] == UNDECIDED && self.ea[w] > 0);
        match frontier {
            None => {
                let s = self.state.iter().position(|&st| st != IN_A).unwrap();
                if self.reach_outside_a(s).0 == self.x_count + self.u_count && self.cross > self.best {
                    self.best = self.cross;
                    self.best_a = Some(self.state.iter().map(|&st| st == IN_A).collect());
                }
            }
            Some(w) => {
                self.assign(w, IN_X);
                let r = self.dfs();
                self.unassign(w);
                r?;
                self.assign(w, IN_A);
                let r = self.dfs();
                self.unassign(w);
                r?;
            }
        }
        Ok(())
    }
}

/// Best connected bipartition of the connected vertex set `part` with a
/// cut larger than `floor`, stopping once `cap` is reached. The root goes
/// to A, `anchor_b` (if any) to B.
fn search_part(
    g: &MultiGraph,
    part: &VertexSet,
    root: VertexId,
    anchor_b: Option<VertexId>,
    floor: u64,
    cap: u64,
    expansions: &mut u64,
    budget: u64,
) -> Result<Option<PumpkinModel>> {
    let ids: Vec<VertexId> = part.iter().copied().collect();
    let index = |v: VertexId| ids.binary_search(&v).ok();
    let adj: Vec<Vec<(usize, u64)>> = ids
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .filter_map(|(w, m)| index(w).map(|i| (i, m as u64)))
                .collect()
        })
        .collect();
    let eu: Vec<u64> = adj.iter().map(|l| l.iter().map(|&(_, m)| m).sum()).collect();
    let uu = eu.iter().sum::<u64>() / 2;
    if uu <= floor {
        return Ok(None);
    }
    let n = ids.len();
    let mut s = Search {
        adj,
        state: vec![UNDECIDED; n],
        ea: vec![0; n],
        ex: vec![0; n],
        eu,
        cross: 0,
        sum_max: 0,
        uu,
        x_count: 0,
        u_count: n,
        best: floor,
        best_a: None,
        cap,
        expansions,
        budget,
    };
    s.assign(index(root).unwrap(), IN_A);
    if let Some(b) = anchor_b {
        s.assign(index(b).unwrap(), IN_X);
    }
    s.dfs()?;
    Ok(s.best_a.map(|mask| {
        let (a, b): (Vec<_>, Vec<_>) = ids.iter().zip(mask).partition(|(_, inside)| *inside);
        PumpkinModel::from_sides(
            g,
            a.into_iter().map(|(v, _)| *v).collect(),
            b.into_iter().map(|(v, _)| *v).collect(),
        )
    }))
}

/// Largest `k ≤ cap` such that a k-pumpkin-model respecting the anchors
/// exists, with a witness whenever `k ≥ 1`.
pub fn max_pumpkin(q: &AnchoredQuery, budget: u64) -> Result<(u32, Option<PumpkinModel>)> {
    let g = q.graph;
    if q.cap == 0 {
        return Err(PumpkinError::Precondition("cap must be at least 1".into()));
    }
    for v in [q.anchor_a, q.anchor_b].into_iter().flatten() {
        if !g.contains(v) {
            return Err(PumpkinError::UnknownVertex(v));
        }
    }
    if q.anchor_a.is_some() && q.anchor_a == q.anchor_b {
        return Err(PumpkinError::Precondition("anchors must be distinct".into()));
    }
    let mut expansions = 0u64;
    let cap = q.cap as u64;
    let found = match (q.anchor_a, q.anchor_b) {
        (None, None) => best_over_blocks(g, 0, cap, &mut expansions, budget)?,
        (a, b) => {
            let (root, other, swapped) = match (a, b) {
                (Some(a), b) => (a, b, false),
                (None, Some(b)) => (b, None, true),
                _ => unreachable!(),
            };
            let comp = g.reach(root, |_| true);
            if other.is_some_and(|o| !comp.contains(&o)) {
                None
            } else {
                search_part(g, &comp, root, other, 0, cap, &mut expansions, budget)?.map(|m| {
                    if swapped {
                        PumpkinModel {
                            side_a: m.side_b,
                            side_b: m.side_a,
                            cross_edges: m.cross_edges,
                        }
                    } else {
                        m
                    }
                })
            }
        }
    };
    Ok(match found {
        None => (0, None),
        Some(m) => ((m.cross_edges.min(cap)) as u32, Some(m)),
    })
}

fn best_over_blocks(
    g: &MultiGraph,
    floor: u64,
    cap: u64,
    expansions: &mut u64,
    budget: u64,
) -> Result<Option<PumpkinModel>> {
    let mut best: Option<PumpkinModel> = None;
    let mut floor = floor;
    for block in g.blocks() {
        if floor >= cap {
            break;
        }
        if block.len() < 2 {
            continue;
        }
        let root = *block.first().unwrap();
        if let Some(m) = search_part(g, &block, root, None, floor, cap, expansions, budget)? {
            floor = m.cross_edges;
            best = Some(m);
        }
    }
    Ok(best)
}

/// A `c`-pumpkin-model of `g` if one exists.
pub fn has_pumpkin(g: &MultiGraph, c: u32, budget: u64) -> Result<Option<PumpkinModel>> {
    if c == 0 {
        return Err(PumpkinError::Precondition("c must be at least 1".into()));
    }
    if let Some((u, v, _)) = g.edges().find(|&(_, _, m)| m >= c) {
        return Ok(Some(PumpkinModel::from_sides(
            g,
            VertexSet::from([u]),
            VertexSet::from([v]),
        )));
    }
    let forced = c >= 2 && g.edge_count() > edge_bound(c, g.vertex_count());
    let mut expansions = 0;
    let found = best_over_blocks(g, c as u64 - 1, c as u64, &mut expansions, budget)?;
    if forced && found.is_none() {
        return Err(PumpkinError::Internal(format!(
            "graph is above the edge bound for c = {c} but no model was found"
        )));
    }
    Ok(found)
}

/// (c−1)·(2c−1)·n: more edges than this force a c-pumpkin minor.
pub fn edge_bound(c: u32, n: usize) -> u64 {
    let c = c as u64;
    c.saturating_sub(1) * (2 * c).saturating_sub(1) * n as u64
}

pub fn is_pumpkin_free(g: &MultiGraph, c: u32, budget: u64) -> Result<bool> {
    Ok(has_pumpkin(g, c, budget)?.is_none())
}

/// Γ(C, u, v): G[C ∪ {u, v}] without the u–v edges.
pub fn gamma_graph(g: &MultiGraph, og: &Outgrowth) -> MultiGraph {
    let mut keep = og.component.clone();
    keep.insert(og.u);
    keep.insert(og.v);
    let mut h = g.induced(&keep);
    h.remove_edges_between(og.u, og.v);
    h
}

/// Λ(C, u, v): Γ plus one u–v edge.
pub fn lambda_graph(g: &MultiGraph, og: &Outgrowth) -> MultiGraph {
    let mut h = gamma_graph(g, og);
    h.add_edge(og.u, og.v, 1).expect("u and v are distinct vertices of Γ");
    h
}

/// γ(C, u, v) with a witness {A, B} in Γ, u ∈ A, v ∈ B.
pub fn gamma(g: &MultiGraph, og: &Outgrowth, budget: u64) -> Result<(u32, PumpkinModel)> {
    og.validate(g)?;
    let h = gamma_graph(g, og);
    let cap = h.edge_count().min(u32::MAX as u64) as u32;
    let q = AnchoredQuery::new(&h, cap.max(1)).anchored(Some(og.u), Some(og.v));
    let (val, m) = max_pumpkin(&q, budget)?;
    let m = m.ok_or_else(|| PumpkinError::Internal("outgrowth without an anchored 1-model".into()))?;
    Ok((val, m))
}

/// λ(C, u, v) via the contraction Λ/uv with the merged vertex anchored in
/// A. The witness lives in Λ and has u, v ∈ A.
pub fn lambda(g: &MultiGraph, og: &Outgrowth, budget: u64) -> Result<(u32, PumpkinModel)> {
    og.validate(g)?;
    let h = gamma_graph(g, og).identify(og.u, og.v)?;
    let cap = h.edge_count().min(u32::MAX as u64) as u32;
    let q = AnchoredQuery::new(&h, cap.max(1)).anchored(Some(og.u), None);
    let (val, m) = max_pumpkin(&q, budget)?;
    let mut m = m.ok_or_else(|| PumpkinError::Internal("outgrowth without a λ-model".into()))?;
    m.side_a.insert(og.v);
    let lam = lambda_graph(g, og);
    let m = PumpkinModel::from_sides(&lam, m.side_a, m.side_b);
    verify_model(&lam, &m, val).map_err(|d| PumpkinError::Internal(format!("λ witness: {d}")))?;
    Ok((val, m))
}
