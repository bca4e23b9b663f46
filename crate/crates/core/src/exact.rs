//! Exact solvers for "is there a c-hitting set of size at most k".
//!
//! `branch_cover` reduces, then branches on the vertices of a small model.
//! `ic_cover` grows the graph one vertex at a time and compresses a
//! solution of size k + 1 with `disjoint_cover`, which looks for a solution
//! avoiding a fixed set S.

use crate::config::Params;
use crate::detect::has_pumpkin;
use crate::error::{PumpkinError, Result};
use crate::graph::{minimize_model, MultiGraph, PumpkinModel, VertexId, VertexSet};
use crate::reduce::{lift_cover_unchecked, Reducer};
use crate::small_model::{find_small_model, SmallModelOutcome};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub nodes: u64,
    pub r4_applied: u64,
    pub rule_b_branches: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub solver: String,
    pub c: u32,
    pub k: usize,
    pub feasible: bool,
    pub hitting_set: Option<VertexSet>,
    pub stats: SolveStats,
}

impl SolveResult {
    fn new(solver: &str, c: u32, k: usize, hitting_set: Option<VertexSet>, stats: SolveStats) -> Self {
        SolveResult {
            solver: solver.into(),
            c,
            k,
            feasible: hitting_set.is_some(),
            hitting_set,
            stats,
        }
    }
}

/// Instance of the disjoint problem: find S' ⊆ V ∖ S with |S'| ≤ k and
/// G ∖ S' free of c-pumpkins, given that G ∖ S already is.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionState {
    pub graph: MultiGraph,
    pub s: VertexSet,
    pub k: usize,
}

impl CompressionState {
    /// cc(G[S]) + k.
    pub fn measure(&self) -> usize {
        self.graph.induced(&self.s).component_count() + self.k
    }
}

fn check_size(g: &MultiGraph, params: &Params) -> Result<()> {
    let n = g.vertex_count();
    if n > params.oracle_limit {
        return Err(PumpkinError::SizeLimit {
            n,
            limit: params.oracle_limit,
        });
    }
    Ok(())
}

fn is_free(g: &MultiGraph, c: u32, budget: u64) -> Result<bool> {
    Ok(has_pumpkin(g, c, budget)?.is_none())
}

fn verify_solution(g: &MultiGraph, c: u32, k: usize, x: &VertexSet, budget: u64) -> Result<()> {
    if x.len() > k || !is_free(&g.without(x), c, budget)? {
        return Err(PumpkinError::Internal(format!(
            "solver returned an invalid hitting set of size {}",
            x.len()
        )));
    }
    Ok(())
}

/// Smallest hitting set of size at most `k_max`, trying subsets in order
/// of size.
pub fn brute_min_hitting(g: &MultiGraph, c: u32, k_max: usize, params: &Params) -> Result<SolveResult> {
    check_size(g, params)?;
    let ids: Vec<VertexId> = g.vertices().collect();
    let n = ids.len();
    let mut stats = SolveStats::default();
    for size in 0..=k_max.min(n) {
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != size {
                continue;
            }
            stats.nodes += 1;
            let x: VertexSet = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| ids[i]).collect();
            if is_free(&g.without(&x), c, params.budget)? {
                return Ok(SolveResult::new("brute", c, k_max, Some(x), stats));
            }
        }
    }
    Ok(SolveResult::new("brute", c, k_max, None, stats))
}

/// A largest packing, by dynamic programming over vertex subsets: the
/// lowest vertex is either unused or lies in a connected set carrying a
/// model.
pub fn brute_max_packing(g: &MultiGraph, c: u32, params: &Params) -> Result<Vec<PumpkinModel>> {
    check_size(g, params)?;
    let ids: Vec<VertexId> = g.vertices().collect();
    let n = ids.len();
    let full = 1usize << n;
    let set_of = |mask: usize| -> VertexSet { (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| ids[i]).collect() };

    let mut by_low: Vec<Vec<usize>> = vec![vec![]; n];
    let mut models: BTreeMap<usize, PumpkinModel> = BTreeMap::new();
    for mask in 1..full {
        if mask.count_ones() < 2 {
            continue;
        }
        let set = set_of(mask);
        if !g.is_connected_set(&set) {
            continue;
        }
        let sub = g.induced(&set);
        if let Some(m) = has_pumpkin(&sub, c, params.budget)? {
            by_low[mask.trailing_zeros() as usize].push(mask);
            models.insert(mask, m);
        }
    }

    let mut best = vec![0usize; full];
    let mut choice = vec![0usize; full];
    for mask in 1..full {
        let low = mask.trailing_zeros() as usize;
        best[mask] = best[mask & (mask - 1)];
        for &s in &by_low[low] {
            if s & mask == s && best[mask ^ s] + 1 > best[mask] {
                best[mask] = best[mask ^ s] + 1;
                choice[mask] = s;
            }
        }
    }
    let mut out = vec![];
    let mut mask = full - 1;
    while mask != 0 {
        let s = choice[mask];
        if s == 0 || best[mask] == best[mask & (mask - 1)] {
            mask &= mask - 1;
        } else {
            out.push(models[&s].clone());
            mask ^= s;
        }
    }
    Ok(out)
}

struct Brancher {
    reducer: Reducer,
    c: u32,
    stats: SolveStats,
}

impl Brancher {
    fn model(&self, h: &MultiGraph) -> Result<Option<PumpkinModel>> {
        let budget = self.reducer.params.budget;
        let Some(any) = has_pumpkin(h, self.c, budget)? else {
            return Ok(None);
        };
        if h.vertex_count() >= 2 {
            if let Ok(r) = find_small_model(h, self.c, &self.reducer.params) {
                if let SmallModelOutcome::Model(m) = r.outcome {
                    return Ok(Some(m));
                }
            }
        }
        Ok(Some(minimize_model(h, &any, self.c)?))
    }

    fn solve(&mut self, g: &MultiGraph, k: usize) -> Result<Option<VertexSet>> {
        self.stats.nodes += 1;
        let (h, trace) = self.reducer.c_reduce(g, self.c)?;
        let Some(m) = self.model(&h)? else {
            return Ok(Some(VertexSet::new()));
        };
        if k == 0 {
            return Ok(None);
        }
        for x in m.vertices() {
            if let Some(mut y) = self.solve(&h.without_vertex(x), k - 1)? {
                y.insert(x);
                return Ok(Some(lift_cover_unchecked(&trace, &y)));
            }
        }
        Ok(None)
    }
}

/// Reduce, then branch on every vertex of a small model.
pub fn branch_cover(g: &MultiGraph, c: u32, k: usize, params: &Params) -> Result<SolveResult> {
    if c == 0 {
        return Err(PumpkinError::Precondition("c must be at least 1".into()));
    }
    let mut b = Brancher {
        reducer: Reducer::new(params.clone()),
        c,
        stats: SolveStats::default(),
    };
    let found = b.solve(g, k)?;
    if let Some(x) = &found {
        verify_solution(g, c, k, x, params.budget)?;
    }
    Ok(SolveResult::new("branch", c, k, found, b.stats))
}

/// Iterative compression over the vertices in ascending id order.
pub fn ic_cover(g: &MultiGraph, c: u32, k: usize, params: &Params) -> Result<SolveResult> {
    if c == 0 {
        return Err(PumpkinError::Precondition("c must be at least 1".into()));
    }
    let order: Vec<VertexId> = g.vertices().collect();
    let mut stats = SolveStats::default();
    if order.len() <= k {
        return Ok(SolveResult::new("ic", c, k, Some(g.vertex_set()), stats));
    }
    let budget = params.budget;
    let mut sol: VertexSet = order[..k].iter().copied().collect();
    let mut prefix = sol.clone();
    for &vi in &order[k..] {
        prefix.insert(vi);
        sol.insert(vi);
        if sol.len() <= k {
            continue;
        }
        let gi = g.induced(&prefix);
        let reference: Vec<VertexId> = sol.iter().copied().collect();
        let mut next = None;
        'guess: for size in 0..=k {
            for mask in 0u32..(1 << reference.len()) {
                if mask.count_ones() as usize != size {
                    continue;
                }
                let keep: VertexSet = (0..reference.len()).filter(|&j| mask >> j & 1 == 1).map(|j| reference[j]).collect();
                let fixed: VertexSet = sol.difference(&keep).copied().collect();
                if !is_free(&gi.induced(&fixed), c, budget)? {
                    continue;
                }
                let st = CompressionState {
                    graph: gi.without(&keep),
                    s: fixed,
                    k: k - size,
                };
                if let Some(z) = disjoint_cover_with(st, c, params, &mut stats)? {
                    let mut s2 = keep;
                    s2.extend(z);
                    next = Some(s2);
                    break 'guess;
                }
            }
        }
        match next {
            Some(s2) => sol = s2,
            None => return Ok(SolveResult::new("ic", c, k, None, stats)),
        }
    }
    verify_solution(g, c, k, &sol, budget)?;
    Ok(SolveResult::new("ic", c, k, Some(sol), stats))
}

/// Exact answer for the disjoint problem.
pub fn disjoint_cover(st: CompressionState, c: u32, params: &Params) -> Result<SolveResult> {
    let mut stats = SolveStats::default();
    let k = st.k;
    if !is_free(&st.graph.without(&st.s), c, params.budget)? {
        return Err(PumpkinError::Precondition("G minus S has a pumpkin minor".into()));
    }
    let found = disjoint_cover_with(st, c, params, &mut stats)?;
    Ok(SolveResult::new("disjoint", c, k, found, stats))
}

fn disjoint_cover_with(st: CompressionState, c: u32, params: &Params, stats: &mut SolveStats) -> Result<Option<VertexSet>> {
    let CompressionState { mut graph, s, mut k } = st;
    stats.nodes += 1;
    let budget = params.budget;
    let mut taken = VertexSet::new();

    loop {
        if let Some(drop) = rule_r1_r2(&graph, &s) {
            graph = graph.without(&drop);
            continue;
        }
        if let Some(drop) = rule_r3(&graph, &s, c, budget)? {
            graph = graph.without(&drop);
            continue;
        }
        if let Some(v) = rule_r4(&graph, &s, c, budget)? {
            if k == 0 {
                return Ok(None);
            }
            stats.r4_applied += 1;
            graph.remove_vertex(v);
            taken.insert(v);
            k -= 1;
            continue;
        }
        break;
    }

    let Some(m) = has_pumpkin(&graph, c, budget)? else {
        return Ok(Some(taken));
    };
    if k == 0 {
        return Ok(None);
    }

    if let Some(path) = rule_b_path(&graph, &s, params.rule_b_len) {
        let before = CompressionState {
            graph: graph.clone(),
            s: s.clone(),
            k,
        }
        .measure();
        let len = path.len();
        let mut subsets: Vec<u32> = (0u32..(1 << len)).collect();
        subsets.sort_by_key(|m| (m.count_ones(), *m));
        for mask in subsets {
            let z: VertexSet = (0..len).filter(|&j| mask >> j & 1 == 1).map(|j| path[j]).collect();
            if z.len() > k {
                continue;
            }
            let mut s2 = s.clone();
            s2.extend(path.iter().filter(|p| !z.contains(p)));
            let child = CompressionState {
                graph: graph.without(&z),
                s: s2,
                k: k - z.len(),
            };
            if child.measure() >= before {
                return Err(PumpkinError::Internal("rule B branch did not decrease the measure".into()));
            }
            stats.rule_b_branches += 1;
            if !is_free(&child.graph.induced(&child.s), c, budget)? {
                continue;
            }
            if let Some(rest) = disjoint_cover_with(child, c, params, stats)? {
                let mut out = taken.clone();
                out.extend(z);
                out.extend(rest);
                return Ok(Some(out));
            }
        }
        return Ok(None);
    }

    let m = minimize_model(&graph, &m, c)?;
    let free: Vec<VertexId> = m.vertices().into_iter().filter(|v| !s.contains(v)).collect();
    for x in free {
        let child = CompressionState {
            graph: graph.without_vertex(x),
            s: s.clone(),
            k: k - 1,
        };
        if let Some(rest) = disjoint_cover_with(child, c, params, stats)? {
            let mut out = taken.clone();
            out.insert(x);
            out.extend(rest);
            return Ok(Some(out));
        }
    }
    Ok(None)
}

/// Neighbors of `set` inside S.
fn s_neighbors(g: &MultiGraph, set: &VertexSet, s: &VertexSet) -> VertexSet {
    set.iter()
        .flat_map(|&x| g.neighbors(x).map(|(w, _)| w))
        .filter(|w| s.contains(w))
        .collect()
}

fn components_avoiding(g: &MultiGraph, blocked: &VertexSet) -> Vec<VertexSet> {
    let rest: VertexSet = g.vertices().filter(|v| !blocked.contains(v)).collect();
    g.induced(&rest).components()
}

/// R1 and R2: a component of G − S, or of G − (S ∪ {v}), with no neighbor
/// in S.
fn rule_r1_r2(g: &MultiGraph, s: &VertexSet) -> Option<VertexSet> {
    for comp in components_avoiding(g, s) {
        if s_neighbors(g, &comp, s).is_empty() {
            return Some(comp);
        }
    }
    for v in g.vertices().filter(|v| !s.contains(v)) {
        let mut blocked = s.clone();
        blocked.insert(v);
        for comp in components_avoiding(g, &blocked) {
            if s_neighbors(g, &comp, s).is_empty() {
                return Some(comp);
            }
        }
    }
    None
}

/// R3: a component of G − S with a single neighbor v in S such that
/// G[C ∪ {v}] is pumpkin-free.
fn rule_r3(g: &MultiGraph, s: &VertexSet, c: u32, budget: u64) -> Result<Option<VertexSet>> {
    for comp in components_avoiding(g, s) {
        let nb = s_neighbors(g, &comp, s);
        if nb.len() == 1 {
            let mut with = comp.clone();
            with.extend(nb);
            if is_free(&g.induced(&with), c, budget)? {
                return Ok(Some(comp));
            }
        }
    }
    Ok(None)
}

/// R4: the lowest v ∉ S having at least c components P of G − (S ∪ {v})
/// next to v, each with a single S-neighbor u_P, G[P ∪ {u_P}] pumpkin-free,
/// and all u_P in one component of G[S].
pub fn rule_r4(g: &MultiGraph, s: &VertexSet, c: u32, budget: u64) -> Result<Option<VertexId>> {
    let s_comp: BTreeMap<VertexId, usize> = g
        .induced(s)
        .components()
        .into_iter()
        .enumerate()
        .flat_map(|(i, comp)| comp.into_iter().map(move |x| (x, i)))
        .collect();
    for v in g.vertices().filter(|v| !s.contains(v)) {
        let mut blocked = s.clone();
        blocked.insert(v);
        let mut groups: BTreeMap<usize, usize> = BTreeMap::new();
        for p in components_avoiding(g, &blocked) {
            if !g.neighbors(v).any(|(w, _)| p.contains(&w)) {
                continue;
            }
            let nb = s_neighbors(g, &p, s);
            if nb.len() != 1 {
                continue;
            }
            let u = *nb.first().unwrap();
            let mut with = p.clone();
            with.insert(u);
            if !is_free(&g.induced(&with), c, budget)? {
                continue;
            }
            let count = groups.entry(s_comp[&u]).or_default();
            *count += 1;
            if *count >= c as usize {
                return Ok(Some(v));
            }
        }
    }
    Ok(None)
}

/// Rule B: a shortest path in G − S of at most `max_len` vertices whose
/// ends see different components of G[S].
fn rule_b_path(g: &MultiGraph, s: &VertexSet, max_len: usize) -> Option<Vec<VertexId>> {
    if max_len == 0 {
        return None;
    }
    let s_comp: BTreeMap<VertexId, usize> = g
        .induced(s)
        .components()
        .into_iter()
        .enumerate()
        .flat_map(|(i, comp)| comp.into_iter().map(move |x| (x, i)))
        .collect();
    let touches = |x: VertexId| -> Vec<usize> {
        let mut out: Vec<usize> = g.neighbors(x).filter_map(|(w, _)| s_comp.get(&w).copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    };
    let outside: VertexSet = g.vertices().filter(|v| !s.contains(v)).collect();
    let mut best: Option<Vec<VertexId>> = None;
    for &x in &outside {
        let tx = touches(x);
        if tx.is_empty() {
            continue;
        }
        let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        let mut depth = BTreeMap::from([(x, 1usize)]);
        let mut queue = VecDeque::from([x]);
        while let Some(y) = queue.pop_front() {
            let d = depth[&y];
            if best.as_ref().is_some_and(|b| d >= b.len()) {
                break;
            }
            let ty = touches(y);
            let split = if x == y { ty.len() >= 2 } else { ty.iter().any(|&a| tx.iter().any(|&b| a != b)) };
            if split {
                let mut path = vec![y];
                while let Some(&p) = parent.get(path.last().unwrap()) {
                    path.push(p);
                }
                path.reverse();
                best = Some(path);
                break;
            }
            if d == max_len {
                continue;
            }
            for (w, _) in g.neighbors(y) {
                if outside.contains(&w) && !depth.contains_key(&w) {
                    depth.insert(w, d + 1);
                    parent.insert(w, y);
                    queue.push_back(w);
                }
            }
        }
    }
    best
}
