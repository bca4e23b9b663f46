//! Rules Z1 and Z2 with a replayable trace, and lifting of covers and
//! packings from a reduced graph back to the original.

use crate::config::Params;
use crate::detect::{self, gamma_graph};
use crate::error::{PumpkinError, Result};
use crate::graph::{minimize_model, verify_model, verify_packing, MultiGraph, PumpkinModel, VertexId, VertexSet};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// A triple (C, u, v): C is a component of G∖{u, v} with at least two
/// vertices, and both u and v have a neighbor in C.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Outgrowth {
    pub component: VertexSet,
    pub u: VertexId,
    pub v: VertexId,
}

impl Outgrowth {
    pub fn new(component: VertexSet, u: VertexId, v: VertexId) -> Self {
        Outgrowth { component, u, v }
    }

    pub fn validate(&self, g: &MultiGraph) -> Result<()> {
        let bad = |msg: &str| Err(PumpkinError::InvalidOutgrowth(msg.to_string()));
        if self.u == self.v {
            return bad("u and v coincide");
        }
        if !g.contains(self.u) || !g.contains(self.v) {
            return bad("u or v is not in the graph");
        }
        if self.component.len() < 2 {
            return bad("component has fewer than two vertices");
        }
        if self.component.contains(&self.u) || self.component.contains(&self.v) {
            return bad("component contains u or v");
        }
        let first = *self.component.first().unwrap();
        if !g.contains(first) {
            return bad("component vertex missing from the graph");
        }
        let (u, v) = (self.u, self.v);
        if g.reach(first, |w| w != u && w != v) != self.component {
            return bad("not a connected component of G minus {u, v}");
        }
        for x in [u, v] {
            if !g.neighbors(x).any(|(w, _)| self.component.contains(&w)) {
                return bad("u or v has no neighbor in the component");
            }
        }
        Ok(())
    }
}

/// All outgrowths, by (u, v) with u < v and then by component.
pub fn enumerate_outgrowths(g: &MultiGraph) -> Vec<Outgrowth> {
    let vs: Vec<VertexId> = g.vertices().collect();
    let mut out = vec![];
    for (i, &u) in vs.iter().enumerate() {
        for &v in &vs[i + 1..] {
            let mut seen = VertexSet::from([u, v]);
            for &s in &vs {
                if seen.contains(&s) {
                    continue;
                }
                let comp = g.reach(s, |w| w != u && w != v);
                seen.extend(comp.iter().copied());
                if comp.len() < 2 {
                    continue;
                }
                let touches = |x: VertexId| g.neighbors(x).any(|(w, _)| comp.contains(&w));
                if touches(u) && touches(v) {
                    out.push(Outgrowth::new(comp, u, v));
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Z1,
    Z2Merge,
    Z2NewVertex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub kind: StepKind,
    pub deleted: VertexSet,
    pub u: Option<VertexId>,
    pub v: Option<VertexId>,
    pub gamma: Option<u32>,
    pub lambda: Option<u32>,
    pub new_vertex: Option<VertexId>,
    /// γ-model of Γ with u ∈ A, v ∈ B.
    pub gamma_witness: Option<PumpkinModel>,
    /// λ-model of Λ with u, v ∈ A.
    pub lambda_witness: Option<PumpkinModel>,
}

impl TraceStep {
    pub fn z1(v: VertexId) -> Self {
        TraceStep {
            kind: StepKind::Z1,
            deleted: VertexSet::from([v]),
            u: None,
            v: None,
            gamma: None,
            lambda: None,
            new_vertex: None,
            gamma_witness: None,
            lambda_witness: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedCandidate {
    pub u: VertexId,
    pub v: VertexId,
    pub component: VertexSet,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub c: u32,
    pub steps: Vec<TraceStep>,
    /// `snapshots[i]` is the graph before `steps[i]`.
    pub snapshots: Vec<MultiGraph>,
    pub reduced: MultiGraph,
    pub skipped: Vec<SkippedCandidate>,
}

impl ReductionTrace {
    pub fn empty(g: &MultiGraph, c: u32) -> Self {
        ReductionTrace {
            c,
            steps: vec![],
            snapshots: vec![],
            reduced: g.clone(),
            skipped: vec![],
        }
    }

    pub fn original(&self) -> &MultiGraph {
        self.snapshots.first().unwrap_or(&self.reduced)
    }

    fn push(&mut self, before: MultiGraph, step: TraceStep, after: MultiGraph) {
        self.snapshots.push(before);
        self.steps.push(step);
        self.reduced = after;
    }

    /// Replays every step on the original graph.
    pub fn replay(&self) -> Result<MultiGraph> {
        let mut g = self.original().clone();
        for step in &self.steps {
            g = replay_step(&g, step)?;
        }
        Ok(g)
    }
}

fn replay_step(g: &MultiGraph, step: &TraceStep) -> Result<MultiGraph> {
    let mut h = g.without(&step.deleted);
    match step.kind {
        StepKind::Z1 => {}
        StepKind::Z2Merge => {
            h.add_edge(step.u.unwrap(), step.v.unwrap(), step.gamma.unwrap())?;
        }
        StepKind::Z2NewVertex => {
            let w = step.new_vertex.unwrap();
            if w.0 != h.generation() {
                return Err(PumpkinError::Internal(format!("new vertex {w} out of sequence")));
            }
            let x = h.add_vertex();
            h.add_edge(x, step.u.unwrap(), step.gamma.unwrap())?;
            h.add_edge(x, step.v.unwrap(), step.lambda.unwrap() - step.gamma.unwrap())?;
        }
    }
    Ok(h)
}

type GraphKey = (Vec<VertexId>, Vec<(VertexId, VertexId, u32)>);

fn key_of(g: &MultiGraph) -> GraphKey {
    (g.vertices().collect(), g.edges().collect())
}

/// Remembers detection verdicts on subgraphs across reduction steps.
#[derive(Default)]
pub struct Reducer {
    pub params: Params,
    block_free: BTreeMap<GraphKey, bool>,
    z2_verdict: BTreeMap<(VertexId, VertexId, GraphKey), Z2Verdict>,
    noted: BTreeSet<(VertexId, VertexId, VertexSet)>,
}

#[derive(Clone)]
enum Z2Verdict {
    NotFree,
    Skip(String),
    Ready(u32, PumpkinModel, u32, PumpkinModel),
}

impl Reducer {
    pub fn new(params: Params) -> Self {
        Reducer {
            params,
            ..Default::default()
        }
    }

    fn block_is_free(&mut self, g: &MultiGraph, block: &VertexSet, c: u32) -> Result<bool> {
        let h = g.induced(block);
        let key = key_of(&h);
        if let Some(&b) = self.block_free.get(&key) {
            return Ok(b);
        }
        let free = detect::is_pumpkin_free(&h, c, self.params.budget)?;
        self.block_free.insert(key, free);
        Ok(free)
    }

    /// Lowest vertex all of whose blocks are c-pumpkin-free.
    pub fn find_z1(&mut self, g: &MultiGraph, c: u32) -> Result<Option<VertexId>> {
        let mut bad = VertexSet::new();
        for block in g.blocks() {
            if !self.block_is_free(g, &block, c)? {
                bad.extend(block);
            }
        }
        Ok(g.vertices().find(|v| !bad.contains(v)))
    }

    fn z2_verdict(&mut self, g: &MultiGraph, og: &Outgrowth, c: u32) -> Z2Verdict {
        let gam = gamma_graph(g, og);
        let key = (og.u, og.v, key_of(&gam));
        if let Some(v) = self.z2_verdict.get(&key) {
            return v.clone();
        }
        let budget = self.params.budget;
        let verdict = if og.component.len() > self.params.z2_component_cap {
            Z2Verdict::Skip(format!(
                "component of {} vertices is above the cap {}",
                og.component.len(),
                self.params.z2_component_cap
            ))
        } else {
            let run = || -> Result<Z2Verdict> {
                if !detect::is_pumpkin_free(&gam, c, budget)? {
                    return Ok(Z2Verdict::NotFree);
                }
                let (gv, gw) = detect::gamma(g, og, budget)?;
                let (lv, lw) = detect::lambda(g, og, budget)?;
                Ok(Z2Verdict::Ready(gv, gw, lv, lw))
            };
            match run() {
                Ok(v) => v,
                Err(e) if e.is_budget() => Z2Verdict::Skip(e.to_string()),
                Err(e) => Z2Verdict::Skip(format!("unexpected: {e}")),
            }
        };
        self.z2_verdict.insert(key, verdict.clone());
        verdict
    }

    /// Applies one reduction to `g` if any applies: Z1 first, then Z2 on the
    /// smallest component. Skipped Z2 candidates are noted in `skipped`.
    pub fn step(
        &mut self,
        g: &MultiGraph,
        c: u32,
        skipped: &mut Vec<SkippedCandidate>,
    ) -> Result<Option<(MultiGraph, TraceStep)>> {
        if let Some(v) = self.find_z1(g, c)? {
            return Ok(Some((g.without_vertex(v), TraceStep::z1(v))));
        }
        let mut cands = enumerate_outgrowths(g);
        cands.sort_by(|a, b| (a.component.len(), a.u, a.v).cmp(&(b.component.len(), b.u, b.v)));
        for og in cands {
            match self.z2_verdict(g, &og, c) {
                Z2Verdict::NotFree => {}
                Z2Verdict::Skip(reason) => {
                    if self.noted.insert((og.u, og.v, og.component.clone())) {
                        skipped.push(SkippedCandidate {
                            u: og.u,
                            v: og.v,
                            component: og.component.clone(),
                            reason,
                        });
                    }
                }
                Z2Verdict::Ready(gv, gw, lv, lw) => {
                    return Ok(Some(build_z2(g, &og, gv, gw, lv, lw)?));
                }
            }
        }
        Ok(None)
    }

    pub fn c_reduce(&mut self, g: &MultiGraph, c: u32) -> Result<(MultiGraph, ReductionTrace)> {
        if c == 0 {
            return Err(PumpkinError::Precondition("c must be at least 1".into()));
        }
        let mut trace = ReductionTrace::empty(g, c);
        let mut cur = g.clone();
        let mut skipped = vec![];
        while let Some((next, step)) = self.step(&cur, c, &mut skipped)? {
            trace.push(cur, step, next.clone());
            cur = next;
        }
        trace.skipped = skipped;
        Ok((cur, trace))
    }

    /// Rule Z2 with every precondition checked.
    pub fn apply_z2(&mut self, g: &MultiGraph, og: &Outgrowth, c: u32) -> Result<(MultiGraph, TraceStep)> {
        og.validate(g)?;
        if let Some(v) = self.find_z1(g, c)? {
            return Err(PumpkinError::Precondition(format!("Z1 still applies at vertex {v}")));
        }
        let gam = gamma_graph(g, og);
        if !detect::is_pumpkin_free(&gam, c, self.params.budget)? {
            return Err(PumpkinError::Precondition(format!("Γ has a {c}-pumpkin minor")));
        }
        let (gv, gw) = detect::gamma(g, og, self.params.budget)?;
        let (lv, lw) = detect::lambda(g, og, self.params.budget)?;
        build_z2(g, og, gv, gw, lv, lw)
    }
}

fn build_z2(
    g: &MultiGraph,
    og: &Outgrowth,
    gv: u32,
    gw: PumpkinModel,
    lv: u32,
    lw: PumpkinModel,
) -> Result<(MultiGraph, TraceStep)> {
    let mut h = g.without(&og.component);
    let mut step = TraceStep {
        kind: StepKind::Z2Merge,
        deleted: og.component.clone(),
        u: Some(og.u),
        v: Some(og.v),
        gamma: Some(gv),
        lambda: Some(lv),
        new_vertex: None,
        gamma_witness: Some(gw),
        lambda_witness: Some(lw),
    };
    if lv <= gv {
        h.add_edge(og.u, og.v, gv)?;
    } else {
        let w = h.add_vertex();
        h.add_edge(w, og.u, gv)?;
        h.add_edge(w, og.v, lv - gv)?;
        step.kind = StepKind::Z2NewVertex;
        step.new_vertex = Some(w);
    }
    Ok((h, step))
}

pub fn find_z1(g: &MultiGraph, c: u32, params: &Params) -> Result<Option<VertexId>> {
    Reducer::new(params.clone()).find_z1(g, c)
}

pub fn apply_z2(g: &MultiGraph, og: &Outgrowth, c: u32, params: &Params) -> Result<(MultiGraph, TraceStep)> {
    Reducer::new(params.clone()).apply_z2(g, og, c)
}

pub fn c_reduce(g: &MultiGraph, c: u32, params: &Params) -> Result<(MultiGraph, ReductionTrace)> {
    Reducer::new(params.clone()).c_reduce(g, c)
}

fn check_cover(g: &MultiGraph, x: &VertexSet, c: u32, budget: u64) -> Result<()> {
    if detect::has_pumpkin(&g.without(x), c, budget)?.is_some() {
        return Err(PumpkinError::NotAHittingSet { c });
    }
    Ok(())
}

/// Pulls a cover of the reduced graph back through the trace, checking
/// both ends.
pub fn lift_cover(trace: &ReductionTrace, x: &VertexSet, budget: u64) -> Result<VertexSet> {
    check_cover(&trace.reduced, x, trace.c, budget)?;
    let out = lift_cover_unchecked(trace, x);
    check_cover(trace.original(), &out, trace.c, budget)
        .map_err(|e| PumpkinError::Internal(format!("lifted cover: {e}")))?;
    Ok(out)
}

/// Z1 and Z2-merge steps pass the set through; a new vertex v_C is swapped
/// for the lower of u, v.
pub fn lift_cover_unchecked(trace: &ReductionTrace, x: &VertexSet) -> VertexSet {
    let mut x = x.clone();
    for step in trace.steps.iter().rev() {
        lift_cover_step(step, &mut x);
    }
    x
}

pub fn lift_cover_step(step: &TraceStep, x: &mut VertexSet) {
    if let Some(w) = step.new_vertex {
        if x.remove(&w) {
            x.insert(step.u.unwrap().min(step.v.unwrap()));
        }
    }
}

pub fn lift_packing(trace: &ReductionTrace, pk: &[PumpkinModel]) -> Result<Vec<PumpkinModel>> {
    verify_packing(&trace.reduced, pk, trace.c)?;
    let mut cur = pk.to_vec();
    for (i, step) in trace.steps.iter().enumerate().rev() {
        let after = trace.snapshots.get(i + 1).unwrap_or(&trace.reduced);
        cur = lift_packing_step(&trace.snapshots[i], after, step, &cur, trace.c)?;
    }
    verify_packing(trace.original(), &cur, trace.c)
        .map_err(|e| PumpkinError::Internal(format!("lifted packing: {e}")))?;
    Ok(cur)
}

/// Rebuilds a packing of `after` as a packing of `before` of the same size.
pub fn lift_packing_step(
    before: &MultiGraph,
    after: &MultiGraph,
    step: &TraceStep,
    pk: &[PumpkinModel],
    c: u32,
) -> Result<Vec<PumpkinModel>> {
    if step.kind == StepKind::Z1 {
        return Ok(pk.to_vec());
    }
    let (u, v) = (step.u.unwrap(), step.v.unwrap());
    let gw = step.gamma_witness.as_ref().unwrap();
    let lw = step.lambda_witness.as_ref().unwrap();
    let comp = &step.deleted;
    let mut out = Vec::with_capacity(pk.len());
    for m in pk {
        let m = minimize_model(after, m, c)?;
        if !(m.contains(u) && m.contains(v)) {
            if step.new_vertex.is_some_and(|w| m.contains(w)) {
                return Err(PumpkinError::Internal("minimal model holds v_C without u and v".into()));
            }
            out.push(PumpkinModel::from_sides(before, m.side_a, m.side_b));
            continue;
        }
        let m = m.oriented_towards(u);
        let together = m.side_a.contains(&v);
        let (a, b) = match (step.kind, step.new_vertex) {
            (StepKind::Z2Merge, _) if together => (m.side_a.union(comp).copied().collect(), m.side_b),
            (StepKind::Z2NewVertex, Some(w)) if together && !m.side_b.contains(&w) => {
                let mut a: VertexSet = m.side_a.union(comp).copied().collect();
                a.remove(&w);
                (a, m.side_b)
            }
            (StepKind::Z2NewVertex, Some(_)) if together => {
                // B = {v_C}: swap it for the λ-witness
                let a = m.side_a.union(&lw.side_a).copied().collect();
                (a, lw.side_b.clone())
            }
            _ => {
                // u ∈ A, v ∈ B: route through the γ-witness
                let mut a: VertexSet = m.side_a.union(&gw.side_a).copied().collect();
                let mut b: VertexSet = m.side_b.union(&gw.side_b).copied().collect();
                if let Some(w) = step.new_vertex {
                    a.remove(&w);
                    b.remove(&w);
                }
                (a, b)
            }
        };
        let rebuilt = PumpkinModel::from_sides(before, a, b);
        verify_model(before, &rebuilt, c)
            .map_err(|d| PumpkinError::Internal(format!("rebuilt model through {u}-{v}: {d}")))?;
        out.push(rebuilt);
    }
    Ok(out)
}
