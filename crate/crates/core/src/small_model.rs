//! Small pumpkin models in reduced graphs. The graph is split into
//! high-degree vertices W, long shortest paths 𝒫 and small leftover
//! components 𝒞; a fixed cascade of cases then either finds a model of
//! size O(log n) or names a reduction that still applies.

use crate::config::{log2_clamped, Params};
use crate::detect::{gamma_graph, has_pumpkin};
use crate::error::{PumpkinError, Result};
use crate::graph::{lift_model_at, minimize_model, verify_model, ContractionMap, MultiGraph, PumpkinModel, VertexId, VertexSet};
use crate::hedgehog::{rooted_or_cutset, Hedgehog, HedgehogCase, HedgehogOutcome};
use crate::reduce::Outgrowth;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkeletonDecomposition {
    /// Vertices of degree at least k.
    pub high: VertexSet,
    /// Induced paths of exactly r vertices, in extraction order.
    pub paths: Vec<Vec<VertexId>>,
    /// Components of what is left, ordered by smallest vertex.
    pub rest: Vec<VertexSet>,
    pub k: usize,
    pub r: usize,
}

/// A reduction the cascade found still applicable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suggestion {
    Z1(VertexId),
    Z2(Outgrowth),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmallModelOutcome {
    Model(PumpkinModel),
    Suggestion(Suggestion),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmallModelCase {
    Multiplicity,
    InsideComponent,
    Isolated,
    Pendant,
    ContractedMultiplicity,
    Hedgehog,
    DenseMinor,
    Fallback,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallModelDiagnostics {
    pub n: usize,
    pub c: u32,
    pub high: usize,
    pub paths: usize,
    pub components: usize,
    pub largest_component: usize,
    pub bad_components: usize,
    pub longest_black_run: usize,
    pub case: SmallModelCase,
    pub hedgehog: Option<HedgehogCase>,
    pub hedgehog_fallback: bool,
    /// Why earlier cases were passed over on the way to a fallback.
    pub notes: Vec<String>,
    pub model_size: Option<usize>,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallModelResult {
    pub outcome: SmallModelOutcome,
    pub diagnostics: SmallModelDiagnostics,
}

/// W, then shortest paths on r vertices while some component of G − W has
/// diameter at least r − 1, then the remaining components.
pub fn build_skeleton(g: &MultiGraph, c: u32, params: &Params) -> SkeletonDecomposition {
    let (k, r) = (params.k(c), params.r(c));
    let high: VertexSet = g.vertices().filter(|&v| g.degree(v) >= k as u64).collect();
    let mut left: VertexSet = g.vertices().filter(|v| !high.contains(v)).collect();
    let mut paths = vec![];
    'outer: loop {
        for s in left.clone() {
            let dist = g.distances_within(s, &left);
            if let Some((&t, _)) = dist.iter().find(|(_, &d)| d == r - 1) {
                let path = g.shortest_path_within(s, t, &left).expect("t was reached");
                for p in &path {
                    left.remove(p);
                }
                paths.push(path);
                continue 'outer;
            }
        }
        break;
    }
    let rest = g.induced(&left).components();
    SkeletonDecomposition { high, paths, rest, k, r }
}

/// Greedy model around a high-degree vertex x: A = {x}, B a BFS tree in
/// G − x through c neighbors of x. Falls back to exhaustive search on BFS
/// balls of growing radius.
pub fn dense_small_minor(g: &MultiGraph, c: u32, size_budget: usize, budget: u64) -> Result<PumpkinModel> {
    if c == 0 {
        return Err(PumpkinError::Precondition("c must be at least 1".into()));
    }
    let mut order: Vec<VertexId> = g.vertices().collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.simple_degree(v)), v));
    let mut best: Option<PumpkinModel> = None;
    for &x in &order {
        if g.simple_degree(x) < c as usize && g.degree(x) < c as u64 {
            break;
        }
        if let Some(m) = greedy_at(g, x, c) {
            if best.as_ref().is_none_or(|b| m.size() < b.size()) {
                best = Some(m);
            }
            if best.as_ref().unwrap().size() <= size_budget {
                break;
            }
        }
    }
    if let Some(m) = best.filter(|m| m.size() <= size_budget) {
        return Ok(m);
    }
    if let Some(&centre) = order.first() {
        let all = g.vertex_set();
        let dist = g.distances_within(centre, &all);
        let ecc = dist.values().copied().max().unwrap_or(0);
        for radius in 1..=ecc {
            let ball: VertexSet = dist.iter().filter(|(_, &d)| d <= radius).map(|(&v, _)| v).collect();
            let h = g.induced(&ball);
            if let Some(m) = has_pumpkin(&h, c, budget)? {
                let m = minimize_model(g, &m, c)?;
                if m.size() <= size_budget {
                    return Ok(m);
                }
            }
        }
    }
    Err(PumpkinError::SizeBound {
        size: 0,
        bound: size_budget as f64,
        diagnostics: format!("no {c}-pumpkin model within {size_budget} vertices found"),
    })
}

fn greedy_at(g: &MultiGraph, x: VertexId, c: u32) -> Option<PumpkinModel> {
    let nbrs: VertexSet = g.neighbors(x).map(|(w, _)| w).collect();
    let &root = nbrs.first()?;
    let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut seen = VertexSet::from([root, x]);
    let mut queue = VecDeque::from([root]);
    let mut picked = vec![];
    let mut cross = 0u64;
    while let Some(y) = queue.pop_front() {
        if nbrs.contains(&y) {
            picked.push(y);
            cross += g.multiplicity(x, y) as u64;
            if cross >= c as u64 {
                break;
            }
        }
        for (w, _) in g.neighbors(y) {
            if seen.insert(w) {
                parent.insert(w, y);
                queue.push_back(w);
            }
        }
    }
    if cross < c as u64 {
        return None;
    }
    let mut side_b = VertexSet::new();
    for y in picked {
        let mut cur = y;
        while side_b.insert(cur) {
            match parent.get(&cur) {
                Some(&p) => cur = p,
                None => break,
            }
        }
    }
    let m = PumpkinModel::from_sides(g, VertexSet::from([x]), side_b);
    verify_model(g, &m, c).ok().map(|_| m)
}

struct Cascade<'a> {
    g: &'a MultiGraph,
    c: u32,
    params: &'a Params,
    diag: SmallModelDiagnostics,
}

/// A c-pumpkin model of size at most f_eff·log₂ n, or a reduction that
/// still applies.
pub fn find_small_model(g: &MultiGraph, c: u32, params: &Params) -> Result<SmallModelResult> {
    if c == 0 {
        return Err(PumpkinError::Precondition("c must be at least 1".into()));
    }
    if g.vertex_count() < 2 {
        return Err(PumpkinError::Precondition("graph has fewer than two vertices".into()));
    }
    let n = g.vertex_count();
    let bound = params.f_eff(c) * log2_clamped(n);
    let mut run = Cascade {
        g,
        c,
        params,
        diag: SmallModelDiagnostics {
            n,
            c,
            high: 0,
            paths: 0,
            components: 0,
            largest_component: 0,
            bad_components: 0,
            longest_black_run: 0,
            case: SmallModelCase::Fallback,
            hedgehog: None,
            hedgehog_fallback: false,
            notes: vec![],
            model_size: None,
            bound,
        },
    };
    let found = run.cascade()?;
    let (outcome, case) = match found {
        Some(x) => x,
        None => {
            let m = has_pumpkin(g, c, params.budget)?
                .ok_or_else(|| PumpkinError::Precondition(format!("graph has no {c}-pumpkin minor")))?;
            (SmallModelOutcome::Model(minimize_model(g, &m, c)?), SmallModelCase::Fallback)
        }
    };
    let mut diag = run.diag;
    diag.case = case;
    if let SmallModelOutcome::Model(m) = &outcome {
        verify_model(g, m, c).map_err(|d| PumpkinError::Internal(format!("small model: {d}")))?;
        diag.model_size = Some(m.size());
        if m.size() as f64 > bound {
            return Err(PumpkinError::SizeBound {
                size: m.size(),
                bound,
                diagnostics: serde_json::to_string(&diag).unwrap_or_default(),
            });
        }
    }
    Ok(SmallModelResult { outcome, diagnostics: diag })
}

type Found = Option<(SmallModelOutcome, SmallModelCase)>;

impl Cascade<'_> {
    fn model(&self, m: &PumpkinModel, case: SmallModelCase) -> Result<Found> {
        Ok(Some((SmallModelOutcome::Model(minimize_model(self.g, m, self.c)?), case)))
    }

    fn cascade(&mut self) -> Result<Found> {
        let (g, c, budget) = (self.g, self.c, self.params.budget);

        if let Some((u, v, _)) = g.edges().filter(|e| e.2 >= c).max_by_key(|&(u, v, m)| (m, std::cmp::Reverse((u, v)))) {
            let m = PumpkinModel::from_sides(g, VertexSet::from([u]), VertexSet::from([v]));
            return Ok(Some((SmallModelOutcome::Model(m), SmallModelCase::Multiplicity)));
        }

        let sk = build_skeleton(g, c, self.params);
        self.diag.high = sk.high.len();
        self.diag.paths = sk.paths.len();
        self.diag.components = sk.rest.len();
        self.diag.largest_component = sk.rest.iter().map(|x| x.len()).max().unwrap_or(0);

        for comp in &sk.rest {
            if let Some(m) = has_pumpkin(&g.induced(comp), c, budget)? {
                return self.model(&m, SmallModelCase::InsideComponent);
            }
        }

        // J: each leftover component against its outside neighbors
        let outside: Vec<VertexSet> = sk
            .rest
            .iter()
            .map(|comp| {
                comp.iter()
                    .flat_map(|&x| g.neighbors(x).map(|(w, _)| w))
                    .filter(|w| !comp.contains(w))
                    .collect()
            })
            .collect();
        for (comp, nb) in sk.rest.iter().zip(&outside) {
            match nb.len() {
                0 => {
                    let v = *comp.first().unwrap();
                    return Ok(Some((SmallModelOutcome::Suggestion(Suggestion::Z1(v)), SmallModelCase::Isolated)));
                }
                1 => {
                    let v = *comp.first().unwrap();
                    let mut region = comp.clone();
                    region.extend(nb);
                    let sub = g.induced(&region);
                    for block in sub.blocks().into_iter().filter(|b| b.contains(&v)) {
                        if let Some(m) = has_pumpkin(&g.induced(&block), c, budget)? {
                            return self.model(&m, SmallModelCase::Pendant);
                        }
                    }
                    return Ok(Some((SmallModelOutcome::Suggestion(Suggestion::Z1(v)), SmallModelCase::Pendant)));
                }
                _ => {}
            }
        }

        // K: contract paths as well
        let mut bags: Vec<VertexSet> = sk.rest.clone();
        bags.extend(sk.paths.iter().map(|p| p.iter().copied().collect::<VertexSet>()));
        let (kg, km) = ContractionMap::contract(g, &bags)?;
        if let Some((x, y, _)) = kg.edges().filter(|e| e.2 >= c).max_by_key(|&(x, y, m)| (m, std::cmp::Reverse((x, y)))) {
            let m = PumpkinModel::from_sides(g, km.bags[&x].clone(), km.bags[&y].clone());
            return self.model(&m, SmallModelCase::ContractedMultiplicity);
        }
        let rep = |comp: &VertexSet| *comp.first().unwrap();
        let bad: Vec<bool> = sk.rest.iter().map(|comp| kg.simple_degree(rep(comp)) == 1).collect();
        self.diag.bad_components = bad.iter().filter(|&&b| b).count();

        if let Some(found) = self.hedgehog_case(&sk, &bad)? {
            return Ok(Some(found));
        }
        self.dense_case(&sk, &kg, &bad)
    }

    fn hedgehog_case(&mut self, sk: &SkeletonDecomposition, bad: &[bool]) -> Result<Found> {
        let (g, c, params) = (self.g, self.c, self.params);
        let threshold = params.hedgehog_rule.threshold(c);
        let mut owner: BTreeMap<VertexId, usize> = BTreeMap::new();
        for (i, comp) in sk.rest.iter().enumerate() {
            for &x in comp {
                owner.insert(x, i);
            }
        }
        for path in &sk.paths {
            let on_path: VertexSet = path.iter().copied().collect();
            let black: Vec<bool> = path
                .iter()
                .map(|&p| {
                    g.neighbors(p)
                        .filter(|(w, _)| !on_path.contains(w))
                        .all(|(w, _)| owner.get(&w).is_some_and(|&i| bad[i]))
                })
                .collect();
            let mut start = 0;
            while start < path.len() {
                if !black[start] {
                    start += 1;
                    continue;
                }
                let mut end = start;
                while end + 1 < path.len() && black[end + 1] {
                    end += 1;
                }
                let len = end - start + 1;
                self.diag.longest_black_run = self.diag.longest_black_run.max(len);
                if len as u64 >= threshold && len >= 2 {
                    if let Some(found) = self.on_black_run(path, start, end, &owner, sk)? {
                        return Ok(Some(found));
                    }
                }
                start = end + 1;
            }
        }
        Ok(None)
    }

    fn on_black_run(
        &mut self,
        path: &[VertexId],
        qs: usize,
        qe: usize,
        owner: &BTreeMap<VertexId, usize>,
        sk: &SkeletonDecomposition,
    ) -> Result<Found> {
        let (g, c, params) = (self.g, self.c, self.params);
        let mut attached: Vec<usize> = path[qs + 1..qe]
            .iter()
            .flat_map(|&p| g.neighbors(p).filter_map(|(w, _)| owner.get(&w).copied()))
            .collect();
        attached.sort_unstable();
        attached.dedup();
        let mut region: VertexSet = path.iter().copied().collect();
        let mut bags: Vec<VertexSet> = vec![path[..=qs].iter().copied().collect(), path[qe..].iter().copied().collect()];
        for &i in &attached {
            region.extend(&sk.rest[i]);
            bags.push(sk.rest[i].clone());
        }
        let gstar = g.induced(&region);
        let (h, cm) = ContractionMap::contract(&gstar, &bags)?;
        let mut q = vec![*bags[0].first().unwrap()];
        q.extend_from_slice(&path[qs + 1..qe]);
        q.push(*bags[1].first().unwrap());
        let hh = Hedgehog::new(h, q).map_err(|e| PumpkinError::Internal(format!("hedgehog construction: {e}")))?;
        let report = rooted_or_cutset(&hh, c, params.hedgehog_rule, params.budget)?;
        self.diag.hedgehog = Some(report.case);
        self.diag.hedgehog_fallback = report.fallback;
        match report.outcome {
            HedgehogOutcome::Rooted(m) => {
                let lifted = lift_model_at(&gstar, &cm, &m, c, cm.max_diameter())?;
                self.model(&lifted, SmallModelCase::Hedgehog)
            }
            HedgehogOutcome::BadCutset { u, v, component } => {
                let z: VertexSet = component.iter().flat_map(|x| cm.bags[x].iter().copied()).collect();
                let og = Outgrowth::new(z, u, v);
                og.validate(g)
                    .map_err(|e| PumpkinError::Internal(format!("bad cutset does not give an outgrowth: {e}")))?;
                match has_pumpkin(&gamma_graph(g, &og), c, params.budget)? {
                    Some(m) => self.model(&m, SmallModelCase::Hedgehog),
                    None => Ok(Some((SmallModelOutcome::Suggestion(Suggestion::Z2(og)), SmallModelCase::Hedgehog))),
                }
            }
            HedgehogOutcome::Neither => {
                self.diag.notes.push(format!("hedgehog on {} path vertices gave neither outcome", qe - qs + 1));
                Ok(None)
            }
        }
    }

    fn dense_case(&mut self, sk: &SkeletonDecomposition, kg: &MultiGraph, bad: &[bool]) -> Result<Found> {
        let (g, c, params) = (self.g, self.c, self.params);
        let mut bag_of: BTreeMap<VertexId, VertexSet> = BTreeMap::new();
        for &w in &sk.high {
            bag_of.insert(w, VertexSet::from([w]));
        }
        for p in &sk.paths {
            bag_of.insert(*p.iter().min().unwrap(), p.iter().copied().collect());
        }
        let mut path_rep: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for p in &sk.paths {
            let r = *p.iter().min().unwrap();
            for &x in p {
                path_rep.insert(x, r);
            }
        }
        for (comp, &is_bad) in sk.rest.iter().zip(bad) {
            if is_bad {
                continue;
            }
            let Some(target) = kg.neighbors(*comp.first().unwrap()).map(|(w, _)| w).min() else {
                continue;
            };
            // K-vertices for paths are named by the path's smallest vertex
            let key = path_rep.get(&target).copied().unwrap_or(target);
            match bag_of.get_mut(&key) {
                Some(b) => b.extend(comp),
                None => {
                    self.diag.notes.push(format!("component at {} has no W or path neighbor", comp.first().unwrap()));
                    return Ok(None);
                }
            }
        }
        let region: VertexSet = bag_of.values().flatten().copied().collect();
        if bag_of.len() < 2 {
            self.diag.notes.push("contracted graph has fewer than two vertices".into());
            return Ok(None);
        }
        let sub = g.induced(&region);
        let bags: Vec<VertexSet> = bag_of.values().cloned().collect();
        let (l, cm) = match ContractionMap::contract(&sub, &bags) {
            Ok(x) => x,
            Err(e) => {
                self.diag.notes.push(format!("contracted graph: {e}"));
                return Ok(None);
            }
        };
        if let Some((x, y, _)) = l.edges().filter(|e| e.2 >= c).max_by_key(|&(x, y, m)| (m, std::cmp::Reverse((x, y)))) {
            let m = PumpkinModel::from_sides(g, cm.bags[&x].clone(), cm.bags[&y].clone());
            return self.model(&m, SmallModelCase::DenseMinor);
        }
        let mut simple = MultiGraph::new();
        for v in l.vertices() {
            simple.insert_vertex(v);
        }
        for (x, y, _) in l.edges() {
            simple.add_edge(x, y, 1)?;
        }
        match dense_small_minor(&simple, c, params.dense_budget(l.vertex_count()), params.budget) {
            Ok(m) => {
                let m = PumpkinModel::from_sides(&l, m.side_a, m.side_b);
                let lifted = lift_model_at(&sub, &cm, &m, c, cm.max_diameter())?;
                self.model(&lifted, SmallModelCase::DenseMinor)
            }
            Err(e) if matches!(e, PumpkinError::SizeBound { .. }) || e.is_budget() => {
                self.diag.notes.push(format!("dense minor: {e}"));
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}
