//! Hedgehogs: an induced multipath P plus a stable set of outside vertices,
//! each with at least two neighbors on P. A large enough hedgehog has a
//! model with one path endpoint on each side, or two internal path
//! vertices that cut off a piece avoiding both endpoints.

use crate::config::{full_threshold, ThresholdRule};
use crate::detect::{max_pumpkin, AnchoredQuery};
use crate::error::{PumpkinError, Result};
use crate::graph::{verify_model, MultiGraph, PumpkinModel, VertexId, VertexSet};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hedgehog {
    pub graph: MultiGraph,
    pub path: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HedgehogOutcome {
    Rooted(PumpkinModel),
    BadCutset {
        u: VertexId,
        v: VertexId,
        component: VertexSet,
    },
    Neither,
}

/// Which step produced the outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HedgehogCase {
    Base,
    ManyNeighbors,
    GapRecursion,
    BarePositions,
    IntervalComponents,
    Breakpoints,
    FallbackCutset,
    FallbackRooted,
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HedgehogReport {
    pub outcome: HedgehogOutcome,
    pub case: HedgehogCase,
    pub fallback: bool,
}

impl Hedgehog {
    pub fn new(graph: MultiGraph, path: Vec<VertexId>) -> Result<Self> {
        let h = Hedgehog { graph, path };
        h.validate()?;
        Ok(h)
    }

    pub fn stable_set(&self) -> VertexSet {
        let on_path: VertexSet = self.path.iter().copied().collect();
        self.graph.vertices().filter(|v| !on_path.contains(v)).collect()
    }

    pub fn size(&self) -> usize {
        self.path.len()
    }

    fn positions(&self) -> BTreeMap<VertexId, usize> {
        self.path.iter().enumerate().map(|(i, &v)| (v, i)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(PumpkinError::Precondition(format!("not a hedgehog: {m}")));
        if self.path.len() < 2 {
            return bad("path has fewer than two vertices".into());
        }
        let pos = self.positions();
        if pos.len() != self.path.len() {
            return bad("path repeats a vertex".into());
        }
        for &p in &self.path {
            if !self.graph.contains(p) {
                return bad(format!("path vertex {p} missing"));
            }
        }
        for (i, &p) in self.path.iter().enumerate() {
            for (w, _) in self.graph.neighbors(p) {
                if let Some(&j) = pos.get(&w) {
                    if i.abs_diff(j) != 1 {
                        return bad(format!("chord {p}-{w}"));
                    }
                }
            }
            if i + 1 < self.path.len() && self.graph.multiplicity(p, self.path[i + 1]) == 0 {
                return bad(format!("path breaks after {p}"));
            }
        }
        for s in self.stable_set() {
            let mut on_p = 0;
            for (w, _) in self.graph.neighbors(s) {
                if pos.contains_key(&w) {
                    on_p += 1;
                } else {
                    return bad(format!("outside vertices {s} and {w} are adjacent"));
                }
            }
            if on_p < 2 {
                return bad(format!("outside vertex {s} has {on_p} path neighbors"));
            }
        }
        Ok(())
    }

    /// Sorted path positions of the neighbors of an outside vertex.
    fn neighbor_positions(&self, s: VertexId, pos: &BTreeMap<VertexId, usize>) -> Vec<usize> {
        let mut out: Vec<usize> = self.graph.neighbors(s).filter_map(|(w, _)| pos.get(&w).copied()).collect();
        out.sort_unstable();
        out
    }

    /// The component witnessing that {u, v} is a bad cutset, if it is one.
    pub fn bad_cutset_component(&self, u: VertexId, v: VertexId) -> Option<VertexSet> {
        let pos = self.positions();
        let last = self.path.len() - 1;
        let internal = |x: VertexId| pos.get(&x).is_some_and(|&i| i > 0 && i < last);
        if u == v || !internal(u) || !internal(v) {
            return None;
        }
        let (a, b) = (self.path[0], self.path[last]);
        let g = self.graph.without(&VertexSet::from([u, v]));
        g.components()
            .into_iter()
            .find(|comp| comp.len() >= 2 && !comp.contains(&a) && !comp.contains(&b))
    }

    pub fn is_rooted(&self, m: &PumpkinModel, c: u32) -> bool {
        let (a, b) = (self.path[0], *self.path.last().unwrap());
        verify_model(&self.graph, m, c).is_ok()
            && ((m.side_a.contains(&a) && m.side_b.contains(&b)) || (m.side_a.contains(&b) && m.side_b.contains(&a)))
    }

    /// Checks an outcome against the hedgehog.
    pub fn check(&self, outcome: &HedgehogOutcome, c: u32) -> bool {
        match outcome {
            HedgehogOutcome::Rooted(m) => self.is_rooted(m, c),
            HedgehogOutcome::BadCutset { u, v, component } => {
                let Some(found) = self.bad_cutset_component(*u, *v) else { return false };
                // any witnessing component will do
                found == *component || {
                    let g = self.graph.without(&VertexSet::from([*u, *v]));
                    let (a, b) = (self.path[0], *self.path.last().unwrap());
                    component.len() >= 2
                        && !component.contains(&a)
                        && !component.contains(&b)
                        && g.components().contains(component)
                }
            }
            HedgehogOutcome::Neither => true,
        }
    }
}

/// The contraction of `h` onto the subpath between `q_from` and `q_to`:
/// drop outside vertices with no neighbor on Q, contract the path edges
/// outside Q, then drop outside vertices left with a single neighbor on Q.
pub fn contract_hedgehog(h: &Hedgehog, q_from: VertexId, q_to: VertexId) -> Result<Hedgehog> {
    let pos = h.positions();
    let (Some(&i), Some(&j)) = (pos.get(&q_from), pos.get(&q_to)) else {
        return Err(PumpkinError::Precondition("subpath ends must lie on the path".into()));
    };
    let (i, j) = (i.min(j), i.max(j));
    if j - i + 1 < 2 {
        return Err(PumpkinError::Precondition("subpath has fewer than two vertices".into()));
    }
    let q: VertexSet = h.path[i..=j].iter().copied().collect();
    let mut g = h.graph.clone();
    for s in h.stable_set() {
        if !h.graph.neighbors(s).any(|(w, _)| q.contains(&w)) {
            g.remove_vertex(s);
        }
    }
    for &p in h.path[..i].iter().rev() {
        g = g.identify(h.path[i], p)?;
    }
    for &p in &h.path[j + 1..] {
        g = g.identify(h.path[j], p)?;
    }
    let left: Vec<VertexId> = g.vertices().filter(|v| !q.contains(v)).collect();
    for s in left {
        if g.neighbors(s).filter(|(w, _)| q.contains(w)).count() < 2 {
            g.remove_vertex(s);
        }
    }
    Hedgehog::new(g, h.path[i..=j].to_vec())
}

/// Rooted c-model or bad cutset of `h`, following the case cascade and
/// falling back to exhaustive search when the threshold is below (4c)^(4c).
pub fn rooted_or_cutset(h: &Hedgehog, c: u32, rule: ThresholdRule, budget: u64) -> Result<HedgehogReport> {
    if c == 0 {
        return Err(PumpkinError::Precondition("c must be at least 1".into()));
    }
    h.validate()?;
    let threshold = rule.threshold(c);
    if (h.size() as u64) < threshold {
        return Err(PumpkinError::Precondition(format!(
            "hedgehog of size {} is below the threshold {threshold}",
            h.size()
        )));
    }
    if let Some((outcome, case)) = cascade(h, c, rule)? {
        return Ok(HedgehogReport {
            outcome,
            case,
            fallback: false,
        });
    }
    if threshold >= full_threshold(c) {
        return Err(PumpkinError::Internal(format!(
            "case cascade failed on a hedgehog of size {} at c = {c}",
            h.size()
        )));
    }
    fallback(h, c, budget)
}

fn rooted(h: &Hedgehog, a: VertexSet, b: VertexSet, c: u32) -> Option<HedgehogOutcome> {
    let m = PumpkinModel::from_sides(&h.graph, a, b);
    h.is_rooted(&m, c).then_some(HedgehogOutcome::Rooted(m))
}

fn cutset(h: &Hedgehog, u: VertexId, v: VertexId) -> Option<HedgehogOutcome> {
    h.bad_cutset_component(u, v)
        .map(|component| HedgehogOutcome::BadCutset { u, v, component })
}

fn cascade(h: &Hedgehog, c: u32, rule: ThresholdRule) -> Result<Option<(HedgehogOutcome, HedgehogCase)>> {
    let p = &h.path;
    let k = p.len();
    let prefix = |end: usize| -> VertexSet { p[..=end].iter().copied().collect() };
    let suffix = |start: usize| -> VertexSet { p[start..].iter().copied().collect() };

    if c == 1 {
        return Ok(rooted(h, prefix(0), suffix(1), 1).map(|o| (o, HedgehogCase::Base)));
    }
    let pos = h.positions();
    let s_set = h.stable_set();
    let nbr_pos: BTreeMap<VertexId, Vec<usize>> = s_set.iter().map(|&s| (s, h.neighbor_positions(s, &pos))).collect();

    // an outside vertex seeing c path vertices
    for (&s, np) in &nbr_pos {
        if np.len() >= c as usize {
            let w = np[0];
            let mut a = prefix(w);
            a.insert(s);
            if let Some(o) = rooted(h, a, suffix(w + 1), c) {
                return Ok(Some((o, HedgehogCase::ManyNeighbors)));
            }
        }
    }

    // a long gap between consecutive neighbors: recurse on it at c - 1
    let gap = rule.threshold(c - 1).saturating_add(2);
    for (&s, np) in &nbr_pos {
        for win in np.windows(2) {
            let (x, y) = (win[0], win[1]);
            if ((y - x + 1) as u64) < gap {
                continue;
            }
            let sub = contract_hedgehog(h, p[x + 1], p[y - 1])?;
            match cascade(&sub, c - 1, rule)? {
                Some((HedgehogOutcome::Rooted(m), _)) => {
                    let m = m.oriented_towards(p[x + 1]);
                    let mut a: VertexSet = m.side_a.union(&prefix(x)).copied().collect();
                    a.insert(s);
                    let b = m.side_b.union(&suffix(y)).copied().collect();
                    if let Some(o) = rooted(h, a, b, c) {
                        return Ok(Some((o, HedgehogCase::GapRecursion)));
                    }
                }
                Some((HedgehogOutcome::BadCutset { u, v, .. }, _)) => {
                    if let Some(o) = cutset(h, u, v) {
                        return Ok(Some((o, HedgehogCase::GapRecursion)));
                    }
                }
                _ => {}
            }
        }
    }

    // two consecutive internal positions with no outside neighbor
    let touched: Vec<bool> = p.iter().map(|&v| h.graph.neighbors(v).any(|(w, _)| s_set.contains(&w))).collect();
    for i in 1..k.saturating_sub(4) {
        if !touched[i + 1] && !touched[i + 2] {
            if let Some(o) = cutset(h, p[i], p[i + 3]) {
                return Ok(Some((o, HedgehogCase::BarePositions)));
            }
        }
    }

    // interval graph of the outside vertices
    let iv: BTreeMap<VertexId, (usize, usize)> = nbr_pos.iter().map(|(&s, np)| (s, (np[0], *np.last().unwrap()))).collect();
    let comps = interval_components(&iv);
    if comps.len() >= 5 {
        let (i, _) = comps[1].1;
        let (_, j) = comps[3].1;
        if let Some(o) = cutset(h, p[i], p[j]) {
            return Ok(Some((o, HedgehogCase::IntervalComponents)));
        }
    }

    // breakpoint colouring on the widest component
    let Some((members, (x, y))) = comps
        .iter()
        .max_by(|l, r| (l.1 .1 - l.1 .0).cmp(&(r.1 .1 - r.1 .0)).then(r.1 .0.cmp(&l.1 .0)))
        .cloned()
    else {
        return Ok(None);
    };
    Ok(breakpoints(h, c, &iv, &members, x, y).map(|o| (o, HedgehogCase::Breakpoints)))
}

/// Components of the interval graph on open intervals, ordered along the
/// path, with the union interval of each.
fn interval_components(iv: &BTreeMap<VertexId, (usize, usize)>) -> Vec<(Vec<VertexId>, (usize, usize))> {
    let mut order: Vec<(usize, usize, VertexId)> = iv.iter().map(|(&s, &(l, r))| (l, r, s)).collect();
    order.sort();
    let mut out: Vec<(Vec<VertexId>, (usize, usize))> = vec![];
    for (l, r, s) in order {
        match out.last_mut() {
            Some((members, span)) if l < span.1 => {
                members.push(s);
                span.1 = span.1.max(r);
            }
            _ => out.push((vec![s], (l, r))),
        }
    }
    for (members, _) in &mut out {
        members.sort();
    }
    out
}

fn breakpoints(
    h: &Hedgehog,
    c: u32,
    iv: &BTreeMap<VertexId, (usize, usize)>,
    members: &[VertexId],
    x: usize,
    y: usize,
) -> Option<HedgehogOutcome> {
    let p = &h.path;
    let ivl = |s: VertexId| iv[&s];
    let v = members
        .iter()
        .copied()
        .filter(|&s| ivl(s).0 == x)
        .max_by(|&l, &r| ivl(l).1.cmp(&ivl(r).1).then(r.cmp(&l)))?;
    let w = members
        .iter()
        .copied()
        .filter(|&s| ivl(s).1 == y)
        .min_by(|&l, &r| ivl(l).0.cmp(&ivl(r).0).then(l.cmp(&r)))?;

    // shortest v-w path in the interval graph, lower ids first
    let meets = |s: VertexId, t: VertexId| {
        let ((l1, r1), (l2, r2)) = (ivl(s), ivl(t));
        l1.max(l2) < r1.min(r2)
    };
    let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut seen = VertexSet::from([v]);
    let mut queue = VecDeque::from([v]);
    while let Some(s) = queue.pop_front() {
        if s == w {
            break;
        }
        for &t in members {
            if t != s && !seen.contains(&t) && meets(s, t) {
                seen.insert(t);
                parent.insert(t, s);
                queue.push_back(t);
            }
        }
    }
    let mut z = vec![w];
    while let Some(&q) = parent.get(z.last().unwrap()) {
        z.push(q);
    }
    z.reverse();
    if z[0] != v {
        return None;
    }
    let d = z.len() / 2;
    if d == 0 {
        return None;
    }

    // parity of J(p_i) for the breakpoints
    let mut parity: BTreeMap<usize, usize> = BTreeMap::new();
    for (j0, &zj) in z[..2 * d].iter().enumerate() {
        let par = j0 % 2; // 0 = odd index in 1-based terms = black
        let (l, r) = ivl(zj);
        for i in [l, r] {
            if let Some(&old) = parity.get(&i) {
                if old != par {
                    return None;
                }
            }
            parity.insert(i, par);
        }
    }
    let mut a: VertexSet = p[..x].iter().copied().collect();
    let mut b: VertexSet = p[y + 1..].iter().copied().collect();
    for (j0, &zj) in z[..2 * d].iter().enumerate() {
        if j0 % 2 == 0 { a.insert(zj) } else { b.insert(zj) };
    }
    let mut colour = *parity.get(&x)?;
    for (i, &pi) in p.iter().enumerate().take(y + 1).skip(x) {
        if let Some(&par) = parity.get(&i) {
            colour = par;
        }
        if colour == 0 { a.insert(pi) } else { b.insert(pi) };
    }
    rooted(h, a, b, c)
}

fn fallback(h: &Hedgehog, c: u32, budget: u64) -> Result<HedgehogReport> {
    let k = h.size();
    for i in 1..k - 1 {
        for j in i + 1..k - 1 {
            if let Some(o) = cutset(h, h.path[i], h.path[j]) {
                return Ok(HedgehogReport {
                    outcome: o,
                    case: HedgehogCase::FallbackCutset,
                    fallback: true,
                });
            }
        }
    }
    let q = AnchoredQuery::new(&h.graph, c).anchored(Some(h.path[0]), Some(h.path[k - 1]));
    let outcome = match max_pumpkin(&q, budget) {
        Ok((val, Some(m))) if val >= c => Some(HedgehogOutcome::Rooted(m)),
        Ok(_) => None,
        Err(e) if e.is_budget() => None,
        Err(e) => return Err(e),
    };
    Ok(match outcome {
        Some(o) => HedgehogReport {
            outcome: o,
            case: HedgehogCase::FallbackRooted,
            fallback: true,
        },
        None => HedgehogReport {
            outcome: HedgehogOutcome::Neither,
            case: HedgehogCase::Exhausted,
            fallback: true,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DEFAULT_BUDGET;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    /// Path 0..len with the given outside vertices attached to positions.
    fn build(len: u32, outside: &[&[u32]]) -> Hedgehog {
        let mut e: Vec<(u32, u32, u32)> = (0..len - 1).map(|i| (i, i + 1, 1)).collect();
        for (k, nb) in outside.iter().enumerate() {
            for &p in *nb {
                e.push((len + k as u32, p, 1));
            }
        }
        let g = MultiGraph::from_edges(len as usize + outside.len(), &e).unwrap();
        Hedgehog::new(g, (0..len).map(VertexId).collect()).unwrap()
    }

    #[test]
    fn invalid_hedgehogs_are_rejected() {
        let g = MultiGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        assert!(Hedgehog::new(g, vec![v(0), v(1), v(2)]).is_err());
        let g = MultiGraph::from_edges(4, &[(0, 1, 1), (1, 2, 1), (3, 1, 1)]).unwrap();
        assert!(Hedgehog::new(g, vec![v(0), v(1), v(2)]).is_err());
    }

    #[test]
    fn base_case() {
        let h = build(6, &[&[1, 3]]);
        let r = rooted_or_cutset(&h, 1, ThresholdRule::Uniform(2), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.case, HedgehogCase::Base);
        assert!(h.check(&r.outcome, 1));
    }

    #[test]
    fn many_neighbors() {
        let h = build(8, &[&[1, 3, 5]]);
        let r = rooted_or_cutset(&h, 3, ThresholdRule::Uniform(2), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.case, HedgehogCase::ManyNeighbors);
        let HedgehogOutcome::Rooted(m) = &r.outcome else { panic!() };
        assert_eq!(m.side_a, [0, 1, 8].into_iter().map(VertexId).collect());
        assert!(m.cross_edges >= 3);
    }

    #[test]
    fn bare_positions_give_a_cutset() {
        // positions 2 and 3 untouched
        let h = build(8, &[&[0, 1], &[4, 5, 6]]);
        let r = rooted_or_cutset(&h, 4, ThresholdRule::Uniform(2), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.case, HedgehogCase::BarePositions);
        let HedgehogOutcome::BadCutset { u, v: w, component } = &r.outcome else { panic!() };
        assert_eq!((*u, *w), (v(1), v(4)));
        assert_eq!(*component, [2, 3].into_iter().map(VertexId).collect());
    }

    #[test]
    fn contraction_identity_and_pruning() {
        let h = build(8, &[&[0, 1], &[2, 5], &[5, 7]]);
        let same = contract_hedgehog(&h, v(0), v(7)).unwrap();
        assert_eq!(same, h);
        let sub = contract_hedgehog(&h, v(2), v(5)).unwrap();
        // the first outside vertex only saw the discarded prefix
        assert!(!sub.graph.contains(v(8)));
        assert!(sub.graph.contains(v(9)));
        // the third collapses to a single neighbor on Q and goes
        assert!(!sub.graph.contains(v(10)));
        assert_eq!(sub.path, vec![v(2), v(3), v(4), v(5)]);
    }

    #[test]
    fn interval_components_split_on_touching_ends() {
        let iv: BTreeMap<VertexId, (usize, usize)> =
            [(v(10), (0, 2)), (v(11), (2, 4)), (v(12), (3, 6))].into_iter().collect();
        let comps = interval_components(&iv);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[1], (vec![v(11), v(12)], (2, 6)));
    }
}
