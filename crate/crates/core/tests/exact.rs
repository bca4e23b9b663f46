mod common;

use common::*;
use pumpkin::exact::{branch_cover, brute_min_hitting, disjoint_cover, ic_cover, rule_r4, CompressionState};
use pumpkin::oracle::Oracle;
use pumpkin::{MultiGraph, Params, VertexId, VertexSet};
use rand::Rng;

/// Smallest X ⊆ V − S leaving no c-pumpkin, via the subset oracle.
fn brute_disjoint(g: &MultiGraph, s: &VertexSet, c: u32) -> Option<usize> {
    let free: Vec<VertexId> = g.vertices().filter(|v| !s.contains(v)).collect();
    (0u32..1 << free.len())
        .filter(|mask| {
            let x: VertexSet = (0..free.len()).filter(|&i| mask >> i & 1 == 1).map(|i| free[i]).collect();
            Oracle::new(&g.without(&x)).unwrap().max_pumpkin() < c as u64
        })
        .map(|m| m.count_ones() as usize)
        .min()
}

/// S is a path s0..s2; v hangs `legs` pendant trees, each also touching
/// one S vertex; a few random extra edges on top.
fn fan_instance(seed: u64) -> (MultiGraph, VertexSet, u32) {
    let mut r = rng(7000 + seed);
    let c = r.gen_range(1..=3u32);
    let mut g = MultiGraph::with_vertices(4);
    let s = VertexSet::from([VertexId(0), VertexId(1), VertexId(2)]);
    g.add_edge(VertexId(0), VertexId(1), 1).unwrap();
    if c > 1 || r.gen_bool(0.5) {
        g.add_edge(VertexId(1), VertexId(2), 1).unwrap();
    }
    let v = VertexId(3);
    for _ in 0..r.gen_range(c..=c + 1) {
        let a = g.add_vertex();
        g.add_edge(v, a, 1).unwrap();
        if r.gen_bool(0.4) {
            let b = g.add_vertex();
            g.add_edge(a, b, 1).unwrap();
        }
        g.add_edge(a, VertexId(r.gen_range(0..3)), 1).unwrap();
    }
    let n = g.vertex_count() as u32;
    for _ in 0..r.gen_range(0..3) {
        let (x, y) = (r.gen_range(0..n), r.gen_range(0..n));
        if x != y {
            g.add_edge(VertexId(x), VertexId(y), 1).unwrap();
        }
    }
    (g, s, c)
}

#[test]
fn r4_never_loses_optimality() {
    let p = Params::default();
    let mut fired = 0;
    for seed in 0..300 {
        let (g, s, c) = fan_instance(seed);
        if g.vertex_count() > 13 || Oracle::new(&g.induced(&s)).unwrap().max_pumpkin() >= c as u64 {
            continue;
        }
        if let Some(v) = rule_r4(&g, &s, c, p.budget).unwrap() {
            fired += 1;
            assert!(!s.contains(&v));
            let with_v = brute_disjoint(&g.without_vertex(v), &s, c).map(|x| x + 1);
            assert_eq!(with_v, brute_disjoint(&g, &s, c), "seed {seed}: forcing {v} is not optimal");
        }
    }
    assert!(fired >= 20, "R4 fired only {fired} times");
}

#[test]
fn disjoint_cover_matches_enumeration() {
    let p = Params::default();
    let mut checked = 0;
    for seed in 0..200u64 {
        let mut r = rng(8000 + seed);
        let n = r.gen_range(4..=11);
        let total = r.gen_range(n as u32..=2 * n as u32);
        let g = random_multigraph(&mut r, n, total);
        let c = r.gen_range(1..=3u32);
        // S: a minimum hitting set, so G − S is free
        let s = brute_min_hitting(&g, c, n, &p).unwrap().hitting_set.unwrap();
        if Oracle::new(&g.induced(&s)).unwrap().max_pumpkin() >= c as u64 {
            continue;
        }
        let best = brute_disjoint(&g, &s, c);
        for k in 0..=4 {
            let st = CompressionState { graph: g.clone(), s: s.clone(), k };
            let res = disjoint_cover(st, c, &p).unwrap();
            assert_eq!(res.feasible, best.is_some_and(|b| b <= k), "seed {seed} k={k}");
            if let Some(x) = res.hitting_set {
                assert!(x.len() <= k && x.is_disjoint(&s));
                assert!(Oracle::new(&g.without(&x)).unwrap().max_pumpkin() < c as u64);
            }
            checked += 1;
        }
    }
    assert!(checked > 200);
}

#[test]
fn measure_counts_budget_and_s_components() {
    let g = MultiGraph::from_edges(5, &[(0, 1, 1), (2, 3, 1)]).unwrap();
    let st = CompressionState {
        graph: g,
        s: VertexSet::from([VertexId(0), VertexId(1), VertexId(2), VertexId(4)]),
        k: 2,
    };
    assert_eq!(st.measure(), 5);
}

#[test]
fn solvers_agree_on_vertex_cover_and_fvs() {
    let p = Params::default();
    for g in exact_corpus(60) {
        let vc = brute_vertex_cover(&g);
        let fvs = brute_fvs(&g);
        for k in 0..=5 {
            assert_eq!(branch_cover(&g, 1, k, &p).unwrap().feasible, vc <= k);
            assert_eq!(ic_cover(&g, 1, k, &p).unwrap().feasible, vc <= k);
            assert_eq!(branch_cover(&g, 2, k, &p).unwrap().feasible, fvs <= k);
            assert_eq!(ic_cover(&g, 2, k, &p).unwrap().feasible, fvs <= k);
        }
    }
}
