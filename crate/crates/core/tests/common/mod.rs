#![allow(dead_code)]

use pumpkin::graph::{MultiGraph, VertexId};
use pumpkin::io::{generate, Family};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `total` unit edges dropped on random pairs of `n` vertices.
pub fn random_multigraph(rng: &mut ChaCha8Rng, n: usize, total: u32) -> MultiGraph {
    let mut g = MultiGraph::with_vertices(n);
    if n < 2 {
        return g;
    }
    for _ in 0..total {
        let u = rng.gen_range(0..n as u32);
        let mut v = rng.gen_range(0..n as u32 - 1);
        if v >= u {
            v += 1;
        }
        g.add_edge(VertexId(u), VertexId(v), 1).unwrap();
    }
    g
}

/// Detection corpus: n ≤ 12, total multiplicity ≤ 30.
pub fn detection_corpus(count: u64) -> Vec<MultiGraph> {
    (0..count)
        .map(|seed| {
            let mut r = rng(1000 + seed);
            let n = r.gen_range(2..=12);
            let total = r.gen_range(0..=30);
            random_multigraph(&mut r, n, total)
        })
        .collect()
}

/// Reduction corpus: n ≤ 14 over a mix of sparse families, each with its c.
pub fn reduction_corpus(count: u64) -> Vec<(MultiGraph, u32)> {
    (0..count)
        .map(|seed| {
            let mut r = rng(2000 + seed);
            let c = 1 + (seed % 4) as u32;
            let n = r.gen_range(4..=14);
            let g = match seed % 3 {
                0 => {
                    let total = r.gen_range(n as u32..=2 * n as u32);
                    random_multigraph(&mut r, n, total)
                }
                1 => {
                    // cactus with a few extra parallel edges
                    let mut g = generate(&Family::Cactus { n }, seed).unwrap().to_graph().unwrap();
                    let edges: Vec<_> = g.edges().collect();
                    for _ in 0..r.gen_range(0..4) {
                        let (u, v, _) = edges[r.gen_range(0..edges.len())];
                        g.add_edge(u, v, 1).unwrap();
                    }
                    g
                }
                _ => {
                    let fam = Family::RandomMultigraph {
                        n,
                        p: r.gen_range(0.15..0.4),
                        max_mult: 3,
                    };
                    generate(&fam, seed).unwrap().to_graph().unwrap()
                }
            };
            (g, c)
        })
        .collect()
}

/// Exact-solver corpus: n ≤ 12.
pub fn exact_corpus(count: u64) -> Vec<MultiGraph> {
    (0..count)
        .map(|seed| {
            let mut r = rng(3000 + seed);
            let n = r.gen_range(3..=12);
            let fam = Family::RandomMultigraph {
                n,
                p: r.gen_range(0.1..0.45),
                max_mult: 2,
            };
            generate(&fam, seed).unwrap().to_graph().unwrap()
        })
        .collect()
}

/// Larger instances for the approximation: planted, cactus, regular,
/// hedgehog and random families.
pub fn large_corpus() -> Vec<(String, MultiGraph)> {
    let mut out = vec![];
    for seed in 0..6u64 {
        let fams = [
            Family::PlantedPumpkins {
                count: 8,
                c: 1 + (seed % 3) as u32,
                glue: if seed % 2 == 0 { pumpkin::io::Glue::Path } else { pumpkin::io::Glue::Star },
            },
            Family::Cactus { n: 60 },
            Family::Regular { n: 40, d: 3 + (seed % 3) as usize },
            Family::Hedgehog { path_len: 48, density: 0.4 },
            Family::RandomMultigraph { n: 30, p: 0.1, max_mult: 2 },
        ];
        for fam in fams {
            let g = generate(&fam, seed).unwrap().to_graph().unwrap();
            out.push((format!("{}-{seed}", fam.name()), g));
        }
    }
    out
}

/// Smallest vertex cover by enumeration over edge lists.
pub fn brute_vertex_cover(g: &MultiGraph) -> usize {
    let ids: Vec<VertexId> = g.vertices().collect();
    let n = ids.len();
    let edges: Vec<(usize, usize)> = g
        .edges()
        .map(|(u, v, _)| (ids.iter().position(|&x| x == u).unwrap(), ids.iter().position(|&x| x == v).unwrap()))
        .collect();
    (0u32..1 << n)
        .filter(|mask| edges.iter().all(|&(u, v)| mask >> u & 1 == 1 || mask >> v & 1 == 1))
        .map(|m| m.count_ones() as usize)
        .min()
        .unwrap()
}

/// Smallest feedback vertex set: what is left must be a simple forest,
/// checked with union-find (a parallel pair is a cycle).
pub fn brute_fvs(g: &MultiGraph) -> usize {
    let ids: Vec<VertexId> = g.vertices().collect();
    let n = ids.len();
    let edges: Vec<(usize, usize, u32)> = g
        .edges()
        .map(|(u, v, m)| (ids.iter().position(|&x| x == u).unwrap(), ids.iter().position(|&x| x == v).unwrap(), m))
        .collect();
    let acyclic = |mask: u32| {
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for &(u, v, m) in &edges {
            if mask >> u & 1 == 1 || mask >> v & 1 == 1 {
                continue;
            }
            if m >= 2 {
                return false;
            }
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    };
    (0u32..1 << n).filter(|&m| acyclic(m)).map(|m| m.count_ones() as usize).min().unwrap()
}

fn connected_mask(adj: &[u32], s: u32) -> bool {
    if s == 0 {
        return false;
    }
    let mut seen = s & s.wrapping_neg();
    loop {
        let mut grow = seen;
        for j in 0..adj.len() {
            if seen >> j & 1 == 1 {
                grow |= adj[j] & s;
            }
        }
        if grow == seen {
            return seen == s;
        }
        seen = grow;
    }
}

/// Largest number of edges between disjoint connected sets A and B with
/// `a_must ⊆ A` and `b_must ⊆ B`, by enumeration over all pairs.
pub fn brute_anchored(g: &MultiGraph, a_must: &[VertexId], b_must: &[VertexId]) -> u64 {
    let ids: Vec<VertexId> = g.vertices().collect();
    let n = ids.len();
    let idx = |v: VertexId| ids.iter().position(|&x| x == v).unwrap();
    let mut adj = vec![0u32; n];
    let mut mult = vec![vec![0u64; n]; n];
    for (u, v, m) in g.edges() {
        let (i, j) = (idx(u), idx(v));
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
        mult[i][j] += m as u64;
        mult[j][i] += m as u64;
    }
    let am: u32 = a_must.iter().map(|&v| 1 << idx(v)).sum();
    let bm: u32 = b_must.iter().map(|&v| 1 << idx(v)).sum();
    let mut best = 0;
    for a in 1u32..1 << n {
        if a & am != am || a & bm != 0 || !connected_mask(&adj, a) {
            continue;
        }
        let rest = ((1u32 << n) - 1) & !a;
        let mut b = rest;
        while b > 0 {
            if b & bm == bm && connected_mask(&adj, b) {
                let mut cut = 0;
                for i in 0..n {
                    for j in 0..n {
                        if a >> i & 1 == 1 && b >> j & 1 == 1 {
                            cut += mult[i][j];
                        }
                    }
                }
                best = best.max(cut);
            }
            b = (b - 1) & rest;
        }
    }
    best
}
