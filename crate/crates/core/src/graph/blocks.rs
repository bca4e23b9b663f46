use super::{MultiGraph, VertexId, VertexSet};
use std::collections::BTreeMap;

/// Hopcroft-Tarjan over the underlying simple graph, iterative so deep
/// paths do not exhaust the call stack.
pub(super) fn blocks(g: &MultiGraph) -> Vec<VertexSet> {
    let ids: Vec<VertexId> = g.vertices().collect();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<usize>> = ids
        .iter()
        .map(|&v| g.neighbors(v).map(|(w, _)| index[&w]).collect())
        .collect();

    let n = ids.len();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0;
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    let mut out: Vec<VertexSet> = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        if adj[root].is_empty() {
            disc[root] = time;
            time += 1;
            out.push(VertexSet::from([ids[root]]));
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        // (vertex, parent, next neighbor position)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(top) = stack.last_mut() {
            let (x, parent) = (top.0, top.1);
            if top.2 < adj[x].len() {
                let w = adj[x][top.2];
                top.2 += 1;
                if disc[w] == usize::MAX {
                    edge_stack.push((x, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, x, 0));
                } else if w != parent && disc[w] < disc[x] {
                    edge_stack.push((x, w));
                    low[x] = low[x].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[x]);
                    if low[x] >= disc[p] {
                        let mut block = VertexSet::new();
                        while let Some((a, b)) = edge_stack.pop() {
                            block.insert(ids[a]);
                            block.insert(ids[b]);
                            if (a, b) == (p, x) {
                                break;
                            }
                        }
                        out.push(block);
                    }
                }
            }
        }
    }
    out.sort();
    out
}
