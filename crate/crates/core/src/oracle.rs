//! Brute-force reference values by full subset enumeration. Only reads
//! the edge list of the input graph; nothing here reuses the search code.

use crate::error::{PumpkinError, Result};
use crate::graph::{MultiGraph, VertexId};

pub const ORACLE_LIMIT: usize = 14;

/// Tables over all vertex subsets of a small graph.
pub struct Oracle {
    n: usize,
    /// `union_best[S]`: largest cut between two connected sets whose union is S.
    union_best: Vec<u64>,
    /// `within[S]`: largest pumpkin using only vertices of S.
    within: Vec<u64>,
}

impl Oracle {
    pub fn new(g: &MultiGraph) -> Result<Self> {
        let ids: Vec<VertexId> = g.vertices().collect();
        let n = ids.len();
        if n > ORACLE_LIMIT {
            return Err(PumpkinError::SizeLimit { n, limit: ORACLE_LIMIT });
        }
        let pos = |v: VertexId| ids.iter().position(|&w| w == v).unwrap();
        let mut mat = vec![vec![0u64; n]; n];
        let mut nbr = vec![0usize; n];
        for (x, y, m) in g.edges() {
            let (i, j) = (pos(x), pos(y));
            mat[i][j] += m as u64;
            mat[j][i] += m as u64;
            nbr[i] |= 1 << j;
            nbr[j] |= 1 << i;
        }
        let full = 1usize << n;

        // e(S) for every S, peeling the lowest vertex
        let mut inner = vec![0u64; full];
        for s in 1..full {
            let i = s.trailing_zeros() as usize;
            let rest = s & (s - 1);
            inner[s] = inner[rest] + (0..n).filter(|&j| rest >> j & 1 == 1).map(|j| mat[i][j]).sum::<u64>();
        }

        let mut connected = vec![false; full];
        for s in 1..full {
            let mut seen = s & s.wrapping_neg();
            loop {
                let mut grow = seen;
                for j in 0..n {
                    if seen >> j & 1 == 1 {
                        grow |= nbr[j] & s;
                    }
                }
                if grow == seen {
                    break;
                }
                seen = grow;
            }
            connected[s] = seen == s;
        }

        let mut union_best = vec![0u64; full];
        for s in 1..full {
            let mut a = (s - 1) & s;
            while a > 0 {
                let b = s ^ a;
                if a < b && connected[a] && connected[b] {
                    let cut = inner[s] - inner[a] - inner[b];
                    union_best[s] = union_best[s].max(cut);
                }
                a = (a - 1) & s;
            }
        }

        let mut within = union_best.clone();
        for s in 1..full {
            for j in 0..n {
                if s >> j & 1 == 1 {
                    within[s] = within[s].max(within[s ^ (1 << j)]);
                }
            }
        }
        Ok(Oracle { n, union_best, within })
    }

    pub fn max_pumpkin(&self) -> u64 {
        *self.within.last().unwrap()
    }

    /// τ_c: fewest deleted vertices leaving no c-pumpkin.
    pub fn tau(&self, c: u32) -> usize {
        let full = (1usize << self.n) - 1;
        (0..=full)
            .filter(|&x| self.within[full ^ x] < c as u64)
            .map(|x| x.count_ones() as usize)
            .min()
            .unwrap_or(0)
    }

    /// ν_c: most vertex-disjoint c-pumpkin models.
    pub fn nu(&self, c: u32) -> usize {
        let full = 1usize << self.n;
        let mut best = vec![0usize; full];
        for s in 1..full {
            let low = s & s.wrapping_neg();
            let mut val = best[s ^ low];
            let rest = s ^ low;
            let mut t = rest;
            loop {
                let used = t | low;
                if self.union_best[used] >= c as u64 {
                    val = val.max(best[s ^ used] + 1);
                }
                if t == 0 {
                    break;
                }
                t = (t - 1) & rest;
            }
            best[s] = val;
        }
        best[full - 1]
    }
}

pub fn oracle_max_pumpkin(g: &MultiGraph) -> Result<u64> {
    Ok(Oracle::new(g)?.max_pumpkin())
}

pub fn oracle_tau(g: &MultiGraph, c: u32) -> Result<usize> {
    Ok(Oracle::new(g)?.tau(c))
}

pub fn oracle_nu(g: &MultiGraph, c: u32) -> Result<usize> {
    Ok(Oracle::new(g)?.nu(c))
}
