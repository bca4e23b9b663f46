use super::InstanceFile;
use crate::error::{PumpkinError, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Glue {
    /// Gadgets stay disjoint.
    None,
    /// Consecutive gadgets joined by one edge.
    Path,
    /// Every gadget joined by one edge to the first.
    Star,
}

impl std::str::FromStr for Glue {
    type Err = PumpkinError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Glue::None),
            "path" => Ok(Glue::Path),
            "star" => Ok(Glue::Star),
            _ => Err(PumpkinError::Precondition(format!("unknown glue style `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum Family {
    RandomMultigraph { n: usize, p: f64, max_mult: u32 },
    PlantedPumpkins { count: usize, c: u32, glue: Glue },
    Cactus { n: usize },
    Hedgehog { path_len: usize, density: f64 },
    Regular { n: usize, d: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::RandomMultigraph { .. } => "random-multigraph",
            Family::PlantedPumpkins { .. } => "planted-pumpkins",
            Family::Cactus { .. } => "cactus",
            Family::Hedgehog { .. } => "hedgehog",
            Family::Regular { .. } => "regular",
        }
    }
}

#[derive(Default)]
struct Builder {
    n: usize,
    mult: BTreeMap<(u32, u32), u32>,
}

impl Builder {
    fn vertex(&mut self) -> u32 {
        self.n += 1;
        self.n as u32
    }

    fn edge(&mut self, u: u32, v: u32, k: u32) {
        *self.mult.entry((u.min(v), u.max(v))).or_default() += k;
    }

    fn finish(self, meta: BTreeMap<String, String>) -> InstanceFile {
        InstanceFile {
            n: self.n,
            edges: self.mult.into_iter().map(|((u, v), k)| (u, v, k)).collect(),
            meta,
        }
    }
}

fn invalid(msg: impl Into<String>) -> PumpkinError {
    PumpkinError::Precondition(msg.into())
}

/// Deterministic for a given family and seed.
pub fn generate(family: &Family, seed: u64) -> Result<InstanceFile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::default();
    let mut meta = BTreeMap::new();
    meta.insert("family".to_string(), family.name().to_string());
    meta.insert("seed".to_string(), seed.to_string());
    match *family {
        Family::RandomMultigraph { n, p, max_mult } => {
            if !(0.0..=1.0).contains(&p) || max_mult == 0 {
                return Err(invalid("need 0 <= p <= 1 and max_mult >= 1"));
            }
            for _ in 0..n {
                b.vertex();
            }
            for u in 1..=n as u32 {
                for v in u + 1..=n as u32 {
                    if rng.gen_bool(p) {
                        let k = rng.gen_range(1..=max_mult);
                        b.edge(u, v, k);
                    }
                }
            }
        }
        Family::PlantedPumpkins { count, c, glue } => {
            if c == 0 {
                return Err(invalid("c must be at least 1"));
            }
            let mut anchors = vec![];
            for _ in 0..count {
                let sides: Vec<Vec<u32>> = (0..2)
                    .map(|_| {
                        let size = rng.gen_range(1..=2);
                        let side: Vec<u32> = (0..size).map(|_| b.vertex()).collect();
                        side
                    })
                    .collect();
                for side in &sides {
                    for w in side.windows(2) {
                        b.edge(w[0], w[1], 1);
                    }
                }
                for _ in 0..c {
                    let x = *sides[0].choose(&mut rng).unwrap();
                    let y = *sides[1].choose(&mut rng).unwrap();
                    b.edge(x, y, 1);
                }
                anchors.push(sides[0][0]);
            }
            match glue {
                Glue::None => {}
                Glue::Path => {
                    for w in anchors.windows(2) {
                        b.edge(w[0], w[1], 1);
                    }
                }
                Glue::Star => {
                    for &a in anchors.iter().skip(1) {
                        b.edge(anchors[0], a, 1);
                    }
                }
            }
            meta.insert("c".into(), c.to_string());
            meta.insert("planted_nu_lower".into(), count.to_string());
        }
        Family::Cactus { n } => {
            if n == 0 {
                return Err(invalid("cactus needs at least one vertex"));
            }
            b.vertex();
            while b.n < n {
                let at = rng.gen_range(1..=b.n as u32);
                let room = n - b.n;
                if room >= 2 && rng.gen_bool(0.6) {
                    let len = rng.gen_range(2..=room.min(5));
                    let mut prev = at;
                    for _ in 0..len {
                        let x = b.vertex();
                        b.edge(prev, x, 1);
                        prev = x;
                    }
                    b.edge(prev, at, 1);
                } else {
                    let x = b.vertex();
                    b.edge(at, x, 1);
                }
            }
        }
        Family::Hedgehog { path_len, density } => {
            if path_len < 2 || density < 0.0 {
                return Err(invalid("hedgehog needs path_len >= 2 and density >= 0"));
            }
            for _ in 0..path_len {
                b.vertex();
            }
            for i in 1..path_len as u32 {
                b.edge(i, i + 1, 1);
            }
            let spines = (density * path_len as f64).round() as usize;
            let positions: Vec<u32> = (1..=path_len as u32).collect();
            for _ in 0..spines {
                let s = b.vertex();
                let want = rng.gen_range(2..=4.min(path_len));
                for &p in positions.choose_multiple(&mut rng, want) {
                    b.edge(s, p, 1);
                }
            }
            meta.insert("path_len".into(), path_len.to_string());
        }
        Family::Regular { n, d } => {
            if d >= n || (n * d) % 2 == 1 {
                return Err(invalid("regular graph needs d < n and n*d even"));
            }
            for _ in 0..n {
                b.vertex();
            }
            let mut done = None;
            'attempt: for _ in 0..1000 {
                let mut stubs: Vec<u32> = (1..=n as u32).flat_map(|v| std::iter::repeat_n(v, d)).collect();
                stubs.shuffle(&mut rng);
                let mut pairs = BTreeMap::new();
                for w in stubs.chunks(2) {
                    let (u, v) = (w[0].min(w[1]), w[0].max(w[1]));
                    if u == v || pairs.insert((u, v), 1u32).is_some() {
                        continue 'attempt;
                    }
                }
                done = Some(pairs);
                break;
            }
            b.mult = done.ok_or_else(|| invalid("no simple regular pairing found"))?;
        }
    }
    Ok(b.finish(meta))
}
