//! Tunables shared by every pipeline. Defaults live here; the CLI overrides
//! them from flags or `PUMPKIN_*` environment variables.

use serde::{Deserialize, Serialize};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Minimum path length at which the hedgehog case cascade is trusted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "value")]
pub enum ThresholdRule {
    /// (4c)^(4c), saturating at `u64::MAX`.
    Full,
    /// The same threshold for every c.
    Uniform(u64),
    /// `a·c`.
    Linear(u64),
}

impl ThresholdRule {
    pub fn threshold(&self, c: u32) -> u64 {
        match *self {
            ThresholdRule::Full => full_threshold(c),
            ThresholdRule::Uniform(t) => t,
            ThresholdRule::Linear(a) => a.saturating_mul(c as u64),
        }
    }
}

impl std::str::FromStr for ThresholdRule {
    type Err = String;

    /// `full`, `uniform:N` or `linear:N`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |v: &str| v.parse::<u64>().map_err(|_| format!("bad threshold value `{v}`"));
        match s.split_once(':') {
            None if s == "full" => Ok(ThresholdRule::Full),
            Some(("uniform", v)) => Ok(ThresholdRule::Uniform(num(v)?)),
            Some(("linear", v)) => Ok(ThresholdRule::Linear(num(v)?)),
            _ => Err(format!("expected full, uniform:N or linear:N, got `{s}`")),
        }
    }
}

/// (4c)^(4c), saturating.
pub fn full_threshold(c: u32) -> u64 {
    let base = 4u64 * c as u64;
    let mut acc: u64 = 1;
    for _ in 0..4 * c {
        acc = acc.saturating_mul(base);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Node expansions allowed per detection query.
    pub budget: u64,
    /// Z2 candidates whose component is larger than this are skipped.
    pub z2_component_cap: usize,
    pub hedgehog_rule: ThresholdRule,
    /// Skeleton degree threshold; `None` means 4c².
    pub skeleton_k: Option<usize>,
    /// Multipath length; `None` means 32c.
    pub skeleton_r: Option<usize>,
    pub skeleton_b: usize,
    pub h_eff: f64,
    /// `None` means max(k·r·b, 3·r·c·h_eff) with the values above.
    pub f_eff: Option<f64>,
    /// Longest path rule B branches on.
    pub rule_b_len: usize,
    /// Largest graph the brute-force solvers accept.
    pub oracle_limit: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            budget: DEFAULT_BUDGET,
            z2_component_cap: 256,
            hedgehog_rule: ThresholdRule::Linear(8),
            skeleton_k: None,
            skeleton_r: None,
            skeleton_b: 512,
            h_eff: 8.0,
            f_eff: None,
            rule_b_len: 6,
            oracle_limit: 16,
        }
    }
}

impl Params {
    pub fn k(&self, c: u32) -> usize {
        self.skeleton_k.unwrap_or(4 * (c as usize).pow(2)).max(2)
    }

    pub fn r(&self, c: u32) -> usize {
        self.skeleton_r.unwrap_or(32 * c as usize).max(2)
    }

    pub fn b(&self) -> usize {
        self.skeleton_b.max(1)
    }

    pub fn f_eff(&self, c: u32) -> f64 {
        self.f_eff.unwrap_or_else(|| {
            let (k, r, b) = (self.k(c) as f64, self.r(c) as f64, self.b() as f64);
            (k * r * b).max(3.0 * r * c as f64 * self.h_eff)
        })
    }

    /// Size budget handed to the dense-minor subroutine on `n` vertices.
    pub fn dense_budget(&self, n: usize) -> usize {
        (self.h_eff * log2_clamped(n)).ceil() as usize
    }
}

/// log₂ n, with values below 1 clamped to 1.
pub fn log2_clamped(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}
