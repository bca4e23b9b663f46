use crate::config::Params;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Wall-clock figures, kept apart so payloads compare byte for byte.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub instance: String,
    pub c: Option<u32>,
    pub params: Params,
    pub payload: serde_json::Value,
    /// Checks re-run on the payload before writing, by name.
    pub verified: BTreeMap<String, bool>,
    pub timing: Timing,
}
