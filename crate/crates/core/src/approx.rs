//! Simultaneous cover and packing: reduce while a rule applies, otherwise
//! take a small model out and continue on the rest; then unwind, lifting
//! both outputs back through every reduction.

use crate::config::{log2_clamped, Params};
use crate::detect::has_pumpkin;
use crate::error::{PumpkinError, Result};
use crate::graph::{minimize_model, verify_packing, MultiGraph, PumpkinModel, VertexSet};
use crate::reduce::{lift_cover_step, lift_packing_step, Reducer, StepKind, TraceStep};
use crate::small_model::{find_small_model, SmallModelCase, SmallModelOutcome, Suggestion};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelAction {
    Z1,
    Z2Merge,
    Z2NewVertex,
    Model,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelEntry {
    pub level: usize,
    /// Vertices of the graph at this level.
    pub graph_size: usize,
    pub action: LevelAction,
    /// Deleted vertices for reductions, model vertices otherwise.
    pub vertices: VertexSet,
    pub case: Option<SmallModelCase>,
    /// Set when a suggested reduction could not be applied and a model was
    /// taken from a direct search instead.
    pub suggestion_failed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxCertificate {
    pub c: u32,
    pub n: usize,
    pub cover: VertexSet,
    pub packing: Vec<PumpkinModel>,
    pub f_eff: f64,
    pub log_n: f64,
    pub cover_size: usize,
    pub packing_size: usize,
    /// |cover| ≤ f_eff·log₂ n·|packing|, or both empty.
    pub ratio_holds: bool,
    pub log: Vec<LevelEntry>,
}

enum Frame {
    Reduction {
        before: MultiGraph,
        step: TraceStep,
        after: MultiGraph,
    },
    Model(PumpkinModel),
}

enum Next {
    Reduce(MultiGraph, TraceStep),
    Take(PumpkinModel, bool),
}

fn direct_model(g: &MultiGraph, c: u32, params: &Params) -> Result<PumpkinModel> {
    let m = has_pumpkin(g, c, params.budget)?
        .ok_or_else(|| PumpkinError::Internal("reduced graph has no pumpkin".into()))?;
    minimize_model(g, &m, c)
}

fn action_of(step: &TraceStep) -> LevelAction {
    match step.kind {
        StepKind::Z1 => LevelAction::Z1,
        StepKind::Z2Merge => LevelAction::Z2Merge,
        StepKind::Z2NewVertex => LevelAction::Z2NewVertex,
    }
}

pub fn approx_cover_pack(g: &MultiGraph, c: u32, params: &Params) -> Result<ApproxCertificate> {
    if c == 0 {
        return Err(PumpkinError::Precondition("c must be at least 1".into()));
    }
    let mut reducer = Reducer::new(params.clone());
    let mut frames: Vec<Frame> = vec![];
    let mut log = vec![];
    let mut skipped = vec![];
    let mut cur = g.clone();

    while cur.vertex_count() > 1 {
        let level = frames.len();
        let graph_size = cur.vertex_count();
        if let Some((next, step)) = reducer.step(&cur, c, &mut skipped)? {
            log.push(LevelEntry {
                level,
                graph_size,
                action: action_of(&step),
                vertices: step.deleted.clone(),
                case: None,
                suggestion_failed: false,
            });
            frames.push(Frame::Reduction {
                before: std::mem::replace(&mut cur, next.clone()),
                step,
                after: next,
            });
            continue;
        }
        let res = find_small_model(&cur, c, params)?;
        let case = Some(res.diagnostics.case);
        let next = match res.outcome {
            SmallModelOutcome::Model(m) => Next::Take(m, false),
            SmallModelOutcome::Suggestion(Suggestion::Z2(og)) => match reducer.apply_z2(&cur, &og, c) {
                Ok((h, step)) => Next::Reduce(h, step),
                Err(_) => Next::Take(direct_model(&cur, c, params)?, true),
            },
            SmallModelOutcome::Suggestion(Suggestion::Z1(v)) => {
                if reducer.find_z1(&cur, c)? == Some(v) {
                    Next::Reduce(cur.without_vertex(v), TraceStep::z1(v))
                } else {
                    Next::Take(direct_model(&cur, c, params)?, true)
                }
            }
        };
        match next {
            Next::Reduce(h, step) => {
                log.push(LevelEntry {
                    level,
                    graph_size,
                    action: action_of(&step),
                    vertices: step.deleted.clone(),
                    case,
                    suggestion_failed: false,
                });
                frames.push(Frame::Reduction {
                    before: std::mem::replace(&mut cur, h.clone()),
                    step,
                    after: h,
                });
            }
            Next::Take(m, failed) => {
                log.push(LevelEntry {
                    level,
                    graph_size,
                    action: LevelAction::Model,
                    vertices: m.vertices(),
                    case,
                    suggestion_failed: failed,
                });
                cur = cur.without(&m.vertices());
                frames.push(Frame::Model(m));
            }
        }
    }

    let mut cover = VertexSet::new();
    let mut packing: Vec<PumpkinModel> = vec![];
    while let Some(frame) = frames.pop() {
        match frame {
            Frame::Reduction { before, step, after } => {
                lift_cover_step(&step, &mut cover);
                packing = lift_packing_step(&before, &after, &step, &packing, c)?;
            }
            Frame::Model(m) => {
                cover.extend(m.vertices());
                packing.push(m);
            }
        }
    }
    packing.reverse();

    if has_pumpkin(&g.without(&cover), c, params.budget)?.is_some() {
        return Err(PumpkinError::Internal("approximate cover misses a model".into()));
    }
    verify_packing(g, &packing, c).map_err(|e| PumpkinError::Internal(format!("approximate packing: {e}")))?;

    let n = g.vertex_count();
    let f_eff = params.f_eff(c);
    let log_n = log2_clamped(n);
    let ratio_holds = if packing.is_empty() {
        cover.is_empty()
    } else {
        cover.len() as f64 <= f_eff * log_n * packing.len() as f64
    };
    Ok(ApproxCertificate {
        c,
        n,
        cover_size: cover.len(),
        packing_size: packing.len(),
        cover,
        packing,
        f_eff,
        log_n,
        ratio_holds,
        log,
    })
}
