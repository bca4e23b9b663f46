use crate::graph::VertexId;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, PumpkinError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PumpkinError {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    #[error("self-loop at vertex {0} is not allowed")]
    Loop(VertexId),

    #[error("multiplicity of {u}-{v} would exceed the cap of {cap}")]
    MultiplicityOverflow { u: VertexId, v: VertexId, cap: u32 },

    #[error("search budget exceeded after {expansions} node expansions")]
    BudgetExceeded { expansions: u64 },

    #[error("graph has {n} vertices, above the exhaustive limit of {limit}")]
    SizeLimit { n: usize, limit: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid outgrowth: {0}")]
    InvalidOutgrowth(String),

    #[error("invalid packing: {0}")]
    InvalidPacking(String),

    #[error("not a hitting set: a {c}-pumpkin model survives")]
    NotAHittingSet { c: u32 },

    #[error("inconsistent contraction map: {0}")]
    Contraction(String),

    #[error("model of size {size} exceeds the bound {bound:.2} ({diagnostics})")]
    SizeBound {
        size: usize,
        bound: f64,
        diagnostics: String,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("internal invariant broken: {0}")]
    Internal(String),
}

impl PumpkinError {
    pub fn is_budget(&self) -> bool {
        matches!(self, PumpkinError::BudgetExceeded { .. })
    }
}
