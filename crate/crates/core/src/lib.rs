//! Covering and packing c-pumpkin minors in multigraphs.

pub mod approx;
pub mod config;
pub mod detect;
pub mod error;
pub mod exact;
pub mod graph;
pub mod hedgehog;
pub mod io;
pub mod oracle;
pub mod reduce;
pub mod small_model;

pub use config::Params;
pub use error::{PumpkinError, Result};
pub use graph::{MultiGraph, PumpkinModel, VertexId, VertexSet};
