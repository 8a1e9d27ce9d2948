//! Simulation and analysis of the bipartite K_{2,2}-free random process.
//!
//! Starting from the empty graph on `X ∪ Y`, `|X| = |Y| = n`, the process adds
//! uniformly random pairs of `X × Y` that do not complete a `K_{2,2}` until
//! none remain. The crate provides:
//!
//! * [`graph`]: the bipartite graph with bitset codegree queries;
//! * [`process`]: the incremental engine with `O(1)` open-pair sampling;
//! * [`hypergraph`]: the generic random greedy independent-set process and
//!   the 4-uniform hypergraph of `K_{2,2}` copies it runs on;
//! * [`analysis`]: predicted trajectories, tracked rectangles, audits,
//!   bipartite independence numbers, scaling fits and certificates;
//! * [`harness`]: reproducible multi-replication experiments.
//!
//! Floating-point analysis is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix it to `f64`, which is what the harness uses.

pub mod analysis;
pub mod error;
pub mod graph;
pub mod harness;
pub mod hypergraph;
pub mod process;
pub mod scalar;

pub use error::{Error, Result};
pub use graph::{BipartiteGraph, Pair};
pub use process::{ChoiceStream, Chooser, PairState, ProcessState, Step, StopRule};
pub use scalar::Real;

pub type Curves = analysis::curves::PredictedCurves<f64>;
pub type ReferenceBounds = analysis::curves::ReferenceCurves<f64>;
pub type FitResult = analysis::fit::FitResult<f64>;
pub type DegreeAudit = analysis::audit::DegreeAudit<f64>;
pub type DensityAudit = analysis::audit::DensityAudit<f64>;
pub type BbReport = hypergraph::BbConditions<f64>;

/// Version string embedded in certificates and summaries.
pub const TOOL_VERSION: &str = concat!("k22free ", env!("CARGO_PKG_VERSION"));
