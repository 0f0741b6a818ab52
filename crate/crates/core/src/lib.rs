//! Spreading symbols over two grids.
//!
//! Two `n^d` grids `A` and `B` are labeled by the same `n^d` symbols. The
//! combined distance of two symbols is their cell distance in `A` plus their
//! cell distance in `B`, and the goal is to make the smallest combined distance
//! as large as possible. This crate provides:
//!
//! * [`construct`]: linear-time modular-coloring constructions with a proven
//!   minimum of `2 floor(sqrt(n/3))` in `L_inf`,
//! * [`metrics`]: exact verifiers for the minimum combined distance,
//! * [`bounds`]: the lower/upper envelope and a constructive upper-bound witness,
//! * [`oracle`]: exhaustive optimum and solution counts for tiny grids,
//! * [`gridio`]: the pair file format and text/SVG rendering,
//! * [`cli`]: the `gridspread` command line.

pub mod bounds;
pub mod cli;
pub mod construct;
mod error;
pub mod grid;
pub mod gridio;
pub mod metrics;
pub mod oracle;

pub use bounds::{lower_bound, upper_bound, upper_bound_witness, BoundsReport, UpperBoundWitness};
pub use construct::{
    color_of, construct_auto, construct_general, construct_special, select_k, ConstructionPlan, Method,
};
pub use error::{Error, Result};
pub use grid::{dist, Arrangement, ArrangementPair, Cell, GridSpec, Norm, Symbol};
pub use gridio::{parse, render, serialize, PairDocument, RenderFormat};
pub use metrics::{
    combined_distance, min_combined, min_combined_naive, min_combined_pruned, Algorithm, VerifyReport,
};
pub use oracle::{count_solutions, exact_optimum, Oracle, OracleResult};
