//! One-dimensional bin packing around a linear-time range-matching heuristic.
//!
//! - [`model`]: exact weights, instances, results and their validation.
//! - [`range`]: the range-matching packer with multi-range and scaling variants.
//! - [`baselines`]: first/best fit (decreasing) and next fit.
//! - [`oracle`]: exact optimum for small instances and the `ceil(W)` bound.
//! - [`orlib`]: OR-Library files, dataset caching, seeded generators.
//! - [`bench`]: Ratio records, dataset averages and report emission.
//! - [`batch`]: parallel (feature `parallel`) or sequential batch evaluation.

pub mod algorithm;
pub mod baselines;
pub mod batch;
pub mod bench;
pub mod model;
pub mod oracle;
pub mod orlib;
pub mod range;

pub use algorithm::Algorithm;
pub use model::{
    fill_stats, validate_result, Bin, Counters, FillStats, Instance, Item, ItemId, PackingResult,
    Violation, Weight,
};
pub use range::{pack, pack_scaled, RangeConfig, SelectionPolicy};
