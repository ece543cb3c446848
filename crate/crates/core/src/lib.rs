//! Bayesian boundary trend filtering.
//!
//! Estimates the upper (or lower) support boundary of scattered data with a
//! trend-filtering prior on the boundary values, a sigmoid-softened
//! truncated-normal working likelihood and global-local shrinkage on the
//! `(k+1)`-th order differences. Posterior draws come from a Gibbs sampler
//! that uses Pólya-Gamma augmentation for the boundary vector, with banded
//! linear algebra so that one sweep costs `O(n)`.
//!
//! The crate is `no_std` and only needs an allocator. File formats, timing,
//! threading and the command-line interface live in the companion `btf`
//! crate.
//!
//! ```
//! use btf_core::{generate_dataset, run_chain, FitConfig, Noise, Scenario, ScenarioKind, Schedule};
//!
//! let scenario = Scenario::new(ScenarioKind::Sqrt, 30, Noise::HalfNormal(1.0)).unwrap();
//! let (data, _truth) = generate_dataset(&scenario, 7);
//! let config = FitConfig {
//!     schedule: Schedule { iterations: 300, burn_in: 100, thin: 2 },
//!     ..FitConfig::default()
//! };
//! let draws = run_chain(&data, &config).unwrap();
//! assert_eq!(draws.len(), 100);
//! ```
#![no_std]
#![deny(missing_debug_implementations)]
// `!(x > 0.0)` is used throughout so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

// Modules import `num_traits::Float` for libm-backed float methods. It goes
// unused whenever std ends up in the dependency graph, hence the allows.

pub mod banded;
pub mod data;
pub mod diagnostics;
pub mod difference;
pub mod dist;
mod error;
pub mod gibbs;
pub(crate) mod math;
pub mod model;
pub mod rng;
pub mod scenario;

pub use banded::{BandedCholesky, BandedSpd};
pub use data::Dataset;
pub use diagnostics::{
    compute_metrics, effective_sample_size, geweke_test, ks_two_sample, summarize, GewekeConfig,
    GewekeReport, GewekeStatistic, KsResult, MetricReport, PosteriorSummary, quantile_sorted,
    Sabotage,
};
pub use difference::{
    build_adjusted_difference_matrix, build_difference_matrix, weighted_gram, BandedRows,
    DifferenceOperator,
};
pub use error::{Error, Result};
pub use gibbs::{run_chain, run_chain_coordinatewise, Engine, PosteriorDraws, Sampler, SweepMask};
pub use model::{
    assemble_precision, init_chain, log_soft_likelihood, orient_for_side, ChainState, Constraint,
    FitConfig, Hyperparameters, PrecisionSystem, PriorKind, Schedule, Side,
};
pub use rng::RngStream;
pub use scenario::{generate_dataset, true_function, Noise, Scenario, ScenarioKind, SigmoidReading};
