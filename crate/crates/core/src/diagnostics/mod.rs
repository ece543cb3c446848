//! Posterior summaries, evaluation metrics, effective sample size and the
//! joint-distribution ("getting it right") test of the Gibbs sampler.

mod ess;
mod geweke;
mod ks;
mod summary;

pub use ess::effective_sample_size;
pub use geweke::{geweke_test, GewekeConfig, GewekeReport, GewekeStatistic, Sabotage};
pub use ks::{ks_two_sample, KsResult};
pub use summary::{compute_metrics, quantile_sorted, summarize, MetricReport, PosteriorSummary};
