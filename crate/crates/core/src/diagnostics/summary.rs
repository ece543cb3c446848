use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::effective_sample_size;
use crate::gibbs::PosteriorDraws;
use crate::{Error, Result};

/// Pointwise posterior summary of `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    pub mean: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Per-coordinate ESS, `NaN` where it is undefined.
    pub ess: Vec<f64>,
    /// Central credible level, e.g. 0.95.
    pub level: f64,
}

/// RMSE, average interval length and coverage against a known truth.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricReport {
    pub rmse: f64,
    pub al: f64,
    pub cp: f64,
    pub replications: usize,
    pub scenario: String,
    pub noise: String,
}

/// Quantile `p` of sorted data by linear interpolation between order
/// statistics (`h = (m − 1)p`).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let m = sorted.len();
    if m == 1 {
        return sorted[0];
    }
    let h = (m - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(m - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Means, equal-tailed credible bounds at `level` and ESS per coordinate.
pub fn summarize(draws: &PosteriorDraws, level: f64) -> Result<PosteriorSummary> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain("credible level", "in (0, 1)", level));
    }
    let m = draws.len();
    if m == 0 {
        return Err(Error::EmptyDraws);
    }
    let n = draws.dim();
    let alpha = 0.5 * (1.0 - level);
    let mut mean = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    let mut ess = Vec::with_capacity(n);
    for i in 0..n {
        let mut col = draws.coordinate(i);
        ess.push(effective_sample_size(&col).unwrap_or(f64::NAN));
        mean.push(col.iter().sum::<f64>() / m as f64);
        col.sort_by(f64::total_cmp);
        lower.push(quantile_sorted(&col, alpha));
        upper.push(quantile_sorted(&col, 1.0 - alpha));
    }
    Ok(PosteriorSummary {
        mean,
        lower,
        upper,
        ess,
        level,
    })
}

/// `RMSE = (n⁻¹Σ(f_i − θ̂_i)²)^{1/2}`, `AL = n⁻¹Σ(hi_i − lo_i)`,
/// `CP = n⁻¹Σ 1{lo_i ≤ f_i ≤ hi_i}`.
pub fn compute_metrics(summary: &PosteriorSummary, truth: &[f64]) -> Result<MetricReport> {
    let n = truth.len();
    if summary.mean.len() != n {
        return Err(Error::Dimension(alloc::format!(
            "summary has {} coordinates, truth has {n}",
            summary.mean.len()
        )));
    }
    if n == 0 {
        return Err(Error::EmptyDraws);
    }
    let nf = n as f64;
    let mut sq = 0.0;
    let mut len = 0.0;
    let mut hits = 0usize;
    for i in 0..n {
        let d = truth[i] - summary.mean[i];
        sq += d * d;
        len += summary.upper[i] - summary.lower[i];
        if summary.lower[i] <= truth[i] && truth[i] <= summary.upper[i] {
            hits += 1;
        }
    }
    Ok(MetricReport {
        rmse: (sq / nf).sqrt(),
        al: len / nf,
        cp: hits as f64 / nf,
        replications: 1,
        ..MetricReport::default()
    })
}
