//! Replication, benchmark and η-sensitivity drivers over simulated
//! scenarios. Replications run in parallel; timings run serially.

use std::time::Instant;

use btf_core::{
    compute_metrics, effective_sample_size, generate_dataset, run_chain, run_chain_coordinatewise,
    summarize, Constraint, Dataset, Engine, FitConfig, MetricReport, PosteriorDraws, PriorKind,
    Scenario, Schedule,
};
use rayon::prelude::*;

use crate::error::{CliError, Result};

/// Environment variable holding the worker-thread count.
pub const THREADS_ENV: &str = "BTF_THREADS";

/// Runs `f` on a pool sized by [`THREADS_ENV`] (all cores when unset).
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV}={v:?} is not a thread count")))?;
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// A named prior/constraint combination such as `hs` or `hsni`.
#[derive(Debug, Clone, PartialEq)]
pub struct Method {
    pub name: String,
    pub prior: PriorKind,
    pub constraint: Constraint,
}

impl Method {
    pub fn new(prior: PriorKind, constraint: Constraint) -> Self {
        let suffix = if constraint.is_active() { "ni" } else { "" };
        Self {
            name: format!("{}{suffix}", prior.short_name()),
            prior,
            constraint,
        }
    }

    /// `hs`, `lap`, `nor`, optionally suffixed with `ni` for the nearly
    /// increasing constraint.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (base, constraint) = match s.strip_suffix("ni") {
            Some(b) => (b, Constraint::NearlyIncreasing),
            None => (s.as_str(), Constraint::None),
        };
        let prior = parse_prior(base)?;
        Ok(Self::new(prior, constraint))
    }

    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        s.split(',').filter(|p| !p.trim().is_empty()).map(Self::parse).collect()
    }
}

pub fn parse_prior(s: &str) -> Result<PriorKind> {
    match s {
        "hs" => Ok(PriorKind::Horseshoe),
        "lap" => Ok(PriorKind::Laplace),
        "nor" => Ok(PriorKind::Normal),
        other => Err(CliError::Usage(format!("unknown prior {other:?} (hs, lap, nor)"))),
    }
}

/// Shared settings of every fit a driver runs.
#[derive(Debug, Clone, PartialEq)]
pub struct FitPlan {
    pub schedule: Schedule,
    pub eta: f64,
    /// Defaults to the scenario's natural order.
    pub order: Option<usize>,
    pub level: f64,
    pub seed: u64,
}

impl Default for FitPlan {
    fn default() -> Self {
        Self {
            schedule: Schedule::default(),
            eta: 500.0,
            order: None,
            level: 0.95,
            seed: 0,
        }
    }
}

impl FitPlan {
    fn config(&self, scenario: &Scenario, method: &Method, chain_seed: u64) -> FitConfig {
        FitConfig {
            order: self.order.unwrap_or(scenario.kind.fit_order()),
            prior: method.prior,
            constraint: method.constraint,
            eta: self.eta,
            schedule: self.schedule,
            seed: chain_seed,
            ..FitConfig::default()
        }
    }

    fn data_seed(&self, rep: usize) -> u64 {
        self.seed.wrapping_add(rep as u64)
    }
}

/// How far a posterior mean strays below the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCheck {
    /// Fraction of coordinates with `θ̂_i ≥ y_i`.
    pub feasible: f64,
    /// `max_i (y_i − θ̂_i)₊`.
    pub max_violation: f64,
}

impl BoundaryCheck {
    pub fn new(mean: &[f64], data: &Dataset) -> Self {
        let n = mean.len();
        let mut ok = 0;
        let mut worst = 0.0f64;
        for (m, y) in mean.iter().zip(data.y()) {
            if m >= y {
                ok += 1;
            } else {
                worst = worst.max(y - m);
            }
        }
        Self {
            feasible: ok as f64 / n as f64,
            max_violation: worst,
        }
    }

    /// At least 95% of coordinates feasible and no violation above `10/η`.
    pub fn passes(&self, eta: f64) -> bool {
        self.feasible >= 0.95 && self.max_violation <= 10.0 / eta
    }
}

/// Outcome of one method on one replicated dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    pub method: String,
    pub rep: usize,
    pub result: std::result::Result<(MetricReport, BoundaryCheck), String>,
}

/// Per-method aggregate over replications.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: String,
    pub rmse_mean: f64,
    /// `None` with fewer than two successful replications.
    pub rmse_sd: Option<f64>,
    pub al: f64,
    pub cp: f64,
    pub replications: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationTable {
    pub records: Vec<ReplicationRecord>,
    pub summaries: Vec<MethodSummary>,
}

fn fit_one(
    scenario: &Scenario,
    plan: &FitPlan,
    method: &Method,
    rep: usize,
) -> std::result::Result<(MetricReport, BoundaryCheck), String> {
    let (data, truth) = generate_dataset(scenario, plan.data_seed(rep));
    let config = plan.config(scenario, method, plan.data_seed(rep));
    let draws = run_chain(&data, &config).map_err(|e| e.to_string())?;
    let summary = summarize(&draws, plan.level).map_err(|e| e.to_string())?;
    let mut report = compute_metrics(&summary, &truth).map_err(|e| e.to_string())?;
    report.scenario = scenario.kind.short_name().to_string();
    report.noise = noise_label(scenario);
    Ok((report, BoundaryCheck::new(&summary.mean, &data)))
}

fn noise_label(scenario: &Scenario) -> String {
    match scenario.noise {
        btf_core::Noise::HalfNormal(s) => format!("hn({s})"),
        btf_core::Noise::Mixture => "mixture".to_string(),
    }
}

fn mean_sd(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = (xs.len() > 1)
        .then(|| (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    (mean, sd)
}

/// Fits every method to `reps` independent datasets. All methods see the
/// same datasets. A failed chain is recorded and left out of the averages.
pub fn run_replications(
    scenario: &Scenario,
    methods: &[Method],
    reps: usize,
    plan: &FitPlan,
) -> Result<ReplicationTable> {
    if reps == 0 {
        return Err(CliError::Usage("reps must be at least 1".into()));
    }
    let jobs: Vec<(usize, usize)> = (0..reps)
        .flat_map(|r| (0..methods.len()).map(move |m| (r, m)))
        .collect();
    let records: Vec<ReplicationRecord> = with_pool(|| {
        jobs.par_iter()
            .map(|&(rep, m)| ReplicationRecord {
                method: methods[m].name.clone(),
                rep,
                result: fit_one(scenario, plan, &methods[m], rep),
            })
            .collect()
    })?;
    let summaries = methods
        .iter()
        .map(|method| {
            let ok: Vec<&MetricReport> = records
                .iter()
                .filter(|r| r.method == method.name)
                .filter_map(|r| r.result.as_ref().ok().map(|(m, _)| m))
                .collect();
            let failures = reps - ok.len();
            let rmse: Vec<f64> = ok.iter().map(|m| m.rmse).collect();
            let (rmse_mean, rmse_sd) = if ok.is_empty() { (f64::NAN, None) } else { mean_sd(&rmse) };
            let avg = |f: fn(&MetricReport) -> f64| ok.iter().map(|m| f(m)).sum::<f64>() / ok.len() as f64;
            MethodSummary {
                method: method.name.clone(),
                rmse_mean,
                rmse_sd,
                al: avg(|m| m.al),
                cp: avg(|m| m.cp),
                replications: ok.len(),
                failures,
            }
        })
        .collect();
    Ok(ReplicationTable { records, summaries })
}

/// Timing and mixing of one engine at one size, averaged over replications.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub engine: Engine,
    pub seconds: f64,
    pub mean_ess: f64,
    pub reps: usize,
}

pub fn engine_name(engine: Engine) -> &'static str {
    match engine {
        Engine::PolyaGamma => "pg",
        Engine::CoordinateWise => "cw",
    }
}

/// Mean ESS over the coordinates of `θ`, skipping constant traces.
pub fn mean_ess(draws: &PosteriorDraws) -> f64 {
    let values: Vec<f64> = (0..draws.dim())
        .filter_map(|i| effective_sample_size(&draws.coordinate(i)).ok())
        .collect();
    values.iter().sum::<f64>() / values.len().max(1) as f64
}

/// Runs one chain and stamps its wall-clock time.
pub fn timed_chain(data: &Dataset, config: &FitConfig, engine: Engine) -> Result<PosteriorDraws> {
    let start = Instant::now();
    let mut draws = match engine {
        Engine::PolyaGamma => run_chain(data, config)?,
        Engine::CoordinateWise => run_chain_coordinatewise(data, config)?,
    };
    draws.elapsed = Some(start.elapsed());
    Ok(draws)
}

/// Both engines on the same datasets for each size. Runs serially so the
/// timings are not disturbed by sibling chains.
pub fn bench_samplers(
    scenario: &Scenario,
    sizes: &[usize],
    reps: usize,
    method: &Method,
    plan: &FitPlan,
) -> Result<Vec<BenchRow>> {
    if sizes.is_empty() || reps == 0 {
        return Err(CliError::Usage("bench needs at least one size and one replication".into()));
    }
    let mut rows = Vec::new();
    for &n in sizes {
        let sc = Scenario { n, ..*scenario };
        Scenario::new(sc.kind, n, sc.noise)?;
        for engine in [Engine::PolyaGamma, Engine::CoordinateWise] {
            let (mut secs, mut ess) = (0.0, 0.0);
            for rep in 0..reps {
                let (data, _) = generate_dataset(&sc, plan.data_seed(rep));
                let config = plan.config(&sc, method, plan.data_seed(rep));
                let draws = timed_chain(&data, &config, engine)?;
                secs += draws.elapsed.map_or(0.0, |d| d.as_secs_f64());
                ess += mean_ess(&draws);
            }
            rows.push(BenchRow {
                n,
                engine,
                seconds: secs / reps as f64,
                mean_ess: ess / reps as f64,
                reps,
            });
        }
    }
    Ok(rows)
}

/// Sample autocorrelations of `trace` at lags `0..=max_lag`.
pub fn autocorrelation(trace: &[f64], max_lag: usize) -> Vec<f64> {
    let m = trace.len();
    let mean = trace.iter().sum::<f64>() / m as f64;
    let var: f64 = trace.iter().map(|x| (x - mean).powi(2)).sum();
    (0..=max_lag.min(m.saturating_sub(1)))
        .map(|lag| {
            if var == 0.0 {
                return f64::NAN;
            }
            trace[..m - lag]
                .iter()
                .zip(&trace[lag..])
                .map(|(a, b)| (a - mean) * (b - mean))
                .sum::<f64>()
                / var
        })
        .collect()
}

/// RMSE of one fit per replication and η, on shared datasets and seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaRecord {
    pub eta: f64,
    pub rep: usize,
    pub rmse: f64,
    pub boundary: BoundaryCheck,
}

pub fn eta_sensitivity(
    scenario: &Scenario,
    etas: &[f64],
    reps: usize,
    method: &Method,
    plan: &FitPlan,
) -> Result<Vec<EtaRecord>> {
    if etas.is_empty() || reps == 0 {
        return Err(CliError::Usage("eta sensitivity needs at least one eta and one replication".into()));
    }
    let jobs: Vec<(usize, f64)> = (0..reps)
        .flat_map(|r| etas.iter().map(move |&e| (r, e)))
        .collect();
    let results: Vec<Result<EtaRecord>> = with_pool(|| {
        jobs.par_iter()
            .map(|&(rep, eta)| {
                let plan = FitPlan { eta, ..plan.clone() };
                let (report, boundary) = fit_one(scenario, &plan, method, rep)
                    .map_err(|e| CliError::Failed(format!("eta {eta}, replication {rep}: {e}")))?;
                Ok(EtaRecord {
                    eta,
                    rep,
                    rmse: report.rmse,
                    boundary,
                })
            })
            .collect()
    })?;
    results.into_iter().collect()
}

/// Median RMSE per η, in the order given.
pub fn median_by_eta(records: &[EtaRecord], etas: &[f64]) -> Vec<(f64, f64)> {
    etas.iter()
        .map(|&eta| {
            let mut v: Vec<f64> = records.iter().filter(|r| r.eta == eta).map(|r| r.rmse).collect();
            v.sort_by(f64::total_cmp);
            (eta, btf_core::quantile_sorted(&v, 0.5))
        })
        .collect()
}
