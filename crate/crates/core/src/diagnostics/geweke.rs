//! Joint-distribution test: the marginal-conditional simulator draws
//! `(hyperparameters, θ, y)` straight from the model, the
//! successive-conditional simulator alternates a Gibbs sweep with a fresh
//! `y | θ, σ²`. A correct sampler leaves the joint invariant, so the two
//! streams of test statistics have the same law.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use super::{ks_two_sample, KsResult};
use crate::data::Dataset;
use crate::dist::{
    sample_exact_response, sample_gig, sample_inverse_gamma, sample_polya_gamma,
    sample_soft_truncated_response,
};
use crate::gibbs::{Engine, Sampler, SweepMask};
use crate::model::{ChainState, Constraint, FitConfig, Hyperparameters, ModelStructure, PriorKind, Schedule, Side};
use crate::rng::{streams, RngStream};
use crate::{Error, Result};

/// Largest `n` the harness accepts.
pub const MAX_GEWEKE_N: usize = 15;

/// Deliberate defects, used to check that the test has power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sabotage {
    #[default]
    None,
    /// Never update `σ²`.
    SkipSigma2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GewekeConfig {
    pub n: usize,
    pub order: usize,
    pub prior: PriorKind,
    pub constraint: Constraint,
    pub engine: Engine,
    pub eta: f64,
    /// Spacing of the design grid `x_i = spacing · i`. Smaller spacing
    /// shrinks the prior spread of the higher-order differences relative to
    /// the likelihood, which speeds up the successive-conditional chain.
    pub spacing: f64,
    /// Draws from each simulator.
    pub draws: usize,
    /// Sweeps between retained successive-conditional draws.
    pub thin: usize,
    pub hyper: Hyperparameters,
    pub seed: u64,
    /// Blocks updated by the successive-conditional chain. Any subset of a
    /// valid sweep also leaves the joint invariant, which helps localise a
    /// faulty conditional.
    pub mask: SweepMask,
    /// Start every successive-conditional draw from a fresh exact joint
    /// draw and apply a single sweep, instead of running one long chain.
    /// Checks invariance without relying on mixing.
    pub fresh_starts: bool,
    pub sabotage: Sabotage,
}

impl Default for GewekeConfig {
    fn default() -> Self {
        Self {
            n: 10,
            order: 1,
            prior: PriorKind::Horseshoe,
            constraint: Constraint::None,
            engine: Engine::PolyaGamma,
            eta: 50.0,
            spacing: 0.001,
            draws: 50_000,
            thin: 1000,
            hyper: Hyperparameters {
                a_sigma: 3.0,
                b_sigma: 2.0,
                a_rho: 3.0,
                b_rho: 2.0,
                a_u: 20.0,
                b_u: 0.01,
                a_gamma: 3.0,
                b_gamma: 2.0,
                a_tau: 3.0,
                b_tau: 2.0,
            },
            seed: 0,
            mask: SweepMask::default(),
            fresh_starts: false,
            sabotage: Sabotage::None,
        }
    }
}

impl GewekeConfig {
    /// Defaults for one prior and constraint, with the thinning the
    /// successive-conditional chain needs for nearly independent draws.
    /// The horseshoe's heavy tails make its level wander far slower.
    pub fn for_model(prior: PriorKind, constraint: Constraint) -> Self {
        Self {
            prior,
            constraint,
            thin: match prior {
                PriorKind::Horseshoe => 1000,
                _ => 100,
            },
            ..Self::default()
        }
    }

    fn fit_config(&self) -> FitConfig {
        FitConfig {
            order: self.order,
            prior: self.prior,
            constraint: self.constraint,
            eta: self.eta,
            side: Side::Upper,
            schedule: Schedule {
                iterations: 2,
                burn_in: 1,
                thin: 1,
            },
            hyper: self.hyper,
            seed: self.seed,
        }
    }

    /// Names of the monitored statistics, in report order.
    pub fn statistic_names(&self) -> Vec<&'static str> {
        let mut names = vec!["mean_theta", "theta_1", "sigma2"];
        names.push(match self.prior {
            PriorKind::Laplace => "gamma2",
            _ => "tau2",
        });
        if self.constraint.is_active() {
            names.push("log_rho2");
        }
        names
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GewekeStatistic {
    pub name: &'static str,
    pub ks: KsResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GewekeReport {
    pub statistics: Vec<GewekeStatistic>,
    pub draws: usize,
}

impl GewekeReport {
    pub fn min_p_value(&self) -> f64 {
        self.statistics
            .iter()
            .map(|s| s.ks.p_value)
            .fold(1.0, f64::min)
    }

    /// Every p-value exceeds `alpha / count`.
    pub fn passes_bonferroni(&self, alpha: f64, count: usize) -> bool {
        self.min_p_value() > alpha / count as f64
    }
}

fn statistics(config: &GewekeConfig, state: &ChainState, out: &mut [Vec<f64>]) {
    let n = state.theta.len() as f64;
    out[0].push(state.theta.iter().sum::<f64>() / n);
    out[1].push(state.theta[0]);
    out[2].push(state.sigma2);
    out[3].push(match config.prior {
        PriorKind::Laplace => state.gamma2,
        _ => state.tau2,
    });
    if config.constraint.is_active() {
        out[4].push(state.rho2.ln());
    }
}

fn draw_response(engine: Engine, theta: &[f64], sigma2: f64, eta: f64, rng: &mut RngStream) -> Vec<f64> {
    theta
        .iter()
        .map(|&t| match engine {
            Engine::PolyaGamma => sample_soft_truncated_response(t, sigma2, eta, rng),
            Engine::CoordinateWise => sample_exact_response(t, sigma2, rng),
        })
        .collect()
}

/// One draw of `(state, y)` from the joint model.
fn marginal_draw(
    config: &GewekeConfig,
    structure: &ModelStructure,
    rng: &mut RngStream,
) -> Result<(ChainState, Vec<f64>)> {
    let n = config.n;
    let k = config.order;
    let h = &config.hyper;
    loop {
        let sigma2 = sample_inverse_gamma(h.a_sigma, h.b_sigma, rng)?;
        let mut state = ChainState {
            theta: vec![0.0; n],
            xi: vec![0.0; n],
            sigma2,
            tau2: 1.0,
            psi: 1.0,
            u2: vec![1.0; n],
            nu: vec![1.0; n - k - 1],
            gamma2: 1.0,
            omega: vec![0.0; n],
            v: vec![1.0; structure.constraint_rows()],
            rho2: 1.0,
        };
        for i in 0..=k {
            state.u2[i] = sample_inverse_gamma(h.a_u, h.b_u, rng)?;
        }
        match config.prior {
            PriorKind::Horseshoe => {
                state.psi = sample_inverse_gamma(0.5, 1.0, rng)?;
                state.tau2 = sample_inverse_gamma(0.5, 1.0 / state.psi, rng)?;
                for (j, i) in (k + 1..n).enumerate() {
                    state.nu[j] = sample_inverse_gamma(0.5, 1.0, rng)?;
                    state.u2[i] = sample_inverse_gamma(0.5, 1.0 / state.nu[j], rng)?;
                }
            }
            PriorKind::Laplace => {
                state.gamma2 = sample_inverse_gamma(h.a_gamma, h.b_gamma, rng)?;
                for i in k + 1..n {
                    let e: f64 = rng.sample(Exp1);
                    state.u2[i] = 2.0 * e / state.gamma2;
                }
            }
            PriorKind::Normal => {
                state.tau2 = sample_inverse_gamma(h.a_tau, h.b_tau, rng)?;
            }
        }
        // θ = D⁻¹ (σ U^{1/2} z): D is square and lower triangular
        let w = structure.prior_precisions(&state);
        let d = structure.difference().full();
        let sd = sigma2.sqrt();
        for r in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            let (start, coeffs) = d.row(r);
            let diag_pos = r - start;
            let mut acc = sd * z / w[r].sqrt();
            for (c, &coef) in coeffs.iter().enumerate().take(diag_pos) {
                acc -= coef * state.theta[start + c];
            }
            state.theta[r] = acc / coeffs[diag_pos];
        }
        if let Some(p) = structure.penalty() {
            state.rho2 = sample_inverse_gamma(h.a_rho, h.b_rho, rng)?;
            let s = state.rho2 * sigma2;
            let pt = p.apply(&state.theta);
            let excess: f64 = pt.iter().map(|x| x.max(0.0)).sum();
            let u: f64 = rng.random();
            if u >= (-excess / s).exp() {
                continue;
            }
            for (vi, x) in state.v.iter_mut().zip(&pt) {
                let chi = (x * x / (2.0 * s)).max(1e-12);
                *vi = sample_gig(0.5, chi, 1.0 / (2.0 * s), rng)?;
            }
        }
        let y = draw_response(config.engine, &state.theta, sigma2, config.eta, rng);
        for i in 0..n {
            state.xi[i] = state.theta[i] - y[i];
            state.omega[i] = sample_polya_gamma(config.eta * state.xi[i], rng);
        }
        return Ok((state, y));
    }
}

fn check(config: &GewekeConfig) -> Result<()> {
    if config.n > MAX_GEWEKE_N {
        return Err(Error::Config(alloc::format!(
            "the joint-distribution test needs n <= {MAX_GEWEKE_N}, got {}",
            config.n
        )));
    }
    if config.n < config.order + 3 {
        return Err(Error::Dimension("n too small for the chosen order".into()));
    }
    for (name, value) in config.hyper.iter() {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::ImproperPrior(alloc::format!(
                "{name} = {value} does not give a proper prior"
            )));
        }
    }
    if !(config.spacing > 0.0) || !config.spacing.is_finite() {
        return Err(Error::domain("grid spacing", "positive and finite", config.spacing));
    }
    if config.draws < 2 || config.thin == 0 {
        return Err(Error::Config("need at least two draws and thin >= 1".into()));
    }
    config.fit_config().validate()
}

/// Runs both simulators and compares each statistic with a two-sample KS test.
pub fn geweke_test(config: &GewekeConfig) -> Result<GewekeReport> {
    check(config)?;
    let fit = config.fit_config();
    let grid: Vec<f64> = (1..=config.n).map(|i| config.spacing * i as f64).collect();
    let data = Dataset::new(grid.clone(), vec![0.0; config.n])?;
    let structure = ModelStructure::new(&data, &fit)?;
    let names = config.statistic_names();

    let mut rng = RngStream::new(config.seed, streams::GEWEKE_MARGINAL);
    let mut marginal: Vec<Vec<f64>> = vec![Vec::with_capacity(config.draws); names.len()];
    for _ in 0..config.draws {
        let (state, _) = marginal_draw(config, &structure, &mut rng)?;
        statistics(config, &state, &mut marginal);
    }

    let mut rng = RngStream::new(config.seed, streams::GEWEKE_SUCCESSIVE);
    let mut mask = config.mask;
    if config.sabotage == Sabotage::SkipSigma2 {
        mask.sigma2 = false;
    }
    let mut successive: Vec<Vec<f64>> = vec![Vec::with_capacity(config.draws); names.len()];
    if config.fresh_starts {
        for t in 0..config.draws {
            let (state, y) = marginal_draw(config, &structure, &mut rng)?;
            let start = Dataset::new(grid.clone(), y)?;
            let mut sampler =
                Sampler::from_state(start, fit.clone(), config.engine, state, rng)?.with_mask(mask);
            sampler.sweep().map_err(|e| Error::Sweep {
                sweep: t,
                source: alloc::boxed::Box::new(e),
            })?;
            statistics(config, sampler.state(), &mut successive);
            rng = sampler.into_rng();
        }
    } else {
        let (state, y) = marginal_draw(config, &structure, &mut rng)?;
        let start = Dataset::new(grid.clone(), y)?;
        let mut sampler =
            Sampler::from_state(start, fit, config.engine, state, rng)?.with_mask(mask);
        for t in 0..config.draws {
            for _ in 0..config.thin {
                sampler.sweep().map_err(|e| Error::Sweep {
                    sweep: t,
                    source: alloc::boxed::Box::new(e),
                })?;
                let st = sampler.state();
                let (theta, sigma2) = (st.theta.clone(), st.sigma2);
                let y =
                    draw_response(config.engine, &theta, sigma2, config.eta, sampler.rng_mut());
                sampler.set_responses(&y)?;
            }
            statistics(config, sampler.state(), &mut successive);
        }
    }

    let statistics = names
        .into_iter()
        .zip(marginal.iter().zip(&successive))
        .map(|(name, (a, b))| GewekeStatistic {
            name,
            ks: ks_two_sample(a, b),
        })
        .collect();
    Ok(GewekeReport {
        statistics,
        draws: config.draws,
    })
}
