//! Gibbs sweeps for every prior and constraint, with two engines for the
//! boundary vector: the Pólya-Gamma block update under the soft likelihood
//! and an exact coordinate-wise truncated-normal update.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

#[allow(unused_imports)]
use num_traits::Float;

use crate::data::Dataset;
use crate::dist::{
    sample_gaussian_banded_precision_into, sample_gig, sample_inverse_gamma,
    sample_inverse_gaussian, sample_polya_gamma, sample_truncnorm_lower,
};
use crate::model::{
    init_chain, orient_for_side, ChainState, Constraint, FitConfig, ModelStructure, PriorKind,
    Side,
};
use crate::rng::{streams, RngStream};
use crate::{Error, Result};

const DIFF_FLOOR: f64 = 1e-12;
const CHI_FLOOR: f64 = 1e-12;

/// How the boundary vector is updated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    /// Block update of `ξ` given Pólya-Gamma latents (soft likelihood).
    PolyaGamma,
    /// One left-to-right pass of univariate truncated normals (exact likelihood).
    CoordinateWise,
}

/// Selects which blocks a sweep updates. Everything is on by default;
/// switching a block off is only useful for testing the test harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepMask {
    pub theta: bool,
    pub sigma2: bool,
    pub prior: bool,
    pub constraint: bool,
}

impl Default for SweepMask {
    fn default() -> Self {
        Self {
            theta: true,
            sigma2: true,
            prior: true,
            constraint: true,
        }
    }
}

/// Retained draws of one chain, in the caller's orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    dim: usize,
    /// Row-major `len() × dim()`.
    pub theta: Vec<f64>,
    pub sigma2: Vec<f64>,
    /// Empty for the Laplace prior.
    pub tau2: Vec<f64>,
    /// Laplace prior only.
    pub gamma2: Vec<f64>,
    /// Constrained fits only.
    pub rho2: Vec<f64>,
    pub config: FitConfig,
    pub engine: Engine,
    /// Filled in by callers that can read a clock.
    pub elapsed: Option<Duration>,
}

impl PosteriorDraws {
    fn with_capacity(dim: usize, m: usize, config: &FitConfig, engine: Engine) -> Self {
        let traced = |on: bool| if on { Vec::with_capacity(m) } else { Vec::new() };
        Self {
            dim,
            theta: Vec::with_capacity(m * dim),
            sigma2: Vec::with_capacity(m),
            tau2: traced(config.prior != PriorKind::Laplace),
            gamma2: traced(config.prior == PriorKind::Laplace),
            rho2: traced(config.constraint.is_active()),
            config: config.clone(),
            engine,
            elapsed: None,
        }
    }

    /// Builds draws from raw parts; `theta` is row-major with `dim` columns.
    pub fn from_theta(theta: Vec<f64>, dim: usize, config: FitConfig, engine: Engine) -> Result<Self> {
        if dim == 0 || !theta.len().is_multiple_of(dim) {
            return Err(Error::Dimension("theta draws are not a whole number of rows".into()));
        }
        Ok(Self {
            dim,
            theta,
            sigma2: Vec::new(),
            tau2: Vec::new(),
            gamma2: Vec::new(),
            rho2: Vec::new(),
            config,
            engine,
            elapsed: None,
        })
    }

    /// Number of retained draws.
    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.theta.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Length of each `θ` draw.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    pub fn draw(&self, s: usize) -> &[f64] {
        &self.theta[s * self.dim..(s + 1) * self.dim]
    }

    /// Trace of coordinate `i`.
    pub fn coordinate(&self, i: usize) -> Vec<f64> {
        self.theta.iter().skip(i).step_by(self.dim).copied().collect()
    }

    pub fn posterior_mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.dim];
        for row in self.theta.chunks(self.dim) {
            for (m, t) in mean.iter_mut().zip(row) {
                *m += t;
            }
        }
        let m = self.len().max(1) as f64;
        mean.iter_mut().for_each(|v| *v /= m);
        mean
    }
}

/// One Gibbs chain in the upper-boundary frame.
#[derive(Debug, Clone)]
pub struct Sampler {
    data: Dataset,
    config: FitConfig,
    structure: ModelStructure,
    state: ChainState,
    rng: RngStream,
    engine: Engine,
    mask: SweepMask,
    dtheta: Vec<f64>,
    weights: Vec<f64>,
    scratch: Vec<f64>,
}

impl Sampler {
    /// Orients the data, initialises the chain from `config.seed` and checks
    /// the configuration.
    pub fn new(data: &Dataset, config: &FitConfig, engine: Engine) -> Result<Self> {
        config.validate()?;
        let oriented = orient_for_side(data, config.side);
        let mut inner = config.clone();
        if config.side == Side::Lower {
            inner.constraint = config.constraint.flipped();
            inner.side = Side::Upper;
        }
        let mut rng = RngStream::new(config.seed, streams::CHAIN);
        let state = init_chain(&oriented, &inner, &mut rng)?;
        Self::from_state(oriented, inner, engine, state, rng)
    }

    /// Starts from a given state. `data` and `config` are taken as already
    /// being in the upper-boundary frame.
    pub fn from_state(
        data: Dataset,
        config: FitConfig,
        engine: Engine,
        state: ChainState,
        rng: RngStream,
    ) -> Result<Self> {
        let structure = ModelStructure::new(&data, &config)?;
        let n = data.len();
        if state.theta.len() != n
            || state.xi.len() != n
            || state.u2.len() != n
            || state.omega.len() != n
            || state.nu.len() != structure.penalised()
            || state.v.len() != structure.constraint_rows()
        {
            return Err(Error::Dimension("chain state does not match the model".into()));
        }
        Ok(Self {
            data,
            config,
            structure,
            state,
            rng,
            engine,
            mask: SweepMask::default(),
            dtheta: vec![0.0; n],
            weights: vec![0.0; n],
            scratch: vec![0.0; n],
        })
    }

    pub fn with_mask(mut self, mask: SweepMask) -> Self {
        self.mask = mask;
        self
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn structure(&self) -> &ModelStructure {
        &self.structure
    }

    pub fn rng_mut(&mut self) -> &mut RngStream {
        &mut self.rng
    }

    pub fn into_rng(self) -> RngStream {
        self.rng
    }

    /// Replaces the responses, keeping `ξ = θ − y`.
    pub fn set_responses(&mut self, y: &[f64]) -> Result<()> {
        self.data.set_y(y)?;
        for ((xi, t), yi) in self.state.xi.iter_mut().zip(&self.state.theta).zip(y) {
            *xi = t - yi;
        }
        Ok(())
    }

    /// One full sweep: `θ`, `σ²`, prior scales, constraint latents.
    pub fn sweep(&mut self) -> Result<()> {
        if self.mask.theta {
            match self.engine {
                Engine::PolyaGamma => self.step_theta_pg()?,
                Engine::CoordinateWise => self.step_theta_coordinatewise()?,
            }
        }
        if self.mask.sigma2 {
            self.step_sigma2()?;
        }
        if self.mask.prior {
            match self.config.prior {
                PriorKind::Horseshoe => self.step_horseshoe_hyper()?,
                PriorKind::Laplace => self.step_laplace_hyper()?,
                PriorKind::Normal => self.step_normal_hyper()?,
            }
        }
        if self.mask.constraint && self.config.constraint.is_active() {
            self.step_ni_latents()?;
        }
        Ok(())
    }

    /// `ω_i ~ PG(1, ηξ_i)`, then `ξ ~ N((η²Ω + A)⁻¹(ηκ + b), (η²Ω + A)⁻¹)`
    /// with `κ_i = 1/2`, and `θ = ξ + y`.
    pub fn step_theta_pg(&mut self) -> Result<()> {
        let eta = self.config.eta;
        for (w, xi) in self.state.omega.iter_mut().zip(&self.state.xi) {
            *w = sample_polya_gamma(eta * xi, &mut self.rng);
        }
        let sys = self.structure.assemble(&self.state, self.data.y())?;
        let mut a = sys.a;
        let eta2 = eta * eta;
        for (i, w) in self.state.omega.iter().enumerate() {
            a.add_diagonal(i, eta2 * w);
        }
        let mut rhs = sys.b;
        rhs.iter_mut().for_each(|b| *b += 0.5 * eta);
        sample_gaussian_banded_precision_into(&a, &mut rhs, &mut self.rng)?;
        for (i, xi) in rhs.iter().enumerate() {
            if !xi.is_finite() {
                return Err(Error::NonFinite { what: "xi", index: i });
            }
        }
        let st = &mut self.state;
        for (((t, xi), new), y) in st.theta.iter_mut().zip(st.xi.iter_mut()).zip(&rhs).zip(self.data.y()) {
            *t = new + y;
            *xi = *t - y;
        }
        Ok(())
    }

    /// Exact update of each `θ_i` from its truncated-normal full conditional
    /// on `[y_i, ∞)` under the indicator likelihood.
    pub fn step_theta_coordinatewise(&mut self) -> Result<()> {
        let sys = self.structure.assemble(&self.state, self.data.y())?;
        let q = sys.a;
        let y = self.data.y();
        let mut c = q.mul_vec(y);
        c.iter_mut().zip(&sys.b).for_each(|(ci, bi)| *ci += bi);
        let n = y.len();
        let p = q.half_bandwidth();
        let theta = &mut self.state.theta;
        for i in 0..n {
            let lo = i.saturating_sub(p);
            let hi = (i + p + 1).min(n);
            let mut s = 0.0;
            for j in lo..hi {
                if j != i {
                    s += q.get(i, j) * theta[j];
                }
            }
            let qii = q.diagonal(i);
            if !(qii > 0.0) {
                return Err(Error::Conditioning { pivot: i });
            }
            theta[i] = sample_truncnorm_lower((c[i] - s) / qii, 1.0 / qii, y[i], &mut self.rng)?;
        }
        for ((xi, t), yi) in self.state.xi.iter_mut().zip(theta.iter()).zip(y) {
            *xi = t - yi;
        }
        Ok(())
    }

    fn refresh_differences(&mut self) {
        self.structure
            .difference()
            .full()
            .apply_into(&self.state.theta, &mut self.dtheta);
    }

    /// `P θ` into the scratch buffer; returns the number of rows.
    fn refresh_constraint(&mut self) -> usize {
        match self.structure.penalty() {
            Some(p) => {
                let r = p.nrows();
                p.apply_into(&self.state.theta, &mut self.scratch[..r]);
                r
            }
            None => 0,
        }
    }

    /// `Σ ((Pθ)_i + v_i)² / (4 v_i)`, the constraint quadratic without `ρ²`.
    fn constraint_quadratic(&mut self) -> f64 {
        let r = self.refresh_constraint();
        self.scratch[..r]
            .iter()
            .zip(&self.state.v)
            .map(|(pt, v)| (pt + v) * (pt + v) / (4.0 * v))
            .sum()
    }

    /// `σ² ~ IG(n + r/2 + a_σ, ‖y − θ‖²/2 + θᵀDᵀU⁻¹Dθ/2 + b_σ [+ NI term])`.
    pub fn step_sigma2(&mut self) -> Result<()> {
        self.refresh_differences();
        self.structure
            .prior_precisions_into(&self.state, &mut self.weights);
        let n = self.data.len() as f64;
        let h = &self.config.hyper;
        let resid: f64 = self.state.xi.iter().map(|x| x * x).sum::<f64>();
        let penalty: f64 = self
            .dtheta
            .iter()
            .zip(&self.weights)
            .map(|(d, w)| w * d * d)
            .sum();
        let mut shape = n + h.a_sigma;
        let mut rate = 0.5 * resid + 0.5 * penalty + h.b_sigma;
        if self.config.constraint.is_active() {
            shape += 0.5 * self.structure.constraint_rows() as f64;
            rate += self.constraint_quadratic() / self.state.rho2;
        }
        self.state.sigma2 = sample_inverse_gamma(shape, rate, &mut self.rng)?;
        Ok(())
    }

    /// `u_i²`, `i ≤ k+1`: `IG(a_u + 1/2, (Dθ)_i²/(2σ²) + b_u)`.
    fn step_leading_scales(&mut self) -> Result<()> {
        let h = self.config.hyper;
        for i in 0..=self.config.order {
            let d = self.dtheta[i];
            self.state.u2[i] = sample_inverse_gamma(
                h.a_u + 0.5,
                d * d / (2.0 * self.state.sigma2) + h.b_u,
                &mut self.rng,
            )?;
        }
        Ok(())
    }

    /// Horseshoe: `ψ`, `τ²`, leading `u²`, then `ν_i` and `u_i²` for the
    /// penalised differences.
    pub fn step_horseshoe_hyper(&mut self) -> Result<()> {
        self.refresh_differences();
        let n = self.data.len();
        let k = self.config.order;
        let s2 = self.state.sigma2;
        let st = &mut self.state;
        st.psi = sample_inverse_gamma(1.0, 1.0 + 1.0 / st.tau2, &mut self.rng)?;
        let ss: f64 = self.dtheta[k + 1..]
            .iter()
            .zip(&st.u2[k + 1..])
            .map(|(d, u)| d * d / u)
            .sum();
        st.tau2 = sample_inverse_gamma(
            0.5 * (n - k) as f64,
            ss / (2.0 * s2) + 1.0 / st.psi,
            &mut self.rng,
        )?;
        self.step_leading_scales()?;
        let st = &mut self.state;
        for (j, i) in (k + 1..n).enumerate() {
            st.nu[j] = sample_inverse_gamma(1.0, 1.0 + 1.0 / st.u2[i], &mut self.rng)?;
            let d = self.dtheta[i];
            st.u2[i] = sample_inverse_gamma(
                1.0,
                d * d / (2.0 * s2 * st.tau2) + 1.0 / st.nu[j],
                &mut self.rng,
            )?;
        }
        Ok(())
    }

    /// Laplace: `1/u_i²` from an inverse Gaussian, leading `u²`, then `γ²`
    /// from its generalised inverse Gaussian conditional.
    pub fn step_laplace_hyper(&mut self) -> Result<()> {
        self.refresh_differences();
        let n = self.data.len();
        let k = self.config.order;
        let h = self.config.hyper;
        let s2 = self.state.sigma2;
        let g2 = self.state.gamma2;
        for i in k + 1..n {
            let d = self.dtheta[i].abs().max(DIFF_FLOOR);
            let mean = (g2 * s2).sqrt() / d;
            let inv = sample_inverse_gaussian(mean, g2, &mut self.rng)?;
            self.state.u2[i] = 1.0 / inv;
        }
        self.step_leading_scales()?;
        let m = (n - k - 1) as f64;
        let total: f64 = self.state.u2[k + 1..].iter().sum();
        self.state.gamma2 = sample_gig(m - h.a_gamma, 2.0 * h.b_gamma, total, &mut self.rng)?;
        Ok(())
    }

    /// Normal: leading `u²` and the common `τ²`.
    pub fn step_normal_hyper(&mut self) -> Result<()> {
        self.refresh_differences();
        let n = self.data.len();
        let k = self.config.order;
        let h = self.config.hyper;
        self.step_leading_scales()?;
        let ss: f64 = self.dtheta[k + 1..].iter().map(|d| d * d).sum();
        self.state.tau2 = sample_inverse_gamma(
            h.a_tau + 0.5 * (n - k - 1) as f64,
            ss / (2.0 * self.state.sigma2) + h.b_tau,
            &mut self.rng,
        )?;
        Ok(())
    }

    /// `v_i ~ GIG(1/2, (Pθ)_i²/(2ρ²σ²), 1/(2ρ²σ²))` and
    /// `ρ² ~ IG(r/2 + a_ρ, Σ((Pθ)_i + v_i)²/(4σ²v_i) + b_ρ)`.
    pub fn step_ni_latents(&mut self) -> Result<()> {
        let r = self.refresh_constraint();
        if r == 0 {
            return Ok(());
        }
        let s = self.state.rho2 * self.state.sigma2;
        let psi = 1.0 / (2.0 * s);
        for i in 0..r {
            let pt = self.scratch[i];
            let chi = (pt * pt / (2.0 * s)).max(CHI_FLOOR);
            self.state.v[i] = sample_gig(0.5, chi, psi, &mut self.rng)?;
        }
        let h = self.config.hyper;
        let quad = self.constraint_quadratic();
        self.state.rho2 = sample_inverse_gamma(
            0.5 * r as f64 + h.a_rho,
            quad / self.state.sigma2 + h.b_rho,
            &mut self.rng,
        )?;
        Ok(())
    }

    fn record(&self, out: &mut PosteriorDraws, negate: bool) {
        if negate {
            out.theta.extend(self.state.theta.iter().map(|t| -t));
        } else {
            out.theta.extend_from_slice(&self.state.theta);
        }
        out.sigma2.push(self.state.sigma2);
        match self.config.prior {
            PriorKind::Laplace => out.gamma2.push(self.state.gamma2),
            _ => out.tau2.push(self.state.tau2),
        }
        if self.config.constraint != Constraint::None {
            out.rho2.push(self.state.rho2);
        }
    }
}

fn run(data: &Dataset, config: &FitConfig, engine: Engine) -> Result<PosteriorDraws> {
    let mut sampler = Sampler::new(data, config, engine)?;
    let schedule = config.schedule;
    let mut out = PosteriorDraws::with_capacity(data.len(), schedule.retained(), config, engine);
    let negate = config.side == Side::Lower;
    for t in 1..=schedule.iterations {
        sampler.sweep().map_err(|e| Error::Sweep {
            sweep: t,
            source: Box::new(e),
        })?;
        if schedule.keeps(t) {
            sampler.record(&mut out, negate);
        }
    }
    Ok(out)
}

/// Runs the Pólya-Gamma Gibbs sampler under the soft likelihood.
pub fn run_chain(data: &Dataset, config: &FitConfig) -> Result<PosteriorDraws> {
    run(data, config, Engine::PolyaGamma)
}

/// Runs the exact coordinate-wise sampler; `config.eta` is ignored and every
/// draw satisfies the boundary constraint exactly.
pub fn run_chain_coordinatewise(data: &Dataset, config: &FitConfig) -> Result<PosteriorDraws> {
    run(data, config, Engine::CoordinateWise)
}
