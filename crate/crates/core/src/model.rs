//! Model configuration, chain state and assembly of the Gaussian system
//! `(A, b)` in the boundary-offset coordinates `ξ = θ − y`.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::banded::BandedSpd;
use crate::data::Dataset;
use crate::difference::{
    build_adjusted_difference_matrix, first_difference, second_difference, BandedRows,
    DifferenceOperator, MAX_ORDER,
};
use crate::dist::sample_polya_gamma;
use crate::math::log_sigmoid;
use crate::rng::RngStream;
use crate::{Error, Result};

/// Shrinkage prior on the `(k+1)`-th differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PriorKind {
    /// Half-Cauchy global and local scales.
    Horseshoe,
    /// Exponential mixing on local variances (Bayesian lasso).
    Laplace,
    /// A single inverse-gamma variance shared by all penalised differences.
    Normal,
}

impl PriorKind {
    pub fn short_name(self) -> &'static str {
        match self {
            PriorKind::Horseshoe => "hs",
            PriorKind::Laplace => "lap",
            PriorKind::Normal => "nor",
        }
    }
}

/// Soft shape constraint, implemented as a penalty on `(Pθ)_+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    None,
    /// `P = D⁽¹⁾`: penalises `θ_i > θ_{i+1}`.
    NearlyIncreasing,
    /// `P = −D⁽¹⁾`.
    NearlyDecreasing,
    /// `P = −D⁽²⁾`: penalises negative second differences.
    NearlyConvex,
    /// `P = D⁽²⁾`. Arises from a convex constraint under `Side::Lower`.
    NearlyConcave,
}

impl Constraint {
    pub fn is_active(self) -> bool {
        self != Constraint::None
    }

    /// The constraint on `−θ` equivalent to `self` on `θ`.
    pub fn flipped(self) -> Self {
        match self {
            Constraint::None => Constraint::None,
            Constraint::NearlyIncreasing => Constraint::NearlyDecreasing,
            Constraint::NearlyDecreasing => Constraint::NearlyIncreasing,
            Constraint::NearlyConvex => Constraint::NearlyConcave,
            Constraint::NearlyConcave => Constraint::NearlyConvex,
        }
    }

    /// Penalty operator `P` for an `n`-vector, `None` when inactive.
    pub fn operator(self, n: usize) -> Option<BandedRows> {
        match self {
            Constraint::None => None,
            Constraint::NearlyIncreasing => Some(first_difference(n)),
            Constraint::NearlyDecreasing => Some(first_difference(n).negated()),
            Constraint::NearlyConvex => Some(second_difference(n).negated()),
            Constraint::NearlyConcave => Some(second_difference(n)),
        }
    }

    fn min_len(self) -> usize {
        match self {
            Constraint::None => 0,
            Constraint::NearlyIncreasing | Constraint::NearlyDecreasing => 2,
            Constraint::NearlyConvex | Constraint::NearlyConcave => 3,
        }
    }
}

/// Which support edge is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schedule {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
}

impl Schedule {
    /// Number of retained draws, `⌊(iterations − burn_in) / thin⌋`.
    pub fn retained(&self) -> usize {
        self.iterations.saturating_sub(self.burn_in) / self.thin.max(1)
    }

    /// Whether sweep `t` (1-based) is kept.
    #[inline]
    pub fn keeps(&self, t: usize) -> bool {
        t > self.burn_in && (t - self.burn_in).is_multiple_of(self.thin)
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            iterations: 10_500,
            burn_in: 500,
            thin: 5,
        }
    }
}

/// Inverse-gamma `(shape, rate)` pairs of the hierarchy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparameters {
    pub a_sigma: f64,
    pub b_sigma: f64,
    pub a_rho: f64,
    pub b_rho: f64,
    /// Shared by the `k + 1` unpenalised leading scales.
    pub a_u: f64,
    pub b_u: f64,
    pub a_gamma: f64,
    pub b_gamma: f64,
    pub a_tau: f64,
    pub b_tau: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            a_sigma: 0.1,
            b_sigma: 0.1,
            a_rho: 1.0,
            b_rho: 1.0,
            a_u: 1.0,
            b_u: 1.0,
            a_gamma: 1.0,
            b_gamma: 1.0,
            a_tau: 1.0,
            b_tau: 1.0,
        }
    }
}

impl Hyperparameters {
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> {
        [
            ("a_sigma", self.a_sigma),
            ("b_sigma", self.b_sigma),
            ("a_rho", self.a_rho),
            ("b_rho", self.b_rho),
            ("a_u", self.a_u),
            ("b_u", self.b_u),
            ("a_gamma", self.a_gamma),
            ("b_gamma", self.b_gamma),
            ("a_tau", self.a_tau),
            ("b_tau", self.b_tau),
        ]
        .into_iter()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// Polynomial order `k`: 0 piecewise constant, 1 piecewise linear, ...
    pub order: usize,
    pub prior: PriorKind,
    pub constraint: Constraint,
    /// Sigmoid sharpness `η`.
    pub eta: f64,
    pub side: Side,
    pub schedule: Schedule,
    pub hyper: Hyperparameters,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            order: 1,
            prior: PriorKind::Horseshoe,
            constraint: Constraint::None,
            eta: 500.0,
            side: Side::Upper,
            schedule: Schedule::default(),
            hyper: Hyperparameters::default(),
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order > MAX_ORDER {
            return Err(Error::Config(alloc::format!(
                "order {} exceeds maximum {MAX_ORDER}",
                self.order
            )));
        }
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return Err(Error::Config("eta must be positive and finite".to_string()));
        }
        if self.schedule.thin == 0 {
            return Err(Error::Config("thin must be at least 1".to_string()));
        }
        if self.schedule.burn_in >= self.schedule.iterations {
            return Err(Error::Config(
                "burn-in must be smaller than the number of iterations".to_string(),
            ));
        }
        for (name, value) in self.hyper.iter() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::Config(alloc::format!(
                    "hyperparameter {name} must be positive, got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// Every latent quantity of one Gibbs sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub theta: Vec<f64>,
    /// `θ − y`, kept in sync with `theta`.
    pub xi: Vec<f64>,
    pub sigma2: f64,
    /// Global variance (horseshoe and normal priors).
    pub tau2: f64,
    /// Mixing latent of `τ²` (horseshoe).
    pub psi: f64,
    /// Local variances; the first `k + 1` belong to the unpenalised block.
    pub u2: Vec<f64>,
    /// Mixing latents of `u²_{k+2..n}` (horseshoe), length `n − k − 1`.
    pub nu: Vec<f64>,
    /// Laplace rate parameter.
    pub gamma2: f64,
    /// Pólya-Gamma latents.
    pub omega: Vec<f64>,
    /// Shape-constraint latents, one per row of `P`.
    pub v: Vec<f64>,
    /// Shape-constraint scale.
    pub rho2: f64,
}

/// `(A, b)` such that `ξ | rest ∝ exp(−½ξᵀAξ + bᵀξ) ∏ σ_η(ξ_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionSystem {
    pub a: BandedSpd,
    pub b: Vec<f64>,
}

/// Upper bound on the individual prior and constraint precisions entering
/// `A`. Horseshoe scales can collapse to ~1e−16 and would otherwise make the
/// banded Cholesky lose positive definiteness to rounding; at the cap the
/// affected difference already has standard deviation `σ·1e−5`.
pub const PRECISION_CAP: f64 = 1e10;

/// Operators fixed for a dataset and configuration.
#[derive(Debug, Clone)]
pub struct ModelStructure {
    pub(crate) diff: DifferenceOperator,
    pub(crate) penalty: Option<BandedRows>,
    pub(crate) prior: PriorKind,
    pub(crate) order: usize,
    pub(crate) half_bandwidth: usize,
}

impl ModelStructure {
    pub fn new(data: &Dataset, config: &FitConfig) -> Result<Self> {
        let n = data.len();
        let diff = build_adjusted_difference_matrix(data.x(), config.order)?;
        if n < config.constraint.min_len() {
            return Err(Error::Dimension(alloc::format!(
                "shape constraint needs at least {} observations",
                config.constraint.min_len()
            )));
        }
        let penalty = config.constraint.operator(n);
        let half_bandwidth = penalty
            .as_ref()
            .map_or(0, |p| p.width() - 1)
            .max(diff.gram_half_bandwidth());
        Ok(Self {
            diff,
            penalty,
            prior: config.prior,
            order: config.order,
            half_bandwidth,
        })
    }

    pub fn difference(&self) -> &DifferenceOperator {
        &self.diff
    }

    pub fn penalty(&self) -> Option<&BandedRows> {
        self.penalty.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.diff.dim()
    }

    /// Number of penalised differences, `n − k − 1`.
    pub fn penalised(&self) -> usize {
        self.dim() - self.order - 1
    }

    /// Rows of `P` (0 without a constraint).
    pub fn constraint_rows(&self) -> usize {
        self.penalty.as_ref().map_or(0, |p| p.nrows())
    }

    /// Diagonal of `U⁻¹` for the configured prior.
    pub fn prior_precisions(&self, state: &ChainState) -> Vec<f64> {
        let mut w = vec![0.0; self.dim()];
        self.prior_precisions_into(state, &mut w);
        w
    }

    pub(crate) fn prior_precisions_into(&self, state: &ChainState, w: &mut [f64]) {
        let lead = self.order + 1;
        for (i, wi) in w.iter_mut().enumerate() {
            let var = if i < lead {
                state.u2[i]
            } else {
                match self.prior {
                    PriorKind::Horseshoe => state.tau2 * state.u2[i],
                    PriorKind::Laplace => state.u2[i],
                    PriorKind::Normal => state.tau2,
                }
            };
            *wi = (1.0 / var).min(PRECISION_CAP);
        }
    }

    /// Diagonal of `Ṽ = diag(1 / (2ρ² v_i))`.
    pub(crate) fn constraint_precisions(&self, state: &ChainState) -> Vec<f64> {
        state
            .v
            .iter()
            .map(|&vi| (1.0 / (2.0 * state.rho2 * vi)).min(PRECISION_CAP))
            .collect()
    }

    /// Penalty matrix `M = DᵀU⁻¹D (+ PᵀṼP)` and the constant
    /// `PᵀṼv` (zero without a constraint).
    pub(crate) fn penalty_system(&self, state: &ChainState) -> (BandedSpd, Vec<f64>) {
        let n = self.dim();
        let w = self.prior_precisions(state);
        let mut m = BandedSpd::zeros(n, self.half_bandwidth);
        self.diff.full().accumulate_gram(&w, &mut m);
        let shift = match &self.penalty {
            Some(p) => {
                let vt = self.constraint_precisions(state);
                p.accumulate_gram(&vt, &mut m);
                let scaled: Vec<f64> = vt.iter().zip(&state.v).map(|(a, b)| a * b).collect();
                p.apply_transpose(&scaled)
            }
            None => vec![0.0; n],
        };
        (m, shift)
    }

    /// `A = (I + M)/σ²`, `b = −(M y + PᵀṼv)/σ²`.
    pub fn assemble(&self, state: &ChainState, y: &[f64]) -> Result<PrecisionSystem> {
        let n = self.dim();
        if y.len() != n || state.theta.len() != n {
            return Err(Error::Dimension("state and data lengths differ".into()));
        }
        let (mut a, shift) = self.penalty_system(state);
        let my = a.mul_vec(y);
        let inv_s2 = 1.0 / state.sigma2;
        let b = my
            .iter()
            .zip(&shift)
            .map(|(m, s)| -(m + s) * inv_s2)
            .collect();
        for i in 0..n {
            a.add_diagonal(i, 1.0);
        }
        a.scale(inv_s2);
        Ok(PrecisionSystem { a, b })
    }
}

/// Assembles `(A, b)` for `state`; see [`ModelStructure::assemble`].
///
/// Fails with a conditioning error if `A` is not positive definite.
pub fn assemble_precision(
    state: &ChainState,
    data: &Dataset,
    config: &FitConfig,
) -> Result<PrecisionSystem> {
    let structure = ModelStructure::new(data, config)?;
    let system = structure.assemble(state, data.y())?;
    system.a.cholesky()?;
    Ok(system)
}

/// Soft truncated-normal log-likelihood, up to an additive constant:
/// `−(n/2) ln σ² − Σ(y_i − θ_i)²/(2σ²) + Σ ln σ_η(θ_i − y_i)`.
pub fn log_soft_likelihood(theta: &[f64], data: &Dataset, sigma2: f64, eta: f64) -> f64 {
    let n = data.len() as f64;
    let mut ss = 0.0;
    let mut ls = 0.0;
    for (t, y) in theta.iter().zip(data.y()) {
        let d = t - y;
        ss += d * d;
        ls += log_sigmoid(eta * d);
    }
    -0.5 * n * sigma2.ln() - ss / (2.0 * sigma2) + ls
}

/// Maps a lower-boundary problem onto an upper-boundary one by negating `y`.
/// The map is an involution; apply it again (to `θ`) to transform back.
pub fn orient_for_side(data: &Dataset, side: Side) -> Dataset {
    match side {
        Side::Upper => data.clone(),
        Side::Lower => data.with_y(data.y().iter().map(|v| -v).collect()),
    }
}

/// Starting state: `θ` is the running maximum of `y` plus one sample standard
/// deviation (so `θ ≥ y`), `σ²` the variance of first differences of `y`,
/// every scale 1 and `ω ~ PG(1, 0)`.
pub fn init_chain(data: &Dataset, config: &FitConfig, rng: &mut RngStream) -> Result<ChainState> {
    let n = data.len();
    let k = config.order;
    if n < k + 2 {
        return Err(Error::Dimension(alloc::format!(
            "need n >= k + 2 = {} observations, got {n}",
            k + 2
        )));
    }
    let y = data.y();
    let sd = sample_variance(y).sqrt();
    let mut running = f64::NEG_INFINITY;
    let theta: Vec<f64> = y
        .iter()
        .map(|&v| {
            running = running.max(v);
            running + sd
        })
        .collect();
    let xi = theta.iter().zip(y).map(|(t, v)| t - v).collect();
    let diffs: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let floor = 1e-6 * (1.0 + y[0].abs()).powi(2);
    let sigma2 = sample_variance(&diffs).max(floor);
    let rows = config.constraint.operator(n).map_or(0, |p| p.nrows());
    let omega = (0..n).map(|_| sample_polya_gamma(0.0, rng)).collect();
    Ok(ChainState {
        theta,
        xi,
        sigma2,
        tau2: 1.0,
        psi: 1.0,
        u2: vec![1.0; n],
        nu: vec![1.0; n - k - 1],
        gamma2: 1.0,
        omega,
        v: vec![1.0; rows],
        rho2: 1.0,
    })
}

fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = crate::math::mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_state(n: usize, k: usize, rows: usize) -> ChainState {
        ChainState {
            theta: vec![0.0; n],
            xi: vec![0.0; n],
            sigma2: 1.0,
            tau2: 1.0,
            psi: 1.0,
            u2: vec![1.0; n],
            nu: vec![1.0; n - k - 1],
            gamma2: 1.0,
            omega: vec![0.25; n],
            v: vec![1.0; rows],
            rho2: 1.0,
        }
    }

    #[test]
    fn small_assembly_example() {
        let data = Dataset::from_responses(vec![1.0, 1.0, 1.0]).unwrap();
        let config = FitConfig {
            order: 0,
            ..FitConfig::default()
        };
        let sys = assemble_precision(&unit_state(3, 0, 0), &data, &config).unwrap();
        assert_eq!(
            sys.a.to_dense(),
            vec![3.0, -1.0, 0.0, -1.0, 3.0, -1.0, 0.0, -1.0, 2.0]
        );
        assert_eq!(sys.b, vec![-1.0, 0.0, 0.0]);
    }

    #[test]
    fn penalty_scales_inversely_with_u() {
        let data = Dataset::from_responses(vec![0.3, -1.0, 2.0, 0.5, 0.1]).unwrap();
        let config = FitConfig {
            prior: PriorKind::Laplace,
            ..FitConfig::default()
        };
        let st = ModelStructure::new(&data, &config).unwrap();
        let mut s = unit_state(5, 1, 0);
        let base = st.penalty_system(&s).0.to_dense();
        s.u2.iter_mut().for_each(|u| *u *= 4.0);
        let scaled = st.penalty_system(&s).0.to_dense();
        for (a, b) in base.iter().zip(&scaled) {
            assert!((a / 4.0 - b).abs() < 1e-15);
        }
    }

    #[test]
    fn constraint_vanishes_as_v_grows() {
        let data = Dataset::from_responses(vec![0.3, -1.0, 2.0, 0.5, 0.1]).unwrap();
        let free = FitConfig::default();
        let ni = FitConfig {
            constraint: Constraint::NearlyIncreasing,
            ..FitConfig::default()
        };
        let mut s = unit_state(5, 1, 4);
        s.v = vec![1e300; 4];
        let a = assemble_precision(&s, &data, &free).unwrap();
        let b = assemble_precision(&s, &data, &ni).unwrap();
        for (x, y) in a.a.to_dense().iter().zip(b.a.to_dense()) {
            assert!((x - y).abs() < 1e-12);
        }
        // PᵀṼv = Pᵀ1/(2ρ²) does not depend on v, so b keeps that drift
        let drift = first_difference(5).apply_transpose(&[0.5; 4]);
        for ((x, y), d) in a.b.iter().zip(&b.b).zip(&drift) {
            assert!((x - d - y).abs() < 1e-12);
        }
        s.rho2 = 1e300;
        let b = assemble_precision(&s, &data, &ni).unwrap();
        for (x, y) in a.b.iter().zip(&b.b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn likelihood_at_boundary() {
        let data = Dataset::from_responses(vec![0.2, -0.4]).unwrap();
        let l = log_soft_likelihood(&[0.2, -0.4], &data, 1.0, 500.0);
        assert!((l - 2.0 * (0.5f64).ln()).abs() < 1e-14);

        let one = Dataset::from_responses(vec![0.0]).unwrap();
        let l = log_soft_likelihood(&[1.0], &one, 1.0, 500.0);
        assert!((l + 0.5).abs() < 1e-15);
    }

    #[test]
    fn orientation_is_an_involution() {
        let d = Dataset::from_responses(vec![1.0, 2.0]).unwrap();
        assert_eq!(orient_for_side(&d, Side::Upper), d);
        let lower = orient_for_side(&d, Side::Lower);
        assert_eq!(lower.y(), &[-1.0, -2.0]);
        assert_eq!(orient_for_side(&lower, Side::Lower), d);
        assert_eq!(
            Constraint::NearlyIncreasing.flipped(),
            Constraint::NearlyDecreasing
        );
        assert_eq!(Constraint::NearlyConvex.flipped().flipped(), Constraint::NearlyConvex);
    }

    #[test]
    fn init_on_constant_data() {
        let d = Dataset::from_responses(vec![2.5; 8]).unwrap();
        let config = FitConfig::default();
        let s = init_chain(&d, &config, &mut RngStream::new(1, 0)).unwrap();
        assert!(s.theta.iter().all(|&t| t == 2.5));
        assert!((s.sigma2 - 1e-6 * 3.5f64.powi(2)).abs() < 1e-18);
    }

    #[test]
    fn init_dominates_data_and_is_deterministic() {
        let d = Dataset::from_responses(vec![0.1, 3.0, -2.0, 0.5, 4.0, 1.0]).unwrap();
        let config = FitConfig {
            constraint: Constraint::NearlyIncreasing,
            ..FitConfig::default()
        };
        let a = init_chain(&d, &config, &mut RngStream::new(3, 0)).unwrap();
        let b = init_chain(&d, &config, &mut RngStream::new(3, 0)).unwrap();
        assert_eq!(a, b);
        assert!(a.theta.iter().zip(d.y()).all(|(t, y)| t >= y));
        assert_eq!(a.v.len(), 5);
        assert!(init_chain(
            &Dataset::from_responses(vec![1.0, 2.0]).unwrap(),
            &config,
            &mut RngStream::new(0, 0)
        )
        .is_err());
    }

    #[test]
    fn config_validation() {
        assert!(FitConfig::default().validate().is_ok());
        let mut c = FitConfig::default();
        c.schedule.thin = 0;
        assert!(c.validate().is_err());
        let mut c = FitConfig::default();
        c.hyper.b_rho = 0.0;
        assert!(c.validate().is_err());
        let mut c = FitConfig::default();
        c.schedule.burn_in = c.schedule.iterations;
        assert!(c.validate().is_err());
        assert_eq!(Schedule::default().retained(), 2000);
    }
}
