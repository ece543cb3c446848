//! Synthetic boundary-estimation scenarios.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::data::Dataset;
use crate::dist::sample_half_normal_noise;
use crate::math::sigmoid;
use crate::rng::{streams, RngStream};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    /// `f(x) = √x / 2` on `[1, 100]`.
    Sqrt,
    /// Four-level step function on `[1, 100]`.
    PiecewiseConstant,
    /// Two increasing sigmoids with a downward jump at the midpoint, on `[0, 1]`.
    PiecewiseSigmoid,
}

impl ScenarioKind {
    pub fn short_name(self) -> &'static str {
        match self {
            ScenarioKind::Sqrt => "sqrt",
            ScenarioKind::PiecewiseConstant => "pc",
            ScenarioKind::PiecewiseSigmoid => "sigmoid",
        }
    }

    /// Trend-filtering order conventionally fitted to this truth.
    pub fn fit_order(self) -> usize {
        match self {
            ScenarioKind::PiecewiseConstant => 0,
            _ => 1,
        }
    }

    fn domain(self) -> (f64, f64) {
        match self {
            ScenarioKind::PiecewiseSigmoid => (0.0, 1.0),
            _ => (1.0, 100.0),
        }
    }
}

/// Which formula to use for the left sigmoid branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SigmoidReading {
    /// `1 + 4 e^{16x−8} / (1 + e^{16x−8})`.
    #[default]
    Corrected,
    /// `1 + 4 e^{32x−8} / (1 + e^{16x−8})`, as printed.
    Literal,
}

/// Noise below the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Noise {
    /// `−|N(0, σ²)|`.
    HalfNormal(f64),
    /// `0.8·HN(σ = 1) + 0.2·HN(σ = 3)`.
    Mixture,
}

impl Noise {
    /// Noise settings (a)–(d).
    pub fn from_letter(letter: char) -> Option<Self> {
        match letter.to_ascii_lowercase() {
            'a' => Some(Noise::HalfNormal(0.5)),
            'b' => Some(Noise::HalfNormal(1.0)),
            'c' => Some(Noise::HalfNormal(2.0)),
            'd' => Some(Noise::Mixture),
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Noise::HalfNormal(s) => sample_half_normal_noise(s, rng),
            Noise::Mixture => {
                let u: f64 = rng.random();
                let s = if u < 0.8 { 1.0 } else { 3.0 };
                sample_half_normal_noise(s, rng)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub n: usize,
    pub noise: Noise,
    pub reading: SigmoidReading,
}

impl Scenario {
    pub fn new(kind: ScenarioKind, n: usize, noise: Noise) -> Result<Self> {
        if n < 10 {
            return Err(Error::Dimension(alloc::format!(
                "scenarios need n >= 10, got {n}"
            )));
        }
        if let Noise::HalfNormal(s) = noise {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::domain("noise scale", "positive and finite", s));
            }
        }
        Ok(Self {
            kind,
            n,
            noise,
            reading: SigmoidReading::default(),
        })
    }

    pub fn with_reading(mut self, reading: SigmoidReading) -> Self {
        self.reading = reading;
        self
    }

    /// Where observation `i` (0-based) sits in the truth's domain: `i+1`
    /// stretched onto `[1, 100]` for sqrt and pc, `(i+1)/n` for the sigmoid.
    pub fn location(&self, i: usize) -> f64 {
        match self.kind {
            ScenarioKind::PiecewiseSigmoid => (i + 1) as f64 / self.n as f64,
            _ => 1.0 + 99.0 * i as f64 / (self.n - 1) as f64,
        }
    }

    /// True boundary at every design point.
    pub fn truth(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| evaluate(self, self.location(i)))
            .collect()
    }
}

fn evaluate(scenario: &Scenario, x: f64) -> f64 {
    match scenario.kind {
        ScenarioKind::Sqrt => 0.5 * x.sqrt(),
        ScenarioKind::PiecewiseConstant => {
            if x <= 20.0 {
                0.5
            } else if x <= 40.0 {
                1.0
            } else if x <= 60.0 {
                2.5
            } else {
                3.5
            }
        }
        ScenarioKind::PiecewiseSigmoid => {
            if x <= 0.5 {
                let t = 16.0 * x - 8.0;
                match scenario.reading {
                    SigmoidReading::Corrected => 1.0 + 4.0 * sigmoid(t),
                    SigmoidReading::Literal => 1.0 + 4.0 * (32.0 * x - 8.0).exp() / (1.0 + t.exp()),
                }
            } else {
                1.0 + 4.0 * sigmoid(16.0 * (2.0 * x - 1.0) - 8.0)
            }
        }
    }
}

/// The scenario's boundary at `x` (on `[1, 100]`, or `[0, 1]` for the sigmoid).
pub fn true_function(scenario: &Scenario, x: f64) -> Result<f64> {
    let (lo, hi) = scenario.kind.domain();
    if !(x >= lo && x <= hi) {
        return Err(Error::OutOfDomain { x });
    }
    Ok(evaluate(scenario, x))
}

/// Draws `y_i = f(t_i) + ε_i` on `x = 1..n`; returns the data and the truth.
pub fn generate_dataset(scenario: &Scenario, seed: u64) -> (Dataset, Vec<f64>) {
    let mut rng = RngStream::new(seed, streams::DATA);
    let truth = scenario.truth();
    let y = truth
        .iter()
        .map(|f| f + scenario.noise.sample(&mut rng))
        .collect();
    let data = Dataset::from_responses(y).expect("finite responses on a regular grid");
    (data, truth)
}
