use alloc::vec::Vec;

use crate::{Error, Result};

/// Ordered observations `(x_i, y_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Dataset {
    /// Validates that `x` and `y` have equal non-zero length, every entry is
    /// finite and `x` is strictly increasing.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Dimension(alloc::format!(
                "x has {} entries but y has {}",
                x.len(),
                y.len()
            )));
        }
        if x.is_empty() {
            return Err(Error::Dimension("dataset is empty".into()));
        }
        if let Some(index) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "x", index });
        }
        if let Some(index) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "y", index });
        }
        check_increasing(&x)?;
        Ok(Self { x, y })
    }

    /// Responses on the regular grid `x = 1, …, n`.
    pub fn from_responses(y: Vec<f64>) -> Result<Self> {
        let x = (1..=y.len()).map(|i| i as f64).collect();
        Self::new(x, y)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Replaces the responses, keeping the grid. Used by the joint-distribution
    /// test to redraw data between sweeps.
    pub fn set_y(&mut self, y: &[f64]) -> Result<()> {
        if y.len() != self.y.len() {
            return Err(Error::Dimension("replacement y has wrong length".into()));
        }
        if let Some(index) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "y", index });
        }
        self.y.copy_from_slice(y);
        Ok(())
    }

    pub(crate) fn with_y(&self, y: Vec<f64>) -> Self {
        Self {
            x: self.x.clone(),
            y,
        }
    }

    /// Multiplies every grid location by `factor` (e.g. 1000 for badly
    /// conditioned irregular designs).
    pub fn rescale_x(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::domain("x scale factor", "positive and finite", factor));
        }
        Self::new(self.x.iter().map(|v| v * factor).collect(), self.y.clone())
    }

    /// True when all spacings are equal to within `1e-9` relative error.
    pub fn is_regular(&self) -> bool {
        if self.x.len() < 3 {
            return true;
        }
        let h = self.x[1] - self.x[0];
        self.x
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs())
    }
}

pub(crate) fn check_increasing(x: &[f64]) -> Result<()> {
    match x.windows(2).position(|w| !(w[1] > w[0])) {
        Some(i) => Err(Error::Ordering { index: i + 1 }),
        None => Ok(()),
    }
}
