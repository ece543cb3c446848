//! Difference operators of order `k + 1` on regular and irregular grids.
//!
//! The reduced operator maps `θ ∈ ℝⁿ` to its `n − k − 1` discrete
//! differences of order `k + 1`. The full operator stacks `I_{k+1}` above
//! it, giving a square, lower-triangular and therefore non-singular matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::banded::BandedSpd;
use crate::data::check_increasing;
use crate::{Error, Result};

/// Highest supported order `k`. Gram matrices of higher orders are too badly
/// conditioned to be useful.
pub const MAX_ORDER: usize = 3;

/// A rectangular matrix whose rows each hold `width` consecutive non-zero
/// slots starting at a per-row column.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedRows {
    ncols: usize,
    width: usize,
    starts: Vec<usize>,
    coeffs: Vec<f64>,
}

impl BandedRows {
    fn new(ncols: usize, width: usize) -> Self {
        Self {
            ncols,
            width,
            starts: Vec::new(),
            coeffs: Vec::new(),
        }
    }

    fn push_row(&mut self, start: usize, coeffs: &[f64]) {
        debug_assert_eq!(coeffs.len(), self.width);
        debug_assert!(start + self.width <= self.ncols);
        self.starts.push(start);
        self.coeffs.extend_from_slice(coeffs);
    }

    pub fn nrows(&self) -> usize {
        self.starts.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `(first column, coefficients)` of row `r`.
    #[inline]
    pub fn row(&self, r: usize) -> (usize, &[f64]) {
        let w = self.width;
        (self.starts[r], &self.coeffs[r * w..(r + 1) * w])
    }

    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c = -*c);
        out
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows()];
        self.apply_into(x, &mut out);
        out
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(out.len(), self.nrows());
        for (r, o) in out.iter_mut().enumerate() {
            let (s, c) = self.row(r);
            *o = c.iter().zip(&x[s..s + self.width]).map(|(a, b)| a * b).sum();
        }
    }

    /// `Mᵀ z`.
    pub fn apply_transpose(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.nrows());
        let mut out = vec![0.0; self.ncols];
        for (r, &zr) in z.iter().enumerate() {
            let (s, c) = self.row(r);
            for (o, a) in out[s..s + self.width].iter_mut().zip(c) {
                *o += a * zr;
            }
        }
        out
    }

    /// Accumulates `Mᵀ diag(w) M` into `target` (whose band must be at least
    /// `width − 1`).
    pub fn accumulate_gram(&self, w: &[f64], target: &mut BandedSpd) {
        assert_eq!(w.len(), self.nrows());
        assert_eq!(target.dim(), self.ncols);
        for (r, &wr) in w.iter().enumerate() {
            let (s, c) = self.row(r);
            for a in 0..self.width {
                if c[a] == 0.0 {
                    continue;
                }
                let ca = wr * c[a];
                for b in 0..=a {
                    target.add(s + a, s + b, ca * c[b]);
                }
            }
        }
    }

    /// `Mᵀ diag(w) M` as a band matrix of half-bandwidth `width − 1`.
    pub fn gram(&self, w: &[f64]) -> BandedSpd {
        let mut out = BandedSpd::zeros(self.ncols, self.width - 1);
        self.accumulate_gram(w, &mut out);
        out
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows() * self.ncols];
        for r in 0..self.nrows() {
            let (s, c) = self.row(r);
            for (j, &v) in c.iter().enumerate() {
                out[r * self.ncols + s + j] += v;
            }
        }
        out
    }
}

/// Reduced and full difference operators of order `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceOperator {
    order: usize,
    reduced: BandedRows,
    full: BandedRows,
}

impl DifferenceOperator {
    /// The order `k` (the operator takes differences of order `k + 1`).
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.full.ncols()
    }

    /// `D_n^{(k+1)}`, shape `(n − k − 1) × n`.
    pub fn reduced(&self) -> &BandedRows {
        &self.reduced
    }

    /// The square operator with `I_{k+1}` stacked above the reduced block.
    pub fn full(&self) -> &BandedRows {
        &self.full
    }

    /// Largest half-bandwidth of `Dᵀ W D`.
    pub fn gram_half_bandwidth(&self) -> usize {
        self.full.width() - 1
    }

    fn from_reduced(order: usize, reduced: BandedRows) -> Self {
        let n = reduced.ncols();
        let width = reduced.width();
        let mut full = BandedRows::new(n, width);
        let mut unit = vec![0.0; width];
        for r in 0..=order {
            unit.iter_mut().for_each(|v| *v = 0.0);
            unit[r] = 1.0;
            full.push_row(0, &unit);
        }
        for r in 0..reduced.nrows() {
            let (s, c) = reduced.row(r);
            full.push_row(s, c);
        }
        Self {
            order,
            reduced,
            full,
        }
    }
}

fn check_dims(n: usize, k: usize) -> Result<()> {
    if k > MAX_ORDER {
        return Err(Error::Config(alloc::format!(
            "order k = {k} exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    if n < k + 2 {
        return Err(Error::Dimension(alloc::format!(
            "need n >= k + 2 = {} observations, got {n}",
            k + 2
        )));
    }
    Ok(())
}

/// Builds `D^{(j+1)} = D^{(1)} · diag(scale_j) · D^{(j)}` for `j = 1..k`.
fn build_recursive(n: usize, k: usize, scale: impl Fn(usize, usize) -> f64) -> BandedRows {
    // order-1 rows (1, −1)
    let mut width = 2;
    let mut coeffs: Vec<f64> = (0..n - 1).flat_map(|_| [1.0, -1.0]).collect();
    for j in 1..=k {
        let rows = n - j;
        for i in 0..rows {
            let s = scale(j, i);
            if s != 1.0 {
                coeffs[i * width..(i + 1) * width]
                    .iter_mut()
                    .for_each(|v| *v *= s);
            }
        }
        let new_width = width + 1;
        let mut next = vec![0.0; (rows - 1) * new_width];
        for i in 0..rows - 1 {
            let upper = &coeffs[i * width..(i + 1) * width];
            let lower = &coeffs[(i + 1) * width..(i + 2) * width];
            let out = &mut next[i * new_width..(i + 1) * new_width];
            for (t, u) in upper.iter().enumerate() {
                out[t] += u;
            }
            for (t, l) in lower.iter().enumerate() {
                out[t + 1] -= l;
            }
        }
        coeffs = next;
        width = new_width;
    }
    let mut rows = BandedRows::new(n, width);
    for i in 0..n - k - 1 {
        rows.push_row(i, &coeffs[i * width..(i + 1) * width]);
    }
    rows
}

/// Difference operator of order `k + 1` on the unit-spaced grid.
pub fn build_difference_matrix(n: usize, k: usize) -> Result<DifferenceOperator> {
    check_dims(n, k)?;
    let reduced = build_recursive(n, k, |_, _| 1.0);
    Ok(DifferenceOperator::from_reduced(k, reduced))
}

/// Spacing-adjusted difference operator for strictly increasing `x`.
///
/// Each recursion step rescales the rows of the order-`j` operator by
/// `j / (x_{i+j} − x_i)` before differencing again, so on the grid
/// `1, 2, …, n` this coincides with [`build_difference_matrix`]. For `k = 0`
/// no adjustment is applied.
pub fn build_adjusted_difference_matrix(x: &[f64], k: usize) -> Result<DifferenceOperator> {
    check_dims(x.len(), k)?;
    check_increasing(x)?;
    let reduced = build_recursive(x.len(), k, |j, i| j as f64 / (x[i + j] - x[i]));
    Ok(DifferenceOperator::from_reduced(k, reduced))
}

/// `Dᵀ diag(w) D` for the full operator.
pub fn weighted_gram(op: &DifferenceOperator, w: &[f64]) -> Result<BandedSpd> {
    if w.len() != op.dim() {
        return Err(Error::Dimension(alloc::format!(
            "weights have length {}, operator has {} rows",
            w.len(),
            op.dim()
        )));
    }
    if let Some(&bad) = w.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::domain("gram weight", "strictly positive", bad));
    }
    Ok(op.full().gram(w))
}

/// First-difference operator (`θ_i − θ_{i+1}`) of an `n`-vector.
pub(crate) fn first_difference(n: usize) -> BandedRows {
    build_recursive(n, 0, |_, _| 1.0)
}

/// Second-difference operator (`θ_i − 2θ_{i+1} + θ_{i+2}`).
pub(crate) fn second_difference(n: usize) -> BandedRows {
    build_recursive(n, 1, |_, _| 1.0)
}
