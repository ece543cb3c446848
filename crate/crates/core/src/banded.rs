//! Symmetric positive-definite band matrices and their Cholesky factors.
//!
//! Only the lower band is stored. Row `i` holds `A[i][i-d]` for
//! `d = 0..=half_bandwidth` at offset `i * (half_bandwidth + 1) + d`; entries
//! that would fall left of column 0 are kept as zeros.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BandedSpd {
    n: usize,
    half_bandwidth: usize,
    lower: Vec<f64>,
}

impl BandedSpd {
    pub fn zeros(n: usize, half_bandwidth: usize) -> Self {
        Self {
            n,
            half_bandwidth,
            lower: vec![0.0; n * (half_bandwidth + 1)],
        }
    }

    pub fn identity(n: usize, half_bandwidth: usize) -> Self {
        let mut m = Self::zeros(n, half_bandwidth);
        for i in 0..n {
            m.add_diagonal(i, 1.0);
        }
        m
    }

    /// Builds from a dense row-major square matrix, keeping the lower band.
    /// Entries outside the band are ignored.
    pub fn from_dense(dense: &[f64], n: usize, half_bandwidth: usize) -> Result<Self> {
        if dense.len() != n * n {
            return Err(Error::Dimension(alloc::format!(
                "dense matrix has {} entries, expected {}",
                dense.len(),
                n * n
            )));
        }
        let mut m = Self::zeros(n, half_bandwidth);
        for i in 0..n {
            for j in i.saturating_sub(half_bandwidth)..=i {
                m.set(i, j, dense[i * n + j]);
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.half_bandwidth
    }

    #[inline]
    fn idx(&self, i: usize, d: usize) -> usize {
        i * (self.half_bandwidth + 1) + d
    }

    /// Entry `(i, j)`; symmetric access, zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let d = r - c;
        if d > self.half_bandwidth {
            0.0
        } else {
            self.lower[self.idx(r, d)]
        }
    }

    /// Sets `(i, j)` and, implicitly, `(j, i)`.
    ///
    /// Panics when the entry lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let d = r - c;
        assert!(d <= self.half_bandwidth, "entry ({i},{j}) outside band");
        let k = self.idx(r, d);
        self.lower[k] = value;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let k = self.idx(r, r - c);
        self.lower[k] += value;
    }

    #[inline]
    pub fn add_diagonal(&mut self, i: usize, value: f64) {
        let k = self.idx(i, 0);
        self.lower[k] += value;
    }

    pub fn diagonal(&self, i: usize) -> f64 {
        self.lower[self.idx(i, 0)]
    }

    pub fn scale(&mut self, factor: f64) {
        self.lower.iter_mut().for_each(|v| *v *= factor);
    }

    /// `self += other`; `other` may have a narrower band.
    pub fn add_assign(&mut self, other: &BandedSpd) {
        assert_eq!(self.n, other.n);
        assert!(other.half_bandwidth <= self.half_bandwidth);
        for i in 0..self.n {
            for d in 0..=other.half_bandwidth.min(i) {
                let k = self.idx(i, d);
                self.lower[k] += other.lower[other.idx(i, d)];
            }
        }
    }

    /// Widens (or keeps) the stored band without changing the matrix.
    pub fn with_half_bandwidth(&self, half_bandwidth: usize) -> BandedSpd {
        assert!(half_bandwidth >= self.half_bandwidth);
        let mut out = BandedSpd::zeros(self.n, half_bandwidth);
        out.add_assign(self);
        out
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.get(i, j);
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.mul_vec_into(x, &mut out);
        out
    }

    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(out.len(), self.n);
        out.iter_mut().for_each(|v| *v = 0.0);
        let p = self.half_bandwidth;
        for i in 0..self.n {
            let row = &self.lower[self.idx(i, 0)..self.idx(i, 0) + p + 1];
            out[i] += row[0] * x[i];
            for d in 1..=p.min(i) {
                let a = row[d];
                out[i] += a * x[i - d];
                out[i - d] += a * x[i];
            }
        }
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n);
        let p = self.half_bandwidth;
        let mut acc = 0.0;
        for i in 0..self.n {
            let base = self.idx(i, 0);
            acc += self.lower[base] * x[i] * x[i];
            for d in 1..=p.min(i) {
                acc += 2.0 * self.lower[base + d] * x[i] * x[i - d];
            }
        }
        acc
    }

    /// Banded Cholesky `A = L Lᵀ` in `O(n p²)`.
    pub fn cholesky(&self) -> Result<BandedCholesky> {
        let mut factor = BandedCholesky {
            n: self.n,
            half_bandwidth: self.half_bandwidth,
            lower: self.lower.clone(),
        };
        factor.factorize_in_place()?;
        Ok(factor)
    }
}

/// Lower-triangular band factor, same layout as [`BandedSpd`].
#[derive(Debug, Clone, PartialEq)]
pub struct BandedCholesky {
    n: usize,
    half_bandwidth: usize,
    lower: Vec<f64>,
}

impl BandedCholesky {
    fn factorize_in_place(&mut self) -> Result<()> {
        let p = self.half_bandwidth;
        let w = p + 1;
        let n = self.n;
        let l = &mut self.lower;
        for i in 0..n {
            let lo = i.saturating_sub(p);
            for j in lo..=i {
                // L[i][j] lives at i*w + (i-j); L[j][k] at j*w + (j-k)
                let mut s = l[i * w + (i - j)];
                for k in lo..j {
                    s -= l[i * w + (i - k)] * l[j * w + (j - k)];
                }
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::Conditioning { pivot: i });
                    }
                    l[i * w] = s.sqrt();
                } else {
                    l[i * w + (i - j)] = s / l[j * w];
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `L z = b` in place.
    pub fn forward_substitute(&self, b: &mut [f64]) {
        let p = self.half_bandwidth;
        let w = p + 1;
        for i in 0..self.n {
            let mut s = b[i];
            for d in 1..=p.min(i) {
                s -= self.lower[i * w + d] * b[i - d];
            }
            b[i] = s / self.lower[i * w];
        }
    }

    /// Solves `Lᵀ x = z` in place.
    pub fn back_substitute(&self, z: &mut [f64]) {
        let p = self.half_bandwidth;
        let w = p + 1;
        for i in (0..self.n).rev() {
            let mut s = z[i];
            for d in 1..=p.min(self.n - 1 - i) {
                // Lᵀ[i][i+d] = L[i+d][i]
                s -= self.lower[(i + d) * w + d] * z[i + d];
            }
            z[i] = s / self.lower[i * w];
        }
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.forward_substitute(&mut x);
        self.back_substitute(&mut x);
        x
    }

    /// `ln det A`.
    pub fn log_det(&self) -> f64 {
        let w = self.half_bandwidth + 1;
        2.0 * (0..self.n).map(|i| self.lower[i * w].ln()).sum::<f64>()
    }
}
