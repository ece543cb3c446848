use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::math::kolmogorov_sf;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    /// `sup |F₁ − F₂|`.
    pub statistic: f64,
    /// Asymptotic p-value.
    pub p_value: f64,
}

/// Two-sample Kolmogorov–Smirnov test. The p-value uses the asymptotic
/// Kolmogorov law at `λ = (√nₑ + 0.12 + 0.11/√nₑ) D`, `nₑ = n₁n₂/(n₁+n₂)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    assert!(!a.is_empty() && !b.is_empty(), "KS samples must be non-empty");
    let mut a: Vec<f64> = a.to_vec();
    let mut b: Vec<f64> = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    let sq = ne.sqrt();
    let p = if d == 0.0 {
        1.0
    } else {
        kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d)
    };
    KsResult {
        statistic: d,
        p_value: p,
    }
}
