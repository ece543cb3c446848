use crate::math::mean;
use crate::{Error, Result};

/// Effective sample size `m / (1 + 2Σρ̂_t)` with Geyer's initial monotone
/// sequence truncation: autocorrelations are summed in adjacent pairs until a
/// pair sum turns non-positive, and the pair sums are forced non-increasing.
pub fn effective_sample_size(series: &[f64]) -> Result<f64> {
    let m = series.len();
    if m < 10 {
        return Err(Error::Dimension(alloc::format!(
            "ESS needs at least 10 draws, got {m}"
        )));
    }
    let mu = mean(series);
    let centred: alloc::vec::Vec<f64> = series.iter().map(|x| x - mu).collect();
    let autocov = |lag: usize| -> f64 {
        centred[..m - lag]
            .iter()
            .zip(&centred[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / m as f64
    };
    let gamma0 = autocov(0);
    if !(gamma0 > 0.0) || gamma0 <= f64::EPSILON * f64::EPSILON * mu * mu {
        return Err(Error::UndefinedEss);
    }
    // τ = −1 + 2 Σ_k Γ_k, Γ_k = ρ_{2k} + ρ_{2k+1}
    let mut tau = -1.0;
    let mut prev = f64::INFINITY;
    let mut lag = 0;
    while lag + 1 < m {
        let pair = (autocov(lag) + autocov(lag + 1)) / gamma0;
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(prev);
        tau += 2.0 * pair;
        prev = pair;
        lag += 2;
    }
    Ok(m as f64 / tau.max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use alloc::vec::Vec;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn constant_series_is_undefined() {
        assert_eq!(effective_sample_size(&[2.0; 50]), Err(Error::UndefinedEss));
        assert!(effective_sample_size(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn iid_is_near_m() {
        let mut rng = RngStream::new(1, 0);
        let x: Vec<f64> = (0..2000).map(|_| rng.sample(StandardNormal)).collect();
        let e = effective_sample_size(&x).unwrap();
        assert!((1700.0..=2300.0).contains(&e), "{e}");
    }

    #[test]
    fn ar1() {
        let mut rng = RngStream::new(2, 0);
        let rho = 0.9;
        let mut x = Vec::with_capacity(20_000);
        let mut cur = 0.0;
        for _ in 0..20_000 {
            let z: f64 = rng.sample(StandardNormal);
            cur = rho * cur + (1.0f64 - rho * rho).sqrt() * z;
            x.push(cur);
        }
        let e = effective_sample_size(&x).unwrap();
        let target = 20_000.0 / 19.0;
        assert!((e / target - 1.0).abs() < 0.25, "{e} vs {target}");
    }
}
