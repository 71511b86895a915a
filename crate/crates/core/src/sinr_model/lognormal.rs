use statrs::function::erf::erfc;

use crate::channel::standard_normal_quantile;
use crate::error::{Error, Result};

/// Lognormal law: `ln X ~ N(mu, sigma²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalParams {
    pub mu: f64,
    pub sigma: f64,
}

impl LognormalParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::Domain(format!(
                "lognormal parameters must be finite with sigma >= 0 (mu={mu}, sigma={sigma})"
            )));
        }
        Ok(Self { mu, sigma })
    }

    pub fn mean(&self) -> f64 {
        (self.mu + 0.5 * self.sigma * self.sigma).exp()
    }

    pub fn variance(&self) -> f64 {
        let s2 = self.sigma * self.sigma;
        s2.exp_m1() * (2.0 * self.mu + s2).exp()
    }

    pub fn median(&self) -> f64 {
        self.mu.exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let z = x.ln() - self.mu;
        if self.sigma == 0.0 {
            return if z >= 0.0 { 1.0 } else { 0.0 };
        }
        normal_cdf(z / self.sigma)
    }

    /// Inverse CDF for `u` in (0, 1).
    pub fn quantile(&self, u: f64) -> f64 {
        (self.mu + self.sigma * standard_normal_quantile(u)).exp()
    }
}

#[inline]
pub(crate) fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Lognormal with the given mean and variance:
/// `σ² = ln(1 + v/m²)`, `μ = ln m − σ²/2`.
pub fn fit_lognormal(m1: f64, v: f64) -> Result<LognormalParams> {
    if !(m1 > 0.0) || !m1.is_finite() {
        return Err(Error::Domain(format!("lognormal fit needs a positive mean, got {m1}")));
    }
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!(
            "lognormal fit needs a finite non-negative variance, got {v}"
        )));
    }
    let s2 = (v / (m1 * m1)).ln_1p();
    LognormalParams::new(m1.ln() - 0.5 * s2, s2.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn degenerate_fit() {
        let p = fit_lognormal(1.0, 0.0).unwrap();
        assert_eq!((p.mu, p.sigma), (0.0, 0.0));
    }

    #[test]
    fn unit_mean_unit_variance() {
        let p = fit_lognormal(1.0, 1.0).unwrap();
        let s2 = 2f64.ln();
        assert_relative_eq!(p.sigma * p.sigma, s2, max_relative = 1e-14);
        assert_relative_eq!(p.mu, -0.5 * s2, max_relative = 1e-14);
        assert_relative_eq!(p.mu, -0.346_573_590_279_972_6, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(fit_lognormal(0.0, 1.0).is_err());
        assert!(fit_lognormal(-1.0, 1.0).is_err());
        assert!(fit_lognormal(1.0, -1.0).is_err());
    }

    #[test]
    fn cdf_quantile_inverse() {
        let p = LognormalParams::new(0.3, 1.7).unwrap();
        for u in [1e-6, 0.01, 0.3, 0.5, 0.9, 0.999_999] {
            assert_relative_eq!(p.cdf(p.quantile(u)), u, max_relative = 1e-9);
        }
        assert_relative_eq!(p.cdf(p.median()), 0.5, max_relative = 1e-12);
    }
}
