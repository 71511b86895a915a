//! Maximum-quantile scheduling: law of the SINR seen by the scheduled user.
//!
//! A tagged user whose block SINR has CDF value `u` ranks `n`-th among its own
//! last `W` blocks with probability `Q_n(u) = C(W−1, n−1) u^{W−n} (1−u)^{n−1}`
//! and wins the block with probability `T(W, n, ρ)`, so the scheduled density
//! is `p(z) · Σ_n Q_n(F(z)) T(W, n, ρ)`.

use crate::error::{Error, Result};
use crate::sinr_model::capacity::CapacityTable;
use crate::sinr_model::lognormal::{normal_cdf, LognormalParams};

/// `T(W, n, ρ) = W²(1−ρ) / (W − ρ(W−n))²`: probability that a user ranked
/// `n` is the unique best-ranked one, averaged over the geometric number of
/// competitors.
pub fn t_factor(w: usize, n: usize, rho: f64) -> f64 {
    let w = w as f64;
    let d = w - rho * (w - n as f64);
    w * w * (1.0 - rho) / (d * d)
}

/// `T(W, n, ρ)` for `n = 1..=W`.
pub fn t_factors(w: usize, rho: f64) -> Vec<f64> {
    (1..=w).map(|n| t_factor(w, n, rho)).collect()
}

/// Total mass of the scheduled density, `(1/W) Σ_n T(W, n, ρ)`.
pub fn normalization(w: usize, rho: f64) -> f64 {
    t_factors(w, rho).iter().sum::<f64>() / w as f64
}

fn check(w: usize, rho: f64) -> Result<()> {
    if w < 2 {
        return Err(Error::Domain(format!("MQS window must be >= 2, got {w}")));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Domain(format!("load must lie in [0, 1), got {rho}")));
    }
    Ok(())
}

/// Binomial helper for a fixed window `W`.
#[derive(Debug, Clone)]
pub struct MqsKernel {
    w: usize,
    ln_binom: Vec<f64>,
}

impl MqsKernel {
    pub fn new(w: usize) -> Result<Self> {
        check(w, 0.0)?;
        let mut ln_fact = vec![0.0; w + 1];
        for i in 1..=w {
            ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
        }
        let ln_binom = (0..=w).map(|k| ln_fact[w] - ln_fact[k] - ln_fact[w - k]).collect();
        Ok(Self { w, ln_binom })
    }

    pub fn window(&self) -> usize {
        self.w
    }

    /// `out[n−1] = P(Bin(W, u) ≥ W − n + 1)` for `n = 1..=W`, which equals
    /// the regularized incomplete beta `I_u(W − n + 1, n)`, i.e. the integral
    /// of `W·Q_n` over `[0, u]`.
    pub fn upper_tails(&self, u: f64, out: &mut [f64]) {
        let w = self.w;
        debug_assert_eq!(out.len(), w);
        if u <= 0.0 {
            out.fill(0.0);
            return;
        }
        if u >= 1.0 {
            out.fill(1.0);
            return;
        }
        let (lu, lv) = (u.ln(), (-u).ln_1p());
        // accumulate P(Bin = k) from the top: tail(m) = Σ_{k ≥ m}
        let mut tail = 0.0;
        for m in (1..=w).rev() {
            let k = m as f64;
            tail += (self.ln_binom[m] + k * lu + (w - m) as f64 * lv).exp();
            // m = W − n + 1  ⇒  n = W − m + 1
            out[w - m] = tail.min(1.0);
        }
    }

    /// `Σ_n Q_n(u) T(W, n, ρ)`, evaluated with log-binomials.
    pub fn density_factor(&self, u: f64, t: &[f64]) -> f64 {
        let w = self.w;
        let m = w - 1;
        if u <= 0.0 {
            return t[w - 1];
        }
        if u >= 1.0 {
            return t[0];
        }
        let (lu, lv) = (u.ln(), (-u).ln_1p());
        // C(W−1, n−1) = C(W, n−1)·(W−n+1)/W
        let mut acc = 0.0;
        for n in 1..=w {
            let j = n - 1;
            let ln_c = self.ln_binom[j] + ((w - j) as f64 / w as f64).ln();
            acc += t[n - 1] * (ln_c + (m - j) as f64 * lu + j as f64 * lv).exp();
        }
        acc
    }

    /// Rank decomposition of `E_π[1/C]`: returns `B_n` (n = 1..=W) such that
    /// `∫ π(z)/C(z) dz = Σ_n T(W, n, ρ)·B_n` for every load ρ.
    ///
    /// `C` is piecewise constant, so on each SINR interval `[t_i, t_{i+1})`
    /// the integral of `Q_n` reduces to a difference of incomplete betas.
    pub fn rank_weights(&self, sinr: &LognormalParams, cap: &CapacityTable, out: &mut [f64]) {
        let w = self.w;
        out.fill(0.0);
        let mut lo = vec![0.0; w];
        let mut hi = vec![0.0; w];
        let inv_rates: Vec<f64> = cap.interval_rates().map(|r| 1.0 / r).collect();
        let th = cap.thresholds();
        for (i, &inv_c) in inv_rates.iter().enumerate() {
            let u_hi = if i < th.len() { cdf_at(sinr, th[i]) } else { 1.0 };
            self.upper_tails(u_hi, &mut hi);
            for n in 0..w {
                out[n] += inv_c * (hi[n] - lo[n]);
            }
            std::mem::swap(&mut lo, &mut hi);
        }
        for b in out.iter_mut() {
            *b /= w as f64;
        }
    }
}

fn cdf_at(p: &LognormalParams, threshold: f64) -> f64 {
    if p.sigma == 0.0 {
        return if p.mu >= threshold.ln() { 1.0 } else { 0.0 };
    }
    normal_cdf((threshold.ln() - p.mu) / p.sigma)
}

/// Multiplier turning the unconditioned SINR density into the scheduled one
/// at CDF value `u`.
pub fn sched_density_factor(u: f64, w: usize, rho: f64) -> Result<f64> {
    check(w, rho)?;
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("CDF value must lie in [0, 1], got {u}")));
    }
    Ok(MqsKernel::new(w)?.density_factor(u, &t_factors(w, rho)))
}

/// Validated (W, ρ) pair.
pub(crate) fn checked(w: usize, rho: f64) -> Result<()> {
    check(w, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn t_factor_values() {
        assert_relative_eq!(t_factor(2, 1, 0.5), 8.0 / 9.0, max_relative = 1e-15);
        for w in [2, 5, 10, 37] {
            for rho in [0.0, 0.3, 0.9] {
                assert_relative_eq!(t_factor(w, w, rho), 1.0 - rho, max_relative = 1e-15);
            }
        }
    }

    #[test]
    fn t_factor_geometric_series() {
        // (1−ρ) Σ_U U (ρΨ)^{U−1} with Ψ = (W−n)/W
        for (w, n, rho) in [(2usize, 1usize, 0.5), (10, 3, 0.7), (7, 6, 0.2)] {
            let psi = (w - n) as f64 / w as f64;
            let series: f64 = (1..4000)
                .map(|u| (1.0 - rho) * u as f64 * (rho * psi).powi(u - 1))
                .sum();
            assert_relative_eq!(t_factor(w, n, rho), series, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_load_factor_is_one() {
        for w in [2, 10, 50] {
            let t = t_factors(w, 0.0);
            let k = MqsKernel::new(w).unwrap();
            for u in [0.0, 0.01, 0.4, 0.77, 1.0] {
                assert_relative_eq!(k.density_factor(u, &t), 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn normalization_values() {
        assert!((normalization(10, 0.5) - 0.9279).abs() < 1e-4);
        assert!((normalization(1000, 0.5) - 1.0).abs() < 1e-3);
        assert_eq!(normalization(10, 0.0), 1.0);
    }

    #[test]
    fn upper_tails_match_beta_integral() {
        // d/du I_u(W−n+1, n) = W·Q_n(u); check with a midpoint rule
        let w = 6;
        let k = MqsKernel::new(w).unwrap();
        let mut tails = vec![0.0; w];
        k.upper_tails(0.63, &mut tails);
        for n in 1..=w {
            let m = 20_000;
            let mut acc = 0.0;
            for i in 0..m {
                let u = 0.63 * (i as f64 + 0.5) / m as f64;
                let q = binom(w - 1, n - 1) * u.powi((w - n) as i32) * (1.0 - u).powi(n as i32 - 1);
                acc += w as f64 * q * 0.63 / m as f64;
            }
            assert_relative_eq!(tails[n - 1], acc, max_relative = 1e-6);
        }
    }

    fn binom(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn rejects_degenerate_window() {
        assert!(sched_density_factor(0.5, 1, 0.2).is_err());
        assert!(sched_density_factor(0.5, 4, 1.0).is_err());
        assert!(MqsKernel::new(1).is_err());
    }
}
