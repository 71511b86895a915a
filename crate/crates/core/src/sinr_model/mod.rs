//! Lognormal SINR model and maximum-quantile-scheduled SINR law.

pub mod capacity;
pub mod interference;
pub mod lognormal;
pub mod mqs;
pub mod quadrature;

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
pub use capacity::{CapacityTable, McsLevel};
pub use interference::{interference_moments, CouplingTerms, InterferenceMoments};
pub use lognormal::{fit_lognormal, LognormalParams};
pub use mqs::{normalization, sched_density_factor, t_factor, t_factors, MqsKernel};
pub use quadrature::GaussLegendre;

/// Lognormal approximation of the SINR `γ = S·ν / (I + N)`.
///
/// The faded signal `S·ν` (ν unit-mean exponential) is matched to a lognormal
/// with `σ² = ln 2`; `I + N` is moment matched with the noise shifting the
/// mean only. The ratio of the two lognormals is again lognormal.
pub fn sinr_params(
    signal_mean: f64,
    interference: &InterferenceMoments,
    noise: f64,
) -> Result<LognormalParams> {
    if !(signal_mean > 0.0) {
        return Err(Error::Domain(format!(
            "signal mean must be positive, got {signal_mean}"
        )));
    }
    let denom = fit_lognormal(interference.m1 + noise, interference.m2)?;
    LognormalParams::new(
        signal_mean.ln() - 0.5 * LN_2 - denom.mu,
        (LN_2 + denom.sigma * denom.sigma).sqrt(),
    )
}

/// Scheduled SINR law: lognormal base density reweighted by the MQS factor.
#[derive(Debug, Clone)]
pub struct SchedSinrDist {
    pub base: LognormalParams,
    pub window: usize,
    pub load: f64,
    t: Vec<f64>,
    kernel: MqsKernel,
}

impl SchedSinrDist {
    pub fn new(base: LognormalParams, window: usize, load: f64) -> Result<Self> {
        mqs::checked(window, load)?;
        Ok(Self {
            base,
            window,
            load,
            t: t_factors(window, load),
            kernel: MqsKernel::new(window)?,
        })
    }

    /// Multiplier on the base density at CDF value `u`.
    pub fn factor(&self, u: f64) -> f64 {
        self.kernel.density_factor(u, &self.t)
    }

    /// `∫ π(z) dz`.
    pub fn mass(&self) -> f64 {
        self.t.iter().sum::<f64>() / self.window as f64
    }

    /// CDF of the normalized scheduled law, `∫_0^x π / mass`.
    pub fn normalized_cdf(&self, x: f64) -> f64 {
        let u = self.base.cdf(x);
        let mut tails = vec![0.0; self.window];
        self.kernel.upper_tails(u, &mut tails);
        let raw: f64 = tails.iter().zip(&self.t).map(|(i, t)| i * t).sum::<f64>() / self.window as f64;
        raw / self.mass()
    }

    /// `∫ π/C dz` through the rank decomposition (exact for a step `C`).
    pub fn expect_inv_capacity(&self, cap: &CapacityTable) -> f64 {
        let mut b = vec![0.0; self.window];
        self.kernel.rank_weights(&self.base, cap, &mut b);
        b.iter().zip(&self.t).map(|(b, t)| b * t).sum()
    }
}

/// `∫ f(z) π(z) dz` with the substitution `u = F(z)` and fixed-node
/// Gauss–Legendre quadrature on [0, 1] (256 nodes).
pub fn expect_over_sched(dist: &SchedSinrDist, f: impl Fn(f64) -> f64) -> f64 {
    expect_over_sched_with(dist, GaussLegendre::default_rule(), f)
}

pub fn expect_over_sched_with(
    dist: &SchedSinrDist,
    rule: &GaussLegendre,
    f: impl Fn(f64) -> f64,
) -> f64 {
    rule.integrate(|u| f(dist.base.quantile(u)) * dist.factor(u))
}
