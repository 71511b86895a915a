//! Exact Gibbs laws of the penalized energy on small enumerable spaces.
//!
//! `P_m(x) ∝ exp(−(Π(x) + μ_m·Φ(x)) / T_m)` with the violation measure
//! `Φ(x) = Π(x)·(D(x) − D_max)⁺ / D_max`, penalty weight `μ_m = c·ln(m+1)`
//! and temperature `T_m = T0·h^(m−1)`, i.e. the law the annealer would
//! sample at step `m` if it were at equilibrium.

use super::penalty::penalty_value;

/// One toy configuration: energy Π and delay D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyPoint {
    pub energy: f64,
    pub delay: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsStage {
    pub step: usize,
    pub temperature: f64,
    pub mu: f64,
    /// Probability mass on the feasible minimizers.
    pub optimal_mass: f64,
    /// Probability mass on infeasible points.
    pub infeasible_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsReport {
    /// Indices of the feasible minimizers (empty if nothing is feasible).
    pub optimal: Vec<usize>,
    pub stages: Vec<GibbsStage>,
}

impl GibbsReport {
    pub fn final_mass(&self) -> Option<f64> {
        self.stages.last().map(|s| s.optimal_mass)
    }
}

/// Exact Gibbs distribution over `points` at penalty weight `mu` and
/// temperature `t`, normalized by summation over the whole space.
pub fn gibbs_distribution(points: &[ToyPoint], dmax: f64, mu: f64, t: f64) -> Vec<f64> {
    let energies: Vec<f64> = points
        .iter()
        .map(|p| p.energy + penalty_value(mu, p.energy, p.delay, dmax))
        .collect();
    let min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = energies.iter().map(|e| (-(e - min) / t).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

/// Mass on the feasible minimizers along the annealing schedule.
pub fn gibbs_concentration_check(
    points: &[ToyPoint],
    dmax: f64,
    c: f64,
    t0: f64,
    h: f64,
    steps: usize,
) -> GibbsReport {
    let best = points
        .iter()
        .filter(|p| p.delay <= dmax)
        .map(|p| p.energy)
        .fold(f64::INFINITY, f64::min);
    let optimal: Vec<usize> = if best.is_finite() {
        (0..points.len())
            .filter(|&i| points[i].delay <= dmax && points[i].energy == best)
            .collect()
    } else {
        Vec::new()
    };
    let stages = (1..=steps)
        .map(|m| {
            let mu = c * ((m + 1) as f64).ln();
            let t = t0 * h.powi(m as i32 - 1);
            let p = gibbs_distribution(points, dmax, mu, t);
            GibbsStage {
                step: m,
                temperature: t,
                mu,
                optimal_mass: optimal.iter().map(|&i| p[i]).sum(),
                infeasible_mass: (0..points.len())
                    .filter(|&i| points[i].delay > dmax)
                    .map(|i| p[i])
                    .sum(),
            }
        })
        .collect();
    GibbsReport { optimal, stages }
}
