use crate::channel::TxPowerField;
use crate::error::Result;
use crate::scenario::{AssociationMap, Deployment};
use crate::sinr_model::{
    sinr_params, t_factors, CapacityTable, CouplingTerms, InterferenceMoments, LognormalParams,
    MqsKernel,
};

/// SINR law of station `k` given the other stations' loads. All pixels share
/// the spread; the location is `ln S(s) + offset` with `S(s) = T(s)·G_k(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationSinr {
    pub moments: InterferenceMoments,
    pub offset: f64,
    pub sigma: f64,
}

impl StationSinr {
    pub fn at(&self, signal_mean: f64) -> LognormalParams {
        LognormalParams {
            mu: signal_mean.ln() + self.offset,
            sigma: self.sigma,
        }
    }
}

/// Result of one `F_k` evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccessLoad {
    /// Self-consistent load ρ_k.
    pub load: f64,
    /// Load offered at zero own load, `Σ_n Ĝ_n`; the station is unstable
    /// when this reaches one.
    pub offered: f64,
}

impl AccessLoad {
    pub fn stable(&self) -> bool {
        self.offered < 1.0
    }
}

/// Everything needed to evaluate the access load operator `F` for one
/// configuration.
#[derive(Debug, Clone)]
pub struct AccessModel {
    pub terms: CouplingTerms,
    /// Per station: (mean received signal S, traffic weight φ·pixel_area).
    /// Unclamped pixels all receive P̄ and are merged into one entry.
    groups: Vec<Vec<(f64, f64)>>,
    kernel: MqsKernel,
    capacity: CapacityTable,
    noise: f64,
    /// ω̄ / (1 − β).
    scale: f64,
}

impl AccessModel {
    /// `quota` is the backhaul share β removed from the access frame (zero in
    /// small-cell mode).
    pub fn new(
        dep: &Deployment,
        assoc: &AssociationMap,
        tx: &TxPowerField,
        quota: f64,
    ) -> Result<Self> {
        let sc = dep.scenario();
        let phi = dep.network.phi();
        let pa = dep.network.grid().pixel_area();
        let groups = (0..dep.stations.len())
            .map(|k| {
                let st = &dep.stations[k];
                let mut merged = 0.0;
                let mut out = Vec::new();
                for &p in &assoc.pixels[k] {
                    let w = phi[p] * pa;
                    if w == 0.0 {
                        continue;
                    }
                    if tx.clamped[p] {
                        out.push((tx.power[p] * st.gain[p], w));
                    } else {
                        merged += w;
                    }
                }
                if merged > 0.0 {
                    out.push((st.target_w, merged));
                }
                out
            })
            .collect();
        Ok(Self {
            terms: CouplingTerms::build(dep, assoc, tx),
            groups,
            kernel: MqsKernel::new(sc.mqs_window)?,
            capacity: sc.capacity.clone(),
            noise: sc.noise_w,
            scale: sc.traffic_mean / (1.0 - quota),
        })
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn window(&self) -> usize {
        self.kernel.window()
    }

    pub fn kernel(&self) -> &MqsKernel {
        &self.kernel
    }

    pub fn capacity(&self) -> &CapacityTable {
        &self.capacity
    }

    pub fn station_sinr(&self, k: usize, loads: &[f64]) -> Result<StationSinr> {
        let moments = self.terms.moments(k, loads);
        // the signal level cancels out of everything but the location
        let unit = sinr_params(1.0, &moments, self.noise)?;
        Ok(StationSinr {
            moments,
            offset: unit.mu,
            sigma: unit.sigma,
        })
    }

    /// `Ĝ_n = ω̄/(1−β) Σ_s φ(s)·pixel_area·B_n(s)`, so that the right-hand side
    /// of the load equation is `Σ_n T(W, n, ρ_k)·Ĝ_n`.
    pub fn rank_profile(&self, k: usize, sinr: &StationSinr) -> Vec<f64> {
        let w = self.kernel.window();
        let mut acc = vec![0.0; w];
        let mut b = vec![0.0; w];
        for &(signal, weight) in &self.groups[k] {
            self.kernel.rank_weights(&sinr.at(signal), &self.capacity, &mut b);
            for (a, bn) in acc.iter_mut().zip(&b) {
                *a += weight * bn;
            }
        }
        for a in acc.iter_mut() {
            *a *= self.scale;
        }
        acc
    }

    /// `F_k(ρ_{−k})`: the own-load root of
    /// `ρ = ω̄/(1−β) ∫ φ(s) ∫ π_{γ,k}(s, z; ρ)/C(z) dz ds`.
    pub fn access_load(&self, k: usize, loads: &[f64]) -> Result<AccessLoad> {
        if self.groups[k].is_empty() {
            return Ok(AccessLoad {
                load: 0.0,
                offered: 0.0,
            });
        }
        let sinr = self.station_sinr(k, loads)?;
        let g = self.rank_profile(k, &sinr);
        Ok(AccessLoad {
            load: solve_own_load(&g),
            offered: g.iter().sum(),
        })
    }

    /// `∫ π/C dz` at one pixel for a given own load (the per-pixel factor of
    /// the access delay and energy).
    pub fn inv_capacity_at(&self, sinr: &StationSinr, signal: f64, load: f64) -> f64 {
        let w = self.kernel.window();
        let mut b = vec![0.0; w];
        self.kernel.rank_weights(&sinr.at(signal), &self.capacity, &mut b);
        b.iter().zip(t_factors(w, load)).map(|(b, t)| b * t).sum()
    }
}

/// Least root in [0, 1) of `x = Σ_n T(W, n, x)·g_n`.
///
/// The right-hand side equals `Σ g_n` at zero and vanishes at one, so a root
/// always exists.
pub fn solve_own_load(g: &[f64]) -> f64 {
    let w = g.len();
    let total: f64 = g.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let f = |x: f64| x - t_factors(w, x).iter().zip(g).map(|(t, g)| t * g).sum::<f64>();
    const SCAN: usize = 64;
    let mut lo = 0.0;
    let mut hi = 1.0;
    for i in 1..=SCAN {
        let x = i as f64 / SCAN as f64;
        if f(x) >= 0.0 {
            hi = x;
            break;
        }
        lo = x;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn own_load_root_solves_equation() {
        let w = 10;
        let g: Vec<f64> = (0..w).map(|n| 0.05 + 0.01 * n as f64).collect();
        let x = solve_own_load(&g);
        let rhs: f64 = t_factors(w, x).iter().zip(&g).map(|(t, g)| t * g).sum();
        assert!((x - rhs).abs() < 1e-12);
        assert!(x > 0.0 && x < 1.0);
        assert_eq!(solve_own_load(&vec![0.0; w]), 0.0);
    }

    #[test]
    fn own_load_monotone_in_profile() {
        let g: Vec<f64> = vec![0.03; 10];
        let bigger: Vec<f64> = vec![0.04; 10];
        assert!(solve_own_load(&bigger) > solve_own_load(&g));
    }
}
