//! Flow-level delays and uplink energy per bit.

use std::fmt;
use std::str::FromStr;

use crate::load_solver::LoadState;
use crate::scenario::{Configuration, Origin, StationKind};

/// Weight given to each station's delay in the cell average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DelayWeighting {
    /// `Φ_k / A_k` per station.
    #[default]
    Paper,
    /// `Φ_k / Σ_{k ∈ cell} Φ_k`.
    TrafficShare,
}

impl fmt::Display for DelayWeighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DelayWeighting::Paper => "paper",
            DelayWeighting::TrafficShare => "traffic_share",
        })
    }
}

impl FromStr for DelayWeighting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(DelayWeighting::Paper),
            "traffic_share" => Ok(DelayWeighting::TrafficShare),
            other => Err(format!("unknown weighting `{other}`")),
        }
    }
}

/// `D_k(s) = ξ/(1−ρ_k) · ∫ π/((1−β)C) dz`, with `inv_capacity = ∫ π/C dz`.
/// Returns +∞ for ρ_k ≥ 1.
pub fn access_delay_at(flow_size: f64, quota: f64, load: f64, inv_capacity: f64) -> f64 {
    if load >= 1.0 {
        return f64::INFINITY;
    }
    flow_size / (1.0 - load) * inv_capacity / (1.0 - quota)
}

/// Traffic-weighted mean of per-pixel delays: `Σ (w_s/Φ_k) D_k(s)` with
/// `w_s = φ(s)·pixel_area`.
pub fn station_delay(weights: &[f64], delays: &[f64]) -> Option<f64> {
    let mass: f64 = weights.iter().sum();
    if mass <= 0.0 {
        return None;
    }
    Some(weights.iter().zip(delays).map(|(w, d)| w * d).sum::<f64>() / mass)
}

/// Little's law form of the station delay, `ρ ξ / ((1−ρ) ω̄ Φ_k)`.
pub fn little_delay(load: f64, flow_size: f64, traffic_mean: f64, mass: f64) -> f64 {
    if load >= 1.0 {
        return f64::INFINITY;
    }
    load * flow_size / ((1.0 - load) * traffic_mean * mass)
}

/// `D_BL,j,k = ξ / ((1−ρ_BL,j) β R_BL,j,k)`; +∞ for ρ_BL ≥ 1.
pub fn backhaul_delay(flow_size: f64, quota: f64, backhaul_load: f64, rate: f64) -> f64 {
    if backhaul_load >= 1.0 {
        return f64::INFINITY;
    }
    flow_size / ((1.0 - backhaul_load) * quota * rate)
}

/// Cell delay `Σ_k w_k (D_k + D_BL,k)` over the cell's stations with
/// `Φ_k > 0`; each item is `(Φ_k, A_k, D_k + D_BL,k)`.
pub fn cell_delay(items: &[(f64, f64, f64)], weighting: DelayWeighting) -> f64 {
    let total_mass: f64 = items.iter().map(|i| i.0).sum();
    items
        .iter()
        .filter(|i| i.0 > 0.0)
        .map(|&(mass, area, delay)| {
            let w = match weighting {
                DelayWeighting::Paper => mass / area,
                DelayWeighting::TrafficShare => mass / total_mass,
            };
            w * delay
        })
        .sum()
}

/// `ε(s) = T(s) ∫ π/C dz`, J/bit.
pub fn energy_at(tx_power: f64, inv_capacity: f64) -> f64 {
    tx_power * inv_capacity
}

/// `Π = (1/A_c) Σ_s φ(s) ε(s) pixel_area` over the cell's pixels; each item
/// is `(φ(s)·pixel_area, ε(s))`.
pub fn energy_per_bit(items: &[(f64, f64)], cell_area: f64) -> f64 {
    items.iter().map(|(w, e)| w * e).sum::<f64>() / cell_area
}

/// Per-station part of an evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct StationReport {
    pub index: usize,
    pub kind: StationKind,
    pub cell: usize,
    pub origin: Origin,
    /// A_k, m².
    pub area: f64,
    /// Φ_k, m².
    pub mass: f64,
    pub load: f64,
    /// Mean access delay D_k (traffic-weighted pixel average), s. Only for
    /// stations of the focus cell with traffic.
    pub access_delay: Option<f64>,
    /// Little's law value of D_k, s.
    pub little_delay: Option<f64>,
    pub backhaul_rate: Option<f64>,
    pub backhaul_load: Option<f64>,
    pub backhaul_delay: Option<f64>,
}

/// Per-pixel detail for the focus cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelReport {
    pub pixel: usize,
    pub server: usize,
    pub tx_power: f64,
    pub clamped: bool,
    /// D_k(s), s.
    pub delay: f64,
    /// ε(s), J/bit.
    pub energy: f64,
}

/// Result of evaluating one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub configuration: Configuration,
    /// Π, J/bit (+∞ when infeasible).
    pub energy_per_bit: f64,
    /// D̄_c, s (+∞ when infeasible).
    pub cell_delay: f64,
    /// A_c, m².
    pub cell_area: f64,
    pub weighting: DelayWeighting,
    pub small_cell: bool,
    pub feasible: bool,
    pub stations: Vec<StationReport>,
    pub pixels: Vec<PixelReport>,
    pub loads: LoadState,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn formula_arithmetic() {
        assert_relative_eq!(access_delay_at(1e6, 0.1, 0.5, 1e-7), 0.2222222222, max_relative = 1e-9);
        assert_relative_eq!(access_delay_at(1e6, 0.1, 0.0, 1e-7), 1e6 / (0.9 * 1e7), max_relative = 1e-12);
        assert_relative_eq!(backhaul_delay(1e6, 0.1, 0.5, 1e7), 2.0, max_relative = 1e-12);
        assert_relative_eq!(backhaul_delay(1e6, 0.1, 0.0, 1e7), 1.0, max_relative = 1e-12);
        assert!(access_delay_at(1e6, 0.1, 1.0, 1e-7).is_infinite());
        assert!(backhaul_delay(1e6, 0.1, 1.2, 1e7).is_infinite());
    }

    #[test]
    fn delay_diverges_towards_saturation() {
        let d: Vec<f64> = [0.9, 0.99, 0.999]
            .iter()
            .map(|&r| access_delay_at(1e6, 0.1, r, 1e-7))
            .collect();
        assert!(d[0] < d[1] && d[1] < d[2]);
    }

    #[test]
    fn station_delay_averages() {
        assert_relative_eq!(station_delay(&[3.0], &[0.7]).unwrap(), 0.7);
        assert_relative_eq!(station_delay(&[1.0, 2.0, 5.0], &[0.4; 3]).unwrap(), 0.4);
        assert_eq!(station_delay(&[], &[]), None);
    }

    #[test]
    fn weighting_modes() {
        let items = [(2.0, 2.0, 0.3), (1.0, 1.0, 0.5)];
        // uniform traffic: paper weights are all one
        assert_relative_eq!(cell_delay(&items, DelayWeighting::Paper), 0.8);
        assert_relative_eq!(
            cell_delay(&items, DelayWeighting::TrafficShare),
            (2.0 * 0.3 + 0.5) / 3.0
        );
        let single = [(4.0, 5.0, 0.2)];
        assert_relative_eq!(cell_delay(&single, DelayWeighting::Paper), 0.8 * 0.2);
    }

    #[test]
    fn energy_arithmetic() {
        assert_eq!(energy_at(0.0, 3.0), 0.0);
        assert_relative_eq!(energy_at(0.2, 1.0 / 5e6), 0.2 / 5e6);
        assert_relative_eq!(energy_per_bit(&[(2.0, 1.0), (2.0, 3.0)], 4.0), 2.0);
    }
}
