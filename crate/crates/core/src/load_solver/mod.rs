//! Access-load fixed point and backhaul rates/loads.

pub mod access;
pub mod backhaul;
pub mod fixed_point;

pub use access::{solve_own_load, AccessLoad, AccessModel, StationSinr};
pub use backhaul::{BackhaulCombo, BackhaulMethod, BackhaulModel, BackhaulOptions, BackhaulState};
pub use fixed_point::{fixed_point, AccessLoads, FixedPointOptions};

/// Access and backhaul loads of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadState {
    pub access: AccessLoads,
    /// `None` in small-cell mode (no wireless backhaul).
    pub backhaul: Option<BackhaulState>,
}

impl LoadState {
    /// Loads stable, access iteration converged and backhaul within capacity.
    pub fn feasible(&self) -> bool {
        self.access.stable
            && self.access.converged
            && self.backhaul.as_ref().is_none_or(|b| b.feasible)
    }

    pub fn iterations(&self) -> usize {
        self.access.iterations
    }

    pub fn backhaul_load(&self, slot: usize) -> f64 {
        self.backhaul.as_ref().map_or(0.0, |b| b.loads[slot])
    }
}

/// `ρ_BL,j = ω̄/β Σ_k Φ_k / R_BL,j,k` for a single cell.
pub fn backhaul_load(traffic_mean: f64, quota: f64, masses: &[f64], rates: &[f64]) -> f64 {
    masses
        .iter()
        .zip(rates)
        .map(|(phi, r)| traffic_mean / quota * phi / r)
        .sum()
}
