use crate::error::{Error, Result};

/// Geometric cooling `T_m = T0·h^(m−1)` for `m = 1..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaSchedule {
    /// Initial temperature; `None` runs the acceptance-ratio search first.
    pub t0: Option<f64>,
    pub h: f64,
    pub steps: usize,
    pub proposals: usize,
    pub restarts: usize,
}

impl SaSchedule {
    /// 45 steps, 4 restarts, and 400 proposals for two relays scaled with
    /// the size of the move catalogue.
    pub fn full(n_rn: usize) -> Self {
        Self {
            t0: None,
            h: 0.85,
            steps: 45,
            proposals: proposals_for(n_rn),
            restarts: 4,
        }
    }

    /// Reduced budget for desk-scale runs: 20 steps × 100 proposals × 2
    /// restarts.
    pub fn desk() -> Self {
        Self {
            t0: None,
            h: 0.85,
            steps: 20,
            proposals: 100,
            restarts: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h < 1.0) {
            return Err(Error::invariant("schedule.h", "must lie in (0, 1)"));
        }
        if self.steps == 0 || self.proposals == 0 || self.restarts == 0 {
            return Err(Error::invariant(
                "schedule",
                "steps, proposals and restarts must be positive",
            ));
        }
        if let Some(t0) = self.t0 {
            if !(t0 > 0.0) || !t0.is_finite() {
                return Err(Error::invariant("schedule.t0", "must be positive and finite"));
            }
        }
        Ok(())
    }

    pub fn temperature(&self, t0: f64, m: usize) -> f64 {
        t0 * self.h.powi(m as i32 - 1)
    }
}

/// `round(400·(8·n_rn + 6)/22)`: 400 for two relays, proportional to the
/// number of available moves otherwise.
pub fn proposals_for(n_rn: usize) -> usize {
    ((400.0 * (8 * n_rn + 6) as f64) / 22.0).round() as usize
}
