use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::evaluate::Evaluation;

/// How the delay constraint enters the annealing energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PenaltyMode {
    /// `α(m−1) = c·ln(m+1)`, growing with the temperature step.
    #[default]
    ExteriorAdaptive,
    /// `α = c` at every step.
    Static,
    /// Infeasible proposals are rejected outright.
    InteriorReject,
}

impl fmt::Display for PenaltyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PenaltyMode::ExteriorAdaptive => "exterior",
            PenaltyMode::Static => "static",
            PenaltyMode::InteriorReject => "interior",
        })
    }
}

impl FromStr for PenaltyMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exterior" | "exterior_adaptive" => Ok(PenaltyMode::ExteriorAdaptive),
            "static" | "static_constant" => Ok(PenaltyMode::Static),
            "interior" | "interior_reject" => Ok(PenaltyMode::InteriorReject),
            other => Err(format!("unknown penalty mode `{other}`")),
        }
    }
}

/// Default coefficient `c` of the penalty weight. With `c = 4` a
/// configuration 10% over the delay bound pays more than its own energy
/// from step 12 on.
pub const DEFAULT_ALPHA_C: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyParams {
    /// Delay bound D_max, s (may be +∞).
    pub dmax: f64,
    /// Coefficient `c` of `α(m−1) = c·ln(m+1)`.
    pub c: f64,
    pub mode: PenaltyMode,
}

impl PenaltyParams {
    pub fn new(dmax: f64, c: f64, mode: PenaltyMode) -> Result<Self> {
        if !(dmax > 0.0) {
            return Err(Error::invariant("dmax", "delay bound must be positive"));
        }
        if mode == PenaltyMode::ExteriorAdaptive && !(c >= 1.0) {
            return Err(Error::invariant(
                "alpha_c",
                "the adaptive coefficient must be >= 1 so that α(m−1) > ln m",
            ));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::invariant("alpha_c", "must be positive and finite"));
        }
        Ok(Self { dmax, c, mode })
    }

    /// Penalty weight at temperature step `m ≥ 1`.
    pub fn alpha(&self, m: usize) -> f64 {
        match self.mode {
            PenaltyMode::ExteriorAdaptive => self.c * ((m + 1) as f64).ln(),
            PenaltyMode::Static => self.c,
            PenaltyMode::InteriorReject => f64::INFINITY,
        }
    }

    /// `α(m−1)·Π·(D_c − D_max)/D_max` when the bound is violated, else 0.
    pub fn penalty(&self, energy: f64, delay: f64, m: usize) -> f64 {
        if delay <= self.dmax {
            return 0.0;
        }
        if self.mode == PenaltyMode::InteriorReject {
            return f64::INFINITY;
        }
        penalty_value(self.alpha(m), energy, delay, self.dmax)
    }

    /// Annealing energy `F = Π + penalty`; +∞ for invalid configurations.
    pub fn objective(&self, ev: &Evaluation, m: usize) -> f64 {
        if !ev.valid {
            return f64::INFINITY;
        }
        ev.energy + self.penalty(ev.energy, ev.delay, m)
    }

    /// Valid and within the delay bound.
    pub fn feasible(&self, ev: &Evaluation) -> bool {
        ev.valid && ev.delay <= self.dmax
    }
}

/// `α·Π·(D − D_max)/D_max` for `D > D_max`, else 0.
pub fn penalty_value(alpha: f64, energy: f64, delay: f64, dmax: f64) -> f64 {
    if delay <= dmax {
        0.0
    } else {
        alpha * energy * (delay - dmax) / dmax
    }
}
