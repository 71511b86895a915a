use super::access::AccessModel;
use crate::error::Result;

/// Stopping rule of the load iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    /// Stop when `max_k |ρ_k(t) − ρ_k(t−1)|` falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            tolerance: 0.01,
            max_iterations: 50,
        }
    }
}

/// Access loads at the end of the iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct AccessLoads {
    /// ρ(t) at the last iterate.
    pub loads: Vec<f64>,
    /// ρ(t−1): the loads that set the interference behind `loads`.
    pub interferer_loads: Vec<f64>,
    /// Zero-own-load offered load of each station at the last iterate.
    pub offered: Vec<f64>,
    /// ρ(0) = 0, ρ(1), ..., ρ(t).
    pub history: Vec<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
    /// False as soon as some station's offered load reached one.
    pub stable: bool,
}

/// Plain (undamped) Jacobi iteration `ρ(t) = F(ρ(t−1))` from `ρ(0) = 0`.
pub fn fixed_point(model: &AccessModel, opts: &FixedPointOptions) -> Result<AccessLoads> {
    let n = model.len();
    let mut prev = vec![0.0; n];
    let mut history = vec![prev.clone()];
    let mut offered = vec![0.0; n];
    let mut stable = true;
    let mut converged = false;
    let mut iterations = 0;
    let mut cur = prev.clone();
    while iterations < opts.max_iterations {
        iterations += 1;
        for k in 0..n {
            let f = model.access_load(k, &prev)?;
            cur[k] = f.load;
            offered[k] = f.offered;
            stable &= f.stable();
        }
        history.push(cur.clone());
        if !stable {
            break;
        }
        let diff = cur
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if diff < opts.tolerance {
            converged = true;
            break;
        }
        prev.clone_from(&cur);
    }
    Ok(AccessLoads {
        loads: cur,
        interferer_loads: prev,
        offered,
        history,
        iterations,
        converged,
        stable,
    })
}
