use crate::channel::TxPowerField;
use crate::scenario::{AssociationMap, Deployment};

/// Mean (`m1`, W) and variance (`m2`, W²) of the interference at a station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceMoments {
    pub m1: f64,
    pub m2: f64,
}

/// Load-independent interference integrals for one configuration.
///
/// With the scheduled interferer of station `j` located at `s` with
/// probability `φ(s)/Φ_j` over `A_j`:
/// `Y_jk = Σ_{s∈A_j} (φ(s)/Φ_j)·T(s)·G_k(s)` and
/// `H_jk = Σ_{s∈A_j} (φ(s)/Φ_j)·(T(s)·G_k(s))²`.
#[derive(Debug, Clone)]
pub struct CouplingTerms {
    n: usize,
    y: Vec<f64>,
    h: Vec<f64>,
}

impl CouplingTerms {
    pub fn build(dep: &Deployment, assoc: &AssociationMap, tx: &TxPowerField) -> Self {
        let n = dep.stations.len();
        let phi = dep.network.phi();
        let pa = dep.network.grid().pixel_area();
        let mut y = vec![0.0; n * n];
        let mut h = vec![0.0; n * n];
        for j in 0..n {
            let mass = assoc.mass[j];
            if mass <= 0.0 {
                continue;
            }
            for &p in &assoc.pixels[j] {
                let w = phi[p] * pa / mass;
                let t = tx.power[p];
                for k in 0..n {
                    if k == j {
                        continue;
                    }
                    let rx = t * dep.stations[k].gain[p];
                    y[j * n + k] += w * rx;
                    h[j * n + k] += w * rx * rx;
                }
            }
        }
        Self { n, y, h }
    }

    /// Terms from explicit matrices, indexed `[j][k]`.
    pub fn from_matrices(y: Vec<Vec<f64>>, h: Vec<Vec<f64>>) -> Self {
        let n = y.len();
        Self {
            n,
            y: y.into_iter().flatten().collect(),
            h: h.into_iter().flatten().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn y(&self, j: usize, k: usize) -> f64 {
        self.y[j * self.n + k]
    }

    pub fn h(&self, j: usize, k: usize) -> f64 {
        self.h[j * self.n + k]
    }

    /// `M1 = Σ_{j≠k} ρ_j Y_jk`, `M2 = Σ_{j≠k} 2ρ_j H_jk − ρ_j² Y_jk²`
    /// (Bernoulli activity times unit-mean exponential fading).
    pub fn moments(&self, k: usize, loads: &[f64]) -> InterferenceMoments {
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (j, &rho) in loads.iter().enumerate() {
            if j == k || rho == 0.0 {
                continue;
            }
            let y = self.y(j, k);
            m1 += rho * y;
            m2 += 2.0 * rho * self.h(j, k) - rho * rho * y * y;
        }
        InterferenceMoments { m1, m2: m2.max(0.0) }
    }
}

/// Interference moments at station `k` given the other stations' loads.
pub fn interference_moments(terms: &CouplingTerms, loads: &[f64], k: usize) -> InterferenceMoments {
    terms.moments(k, loads)
}
