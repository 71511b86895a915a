//! Relay backhaul links: rates averaged over the scheduling state of the
//! other cells' backhaul sections, and the resulting backhaul loads.

use rand::distr::{Distribution, weighted::WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::scenario::{AssociationMap, Deployment, StationKind};
use crate::sinr_model::CapacityTable;

/// How the expectation over scheduling combinations is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackhaulMethod {
    /// Exact enumeration when the number of combinations is at most
    /// `exact_cap`, Monte-Carlo otherwise.
    #[default]
    Auto,
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackhaulOptions {
    pub method: BackhaulMethod,
    pub exact_cap: u64,
    pub mc_draws: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for BackhaulOptions {
    fn default() -> Self {
        Self {
            method: BackhaulMethod::Auto,
            exact_cap: 1_000_000,
            mc_draws: 100_000,
            seed: 0,
            tolerance: 0.01,
            max_iterations: 50,
        }
    }
}

/// Backhaul state of every cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BackhaulState {
    /// ρ_BL,j per cell, in [`Deployment::enbs`] order.
    pub loads: Vec<f64>,
    /// R_BL,j,k per station (relays only), bit/s.
    pub rates: Vec<Option<f64>>,
    /// Relays whose backhaul never clears the first MCS threshold.
    pub floor_limited: Vec<bool>,
    pub iterations: usize,
    pub converged: bool,
    /// All ρ_BL < 1 and the iteration converged.
    pub feasible: bool,
}

/// Per-cell relay sets and link budgets for one configuration.
#[derive(Debug, Clone)]
pub struct BackhaulModel {
    /// Relays (deployment indices) donated by each eNB slot.
    pub relays: Vec<Vec<usize>>,
    /// Received backhaul power of relay `r` at eNB slot `j`: `rx[r][j]`.
    rx: Vec<Vec<f64>>,
    /// Traffic mass Φ_k of each station.
    mass: Vec<f64>,
    capacity: CapacityTable,
    noise: f64,
    /// ω̄ / β.
    scale: f64,
}

/// One scheduling combination δ: the relay transmitting on the backhaul in
/// each cell (`None` = idle), with its probability V(δ).
#[derive(Debug, Clone, PartialEq)]
pub struct BackhaulCombo {
    pub index: u64,
    pub scheduled: Vec<Option<usize>>,
    pub probability: f64,
}

impl BackhaulModel {
    pub fn new(dep: &Deployment, assoc: &AssociationMap) -> Self {
        let sc = dep.scenario();
        let mut relays = vec![Vec::new(); dep.enbs.len()];
        let mut rx = vec![Vec::new(); dep.stations.len()];
        for (k, st) in dep.stations.iter().enumerate() {
            if st.kind != StationKind::Rn {
                continue;
            }
            let donor = st.donor.expect("relays have donors");
            relays[dep.enb_slot(donor)].push(k);
            rx[k] = st.backhaul_gain.iter().map(|g| st.backhaul_w * g).collect();
        }
        Self {
            relays,
            rx,
            mass: assoc.mass.clone(),
            capacity: sc.capacity.clone(),
            noise: sc.noise_w,
            scale: sc.traffic_mean / sc.backhaul_quota,
        }
    }

    pub fn has_relays(&self) -> bool {
        self.relays.iter().any(|r| !r.is_empty())
    }

    /// Probability of each state of cell `h`'s backhaul: idle with
    /// `1 − ρ_BL,h`, relay `k` with its own share `ρ̃_BL,h,k`.
    fn cell_states(&self, h: usize, partial: &[f64]) -> Vec<(Option<usize>, f64)> {
        let busy: f64 = self.relays[h].iter().map(|&k| partial[k]).sum();
        let mut states = vec![(None, (1.0 - busy).max(0.0))];
        states.extend(self.relays[h].iter().map(|&k| (Some(k), partial[k])));
        states
    }

    /// Enumerates every combination δ across all cells (for inspection and
    /// tests); `partial[k]` is ρ̃_BL for relay `k`.
    pub fn combos(&self, partial: &[f64]) -> Vec<BackhaulCombo> {
        let states: Vec<_> = (0..self.relays.len())
            .map(|h| self.cell_states(h, partial))
            .collect();
        let mut out = Vec::new();
        let total: u64 = states.iter().map(|s| s.len() as u64).product();
        for index in 0..total {
            let mut rest = index;
            let mut scheduled = Vec::with_capacity(states.len());
            let mut probability = 1.0;
            for s in &states {
                let (who, p) = s[(rest % s.len() as u64) as usize];
                rest /= s.len() as u64;
                scheduled.push(who);
                probability *= p;
            }
            out.push(BackhaulCombo {
                index,
                scheduled,
                probability,
            });
        }
        out
    }

    /// Number of combinations of the cells other than `j`.
    fn other_combinations(&self, j: usize) -> u64 {
        self.relays
            .iter()
            .enumerate()
            .filter(|&(h, _)| h != j)
            .map(|(_, r)| r.len() as u64 + 1)
            .fold(1u64, |a, b| a.saturating_mul(b))
    }

    /// `R_BL,j,k = 1 / E_δ[1/C(γ_BL)]` for every relay, given the relays'
    /// partial backhaul loads `ρ̃_BL`.
    pub fn rates(&self, partial: &[f64], opts: &BackhaulOptions) -> Vec<Option<f64>> {
        let mut rates = vec![None; self.rx.len()];
        for (j, relays) in self.relays.iter().enumerate() {
            if relays.is_empty() {
                continue;
            }
            let others: Vec<usize> = (0..self.relays.len())
                .filter(|&h| h != j && !self.relays[h].is_empty())
                .collect();
            let states: Vec<_> = others.iter().map(|&h| self.cell_states(h, partial)).collect();
            let exact = match opts.method {
                BackhaulMethod::Exact => true,
                BackhaulMethod::MonteCarlo => false,
                BackhaulMethod::Auto => self.other_combinations(j) <= opts.exact_cap,
            };
            // interference at eNB j for each combination, with its weight
            let samples: Vec<(f64, f64)> = if exact {
                enumerate_interference(&states, &self.rx, j)
            } else {
                sample_interference(&states, &self.rx, j, opts, j as u64)
            };
            for &k in relays {
                let signal = self.rx[k][j];
                let mut inv = 0.0;
                let mut wsum = 0.0;
                for &(interference, weight) in &samples {
                    let c = self.capacity.rate(signal / (self.noise + interference));
                    inv += weight / c;
                    wsum += weight;
                }
                rates[k] = Some(wsum / inv);
            }
        }
        rates
    }

    /// `ρ̃_BL,j,k = ω̄ Φ_k / (β R_BL,j,k)`.
    pub fn partial_loads(&self, rates: &[Option<f64>]) -> Vec<f64> {
        rates
            .iter()
            .enumerate()
            .map(|(k, r)| r.map_or(0.0, |r| self.scale * self.mass[k] / r))
            .collect()
    }

    /// `ρ_BL,j = ω̄/β Σ_{k ∈ relays of j} Φ_k / R_BL,j,k`.
    pub fn cell_loads(&self, partial: &[f64]) -> Vec<f64> {
        self.relays
            .iter()
            .map(|r| r.iter().map(|&k| partial[k]).sum())
            .collect()
    }

    /// Inner fixed point on the backhaul loads, started from idle backhauls.
    pub fn solve(&self, opts: &BackhaulOptions) -> Result<BackhaulState> {
        let n = self.rx.len();
        let mut partial = vec![0.0; n];
        let mut loads = vec![0.0; self.relays.len()];
        let mut rates = vec![None; n];
        let mut iterations = 0;
        let mut converged = !self.has_relays();
        let mut saturated = false;
        if self.has_relays() {
            while iterations < opts.max_iterations {
                iterations += 1;
                rates = self.rates(&partial, opts);
                let next = self.partial_loads(&rates);
                let next_loads = self.cell_loads(&next);
                let diff = next_loads
                    .iter()
                    .zip(&loads)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                partial = next;
                loads = next_loads;
                if loads.iter().any(|&l| l >= 1.0) {
                    saturated = true;
                    break;
                }
                if diff < opts.tolerance {
                    converged = true;
                    break;
                }
            }
        }
        let floor = self.capacity.floor();
        let floor_limited = (0..n)
            .map(|k| {
                self.relays.iter().enumerate().any(|(j, r)| {
                    r.contains(&k) && self.capacity.rate(self.rx[k][j] / self.noise) <= floor
                })
            })
            .collect();
        Ok(BackhaulState {
            feasible: converged && !saturated,
            loads,
            rates,
            floor_limited,
            iterations,
            converged,
        })
    }
}

fn interference_of(states: &[Vec<(Option<usize>, f64)>], picks: &[usize], rx: &[Vec<f64>], j: usize) -> f64 {
    states
        .iter()
        .zip(picks)
        .filter_map(|(s, &i)| s[i].0)
        .map(|r| rx[r][j])
        .sum()
}

fn enumerate_interference(
    states: &[Vec<(Option<usize>, f64)>],
    rx: &[Vec<f64>],
    j: usize,
) -> Vec<(f64, f64)> {
    let total: usize = states.iter().map(Vec::len).product();
    let mut picks = vec![0; states.len()];
    let mut out = Vec::with_capacity(total);
    for _ in 0..total {
        let weight: f64 = states.iter().zip(&picks).map(|(s, &i)| s[i].1).product();
        if weight > 0.0 {
            out.push((interference_of(states, &picks, rx, j), weight));
        }
        // odometer increment
        for (d, s) in picks.iter_mut().zip(states) {
            *d += 1;
            if *d < s.len() {
                break;
            }
            *d = 0;
        }
    }
    out
}

fn sample_interference(
    states: &[Vec<(Option<usize>, f64)>],
    rx: &[Vec<f64>],
    j: usize,
    opts: &BackhaulOptions,
    stream: u64,
) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(stream);
    let dists: Vec<Option<WeightedIndex<f64>>> = states
        .iter()
        .map(|s| WeightedIndex::new(s.iter().map(|x| x.1)).ok())
        .collect();
    let mut picks = vec![0; states.len()];
    (0..opts.mc_draws)
        .map(|_| {
            for (p, d) in picks.iter_mut().zip(&dists) {
                *p = d.as_ref().map_or(0, |d| d.sample(&mut rng));
            }
            (interference_of(states, &picks, rx, j), 1.0)
        })
        .collect()
}
