//! Monte-Carlo snapshot simulator used as an independent check of the
//! analytic SINR and load model.
//!
//! Everything here is sampled directly from the physical model: Bernoulli
//! activity of interferers, scheduled interferer position drawn over the
//! interferer's area, unit-mean exponential (block Rayleigh) fading, a
//! geometric number of competing users and per-user maximum-quantile ranking
//! over the last `W` blocks. Only the scenario inputs (gains, powers, served
//! areas) and the rate table lookup are shared with the analytic path.

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::channel::TxPowerField;
use crate::error::{Error, Result};
use crate::scenario::{AssociationMap, Deployment};
use crate::sinr_model::{CapacityTable, LognormalParams};

/// Where the scheduled interferer of a station is located.
#[derive(Debug, Clone, PartialEq)]
pub enum LocationLaw {
    /// Proportional to φ(s) over the interferer's area.
    Traffic,
    /// Explicit per-station pixel weights (e.g. per-pixel load shares).
    Weights(Vec<Vec<f64>>),
}

/// Frozen inputs of a snapshot simulation.
#[derive(Debug, Clone)]
pub struct McScene {
    noise: f64,
    /// Gain from every pixel to every station: `gain[k][pixel]`.
    gain: Vec<Vec<f64>>,
    tx: Vec<f64>,
    /// Pixels served by each station and their traffic weight φ·pixel_area.
    served: Vec<Vec<(usize, f64)>>,
    location: Vec<Option<WeightedIndex<f64>>>,
    /// Loads used for interferer activity.
    pub interferer_loads: Vec<f64>,
    /// Own loads (occupancy law of the tagged station).
    pub loads: Vec<f64>,
    traffic_mean: f64,
    quota: f64,
    window: usize,
    capacity: CapacityTable,
}

impl McScene {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        dep: &Deployment,
        assoc: &AssociationMap,
        tx: &TxPowerField,
        interferer_loads: Vec<f64>,
        loads: Vec<f64>,
        quota: f64,
        law: LocationLaw,
    ) -> Result<Self> {
        let sc = dep.scenario();
        let phi = dep.network.phi();
        let pa = dep.network.grid().pixel_area();
        let n = dep.stations.len();
        if interferer_loads.len() != n || loads.len() != n {
            return Err(Error::Domain("one load per station is required".into()));
        }
        let served: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|k| assoc.pixels[k].iter().map(|&p| (p, phi[p] * pa)).collect())
            .collect();
        let location = (0..n)
            .map(|k| {
                let w: Vec<f64> = match &law {
                    LocationLaw::Traffic => served[k].iter().map(|x| x.1).collect(),
                    LocationLaw::Weights(w) => w[k].clone(),
                };
                WeightedIndex::new(w).ok()
            })
            .collect();
        Ok(Self {
            noise: sc.noise_w,
            gain: dep.stations.iter().map(|s| s.gain.to_vec()).collect(),
            tx: tx.power.clone(),
            served,
            location,
            interferer_loads,
            loads,
            traffic_mean: sc.traffic_mean,
            quota,
            window: sc.mqs_window,
            capacity: sc.capacity.clone(),
        })
    }

    pub fn stations(&self) -> usize {
        self.gain.len()
    }

    /// One SINR snapshot for a user at `pixel` served by `k`.
    fn draw_sinr<R: Rng>(&self, pixel: usize, k: usize, rng: &mut R) -> f64 {
        let fade: f64 = rng.sample(Exp1);
        let signal = self.tx[pixel] * self.gain[k][pixel] * fade;
        signal / (self.noise + self.draw_interference(k, rng))
    }

    /// Interference power received by station `k` on one block.
    fn draw_interference<R: Rng>(&self, k: usize, rng: &mut R) -> f64 {
        let mut interference = 0.0;
        for j in 0..self.gain.len() {
            if j == k {
                continue;
            }
            let rho = self.interferer_loads[j];
            if rho <= 0.0 || rng.random::<f64>() >= rho {
                continue;
            }
            let Some(law) = &self.location[j] else { continue };
            let (s, _) = self.served[j][law.sample(rng)];
            let fade: f64 = rng.sample(Exp1);
            interference += self.tx[s] * self.gain[k][s] * fade;
        }
        interference
    }
}

/// SINR samples of a user at `pixel` served by station `k`.
pub fn sample_sinr(scene: &McScene, pixel: usize, k: usize, samples: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| scene.draw_sinr(pixel, k, &mut rng)).collect()
}

/// Interference samples at station `k`.
pub fn sample_interference(scene: &McScene, k: usize, samples: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| scene.draw_interference(k, &mut rng)).collect()
}

/// Scheduled-user SINR samples under maximum-quantile scheduling.
#[derive(Debug, Clone, PartialEq)]
pub struct MqsSamples {
    /// SINR of the winner for every trial with a unique best-ranked user.
    pub sinr: Vec<f64>,
    /// Trials drawn, including the ones redrawn because of ties.
    pub trials: usize,
}

impl MqsSamples {
    /// Fraction of trials with a unique winner.
    pub fn acceptance(&self) -> f64 {
        self.sinr.len() as f64 / self.trials as f64
    }
}

/// Number of users in a busy queue: `P(U = u) = ρ^(u−1)(1−ρ)`.
fn draw_occupancy<R: Rng>(rho: f64, rng: &mut R) -> usize {
    let mut u = 1;
    while rng.random::<f64>() < rho {
        u += 1;
    }
    u
}

/// Rank of block 0 among the `W` blocks: 1 + number of strictly larger ones.
fn rank_of_current(blocks: &[f64]) -> usize {
    1 + blocks[1..].iter().filter(|&&x| x > blocks[0]).count()
}

/// Index of the unique user with the smallest rank, if any.
fn unique_winner(ranks: &[usize]) -> Option<usize> {
    let best = *ranks.iter().min()?;
    let mut it = ranks.iter().enumerate().filter(|&(_, &r)| r == best);
    let (i, _) = it.next()?;
    it.next().is_none().then_some(i)
}

/// Draws scheduled SINRs until `samples` unique-winner trials were seen.
/// All users share the lognormal law `pdf`; occupancy is geometric with
/// parameter `rho` (`U = 1` when `rho = 0`).
pub fn simulate_mqs(pdf: &LognormalParams, w: usize, rho: f64, samples: usize, seed: u64) -> Result<MqsSamples> {
    if w < 2 {
        return Err(Error::Domain(format!("MQS window must be >= 2, got {w}")));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Domain(format!("load must lie in [0, 1), got {rho}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    let mut trials = 0;
    let mut blocks = vec![0.0; w];
    let mut ranks = Vec::new();
    let mut current = Vec::new();
    while out.len() < samples {
        trials += 1;
        let users = draw_occupancy(rho, &mut rng);
        ranks.clear();
        current.clear();
        for _ in 0..users {
            for b in blocks.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *b = (pdf.mu + pdf.sigma * z).exp();
            }
            ranks.push(rank_of_current(&blocks));
            current.push(blocks[0]);
        }
        if let Some(i) = unique_winner(&ranks) {
            out.push(current[i]);
        }
    }
    Ok(MqsSamples { sinr: out, trials })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadEstimate {
    pub load: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Monte-Carlo estimate of the access load of station `k`.
///
/// Each sample places a tagged user at a pixel drawn ∝ φ over `A_k`, draws
/// the number `U` of users in the queue, gives every user `W` SINR
/// snapshots at its own position and schedules the unique best-ranked one.
/// The sample value is `U · 1{tagged user wins} / C(γ_tagged)`, whose mean
/// is the per-user load contribution; trials with ties contribute zero.
pub fn empirical_load(scene: &McScene, k: usize, samples: usize, seed: u64) -> Result<LoadEstimate> {
    if samples < 2 {
        return Err(Error::Domain("need at least two samples".into()));
    }
    let served = &scene.served[k];
    let mass: f64 = served.iter().map(|x| x.1).sum();
    if mass <= 0.0 || scene.traffic_mean == 0.0 {
        return Ok(LoadEstimate {
            load: 0.0,
            std_error: 0.0,
            samples,
        });
    }
    let users_at = WeightedIndex::new(served.iter().map(|x| x.1))
        .map_err(|e| Error::Domain(e.to_string()))?;
    let rho = scene.loads[k];
    let w = scene.window;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocks = vec![0.0; w];
    let mut ranks = Vec::new();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let users = draw_occupancy(rho, &mut rng);
        ranks.clear();
        let mut tagged = 0.0;
        for u in 0..users {
            let (pixel, _) = served[users_at.sample(&mut rng)];
            for b in blocks.iter_mut() {
                *b = scene.draw_sinr(pixel, k, &mut rng);
            }
            ranks.push(rank_of_current(&blocks));
            if u == 0 {
                tagged = blocks[0];
            }
        }
        let x = if unique_winner(&ranks) == Some(0) {
            users as f64 / scene.capacity.rate(tagged)
        } else {
            0.0
        };
        sum += x;
        sum_sq += x * x;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    let scale = scene.traffic_mean / (1.0 - scene.quota) * mass;
    Ok(LoadEstimate {
        load: scale * mean,
        std_error: scale * (var / n).sqrt(),
        samples,
    })
}

/// Kolmogorov–Smirnov distance between samples and a CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
