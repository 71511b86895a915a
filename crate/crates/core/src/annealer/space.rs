use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scenario::{Configuration, Network};

/// State space explored by the annealer.
pub trait SearchSpace: Sync {
    type State: Clone + Eq + Hash + Debug + Send + Sync;

    /// Uniformly drawn state.
    fn random_state<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::State;

    /// Draw from the (symmetric) proposal kernel.
    fn propose<R: Rng + ?Sized>(&self, x: &Self::State, rng: &mut R) -> Self::State;

    /// Every state, when the space is small enough to enumerate.
    fn states(&self) -> Option<Vec<Self::State>> {
        None
    }
}

const NEIGHBOURS: [(i32, i32); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Single proposal move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    /// Shift the `i`-th relay (in sorted site order) to a neighbouring site.
    Relocate { relay: usize, dir: (i32, i32) },
    EnbPower(i32),
    RelayPower(i32),
    Bias(i32),
}

/// Relay configurations with `n_rn` relays on the candidate grid.
///
/// The move catalogue has `8·n_rn + 6` entries (eight neighbour relocations
/// per relay, ±1 level for each target power and for the bias). One entry is
/// drawn uniformly; relocations step along the candidate lattice. If a move
/// would leave the box, hit a non-candidate point or an occupied site, the
/// proposal is the current state. Every move has an inverse of the same
/// kind, so the kernel is symmetric.
#[derive(Debug, Clone)]
pub struct ConfigSpace {
    n_rn: usize,
    coords: Vec<(i32, i32)>,
    spacing: (i32, i32),
    lookup: HashMap<(i32, i32), usize>,
    power_levels: u32,
    bias_levels: u32,
}

impl ConfigSpace {
    pub fn new(network: &Network, n_rn: usize) -> Result<Self> {
        let cands = network.candidates();
        if n_rn > cands.len() {
            return Err(Error::Configuration(format!(
                "{n_rn} relays requested but only {} candidate sites",
                cands.len()
            )));
        }
        let coords: Vec<_> = (0..cands.len()).map(|i| cands.grid_coord(i)).collect();
        let lookup = coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let spacing = lattice_spacing(&coords);
        let sc = network.scenario();
        Ok(Self {
            n_rn,
            coords,
            spacing,
            lookup,
            power_levels: sc.target_power.count,
            bias_levels: sc.bias.count,
        })
    }

    pub fn n_rn(&self) -> usize {
        self.n_rn
    }

    pub fn move_count(&self) -> usize {
        8 * self.n_rn + 6
    }

    pub fn moves(&self) -> impl Iterator<Item = Move> + '_ {
        let relocations = (0..self.n_rn)
            .flat_map(|relay| NEIGHBOURS.iter().map(move |&dir| Move::Relocate { relay, dir }));
        relocations.chain([
            Move::EnbPower(-1),
            Move::EnbPower(1),
            Move::RelayPower(-1),
            Move::RelayPower(1),
            Move::Bias(-1),
            Move::Bias(1),
        ])
    }

    pub fn nth_move(&self, i: usize) -> Move {
        let relocations = 8 * self.n_rn;
        if i < relocations {
            return Move::Relocate {
                relay: i / 8,
                dir: NEIGHBOURS[i % 8],
            };
        }
        match i - relocations {
            0 => Move::EnbPower(-1),
            1 => Move::EnbPower(1),
            2 => Move::RelayPower(-1),
            3 => Move::RelayPower(1),
            4 => Move::Bias(-1),
            5 => Move::Bias(1),
            _ => panic!("move index {i} out of range"),
        }
    }

    /// Result of a move, or `None` if it is not admissible from `x`.
    pub fn apply(&self, x: &Configuration, mv: Move) -> Option<Configuration> {
        let step = |level: u32, d: i32, count: u32| {
            let v = level as i64 + d as i64;
            (0..count as i64).contains(&v).then_some(v as u32)
        };
        match mv {
            Move::Relocate { relay, dir } => {
                let (i, j) = self.coords[x.sites[relay]];
                let target = *self.lookup.get(&(i + dir.0 * self.spacing.0, j + dir.1 * self.spacing.1))?;
                if x.sites.contains(&target) {
                    return None;
                }
                let mut sites = x.sites.clone();
                sites[relay] = target;
                Some(Configuration::new(sites, x.p_enb, x.p_rn, x.bias))
            }
            Move::EnbPower(d) => Some(Configuration {
                p_enb: step(x.p_enb, d, self.power_levels)?,
                ..x.clone()
            }),
            Move::RelayPower(d) => Some(Configuration {
                p_rn: step(x.p_rn, d, self.power_levels)?,
                ..x.clone()
            }),
            Move::Bias(d) => Some(Configuration {
                bias: step(x.bias, d, self.bias_levels)?,
                ..x.clone()
            }),
        }
    }

    /// Number of configurations.
    pub fn size(&self) -> u128 {
        let sites = binomial(self.coords.len() as u128, self.n_rn as u128);
        sites * (self.power_levels as u128).pow(2) * self.bias_levels as u128
    }
}

/// Per-axis step of the coarsest lattice holding every site, so that a
/// thinned candidate set (every second row and column, say) keeps its
/// neighbour structure.
fn lattice_spacing(coords: &[(i32, i32)]) -> (i32, i32) {
    fn gcd(a: i32, b: i32) -> i32 {
        if b == 0 { a.abs() } else { gcd(b, a % b) }
    }
    let Some(&(i0, j0)) = coords.first() else {
        return (1, 1);
    };
    let (gi, gj) = coords
        .iter()
        .fold((0, 0), |(gi, gj), &(i, j)| (gcd(gi, i - i0), gcd(gj, j - j0)));
    (gi.max(1), gj.max(1))
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

impl SearchSpace for ConfigSpace {
    type State = Configuration;

    fn random_state<R: Rng + ?Sized>(&self, rng: &mut R) -> Configuration {
        let sites = index::sample(rng, self.coords.len(), self.n_rn).into_vec();
        Configuration::new(
            sites,
            rng.random_range(0..self.power_levels),
            rng.random_range(0..self.power_levels),
            rng.random_range(0..self.bias_levels),
        )
    }

    fn propose<R: Rng + ?Sized>(&self, x: &Configuration, rng: &mut R) -> Configuration {
        let mv = self.nth_move(rng.random_range(0..self.move_count()));
        self.apply(x, mv).unwrap_or_else(|| x.clone())
    }

    fn states(&self) -> Option<Vec<Configuration>> {
        if self.size() > 10_000 {
            return None;
        }
        let mut out = Vec::new();
        let mut combo: Vec<usize> = (0..self.n_rn).collect();
        let n = self.coords.len();
        loop {
            for p_enb in 0..self.power_levels {
                for p_rn in 0..self.power_levels {
                    for bias in 0..self.bias_levels {
                        out.push(Configuration::new(combo.clone(), p_enb, p_rn, bias));
                    }
                }
            }
            // next k-combination in lexicographic order
            let k = self.n_rn;
            let Some(i) = (0..k).rev().find(|&i| combo[i] < n - k + i) else {
                break;
            };
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
        }
        Some(out)
    }
}
