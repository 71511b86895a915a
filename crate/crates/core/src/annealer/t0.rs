use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::anneal::Evaluator;
use super::penalty::PenaltyParams;
use super::space::SearchSpace;

pub const T0_SAMPLES: usize = 200;
pub const TARGET_ACCEPTANCE: f64 = 0.8;
pub const ACCEPTANCE_BAND: (f64, f64) = (0.7, 0.9);

#[derive(Debug, Clone, PartialEq)]
pub struct T0Search {
    pub t0: f64,
    /// Median |ΔF| of the sampled moves (the search scale).
    pub scale: f64,
    /// Acceptance ratio at `t0` on the move sample.
    pub acceptance: f64,
    /// True when the landscape was flat and the floor was returned.
    pub flat: bool,
    /// Finite ΔF of the sampled moves.
    pub deltas: Vec<f64>,
}

/// Mean Metropolis acceptance probability of the uphill moves among
/// `deltas`. Downhill and neutral moves are always accepted and carry no
/// information about the temperature, so they are left out; with no uphill
/// move the ratio is 1.
pub fn acceptance_ratio(deltas: &[f64], temperature: f64) -> f64 {
    let uphill: Vec<f64> = deltas.iter().copied().filter(|&d| d > 0.0).collect();
    if uphill.is_empty() {
        return 1.0;
    }
    uphill.iter().map(|&d| (-d / temperature).exp()).sum::<f64>() / uphill.len() as f64
}

/// Energy differences of `T0_SAMPLES` random moves at the first step.
pub fn sample_deltas<S, E>(space: &S, evaluator: &E, penalty: &PenaltyParams, seed: u64) -> Vec<f64>
where
    S: SearchSpace,
    E: Evaluator<S::State> + ?Sized,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(T0_SAMPLES);
    for _ in 0..T0_SAMPLES {
        let x = space.random_state(&mut rng);
        let y = space.propose(&x, &mut rng);
        let fx = penalty.objective(&evaluator.evaluate(&x), 1);
        let fy = penalty.objective(&evaluator.evaluate(&y), 1);
        if fx.is_finite() && fy.is_finite() {
            out.push(fy - fx);
        }
    }
    out
}

/// Dichotomic search (on a log scale) of the initial temperature that
/// accepts about 80% of random moves.
pub fn find_t0<S, E>(space: &S, evaluator: &E, penalty: &PenaltyParams, seed: u64) -> T0Search
where
    S: SearchSpace,
    E: Evaluator<S::State> + ?Sized,
{
    t0_from_deltas(sample_deltas(space, evaluator, penalty, seed))
}

pub fn t0_from_deltas(deltas: Vec<f64>) -> T0Search {
    let mut abs: Vec<f64> = deltas.iter().map(|d| d.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let median = if abs.is_empty() { 0.0 } else { abs[abs.len() / 2] };
    let nonzero = deltas.iter().any(|&d| d > 0.0);
    let scale = if median > 0.0 {
        median
    } else {
        // most moves are neutral; fall back to the largest |ΔF|
        abs.last().copied().filter(|&d| d > 0.0).unwrap_or(1.0)
    };
    let (mut lo, mut hi) = (1e-6 * scale, 1e6 * scale);
    if !nonzero {
        log::warn!("no uphill move sampled; initial temperature set to the search floor");
        return T0Search {
            t0: lo,
            scale,
            acceptance: 1.0,
            flat: true,
            deltas,
        };
    }
    let (band_lo, band_hi) = ACCEPTANCE_BAND;
    let chi_lo = acceptance_ratio(&deltas, lo);
    if chi_lo >= band_lo {
        return T0Search {
            t0: lo,
            scale,
            acceptance: chi_lo,
            flat: false,
            deltas,
        };
    }
    let mut t = hi;
    let mut chi = acceptance_ratio(&deltas, hi);
    for _ in 0..200 {
        t = (lo * hi).sqrt();
        chi = acceptance_ratio(&deltas, t);
        if (band_lo..=band_hi).contains(&chi) {
            break;
        }
        if chi < TARGET_ACCEPTANCE {
            lo = t;
        } else {
            hi = t;
        }
    }
    T0Search {
        t0: t,
        scale,
        acceptance: chi,
        flat: false,
        deltas,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_landscape_gives_floor() {
        let s = t0_from_deltas(vec![0.0; 50]);
        assert!(s.flat);
        assert_eq!(s.t0, 1e-6);
    }

    #[test]
    fn lands_in_band() {
        let deltas: Vec<f64> = (0..200).map(|i| (i as f64 - 50.0) * 0.37).collect();
        let s = t0_from_deltas(deltas);
        assert!((0.7..=0.9).contains(&s.acceptance), "{}", s.acceptance);
    }

    #[test]
    fn acceptance_monotone_in_temperature() {
        let deltas: Vec<f64> = (0..100).map(|i| ((i * 37) % 23) as f64 - 5.0).collect();
        let mut prev = 0.0;
        for k in -20..20 {
            let chi = acceptance_ratio(&deltas, 10f64.powf(k as f64 / 4.0));
            assert!(chi >= prev);
            prev = chi;
        }
    }
}
