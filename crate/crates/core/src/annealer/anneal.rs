use std::collections::HashMap;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::penalty::{PenaltyMode, PenaltyParams};
use super::schedule::SaSchedule;
use super::space::SearchSpace;
use super::t0::find_t0;
use crate::error::{Error, Result};
use crate::evaluate::Evaluation;

/// Anything that maps a state to (Π, D̄_c, validity).
pub trait Evaluator<S>: Sync {
    fn evaluate(&self, x: &S) -> Evaluation;
}

impl<S, F> Evaluator<S> for F
where
    F: Fn(&S) -> Evaluation + Sync,
{
    fn evaluate(&self, x: &S) -> Evaluation {
        self(x)
    }
}

/// Memoizing wrapper shared by all restarts.
pub struct CachedEvaluator<'a, S, E: ?Sized> {
    inner: &'a E,
    cache: Mutex<HashMap<S, Evaluation>>,
}

impl<'a, S: Clone + Eq + std::hash::Hash + Send, E: Evaluator<S> + ?Sized> CachedEvaluator<'a, S, E> {
    pub fn new(inner: &'a E) -> Self {
        Self {
            inner,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn distinct(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }
}

impl<S, E> Evaluator<S> for CachedEvaluator<'_, S, E>
where
    S: Clone + Eq + std::hash::Hash + Send,
    E: Evaluator<S> + ?Sized,
{
    fn evaluate(&self, x: &S) -> Evaluation {
        if let Some(ev) = self.cache.lock().expect("cache lock").get(x) {
            return *ev;
        }
        let ev = self.inner.evaluate(x);
        self.cache.lock().expect("cache lock").insert(x.clone(), ev);
        ev
    }
}

/// Metropolis rule: downhill always, uphill with `exp(−ΔF/T)`.
pub fn accept<R: Rng + ?Sized>(f_new: f64, f_cur: f64, temperature: f64, rng: &mut R) -> bool {
    if f_new <= f_cur {
        return true;
    }
    if f_new.is_infinite() {
        // leaving an invalid region is always allowed, entering one never
        return f_cur.is_infinite();
    }
    rng.random::<f64>() < (-(f_new - f_cur) / temperature).exp()
}

/// State of the chain at the end of one temperature step.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub temperature: f64,
    pub alpha: f64,
    /// Annealing energy F of the current state.
    pub energy: f64,
    /// Π of the current state.
    pub objective: f64,
    /// D̄_c of the current state.
    pub delay: f64,
    pub penalty: f64,
    pub acceptance: f64,
    pub feasible: bool,
    /// Best feasible Π seen so far in this restart.
    pub best_objective: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnnealTrace {
    pub rows: Vec<TraceRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartResult<S> {
    pub seed: u64,
    pub start: S,
    pub best: Option<(S, Evaluation)>,
    pub trace: AnnealTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealOutcome<S> {
    pub best: S,
    pub best_eval: Evaluation,
    pub t0: f64,
    pub restarts: Vec<RestartResult<S>>,
    /// Distinct states evaluated.
    pub evaluations: usize,
}

pub(crate) fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `schedule.restarts` independent chains (in parallel) and returns the
/// feasible state of least Π over all of them.
pub fn anneal<S, E>(
    space: &S,
    evaluator: &E,
    penalty: &PenaltyParams,
    schedule: &SaSchedule,
    seed: u64,
) -> Result<AnnealOutcome<S::State>>
where
    S: SearchSpace,
    E: Evaluator<S::State> + ?Sized,
{
    anneal_from(space, evaluator, penalty, schedule, seed, None)
}

/// As [`anneal`], optionally starting every restart from `start`.
pub fn anneal_from<S, E>(
    space: &S,
    evaluator: &E,
    penalty: &PenaltyParams,
    schedule: &SaSchedule,
    seed: u64,
    start: Option<&S::State>,
) -> Result<AnnealOutcome<S::State>>
where
    S: SearchSpace,
    E: Evaluator<S::State> + ?Sized,
{
    schedule.validate()?;
    let cached = CachedEvaluator::new(evaluator);
    let t0 = match schedule.t0 {
        Some(t) => t,
        None => find_t0(space, &cached, penalty, derive_seed(seed, u64::MAX)).t0,
    };
    let restarts: Vec<RestartResult<S::State>> = (0..schedule.restarts)
        .into_par_iter()
        .map(|r| {
            let rseed = derive_seed(seed, r as u64);
            run_chain(space, &cached, penalty, schedule, t0, rseed, start)
        })
        .collect();
    let best = restarts
        .iter()
        .filter_map(|r| r.best.as_ref())
        .min_by(|a, b| a.1.energy.total_cmp(&b.1.energy))
        .cloned();
    let (best, best_eval) = best.ok_or(Error::NoFeasible)?;
    Ok(AnnealOutcome {
        best,
        best_eval,
        t0,
        restarts,
        evaluations: cached.distinct(),
    })
}

fn initial_state<S, E>(
    space: &S,
    evaluator: &E,
    penalty: &PenaltyParams,
    rng: &mut ChaCha8Rng,
) -> S::State
where
    S: SearchSpace,
    E: Evaluator<S::State> + ?Sized,
{
    let first = space.random_state(rng);
    if penalty.mode != PenaltyMode::InteriorReject {
        return first;
    }
    // interior search must start inside the feasible set
    if penalty.feasible(&evaluator.evaluate(&first)) {
        return first;
    }
    for _ in 0..1000 {
        let x = space.random_state(rng);
        if penalty.feasible(&evaluator.evaluate(&x)) {
            return x;
        }
    }
    log::warn!("no feasible starting point found for interior search");
    first
}

fn run_chain<S, E>(
    space: &S,
    evaluator: &E,
    penalty: &PenaltyParams,
    schedule: &SaSchedule,
    t0: f64,
    seed: u64,
    start: Option<&S::State>,
) -> RestartResult<S::State>
where
    S: SearchSpace,
    E: Evaluator<S::State> + ?Sized,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = match start {
        Some(s) => s.clone(),
        None => initial_state(space, evaluator, penalty, &mut rng),
    };
    let mut x = start.clone();
    let mut ev_x = evaluator.evaluate(&x);
    let mut best: Option<(S::State, Evaluation)> = None;
    let consider = |s: &S::State, ev: &Evaluation, best: &mut Option<(S::State, Evaluation)>| {
        if penalty.feasible(ev) && best.as_ref().is_none_or(|b| ev.energy < b.1.energy) {
            *best = Some((s.clone(), *ev));
        }
    };
    consider(&x, &ev_x, &mut best);
    let mut trace = AnnealTrace::default();
    for m in 1..=schedule.steps {
        let temperature = schedule.temperature(t0, m);
        // the energy landscape changes with m through α
        let mut f_x = penalty.objective(&ev_x, m);
        let mut accepted = 0usize;
        for _ in 0..schedule.proposals {
            let y = space.propose(&x, &mut rng);
            let ev_y = evaluator.evaluate(&y);
            let f_y = penalty.objective(&ev_y, m);
            if accept(f_y, f_x, temperature, &mut rng) {
                accepted += 1;
                x = y;
                ev_x = ev_y;
                f_x = f_y;
                consider(&x, &ev_x, &mut best);
            }
        }
        trace.rows.push(TraceRow {
            step: m,
            temperature,
            alpha: penalty.alpha(m),
            energy: f_x,
            objective: ev_x.energy,
            delay: ev_x.delay,
            penalty: if ev_x.valid {
                penalty.penalty(ev_x.energy, ev_x.delay, m)
            } else {
                f64::INFINITY
            },
            acceptance: accepted as f64 / schedule.proposals as f64,
            feasible: penalty.feasible(&ev_x),
            best_objective: best.as_ref().map(|b| b.1.energy),
        });
    }
    RestartResult {
        seed,
        start,
        best,
        trace,
    }
}

/// Feasible state of least Π by exhaustive enumeration.
pub fn exhaustive<S, E>(
    space: &S,
    evaluator: &E,
    penalty: &PenaltyParams,
) -> Option<Vec<(S::State, Evaluation)>>
where
    S: SearchSpace,
    E: Evaluator<S::State> + ?Sized,
{
    let states = space.states()?;
    Some(
        states
            .into_iter()
            .map(|s| {
                let ev = evaluator.evaluate(&s);
                (s, ev)
            })
            .filter(|(_, ev)| penalty.feasible(ev))
            .collect(),
    )
}

/// Minimum Π among the feasible entries of an exhaustive enumeration.
pub fn exhaustive_best<S: Clone>(feasible: &[(S, Evaluation)]) -> Option<(S, Evaluation)> {
    feasible
        .iter()
        .min_by(|a, b| a.1.energy.total_cmp(&b.1.energy))
        .cloned()
}
