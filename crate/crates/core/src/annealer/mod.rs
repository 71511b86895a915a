//! Simulated annealing under a delay constraint.

pub mod anneal;
pub mod gibbs;
pub mod penalty;
pub mod schedule;
pub mod space;
pub mod t0;

pub use anneal::{
    accept, anneal, anneal_from, exhaustive, exhaustive_best, AnnealOutcome, AnnealTrace,
    CachedEvaluator, Evaluator, RestartResult, TraceRow,
};
pub use gibbs::{gibbs_concentration_check, gibbs_distribution, GibbsReport, ToyPoint};
pub use penalty::{penalty_value, DEFAULT_ALPHA_C, PenaltyMode, PenaltyParams};
pub use schedule::{proposals_for, SaSchedule};
pub use space::{ConfigSpace, Move, SearchSpace};
pub use t0::{acceptance_ratio, find_t0, T0Search};

use crate::evaluate::{Evaluation, NetworkEvaluator};
use crate::scenario::Configuration;

impl Evaluator<Configuration> for NetworkEvaluator {
    fn evaluate(&self, x: &Configuration) -> Evaluation {
        self.evaluation(x)
    }
}
