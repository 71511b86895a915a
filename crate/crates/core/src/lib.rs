//! Flow-level evaluation and constrained optimization of relay-enhanced
//! cellular uplinks.
//!
//! The crate is organised bottom-up:
//!
//! * [`scenario`] loads and validates a network description, builds the pixel
//!   grid, the candidate relay sites and the user-station association.
//! * [`channel`] holds the deterministic large-scale channel (path loss and
//!   seeded shadowing) and full-compensation power control.
//! * [`sinr_model`] fits lognormal SINR laws by moment matching and integrates
//!   against the maximum-quantile-scheduled SINR density.
//! * [`load_solver`] computes the coupled access-load fixed point and the
//!   backhaul rates and loads.
//! * [`perf_metrics`] turns loads into delays and energy per bit.
//! * [`evaluate`] strings the above together for one configuration.
//! * [`annealer`] minimizes energy under a delay constraint with simulated
//!   annealing and an exterior penalty.
//! * [`oracle_mc`] is an independent Monte-Carlo snapshot simulator used to
//!   cross-check the analytic model.
//! * [`cli`] drives evaluations, optimizations and sweeps from the command line.

pub mod annealer;
pub mod channel;
pub mod cli;
pub mod error;
pub mod evaluate;
pub mod load_solver;
pub mod oracle_mc;
pub mod perf_metrics;
pub mod report;
pub mod scenario;
pub mod sinr_model;
pub mod units;

pub use error::{Error, Result};
pub use evaluate::{EvalOptions, Evaluation, NetworkEvaluator};
pub use scenario::{Configuration, Network, Scenario};
