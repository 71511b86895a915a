//! Command-line front end: `eval`, `optimize` and `sweep`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::annealer::{anneal, proposals_for, DEFAULT_ALPHA_C, AnnealOutcome, ConfigSpace, PenaltyMode, PenaltyParams, SaSchedule};
use crate::error::{Error, Result};
use crate::evaluate::{EvalOptions, NetworkEvaluator};
use crate::perf_metrics::{DelayWeighting, EvalReport};
use crate::report::{config_table, eval_table, fmt_f64, trace_table, write_atomic, Provenance, Table};
use crate::scenario::{load_scenario, Configuration, Network, Scenario};

#[derive(Debug, Parser)]
#[command(name = "relaysim", version, about = "Energy/delay evaluation and optimization of relay-enhanced uplinks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one configuration (or the relay-free baseline).
    Eval(EvalArgs),
    /// Minimize energy per bit under a delay bound.
    Optimize(OptimizeArgs),
    /// Run one optimization per value of a swept parameter.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PenaltyArg {
    Exterior,
    Interior,
    Static,
}

impl From<PenaltyArg> for PenaltyMode {
    fn from(p: PenaltyArg) -> Self {
        match p {
            PenaltyArg::Exterior => PenaltyMode::ExteriorAdaptive,
            PenaltyArg::Interior => PenaltyMode::InteriorReject,
            PenaltyArg::Static => PenaltyMode::Static,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Paper,
    #[value(name = "traffic_share", alias = "traffic-share")]
    TrafficShare,
}

impl From<WeightingArg> for DelayWeighting {
    fn from(w: WeightingArg) -> Self {
        match w {
            WeightingArg::Paper => DelayWeighting::Paper,
            WeightingArg::TrafficShare => DelayWeighting::TrafficShare,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    /// Values are D_max/D0 ratios.
    Dmax,
    /// Values are mean traffic densities ω̄ in bit/s/m².
    Omega,
    /// Values are relay counts.
    Nrn,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scenario file (TOML, format = 1).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Overrides the scenario's rng_seed (shadowing and search).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "paper")]
    pub weighting: WeightingArg,
    /// Evaluate small cells instead of relays (no backhaul share or delay).
    #[arg(long)]
    pub small_cell: bool,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Candidate site indices of the relays, comma separated. Without sites
    /// and powers the relay-free baseline is evaluated.
    #[arg(long, value_delimiter = ',')]
    pub sites: Vec<usize>,
    /// eNB target received power, dBm (snapped to the scenario grid).
    #[arg(long, allow_hyphen_values = true)]
    pub p_enb: Option<f64>,
    /// Relay target received power, dBm.
    #[arg(long, allow_hyphen_values = true)]
    pub p_rn: Option<f64>,
    /// Relay bias, dB.
    #[arg(long)]
    pub bias: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Delay bound in seconds.
    #[arg(long, conflicts_with = "dmax_ratio")]
    pub dmax: Option<f64>,
    /// Delay bound relative to the baseline delay D0.
    #[arg(long)]
    pub dmax_ratio: Option<f64>,
    #[arg(long, value_enum, default_value = "exterior")]
    pub penalty: PenaltyArg,
    /// Coefficient c of the penalty weight c·ln(m+1).
    #[arg(long, default_value_t = DEFAULT_ALPHA_C)]
    pub alpha_c: f64,
    /// Temperature steps (default 45).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Proposals per temperature (default scales with the relay count).
    #[arg(long)]
    pub proposals: Option<usize>,
    /// Independent restarts (default 4).
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Initial temperature (default: acceptance-ratio search).
    #[arg(long)]
    pub t0: Option<f64>,
    /// Cooling factor.
    #[arg(long, default_value_t = 0.85)]
    pub h: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Number of relays to place in the focus cell.
    #[arg(long)]
    pub nrn: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub nrn: Option<usize>,
    #[arg(long, value_enum)]
    pub axis: Axis,
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub values: Vec<f64>,
}

/// Outcome classes mapped to process exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: exit code 1.
    Input(Error),
    /// Infeasible evaluation or no feasible configuration: exit code 2.
    Infeasible(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoFeasible => Failure::Infeasible(e.to_string()),
            other => Failure::Input(other),
        }
    }
}

pub fn main_with(cli: Cli) -> ExitCode {
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(&a),
        Command::Optimize(a) => cmd_optimize(&a),
        Command::Sweep(a) => cmd_sweep(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Infeasible(msg)) => {
            println!("infeasible: {msg}");
            ExitCode::from(2)
        }
    }
}

struct Loaded {
    scenario_path: PathBuf,
    file_digest: String,
    evaluator: NetworkEvaluator,
    search_seed: u64,
}

fn file_sha256(path: &Path) -> Result<String> {
    use sha2::{Digest, Sha256};
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

fn load(common: &CommonArgs) -> Result<Loaded> {
    let mut scenario = load_scenario(&common.scenario)?;
    if let Some(seed) = common.seed {
        scenario = scenario.modified(|s| s.rng_seed = seed)?;
    }
    let search_seed = scenario.rng_seed;
    let network = Network::new(scenario)?;
    let options = EvalOptions {
        weighting: common.weighting.into(),
        small_cell: common.small_cell,
        ..EvalOptions::default()
    };
    Ok(Loaded {
        file_digest: file_sha256(&common.scenario)?,
        scenario_path: common.scenario.clone(),
        evaluator: NetworkEvaluator::new(network, options),
        search_seed,
    })
}

fn provenance(l: &Loaded, command: &str, flags: String) -> Provenance {
    let mut p = Provenance::new();
    p.push("command", command);
    p.push("scenario", l.scenario_path.display());
    p.push("scenario_sha256", &l.file_digest);
    p.push("seed", l.search_seed);
    p.push("flags", flags);
    p
}

fn level(range: &crate::scenario::LevelRange, value: Option<f64>, field: &str) -> Result<u32> {
    let Some(v) = value else { return Ok(0) };
    let l = range.nearest(v);
    if (range.value(l) - v).abs() > 1e-9 * range.step.max(1.0) {
        return Err(Error::invariant(
            field,
            format!("{v} is not on the scenario grid (nearest {})", range.value(l)),
        ));
    }
    Ok(l)
}

/// Baseline in relay mode (β reserved), shared by every command.
fn baseline(ev: &NetworkEvaluator) -> Result<EvalReport> {
    let relay_mode = NetworkEvaluator::new(
        ev.network().clone(),
        EvalOptions {
            small_cell: false,
            ..ev.options.clone()
        },
    );
    relay_mode.baseline()
}

pub fn cmd_eval(a: &EvalArgs) -> std::result::Result<(), Failure> {
    let l = load(&a.common)?;
    let sc = l.evaluator.network().scenario();
    let is_baseline = a.sites.is_empty() && a.p_enb.is_none() && a.p_rn.is_none() && a.bias.is_none();
    let report = if is_baseline {
        match l.evaluator.baseline() {
            Ok(r) => r,
            Err(Error::NoFeasible) => {
                let cfg = Configuration::new(Vec::new(), 0, 0, 0);
                l.evaluator.evaluate(&cfg)?
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        let cfg = Configuration::new(
            a.sites.clone(),
            level(&sc.target_power, a.p_enb, "p_enb")?,
            level(&sc.target_power, a.p_rn, "p_rn")?,
            level(&sc.bias, a.bias, "bias")?,
        );
        l.evaluator.evaluate(&cfg)?
    };
    let flags = format!(
        "baseline={} sites={:?} p_enb={:?} p_rn={:?} bias={:?} weighting={} small_cell={}",
        is_baseline,
        a.sites,
        a.p_enb,
        a.p_rn,
        a.bias,
        report.weighting,
        report.small_cell
    );
    let prov = provenance(&l, "eval", flags);
    let table = eval_table(l.evaluator.network(), &report);
    write_atomic(&a.common.out.join("eval.csv"), &table.render(&prov)?)?;
    println!(
        "energy_per_bit_j={} cell_delay_s={} feasible={}",
        fmt_f64(report.energy_per_bit),
        fmt_f64(report.cell_delay),
        report.feasible
    );
    if report.feasible {
        Ok(())
    } else {
        Err(Failure::Infeasible(format!(
            "configuration {} is not stable (loads >= 1 or no convergence)",
            report.configuration
        )))
    }
}

fn schedule(s: &SearchArgs, n_rn: usize) -> SaSchedule {
    SaSchedule {
        t0: s.t0,
        h: s.h,
        steps: s.steps.unwrap_or(45),
        proposals: s.proposals.unwrap_or_else(|| proposals_for(n_rn)),
        restarts: s.restarts.unwrap_or(4),
    }
}

fn search_flags(s: &SearchArgs, sched: &SaSchedule, common: &CommonArgs) -> String {
    format!(
        "penalty={:?} alpha_c={} steps={} proposals={} restarts={} t0={:?} h={} weighting={:?} small_cell={}",
        s.penalty, s.alpha_c, sched.steps, sched.proposals, sched.restarts, s.t0, s.h, common.weighting, common.small_cell
    )
}

/// Result of one optimization, with its normalization constants.
pub struct OptimizeResult {
    pub outcome: std::result::Result<AnnealOutcome<Configuration>, Error>,
    pub baseline_energy: f64,
    pub baseline_delay: f64,
    pub dmax: f64,
}

pub fn optimize(
    evaluator: &NetworkEvaluator,
    n_rn: usize,
    search: &SearchArgs,
    schedule: &SaSchedule,
    seed: u64,
) -> Result<OptimizeResult> {
    let base = baseline(evaluator)?;
    let dmax = match (search.dmax, search.dmax_ratio) {
        (Some(d), _) => d,
        (None, Some(r)) => r * base.cell_delay,
        (None, None) => f64::INFINITY,
    };
    let penalty = PenaltyParams::new(dmax, search.alpha_c, search.penalty.into())?;
    let space = ConfigSpace::new(evaluator.network(), n_rn)?;
    let outcome = anneal(&space, evaluator, &penalty, schedule, seed);
    if let Err(e) = &outcome {
        if !matches!(e, Error::NoFeasible) {
            return Err(Error::Domain(e.to_string()));
        }
    }
    Ok(OptimizeResult {
        outcome,
        baseline_energy: base.energy_per_bit,
        baseline_delay: base.cell_delay,
        dmax,
    })
}

const SUMMARY_COLUMNS: [&str; 12] = [
    "n_rn",
    "dmax_s",
    "dmax_ratio",
    "energy_per_bit_j",
    "cell_delay_s",
    "energy_ratio",
    "baseline_energy_per_bit_j",
    "baseline_delay_s",
    "t0",
    "evaluations",
    "penalty",
    "feasible",
];

fn summary_row(n_rn: usize, res: &OptimizeResult, penalty: PenaltyArg) -> Vec<String> {
    let (e, d, t0, evals, ok) = match &res.outcome {
        Ok(o) => (o.best_eval.energy, o.best_eval.delay, o.t0, o.evaluations, true),
        Err(_) => (f64::INFINITY, f64::INFINITY, f64::NAN, 0, false),
    };
    vec![
        n_rn.to_string(),
        fmt_f64(res.dmax),
        fmt_f64(res.dmax / res.baseline_delay),
        fmt_f64(e),
        fmt_f64(d),
        fmt_f64(e / res.baseline_energy),
        fmt_f64(res.baseline_energy),
        fmt_f64(res.baseline_delay),
        fmt_f64(t0),
        evals.to_string(),
        format!("{penalty:?}").to_lowercase(),
        ok.to_string(),
    ]
}

pub fn cmd_optimize(a: &OptimizeArgs) -> std::result::Result<(), Failure> {
    let l = load(&a.common)?;
    let sched = schedule(&a.search, a.nrn);
    let res = optimize(&l.evaluator, a.nrn, &a.search, &sched, l.search_seed)?;
    let prov = provenance(
        &l,
        "optimize",
        format!("nrn={} dmax_s={} {}", a.nrn, res.dmax, search_flags(&a.search, &sched, &a.common)),
    );
    let out = &a.common.out;
    let mut summary = Table::new(SUMMARY_COLUMNS.to_vec());
    summary.push(summary_row(a.nrn, &res, a.search.penalty));
    write_atomic(&out.join("summary.csv"), &summary.render(&prov)?)?;
    match &res.outcome {
        Ok(o) => {
            let net = l.evaluator.network();
            let best = config_table(net, &o.best, o.best_eval.energy, o.best_eval.delay);
            write_atomic(&out.join("best.csv"), &best.render(&prov)?)?;
            write_atomic(&out.join("trace.csv"), &trace_table(&o.restarts).render(&prov)?)?;
            println!(
                "best {} energy_per_bit_j={} cell_delay_s={} energy_ratio={}",
                o.best,
                fmt_f64(o.best_eval.energy),
                fmt_f64(o.best_eval.delay),
                fmt_f64(o.best_eval.energy / res.baseline_energy)
            );
            Ok(())
        }
        Err(e) => Err(Failure::Infeasible(e.to_string())),
    }
}

const SWEEP_COLUMNS: [&str; 10] = [
    "axis",
    "value",
    "n_rn",
    "dmax_s",
    "dmax_ratio",
    "energy_per_bit_j",
    "energy_ratio",
    "cell_delay_s",
    "baseline_energy_per_bit_j",
    "feasible",
];

pub fn cmd_sweep(a: &SweepArgs) -> std::result::Result<(), Failure> {
    let l = load(&a.common)?;
    let base_nrn = a.nrn.unwrap_or(1);
    let scenario: &Scenario = l.evaluator.network().scenario();
    let points: Vec<(f64, Result<(usize, OptimizeResult)>)> = a
        .values
        .par_iter()
        .map(|&v| {
            let run = || -> Result<(usize, OptimizeResult)> {
                let mut search = a.search.clone();
                let mut n_rn = base_nrn;
                let owned;
                let ev = match a.axis {
                    Axis::Dmax => {
                        search.dmax = None;
                        search.dmax_ratio = Some(v);
                        &l.evaluator
                    }
                    Axis::Omega => {
                        let sc = scenario.modified(|s| s.traffic.mean = v)?;
                        owned = NetworkEvaluator::new(Network::new(sc)?, l.evaluator.options.clone());
                        &owned
                    }
                    Axis::Nrn => {
                        if v < 0.0 || v.fract() != 0.0 {
                            return Err(Error::invariant("values", "relay counts must be whole numbers"));
                        }
                        n_rn = v as usize;
                        &l.evaluator
                    }
                };
                let sched = schedule(&search, n_rn);
                Ok((n_rn, optimize(ev, n_rn, &search, &sched, l.search_seed)?))
            };
            (v, run())
        })
        .collect();

    let mut table = Table::new(SWEEP_COLUMNS.to_vec());
    let axis = format!("{:?}", a.axis).to_lowercase();
    for (v, point) in &points {
        let (n_rn, res) = match point {
            Ok(p) => p,
            Err(e) => return Err(Failure::Input(Error::Domain(format!("sweep point {v}: {e}")))),
        };
        let (e, d, ok) = match &res.outcome {
            Ok(o) => (o.best_eval.energy, o.best_eval.delay, true),
            Err(_) => (f64::INFINITY, f64::INFINITY, false),
        };
        table.push(vec![
            axis.clone(),
            fmt_f64(*v),
            n_rn.to_string(),
            fmt_f64(res.dmax),
            fmt_f64(res.dmax / res.baseline_delay),
            fmt_f64(e),
            fmt_f64(e / res.baseline_energy),
            fmt_f64(d),
            fmt_f64(res.baseline_energy),
            ok.to_string(),
        ]);
    }
    let sched = schedule(&a.search, base_nrn);
    let prov = provenance(
        &l,
        "sweep",
        format!("axis={axis} values={:?} nrn={base_nrn} {}", a.values, search_flags(&a.search, &sched, &a.common)),
    );
    let out = &a.common.out;
    write_atomic(&out.join("sweep.csv"), &table.render(&prov)?)?;
    write_atomic(&out.join("plot.txt"), &plot_description(&prov, &axis, &points))?;
    println!("wrote {} sweep points to {}", points.len(), out.display());
    Ok(())
}

fn plot_description(prov: &Provenance, axis: &str, points: &[(f64, Result<(usize, OptimizeResult)>)]) -> String {
    let mut s = String::new();
    for (k, v) in &prov.entries {
        s.push_str(&format!("# {k}: {v}\n"));
    }
    let x = match axis {
        "dmax" => "dmax_ratio (D_max / D0)",
        "omega" => "value (mean traffic, bit/s/m^2)",
        _ => "n_rn (relays in the focus cell)",
    };
    s.push_str("plot: trade-off\n");
    s.push_str("data: sweep.csv\n");
    s.push_str(&format!("x: {x}\n"));
    s.push_str("y: energy_ratio (Pi* / Pi0)\n");
    s.push_str("series: feasible points, marker per point, line through the monotone envelope\n");
    if let Some((_, Ok((_, r)))) = points.first() {
        s.push_str(&format!("normalization: Pi0 = {} J/bit, D0 = {} s\n", fmt_f64(r.baseline_energy), fmt_f64(r.baseline_delay)));
    }
    s
}
