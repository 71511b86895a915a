//! Python bindings: load a scenario, evaluate configurations, run the
//! annealer.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use relaysim::annealer::{anneal, proposals_for, ConfigSpace, PenaltyMode, PenaltyParams, SaSchedule, DEFAULT_ALPHA_C};
use relaysim::perf_metrics::{DelayWeighting, EvalReport};
use relaysim::scenario::load_scenario;
use relaysim::{Configuration, EvalOptions, Error, Network, NetworkEvaluator};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::NoFeasible => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn report_dict<'py>(py: Python<'py>, r: &EvalReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let c = &r.configuration;
    d.set_item("sites", c.sites.clone())?;
    d.set_item("p_enb", c.p_enb)?;
    d.set_item("p_rn", c.p_rn)?;
    d.set_item("bias", c.bias)?;
    d.set_item("energy_per_bit", r.energy_per_bit)?;
    d.set_item("cell_delay", r.cell_delay)?;
    d.set_item("feasible", r.feasible)?;
    d.set_item("loads", r.stations.iter().map(|s| s.load).collect::<Vec<_>>())?;
    Ok(d)
}

/// One scenario with its evaluator.
#[pyclass(name = "Scenario", frozen)]
struct PyScenario {
    evaluator: NetworkEvaluator,
    seed: u64,
}

#[pymethods]
impl PyScenario {
    #[new]
    #[pyo3(signature = (path, weighting = "paper", small_cell = false))]
    fn new(path: PathBuf, weighting: &str, small_cell: bool) -> PyResult<Self> {
        let weighting: DelayWeighting = weighting.parse().map_err(PyValueError::new_err)?;
        let scenario = load_scenario(&path).map_err(py_err)?;
        let seed = scenario.rng_seed;
        let network = Network::new(scenario).map_err(py_err)?;
        let options = EvalOptions {
            weighting,
            small_cell,
            ..EvalOptions::default()
        };
        Ok(Self {
            evaluator: NetworkEvaluator::new(network, options),
            seed,
        })
    }

    /// Number of candidate relay sites.
    #[getter]
    fn candidate_sites(&self) -> usize {
        self.evaluator.network().candidates().len()
    }

    fn evaluate<'py>(
        &self,
        py: Python<'py>,
        sites: Vec<usize>,
        p_enb: u32,
        p_rn: u32,
        bias: u32,
    ) -> PyResult<Bound<'py, PyDict>> {
        let cfg = Configuration::new(sites, p_enb, p_rn, bias);
        let r = py.detach(|| self.evaluator.evaluate(&cfg)).map_err(py_err)?;
        report_dict(py, &r)
    }

    /// Relay-free reference network (Π0, D0).
    fn baseline<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = py.detach(|| self.evaluator.baseline()).map_err(py_err)?;
        report_dict(py, &r)
    }

    /// Anneal `n_rn` relays under `D_max = dmax_ratio·D0`. Raises
    /// `RuntimeError` when no feasible configuration was visited.
    #[pyo3(signature = (n_rn, dmax_ratio = None, penalty = "exterior", alpha_c = DEFAULT_ALPHA_C,
                        steps = 45, proposals = None, restarts = 4, seed = None))]
    #[allow(clippy::too_many_arguments)]
    fn optimize<'py>(
        &self,
        py: Python<'py>,
        n_rn: usize,
        dmax_ratio: Option<f64>,
        penalty: &str,
        alpha_c: f64,
        steps: usize,
        proposals: Option<usize>,
        restarts: usize,
        seed: Option<u64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let mode: PenaltyMode = penalty.parse().map_err(PyValueError::new_err)?;
        let schedule = SaSchedule {
            steps,
            proposals: proposals.unwrap_or_else(|| proposals_for(n_rn)),
            restarts,
            ..SaSchedule::full(n_rn)
        };
        let seed = seed.unwrap_or(self.seed);
        let (base, outcome) = py
            .detach(|| -> relaysim::Result<_> {
                let base = self.evaluator.baseline()?;
                let dmax = dmax_ratio.map_or(f64::INFINITY, |r| r * base.cell_delay);
                let params = PenaltyParams::new(dmax, alpha_c, mode)?;
                let space = ConfigSpace::new(self.evaluator.network(), n_rn)?;
                let outcome = anneal(&space, &self.evaluator, &params, &schedule, seed)?;
                Ok((base, outcome))
            })
            .map_err(py_err)?;
        let r = py.detach(|| self.evaluator.evaluate(&outcome.best)).map_err(py_err)?;
        let d = report_dict(py, &r)?;
        d.set_item("energy_ratio", r.energy_per_bit / base.energy_per_bit)?;
        d.set_item("delay_ratio", r.cell_delay / base.cell_delay)?;
        d.set_item("t0", outcome.t0)?;
        d.set_item("evaluations", outcome.evaluations)?;
        Ok(d)
    }
}

#[pymodule]
fn relaysim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    Ok(())
}
