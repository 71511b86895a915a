//! One configuration in, energy per bit and cell delay out.

use crate::channel::{fcpc_power, TxPowerField};
use crate::error::{Error, Result};
use crate::load_solver::{
    fixed_point, AccessModel, BackhaulModel, BackhaulOptions, FixedPointOptions, LoadState,
};
use crate::perf_metrics::{
    access_delay_at, backhaul_delay, cell_delay, energy_at, energy_per_bit, little_delay,
    station_delay, DelayWeighting, EvalReport, PixelReport, StationReport,
};
use crate::scenario::{build_association, AssociationMap, Configuration, Deployment, Network, StationKind};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub weighting: DelayWeighting,
    /// Small cells instead of relays: no backhaul share (β = 0) and no
    /// backhaul delay.
    pub small_cell: bool,
    /// Keep the relays listed in the scenario file (other cells) switched on.
    pub other_relays: bool,
    pub fixed_point: FixedPointOptions,
    pub backhaul: BackhaulOptions,
    /// Fill [`EvalReport::pixels`].
    pub pixel_detail: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            weighting: DelayWeighting::Paper,
            small_cell: false,
            other_relays: true,
            fixed_point: FixedPointOptions::default(),
            backhaul: BackhaulOptions::default(),
            pixel_detail: false,
        }
    }
}

/// Compact outcome used by the optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    /// Π, J/bit.
    pub energy: f64,
    /// D̄_c, s.
    pub delay: f64,
    /// Loads stable and converged.
    pub valid: bool,
}

impl Evaluation {
    pub const INVALID: Evaluation = Evaluation {
        energy: f64::INFINITY,
        delay: f64::INFINITY,
        valid: false,
    };
}

impl From<&EvalReport> for Evaluation {
    fn from(r: &EvalReport) -> Self {
        Evaluation {
            energy: r.energy_per_bit,
            delay: r.cell_delay,
            valid: r.feasible,
        }
    }
}

/// All intermediate products of one evaluation, for inspection and tests.
pub struct Evaluated<'a> {
    pub deployment: Deployment<'a>,
    pub association: AssociationMap,
    pub tx: TxPowerField,
    pub model: AccessModel,
    pub loads: LoadState,
    pub report: EvalReport,
}

#[derive(Debug, Clone)]
pub struct NetworkEvaluator {
    network: Network,
    pub options: EvalOptions,
}

impl NetworkEvaluator {
    pub fn new(network: Network, options: EvalOptions) -> Self {
        Self { network, options }
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn evaluate(&self, cfg: &Configuration) -> Result<EvalReport> {
        Ok(self.evaluate_full(cfg)?.report)
    }

    pub fn evaluate_full(&self, cfg: &Configuration) -> Result<Evaluated<'_>> {
        self.evaluate_full_with(cfg, &self.options)
    }

    pub fn evaluate_full_with(&self, cfg: &Configuration, opts: &EvalOptions) -> Result<Evaluated<'_>> {
        let sc = self.network.scenario();
        let dep = self.network.deploy(cfg, opts.other_relays)?;
        let assoc = build_association(&dep);
        let tx = fcpc_power(&dep, &assoc);
        let access_quota = if opts.small_cell { 0.0 } else { sc.backhaul_quota };
        let model = AccessModel::new(&dep, &assoc, &tx, access_quota)?;
        let access = fixed_point(&model, &opts.fixed_point)?;
        let backhaul = if opts.small_cell || !access.stable {
            None
        } else {
            let mut bo = opts.backhaul;
            bo.seed ^= sc.rng_seed;
            Some(BackhaulModel::new(&dep, &assoc).solve(&bo)?)
        };
        let loads = LoadState { access, backhaul };
        let report = self.metrics(opts, cfg, &dep, &assoc, &tx, &model, &loads, access_quota)?;
        Ok(Evaluated {
            deployment: dep,
            association: assoc,
            tx,
            model,
            loads,
            report,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn metrics(
        &self,
        opts: &EvalOptions,
        cfg: &Configuration,
        dep: &Deployment,
        assoc: &AssociationMap,
        tx: &TxPowerField,
        model: &AccessModel,
        loads: &LoadState,
        access_quota: f64,
    ) -> Result<EvalReport> {
        let sc = self.network.scenario();
        let phi = self.network.phi();
        let pa = self.network.grid().pixel_area();
        let feasible = loads.feasible() && (opts.small_cell || loads.backhaul.is_some());
        let focus_cell = sc.focus_cell;
        let cell_area = assoc.cell_area(dep, focus_cell);
        let rho = &loads.access.loads;

        let mut stations: Vec<StationReport> = dep
            .stations
            .iter()
            .enumerate()
            .map(|(k, st)| {
                let bh = loads.backhaul.as_ref().filter(|_| st.kind == StationKind::Rn);
                let slot = st.donor.map(|d| dep.enb_slot(d));
                StationReport {
                    index: k,
                    kind: st.kind,
                    cell: st.cell,
                    origin: st.origin,
                    area: assoc.area[k],
                    mass: assoc.mass[k],
                    load: rho[k],
                    access_delay: None,
                    little_delay: (assoc.mass[k] > 0.0 && sc.traffic_mean > 0.0)
                        .then(|| little_delay(rho[k], sc.flow_size, sc.traffic_mean, assoc.mass[k])),
                    backhaul_rate: bh.and_then(|b| b.rates[k]),
                    backhaul_load: bh.zip(slot).map(|(b, j)| b.loads[j]),
                    backhaul_delay: None,
                }
            })
            .collect();

        let mut pixels = Vec::new();
        let (energy, delay) = if feasible {
            let mut energy_items = Vec::new();
            let mut delay_items = Vec::new();
            for k in dep.cell_members(focus_cell).collect::<Vec<_>>() {
                let st = &dep.stations[k];
                let sinr = model.station_sinr(k, &loads.access.interferer_loads)?;
                let mut weights = Vec::with_capacity(assoc.pixels[k].len());
                let mut delays = Vec::with_capacity(assoc.pixels[k].len());
                for &p in &assoc.pixels[k] {
                    let signal = tx.power[p] * st.gain[p];
                    let inv_c = model.inv_capacity_at(&sinr, signal, rho[k]);
                    let d = access_delay_at(sc.flow_size, access_quota, rho[k], inv_c);
                    let e = energy_at(tx.power[p], inv_c);
                    let w = phi[p] * pa;
                    weights.push(w);
                    delays.push(d);
                    energy_items.push((w, e));
                    if opts.pixel_detail {
                        pixels.push(PixelReport {
                            pixel: p,
                            server: k,
                            tx_power: tx.power[p],
                            clamped: tx.clamped[p],
                            delay: d,
                            energy: e,
                        });
                    }
                }
                let d_access = station_delay(&weights, &delays);
                let d_bh = if st.kind == StationKind::Rn && !opts.small_cell {
                    let report = &stations[k];
                    let rate = report.backhaul_rate.ok_or_else(|| {
                        Error::Domain(format!("relay {k} has no backhaul rate"))
                    })?;
                    backhaul_delay(
                        sc.flow_size,
                        sc.backhaul_quota,
                        report.backhaul_load.unwrap_or(0.0),
                        rate,
                    )
                } else {
                    0.0
                };
                stations[k].access_delay = d_access;
                if st.kind == StationKind::Rn && !opts.small_cell {
                    stations[k].backhaul_delay = Some(d_bh);
                }
                if let Some(d) = d_access {
                    delay_items.push((assoc.mass[k], assoc.area[k], d + d_bh));
                }
            }
            (
                energy_per_bit(&energy_items, cell_area),
                cell_delay(&delay_items, opts.weighting),
            )
        } else {
            (f64::INFINITY, f64::INFINITY)
        };

        Ok(EvalReport {
            configuration: cfg.clone(),
            energy_per_bit: energy,
            cell_delay: delay,
            cell_area,
            weighting: opts.weighting,
            small_cell: opts.small_cell,
            feasible,
            stations,
            pixels,
            loads: loads.clone(),
        })
    }

    /// Compact evaluation; model errors count as invalid configurations.
    pub fn evaluation(&self, cfg: &Configuration) -> Evaluation {
        match self.evaluate(cfg) {
            Ok(r) => Evaluation::from(&r),
            Err(e) => {
                log::warn!("evaluation of {cfg} failed: {e}");
                Evaluation::INVALID
            }
        }
    }

    /// Reference network without any relay: the eNB target power level of
    /// least energy per bit among stable ones.
    pub fn baseline(&self) -> Result<EvalReport> {
        let opts = EvalOptions {
            other_relays: false,
            ..self.options.clone()
        };
        let levels = self.network.scenario().target_power.count;
        let mut best: Option<EvalReport> = None;
        for p in 0..levels {
            let cfg = Configuration::new(Vec::new(), p, 0, 0);
            let r = self.evaluate_full_with(&cfg, &opts)?.report;
            if r.feasible && best.as_ref().is_none_or(|b| r.energy_per_bit < b.energy_per_bit) {
                best = Some(r);
            }
        }
        best.ok_or(Error::NoFeasible)
    }
}
