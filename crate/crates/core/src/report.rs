//! CSV output with a provenance header.

use std::fmt::Write as _;
use std::path::Path;

use crate::annealer::RestartResult;
use crate::error::{Error, Result};
use crate::perf_metrics::EvalReport;
use crate::scenario::{Configuration, Network, Origin, StationKind};

/// Float with nine significant digits (`inf` for infinities).
pub fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.8e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Key/value lines written as `# key: value` before the CSV header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    pub entries: Vec<(String, String)>,
}

impl Provenance {
    pub fn new() -> Self {
        let mut p = Self::default();
        p.push("tool", format!("relaysim {}", env!("CARGO_PKG_VERSION")));
        p
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "# {k}: {v}");
        }
        s
    }
}

/// A CSV table ready to be written.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, provenance: &Provenance) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let body = w
            .into_inner()
            .map_err(|e| Error::Domain(format!("csv buffer: {e}")))?;
        Ok(provenance.render() + &String::from_utf8_lossy(&body))
    }
}

/// Writes through a temporary file and a rename so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

pub const EVAL_COLUMNS: [&str; 19] = [
    "row",
    "station",
    "kind",
    "cell",
    "site",
    "x_m",
    "y_m",
    "area_m2",
    "traffic_mass_m2",
    "load",
    "access_delay_s",
    "little_delay_s",
    "backhaul_rate_bps",
    "backhaul_load",
    "backhaul_delay_s",
    "energy_per_bit_j",
    "cell_delay_s",
    "iterations",
    "feasible",
];

/// One row per active station, then a summary row.
pub fn eval_table(network: &Network, report: &EvalReport) -> Table {
    let mut t = Table::new(EVAL_COLUMNS.to_vec());
    let sc = network.scenario();
    for s in &report.stations {
        let (site, pos) = match s.origin {
            Origin::Fixed(id) => (String::new(), sc.stations[id].position),
            Origin::Site(i) => (i.to_string(), network.candidates().site(i)),
        };
        t.push(vec![
            "station".into(),
            s.index.to_string(),
            match s.kind {
                StationKind::Enb => "enb".into(),
                StationKind::Rn => "rn".into(),
            },
            s.cell.to_string(),
            site,
            fmt_f64(pos.x),
            fmt_f64(pos.y),
            fmt_f64(s.area),
            fmt_f64(s.mass),
            fmt_f64(s.load),
            fmt_opt(s.access_delay),
            fmt_opt(s.little_delay),
            fmt_opt(s.backhaul_rate),
            fmt_opt(s.backhaul_load),
            fmt_opt(s.backhaul_delay),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ]);
    }
    let mut summary = vec![String::new(); EVAL_COLUMNS.len()];
    summary[0] = "summary".into();
    summary[3] = sc.focus_cell.to_string();
    summary[7] = fmt_f64(report.cell_area);
    summary[15] = fmt_f64(report.energy_per_bit);
    summary[16] = fmt_f64(report.cell_delay);
    summary[17] = report.loads.iterations().to_string();
    summary[18] = report.feasible.to_string();
    t.push(summary);
    t
}

pub const TRACE_COLUMNS: [&str; 12] = [
    "restart",
    "step",
    "temperature",
    "alpha",
    "energy",
    "objective_j_per_bit",
    "delay_s",
    "penalty",
    "acceptance",
    "feasible",
    "best_objective_j_per_bit",
    "seed",
];

pub fn trace_table(restarts: &[RestartResult<Configuration>]) -> Table {
    let mut t = Table::new(TRACE_COLUMNS.to_vec());
    for (r, res) in restarts.iter().enumerate() {
        for row in &res.trace.rows {
            t.push(vec![
                r.to_string(),
                row.step.to_string(),
                fmt_f64(row.temperature),
                fmt_f64(row.alpha),
                fmt_f64(row.energy),
                fmt_f64(row.objective),
                fmt_f64(row.delay),
                fmt_f64(row.penalty),
                fmt_f64(row.acceptance),
                row.feasible.to_string(),
                fmt_opt(row.best_objective),
                res.seed.to_string(),
            ]);
        }
    }
    t
}

pub const CONFIG_COLUMNS: [&str; 9] = [
    "relay",
    "site",
    "x_m",
    "y_m",
    "p_enb_dbm",
    "p_rn_dbm",
    "bias_db",
    "energy_per_bit_j",
    "cell_delay_s",
];

/// One row per relay of a configuration (a single row without site when
/// there is none).
pub fn config_table(network: &Network, cfg: &Configuration, energy: f64, delay: f64) -> Table {
    let sc = network.scenario();
    let mut t = Table::new(CONFIG_COLUMNS.to_vec());
    let common = [
        fmt_f64(sc.target_power.value(cfg.p_enb)),
        fmt_f64(sc.target_power.value(cfg.p_rn)),
        fmt_f64(sc.bias.value(cfg.bias)),
        fmt_f64(energy),
        fmt_f64(delay),
    ];
    if cfg.sites.is_empty() {
        let mut row = vec![String::new(); 4];
        row.extend(common.iter().cloned());
        t.push(row);
    }
    for (i, &s) in cfg.sites.iter().enumerate() {
        let p = network.candidates().site(s);
        let mut row = vec![i.to_string(), s.to_string(), fmt_f64(p.x), fmt_f64(p.y)];
        row.extend(common.iter().cloned());
        t.push(row);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_f64(0.123456789123), "1.23456789e-1");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(2.0), "2.00000000e0");
    }

    #[test]
    fn table_with_header() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        let mut p = Provenance::default();
        p.push("seed", 7);
        assert_eq!(t.render(&p).unwrap(), "# seed: 7\na,b\n1,\"x,y\"\n");
    }
}
