use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::db_to_lin;

/// Default MCS ladder: (SINR threshold dB, spectral efficiency bit/s/Hz).
/// Fifteen levels from -6.5 dB in 2 dB steps, 0.7·log2(1+γ) capped at 4.8.
pub const DEFAULT_MCS: [(f64, f64); 15] = [
    (-6.5, 0.2040),
    (-4.5, 0.3067),
    (-2.5, 0.4506),
    (-0.5, 0.6435),
    (1.5, 0.8894),
    (3.5, 1.1868),
    (5.5, 1.5297),
    (7.5, 1.9093),
    (9.5, 2.3165),
    (11.5, 2.7432),
    (13.5, 3.1834),
    (15.5, 3.6324),
    (17.5, 4.0872),
    (19.5, 4.5457),
    (21.5, 4.8000),
];

/// One row of an MCS table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McsLevel {
    pub sinr_db: f64,
    /// bit/s/Hz
    pub efficiency: f64,
}

/// Step-function rate map C(γ) in bit/s.
///
/// `C(γ) = rate_i` for `threshold_i ≤ γ < threshold_{i+1}`; below the first
/// threshold the rate is `floor`, which keeps 1/C bounded.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityTable {
    thresholds: Vec<f64>,
    thresholds_db: Vec<f64>,
    rates: Vec<f64>,
    floor: f64,
}

impl CapacityTable {
    pub fn new(levels: &[McsLevel], bandwidth_hz: f64, floor: Option<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::invariant("capacity.levels", "MCS table is empty"));
        }
        if !(bandwidth_hz > 0.0) {
            return Err(Error::invariant("radio.bandwidth_hz", "must be positive"));
        }
        for pair in levels.windows(2) {
            if !(pair[1].sinr_db > pair[0].sinr_db) {
                return Err(Error::invariant(
                    "capacity.levels",
                    "SINR thresholds must be strictly increasing",
                ));
            }
            if pair[1].efficiency < pair[0].efficiency {
                return Err(Error::invariant(
                    "capacity.levels",
                    "rates must be non-decreasing in SINR",
                ));
            }
        }
        if !(levels[0].efficiency > 0.0) {
            return Err(Error::invariant("capacity.levels", "rates must be positive"));
        }
        let rates: Vec<f64> = levels.iter().map(|l| l.efficiency * bandwidth_hz).collect();
        let floor = floor.unwrap_or(rates[0]);
        if !(floor > 0.0) || floor > rates[0] {
            return Err(Error::invariant(
                "capacity.below_cutoff_rate",
                "must lie in (0, rate of the first MCS level]",
            ));
        }
        Ok(Self {
            thresholds: levels.iter().map(|l| db_to_lin(l.sinr_db)).collect(),
            thresholds_db: levels.iter().map(|l| l.sinr_db).collect(),
            rates,
            floor,
        })
    }

    pub fn default_table(bandwidth_hz: f64, floor: Option<f64>) -> Result<Self> {
        let levels: Vec<McsLevel> = DEFAULT_MCS
            .iter()
            .map(|&(sinr_db, efficiency)| McsLevel { sinr_db, efficiency })
            .collect();
        Self::new(&levels, bandwidth_hz, floor)
    }

    /// Reads `sinr_db,efficiency` rows (header required).
    pub fn levels_from_csv(path: &Path) -> Result<Vec<McsLevel>> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| match e.kind() {
                csv::ErrorKind::Io(_) => Error::Io {
                    path: path.to_path_buf(),
                    source: std::io::Error::other(e.to_string()),
                },
                _ => Error::Csv(e),
            })?;
        let mut levels = Vec::new();
        for row in reader.deserialize() {
            let level: McsLevel = row?;
            levels.push(level);
        }
        Ok(levels)
    }

    /// C(γ) for linear SINR γ.
    pub fn rate(&self, sinr: f64) -> f64 {
        // number of thresholds ≤ sinr
        let idx = self.thresholds.partition_point(|&t| t <= sinr);
        if idx == 0 {
            self.floor
        } else {
            self.rates[idx - 1]
        }
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn max_rate(&self) -> f64 {
        *self.rates.last().unwrap()
    }

    /// Linear SINR thresholds, increasing.
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn thresholds_db(&self) -> &[f64] {
        &self.thresholds_db
    }

    /// Rate on each of the `len + 1` SINR intervals: `[0, t_1)` carries the
    /// floor, `[t_i, t_{i+1})` carries `rate_i`.
    pub fn interval_rates(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.floor).chain(self.rates.iter().copied())
    }
}
