//! On-disk scenario format (TOML, `format = 1`).
//!
//! ```toml
//! format = 1
//! rng_seed = 2024
//! focus_cell = 0
//!
//! [geometry]
//! extent = { x_min = -800.0, x_max = 800.0, y_min = -800.0, y_max = 800.0 }
//! pixel_size = 20.0
//! candidate_step = 50.0
//!
//! [traffic]
//! mean = 5.0            # bits/s/m²
//! flow_size = 1.0e6     # bits
//! profile = { kind = "uniform" }
//!
//! [radio]
//! backhaul_quota = 0.1
//! noise_dbm = -116.4    # per resource block
//! ue_max_power_dbm = 23.0
//! bandwidth_hz = 10.0e6
//! mqs_window = 10
//! relay_pilot_dbm = 30.0
//! relay_backhaul_dbm = 30.0
//! # below_cutoff_rate = 1.0e3    # bit/s, defaults to the first MCS rate
//! # mcs_csv = "mcs.csv"          # sinr_db,efficiency rows; relative to this file
//!
//! [search]
//! bias_db = { min = 0.0, max = 15.0, step = 1.0 }
//! target_power_dbm = { min = -110.0, max = -80.0, step = 2.0 }
//!
//! [channel]
//! ue_enb = { intercept_db = 128.1, exponent = 3.76, shadowing_db = 10.0 }
//! ue_rn  = { intercept_db = 140.7, exponent = 3.67, shadowing_db = 10.0 }
//! rn_enb = { intercept_db = 124.5, exponent = 3.76, shadowing_db = 6.0 }
//!
//! [[station]]
//! kind = "enb"
//! x = 0.0
//! y = 0.0
//! cell = 0
//! pilot_dbm = 46.0
//!
//! [[station]]
//! kind = "rn"
//! x = 660.0
//! y = 0.0
//! cell = 1
//! donor = 1
//! pilot_dbm = 30.0
//! backhaul_dbm = 30.0
//! ```

use serde::{Deserialize, Serialize};

use super::geometry::Rect;
use super::traffic::TrafficProfile;
use crate::channel::PathLossParams;
use crate::sinr_model::capacity::McsLevel;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub format: u32,
    pub rng_seed: u64,
    pub focus_cell: usize,
    pub geometry: GeometrySection,
    pub traffic: TrafficSection,
    pub radio: RadioSection,
    pub search: SearchSection,
    pub channel: ChannelSection,
    #[serde(rename = "station")]
    pub stations: Vec<StationEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub extent: Rect,
    pub pixel_size: f64,
    pub candidate_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficSection {
    pub mean: f64,
    pub flow_size: f64,
    #[serde(default)]
    pub profile: TrafficProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioSection {
    pub backhaul_quota: f64,
    pub noise_dbm: f64,
    pub ue_max_power_dbm: f64,
    pub bandwidth_hz: f64,
    pub mqs_window: usize,
    pub relay_pilot_dbm: f64,
    pub relay_backhaul_dbm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub below_cutoff_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mcs_csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mcs: Option<Vec<McsLevel>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSection {
    pub bias_db: RangeSpec,
    pub target_power_dbm: RangeSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub ue_enb: PathLossParams,
    pub ue_rn: PathLossParams,
    pub rn_enb: PathLossParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StationKindEntry {
    Enb,
    Rn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationEntry {
    pub kind: StationKindEntry,
    pub x: f64,
    pub y: f64,
    pub cell: usize,
    pub pilot_dbm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub donor: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backhaul_dbm: Option<f64>,
}

impl ScenarioFile {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serialises")
    }
}
