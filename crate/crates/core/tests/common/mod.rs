#![allow(dead_code)]

use std::path::PathBuf;

use relaysim::scenario::file::{StationEntry, StationKindEntry};
use relaysim::scenario::{load_scenario, ScenarioFile};
use relaysim::{Network, Scenario};

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

pub fn scenario(name: &str) -> Scenario {
    load_scenario(&scenario_path(name)).expect("bundled scenario loads")
}

pub fn network(name: &str) -> Network {
    Network::new(scenario(name)).expect("network builds")
}

pub fn spec(name: &str) -> ScenarioFile {
    scenario(name).spec().clone()
}

pub fn enb(x: f64, y: f64, cell: usize) -> StationEntry {
    StationEntry {
        kind: StationKindEntry::Enb,
        x,
        y,
        cell,
        pilot_dbm: 46.0,
        donor: None,
        backhaul_dbm: None,
    }
}

pub fn rn(x: f64, y: f64, cell: usize, donor: usize) -> StationEntry {
    StationEntry {
        kind: StationKindEntry::Rn,
        x,
        y,
        cell,
        pilot_dbm: 30.0,
        donor: Some(donor),
        backhaul_dbm: Some(30.0),
    }
}

/// Zeroes every shadowing deviation.
pub fn without_shadowing(spec: &mut ScenarioFile) {
    spec.channel.ue_enb.shadowing_db = 0.0;
    spec.channel.ue_rn.shadowing_db = 0.0;
    spec.channel.rn_enb.shadowing_db = 0.0;
}
