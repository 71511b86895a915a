//! Network description, pixel grid, candidate relay sites and association.

pub mod association;
pub mod file;
pub mod geometry;
pub mod network;
pub mod traffic;

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::sinr_model::capacity::CapacityTable;
use crate::units::dbm_to_w;

pub use association::{build_association, AssociationMap};
pub use file::ScenarioFile;
pub use geometry::{CandidateSet, PixelGrid, Point, Rect};
pub use network::{ActiveStation, Configuration, Deployment, Network, Origin};
pub use traffic::TrafficProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StationKind {
    Enb,
    Rn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Station {
    pub id: usize,
    pub kind: StationKind,
    pub position: Point,
    pub cell: usize,
    /// Donor eNB station id (relays only).
    pub donor: Option<usize>,
    pub pilot_dbm: f64,
    /// Relays only.
    pub backhaul_dbm: Option<f64>,
}

/// Evenly spaced grid of admissible values, addressed by level index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRange {
    pub min: f64,
    pub step: f64,
    pub count: u32,
}

impl LevelRange {
    fn from_spec(field: &str, spec: &file::RangeSpec) -> Result<Self> {
        if !spec.min.is_finite() || !spec.max.is_finite() || spec.max < spec.min {
            return Err(Error::invariant(field, "need finite min <= max"));
        }
        if spec.max == spec.min {
            return Ok(Self {
                min: spec.min,
                step: spec.step.max(1.0),
                count: 1,
            });
        }
        if !(spec.step > 0.0) {
            return Err(Error::invariant(format!("{field}.step"), "must be positive"));
        }
        let span = (spec.max - spec.min) / spec.step;
        if (span - span.round()).abs() > 1e-6 {
            return Err(Error::invariant(
                format!("{field}.step"),
                "range is not a whole number of steps",
            ));
        }
        Ok(Self {
            min: spec.min,
            step: spec.step,
            count: span.round() as u32 + 1,
        })
    }

    pub fn value(&self, level: u32) -> f64 {
        self.min + level as f64 * self.step
    }

    pub fn max(&self) -> f64 {
        self.value(self.count - 1)
    }

    pub fn last(&self) -> u32 {
        self.count - 1
    }

    /// Level whose value is nearest to `v` (clamped to the range).
    pub fn nearest(&self, v: f64) -> u32 {
        let l = ((v - self.min) / self.step).round();
        l.clamp(0.0, (self.count - 1) as f64) as u32
    }
}

/// Validated, immutable scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub stations: Vec<Station>,
    pub focus_cell: usize,
    pub extent: Rect,
    pub pixel_size: f64,
    pub candidate_step: f64,
    /// ω̄, bit/s/m².
    pub traffic_mean: f64,
    pub traffic_profile: TrafficProfile,
    /// ξ, bits.
    pub flow_size: f64,
    /// β.
    pub backhaul_quota: f64,
    /// Noise per resource block, W.
    pub noise_w: f64,
    pub t_max_w: f64,
    pub capacity: CapacityTable,
    pub mqs_window: usize,
    /// Bias grid in dB.
    pub bias: LevelRange,
    /// Target received power grid in dBm.
    pub target_power: LevelRange,
    pub relay_pilot_dbm: f64,
    pub relay_backhaul_dbm: f64,
    pub channel: ChannelModel,
    pub rng_seed: u64,
    spec: ScenarioFile,
    base_dir: Option<PathBuf>,
    digest: String,
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Scenario::from_toml_str(&text, path.parent())
}

impl Scenario {
    /// `base_dir` resolves a relative `radio.mcs_csv` path.
    pub fn from_toml_str(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let spec: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_spec(spec, base_dir)
    }

    pub fn from_spec(spec: ScenarioFile, base_dir: Option<&Path>) -> Result<Self> {
        if spec.format != file::FORMAT_VERSION {
            return Err(Error::invariant(
                "format",
                format!("unsupported version {} (expected {})", spec.format, file::FORMAT_VERSION),
            ));
        }
        let g = &spec.geometry;
        let ext = g.extent;
        if !(ext.width() > 0.0 && ext.height() > 0.0) || !ext.area().is_finite() {
            return Err(Error::invariant("geometry.extent", "must have positive finite size"));
        }
        if !(g.pixel_size > 0.0) || g.pixel_size > ext.width().min(ext.height()) {
            return Err(Error::invariant(
                "geometry.pixel_size",
                "must be positive and smaller than the extent",
            ));
        }
        if !(g.candidate_step > 0.0) || !g.candidate_step.is_finite() {
            return Err(Error::invariant("geometry.candidate_step", "must be positive"));
        }

        let t = &spec.traffic;
        if !(t.mean >= 0.0) || !t.mean.is_finite() {
            return Err(Error::invariant("traffic.mean", "must be finite and non-negative"));
        }
        if !(t.flow_size > 0.0) || !t.flow_size.is_finite() {
            return Err(Error::invariant("traffic.flow_size", "must be positive"));
        }
        if let TrafficProfile::Hotspot { sigma, mass, .. } = t.profile {
            if !(sigma > 0.0) {
                return Err(Error::invariant("traffic.profile.sigma", "must be positive"));
            }
            if !(0.0..1.0).contains(&mass) {
                return Err(Error::invariant("traffic.profile.mass", "must lie in [0, 1)"));
            }
        }

        let r = &spec.radio;
        if !(r.backhaul_quota > 0.0 && r.backhaul_quota < 1.0) {
            return Err(Error::invariant(
                "radio.backhaul_quota",
                format!("must lie in (0, 1), got {}", r.backhaul_quota),
            ));
        }
        if r.mqs_window < 2 {
            return Err(Error::invariant(
                "radio.mqs_window",
                "MQS needs a window of at least 2 blocks",
            ));
        }
        for (field, v) in [
            ("radio.noise_dbm", r.noise_dbm),
            ("radio.ue_max_power_dbm", r.ue_max_power_dbm),
            ("radio.relay_pilot_dbm", r.relay_pilot_dbm),
            ("radio.relay_backhaul_dbm", r.relay_backhaul_dbm),
        ] {
            if !v.is_finite() {
                return Err(Error::invariant(field, "must be finite"));
            }
        }
        let levels = match (&r.mcs, &r.mcs_csv) {
            (Some(_), Some(_)) => {
                return Err(Error::invariant(
                    "radio.mcs",
                    "give either an inline table or a CSV file, not both",
                ))
            }
            (Some(levels), None) => Some(levels.clone()),
            (None, Some(csv)) => {
                let p = base_dir.map_or_else(|| PathBuf::from(csv), |d| d.join(csv));
                Some(CapacityTable::levels_from_csv(&p)?)
            }
            (None, None) => None,
        };
        let capacity = match levels {
            Some(levels) => CapacityTable::new(&levels, r.bandwidth_hz, r.below_cutoff_rate)?,
            None => CapacityTable::default_table(r.bandwidth_hz, r.below_cutoff_rate)?,
        };

        let bias = LevelRange::from_spec("search.bias_db", &spec.search.bias_db)?;
        if bias.min < 0.0 {
            return Err(Error::invariant("search.bias_db.min", "bias must be >= 0 dB"));
        }
        let target_power = LevelRange::from_spec("search.target_power_dbm", &spec.search.target_power_dbm)?;

        let channel = ChannelModel {
            ue_enb: spec.channel.ue_enb,
            ue_rn: spec.channel.ue_rn,
            rn_enb: spec.channel.rn_enb,
            seed: spec.rng_seed,
        };
        channel.validate()?;

        let stations = validate_stations(&spec, &ext)?;

        let digest = {
            let mut h = Sha256::new();
            h.update(spec.to_toml().as_bytes());
            h.finalize().iter().map(|b| format!("{b:02x}")).collect()
        };

        let sc = Scenario {
            stations,
            focus_cell: spec.focus_cell,
            extent: ext,
            pixel_size: g.pixel_size,
            candidate_step: g.candidate_step,
            traffic_mean: t.mean,
            traffic_profile: t.profile.clone(),
            flow_size: t.flow_size,
            backhaul_quota: r.backhaul_quota,
            noise_w: dbm_to_w(r.noise_dbm),
            t_max_w: dbm_to_w(r.ue_max_power_dbm),
            capacity,
            mqs_window: r.mqs_window,
            bias,
            target_power,
            relay_pilot_dbm: r.relay_pilot_dbm,
            relay_backhaul_dbm: r.relay_backhaul_dbm,
            channel,
            rng_seed: spec.rng_seed,
            spec,
            base_dir: base_dir.map(Path::to_path_buf),
            digest,
        };
        let grid = sc.grid();
        let phi = sc.traffic_profile.field(&grid);
        let avg = phi.iter().sum::<f64>() * grid.pixel_area() / grid.area();
        if (avg - 1.0).abs() > 1e-6 {
            return Err(Error::invariant(
                "traffic.profile",
                format!("network average of the traffic field is {avg}, expected 1"),
            ));
        }
        Ok(sc)
    }

    /// The parsed file this scenario was built from.
    pub fn spec(&self) -> &ScenarioFile {
        &self.spec
    }

    /// Rebuilds the scenario after editing its file representation.
    pub fn modified(&self, edit: impl FnOnce(&mut ScenarioFile)) -> Result<Self> {
        let mut spec = self.spec.clone();
        edit(&mut spec);
        Self::from_spec(spec, self.base_dir.as_deref())
    }

    /// SHA-256 of the canonical serialisation, hex encoded.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn grid(&self) -> PixelGrid {
        PixelGrid::new(self.extent, self.pixel_size)
    }

    pub fn enb_of_cell(&self, cell: usize) -> Option<&Station> {
        self.stations
            .iter()
            .find(|s| s.kind == StationKind::Enb && s.cell == cell)
    }

    pub fn focus_enb(&self) -> &Station {
        self.enb_of_cell(self.focus_cell)
            .expect("validated scenario has an eNB in the focus cell")
    }

    pub fn enbs(&self) -> impl Iterator<Item = &Station> {
        self.stations.iter().filter(|s| s.kind == StationKind::Enb)
    }
}

fn validate_stations(spec: &ScenarioFile, extent: &Rect) -> Result<Vec<Station>> {
    use file::StationKindEntry;

    if spec.stations.is_empty() {
        return Err(Error::invariant("station", "at least one eNB is required"));
    }
    let mut stations = Vec::with_capacity(spec.stations.len());
    for (id, e) in spec.stations.iter().enumerate() {
        let field = format!("station[{id}]");
        let position = Point::new(e.x, e.y);
        if !extent.contains(&position) {
            return Err(Error::invariant(
                format!("{field}.x/y"),
                "station lies outside geometry.extent",
            ));
        }
        if !e.pilot_dbm.is_finite() {
            return Err(Error::invariant(format!("{field}.pilot_dbm"), "must be finite"));
        }
        let kind = match e.kind {
            StationKindEntry::Enb => {
                if e.donor.is_some() {
                    return Err(Error::invariant(format!("{field}.donor"), "eNBs have no donor"));
                }
                if e.backhaul_dbm.is_some() {
                    return Err(Error::invariant(
                        format!("{field}.backhaul_dbm"),
                        "only relays have a backhaul transmitter",
                    ));
                }
                StationKind::Enb
            }
            StationKindEntry::Rn => {
                if e.backhaul_dbm.is_none_or(|p| !p.is_finite()) {
                    return Err(Error::invariant(
                        format!("{field}.backhaul_dbm"),
                        "relays need a finite backhaul transmit power",
                    ));
                }
                if e.cell == spec.focus_cell {
                    return Err(Error::invariant(
                        format!("{field}.cell"),
                        "relays of the optimized cell come from the configuration, not the file",
                    ));
                }
                StationKind::Rn
            }
        };
        stations.push(Station {
            id,
            kind,
            position,
            cell: e.cell,
            donor: e.donor,
            pilot_dbm: e.pilot_dbm,
            backhaul_dbm: e.backhaul_dbm,
        });
    }
    let mut enb_cells = std::collections::HashSet::new();
    for s in stations.iter().filter(|s| s.kind == StationKind::Enb) {
        if !enb_cells.insert(s.cell) {
            return Err(Error::invariant(
                format!("station[{}].cell", s.id),
                format!("cell {} has more than one eNB", s.cell),
            ));
        }
    }
    for s in stations.iter().filter(|s| s.kind == StationKind::Rn) {
        let field = format!("station[{}].donor", s.id);
        let donor = s
            .donor
            .ok_or_else(|| Error::invariant(&field, "every relay needs a donor eNB"))?;
        match stations.get(donor) {
            Some(d) if d.kind == StationKind::Enb && d.cell == s.cell => {}
            _ => {
                return Err(Error::invariant(
                    field,
                    "donor must be the eNB of the relay's own cell",
                ))
            }
        }
    }
    if !enb_cells.contains(&spec.focus_cell) {
        return Err(Error::invariant("focus_cell", "no eNB serves the focus cell"));
    }
    Ok(stations)
}
