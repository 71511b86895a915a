use std::fmt;

use super::geometry::{CandidateSet, PixelGrid, Point};
use super::{Scenario, StationKind};
use crate::channel::{LinkClass, SiteKey};
use crate::error::{Error, Result};
use crate::units::{db_to_lin, dbm_to_w};

/// One optimizer decision point: relay sites in the focus cell (indices into
/// the candidate set, kept sorted), target received power levels for eNBs and
/// relays, and the relay bias level. Power and bias apply network-wide.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub sites: Vec<usize>,
    pub p_enb: u32,
    pub p_rn: u32,
    pub bias: u32,
}

impl Configuration {
    pub fn new(mut sites: Vec<usize>, p_enb: u32, p_rn: u32, bias: u32) -> Self {
        sites.sort_unstable();
        Self {
            sites,
            p_enb,
            p_rn,
            bias,
        }
    }

    pub fn n_rn(&self) -> usize {
        self.sites.len()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sites: Vec<String> = self.sites.iter().map(|s| s.to_string()).collect();
        write!(
            f,
            "sites=[{}] p_enb={} p_rn={} bias={}",
            sites.join(" "),
            self.p_enb,
            self.p_rn,
            self.bias
        )
    }
}

/// Where an active station comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    /// Station listed in the scenario file (by station id).
    Fixed(usize),
    /// Relay placed by the configuration on a candidate site.
    Site(usize),
}

/// Scenario plus everything that does not depend on the configuration:
/// pixel grid, traffic field, candidate sites and all large-scale gains.
#[derive(Debug, Clone)]
pub struct Network {
    scenario: Scenario,
    grid: PixelGrid,
    phi: Vec<f64>,
    candidates: CandidateSet,
    enb_ids: Vec<usize>,
    fixed_gain: Vec<Vec<f64>>,
    fixed_backhaul: Vec<Vec<f64>>,
    site_gain: Vec<Vec<f64>>,
    site_backhaul: Vec<Vec<f64>>,
}

impl Network {
    pub fn new(scenario: Scenario) -> Result<Self> {
        let grid = scenario.grid();
        let phi = scenario.traffic_profile.field(&grid);
        let candidates = enumerate_candidates(&scenario, &grid)?;
        let ch = &scenario.channel;
        let enb_ids: Vec<usize> = scenario.enbs().map(|s| s.id).collect();

        let fixed_gain = scenario
            .stations
            .iter()
            .map(|st| {
                let class = match st.kind {
                    StationKind::Enb => LinkClass::UeEnb,
                    StationKind::Rn => LinkClass::UeRn,
                };
                pixel_gains(&scenario, &grid, class, SiteKey::Station(st.id), &st.position)
            })
            .collect();
        let fixed_backhaul = scenario
            .stations
            .iter()
            .map(|st| match st.kind {
                StationKind::Enb => Vec::new(),
                StationKind::Rn => enb_ids
                    .iter()
                    .map(|&e| {
                        let enb = &scenario.stations[e];
                        ch.backhaul_gain(SiteKey::Station(st.id), &st.position, e, &enb.position)
                    })
                    .collect(),
            })
            .collect();
        let site_gain = (0..candidates.len())
            .map(|i| {
                pixel_gains(
                    &scenario,
                    &grid,
                    LinkClass::UeRn,
                    site_key(candidates.grid_coord(i)),
                    &candidates.site(i),
                )
            })
            .collect();
        let site_backhaul = (0..candidates.len())
            .map(|i| {
                enb_ids
                    .iter()
                    .map(|&e| {
                        let enb = &scenario.stations[e];
                        ch.backhaul_gain(
                            site_key(candidates.grid_coord(i)),
                            &candidates.site(i),
                            e,
                            &enb.position,
                        )
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            scenario,
            grid,
            phi,
            candidates,
            enb_ids,
            fixed_gain,
            fixed_backhaul,
            site_gain,
            site_backhaul,
        })
    }

    /// Keeps only the listed candidate sites (in the given order). Used to
    /// build small enumerable search spaces.
    pub fn with_candidates(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyCandidates("restriction keeps no site".into()));
        }
        if let Some(&bad) = keep.iter().find(|&&k| k >= self.candidates.len()) {
            return Err(Error::Configuration(format!("candidate site {bad} does not exist")));
        }
        let mut out = self.clone();
        out.candidates = self.candidates.restricted(keep);
        out.site_gain = keep.iter().map(|&k| self.site_gain[k].clone()).collect();
        out.site_backhaul = keep.iter().map(|&k| self.site_backhaul[k].clone()).collect();
        Ok(out)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn grid(&self) -> &PixelGrid {
        &self.grid
    }

    /// Traffic field φ(s) per pixel.
    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn candidates(&self) -> &CandidateSet {
        &self.candidates
    }

    /// Gain from every pixel to a fixed station.
    pub fn fixed_gain(&self, station: usize) -> &[f64] {
        &self.fixed_gain[station]
    }

    /// Gain from every pixel to a candidate site.
    pub fn site_gain(&self, site: usize) -> &[f64] {
        &self.site_gain[site]
    }

    pub fn validate(&self, cfg: &Configuration) -> Result<()> {
        let sc = &self.scenario;
        if cfg.p_enb >= sc.target_power.count || cfg.p_rn >= sc.target_power.count {
            return Err(Error::Configuration("target power level out of range".into()));
        }
        if cfg.bias >= sc.bias.count {
            return Err(Error::Configuration("bias level out of range".into()));
        }
        if let Some(&s) = cfg.sites.iter().find(|&&s| s >= self.candidates.len()) {
            return Err(Error::Configuration(format!("candidate site {s} does not exist")));
        }
        if cfg.sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Configuration(
                "relay sites must be distinct and sorted".into(),
            ));
        }
        Ok(())
    }

    /// Active stations for a configuration. With `other_relays = false` the
    /// relays listed in the scenario file are switched off as well.
    pub fn deploy(&self, cfg: &Configuration, other_relays: bool) -> Result<Deployment<'_>> {
        self.validate(cfg)?;
        let sc = &self.scenario;
        let bias_lin = db_to_lin(sc.bias.value(cfg.bias));
        let p_enb = dbm_to_w(sc.target_power.value(cfg.p_enb));
        let p_rn = dbm_to_w(sc.target_power.value(cfg.p_rn));

        let mut stations = Vec::new();
        let mut index_of = vec![usize::MAX; sc.stations.len()];
        for st in &sc.stations {
            if st.kind == StationKind::Rn && !other_relays {
                continue;
            }
            index_of[st.id] = stations.len();
            let (bias, target) = match st.kind {
                StationKind::Enb => (1.0, p_enb),
                StationKind::Rn => (bias_lin, p_rn),
            };
            stations.push(ActiveStation {
                kind: st.kind,
                cell: st.cell,
                position: st.position,
                origin: Origin::Fixed(st.id),
                donor: st.donor,
                pilot_w: dbm_to_w(st.pilot_dbm),
                bias,
                target_w: target,
                backhaul_w: st.backhaul_dbm.map_or(0.0, dbm_to_w),
                gain: &self.fixed_gain[st.id],
                backhaul_gain: &self.fixed_backhaul[st.id],
            });
        }
        let focus_id = sc.focus_enb().id;
        for &site in &cfg.sites {
            stations.push(ActiveStation {
                kind: StationKind::Rn,
                cell: sc.focus_cell,
                position: self.candidates.site(site),
                origin: Origin::Site(site),
                donor: Some(focus_id),
                pilot_w: dbm_to_w(sc.relay_pilot_dbm),
                bias: bias_lin,
                target_w: p_rn,
                backhaul_w: dbm_to_w(sc.relay_backhaul_dbm),
                gain: &self.site_gain[site],
                backhaul_gain: &self.site_backhaul[site],
            });
        }
        // donors were recorded as station ids; map to deployment indices
        for st in stations.iter_mut() {
            st.donor = st.donor.map(|id| index_of[id]);
        }
        let enbs: Vec<usize> = self.enb_ids.iter().map(|&id| index_of[id]).collect();
        let focus = index_of[focus_id];
        Ok(Deployment {
            network: self,
            stations,
            enbs,
            focus,
        })
    }
}

/// A station switched on by a configuration.
#[derive(Debug, Clone)]
pub struct ActiveStation<'a> {
    pub kind: StationKind,
    pub cell: usize,
    pub position: Point,
    pub origin: Origin,
    /// Donor eNB as an index into [`Deployment::stations`] (relays only).
    pub donor: Option<usize>,
    pub pilot_w: f64,
    /// Linear association bias (1 for eNBs).
    pub bias: f64,
    /// FCPC target received power P̄, W.
    pub target_w: f64,
    /// Backhaul transmit power, W (0 for eNBs).
    pub backhaul_w: f64,
    /// Gain from every pixel.
    pub gain: &'a [f64],
    /// Backhaul gain towards every eNB, in [`Deployment::enbs`] order
    /// (empty for eNBs).
    pub backhaul_gain: &'a [f64],
}

/// All active stations of one configuration. eNBs come first in scenario
/// order, then the scenario's other-cell relays, then the configured relays.
#[derive(Debug, Clone)]
pub struct Deployment<'a> {
    pub network: &'a Network,
    pub stations: Vec<ActiveStation<'a>>,
    /// Deployment indices of the eNBs, one per cell in scenario order.
    pub enbs: Vec<usize>,
    /// Deployment index of the focus eNB.
    pub focus: usize,
}

impl Deployment<'_> {
    pub fn scenario(&self) -> &Scenario {
        self.network.scenario()
    }

    pub fn len(&self) -> usize {
        self.stations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stations.is_empty()
    }

    /// Position of `enb` (a deployment index) in [`Deployment::enbs`].
    pub fn enb_slot(&self, enb: usize) -> usize {
        self.enbs
            .iter()
            .position(|&e| e == enb)
            .expect("index refers to an eNB")
    }

    /// Stations of a given cell.
    pub fn cell_members(&self, cell: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.stations.len()).filter(move |&k| self.stations[k].cell == cell)
    }
}

/// Shadowing key of a candidate site, derived from its grid coordinate so
/// that restricting or re-enumerating the candidate set keeps the realisation.
fn site_key((i, j): (i32, i32)) -> SiteKey {
    let pack = |v: i32| (v as i64 + (1 << 19)) as usize & 0xF_FFFF;
    SiteKey::Candidate(pack(i) << 20 | pack(j))
}

fn pixel_gains(
    sc: &Scenario,
    grid: &PixelGrid,
    class: LinkClass,
    key: SiteKey,
    pos: &Point,
) -> Vec<f64> {
    grid.centers()
        .iter()
        .enumerate()
        .map(|(p, c)| sc.channel.pixel_gain(class, p, c, key, pos))
        .collect()
}

/// Regular grid of candidate sites anchored at the focus eNB, clipped to the
/// focus cell (unbiased eNB-only association, evaluated at the site itself
/// with the shadowing of the pixel holding it), excluding the eNB site.
pub fn enumerate_candidates(sc: &Scenario, grid: &PixelGrid) -> Result<CandidateSet> {
    let step = sc.candidate_step;
    let anchor = sc.focus_enb().position;
    let ext = sc.extent;
    let i_lo = ((ext.x_min - anchor.x) / step).ceil() as i32;
    let i_hi = ((ext.x_max - anchor.x) / step).floor() as i32;
    let j_lo = ((ext.y_min - anchor.y) / step).ceil() as i32;
    let j_hi = ((ext.y_max - anchor.y) / step).floor() as i32;
    let enbs: Vec<_> = sc.enbs().collect();
    let focus = sc.focus_enb().id;

    let mut coords = Vec::new();
    for j in j_lo..=j_hi {
        for i in i_lo..=i_hi {
            if (i, j) == (0, 0) {
                continue;
            }
            let p = Point::new(anchor.x + i as f64 * step, anchor.y + j as f64 * step);
            let Some(pixel) = grid.pixel_of(&p) else { continue };
            let mut best = (f64::NEG_INFINITY, usize::MAX);
            for e in &enbs {
                let g = sc
                    .channel
                    .pixel_gain(LinkClass::UeEnb, pixel, &p, SiteKey::Station(e.id), &e.position);
                let rx = dbm_to_w(e.pilot_dbm) * g;
                if rx > best.0 {
                    best = (rx, e.id);
                }
            }
            if best.1 == focus {
                coords.push((i, j));
            }
        }
    }
    if coords.is_empty() {
        return Err(Error::EmptyCandidates(format!(
            "no {step} m grid point falls inside cell {}",
            sc.focus_cell
        )));
    }
    Ok(CandidateSet::new(step, anchor, coords))
}
