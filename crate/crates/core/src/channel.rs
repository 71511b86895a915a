//! Large-scale channel: log-distance path loss, deterministic shadowing and
//! full-compensation power control.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::scenario::geometry::Point;
use crate::scenario::{AssociationMap, Deployment};

/// Link classes with separate propagation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkClass {
    UeEnb,
    UeRn,
    RnEnb,
}

impl LinkClass {
    fn tag(self) -> u64 {
        match self {
            LinkClass::UeEnb => 0x11,
            LinkClass::UeRn => 0x22,
            LinkClass::RnEnb => 0x33,
        }
    }
}

/// `PL(d) = intercept + 10·exponent·log10(d / 1 km)` dB, plus zero-mean
/// lognormal shadowing with `shadowing_db` standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossParams {
    pub intercept_db: f64,
    pub exponent: f64,
    pub shadowing_db: f64,
}

impl PathLossParams {
    pub fn path_loss_db(&self, distance_m: f64) -> f64 {
        let d = distance_m.max(1.0);
        self.intercept_db + 10.0 * self.exponent * (d / 1000.0).log10()
    }

    fn validate(&self, field: &str) -> Result<()> {
        if !(self.exponent > 0.0) || !self.exponent.is_finite() {
            return Err(Error::invariant(
                format!("{field}.exponent"),
                "path-loss exponent must be positive",
            ));
        }
        if !(self.shadowing_db >= 0.0) || !self.shadowing_db.is_finite() {
            return Err(Error::invariant(
                format!("{field}.shadowing_db"),
                "shadowing standard deviation must be non-negative",
            ));
        }
        if !self.intercept_db.is_finite() {
            return Err(Error::invariant(format!("{field}.intercept_db"), "not finite"));
        }
        Ok(())
    }
}

/// Keys identifying the two ends of a link for the shadowing hash.
///
/// Pixels are keyed by pixel index. Stations and candidate sites live in
/// disjoint key ranges so that a relay placed on a site always sees the same
/// shadowing realisation, whichever relay index it carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteKey {
    Station(usize),
    Candidate(usize),
}

impl SiteKey {
    fn raw(self) -> u64 {
        match self {
            SiteKey::Station(id) => id as u64,
            SiteKey::Candidate(i) => (1u64 << 40) | i as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub ue_enb: PathLossParams,
    pub ue_rn: PathLossParams,
    pub rn_enb: PathLossParams,
    pub seed: u64,
}

impl Default for ChannelModel {
    /// Log-distance values in the spirit of the 3GPP relay "case 1"
    /// calibration. Every field is overridable from the scenario file.
    fn default() -> Self {
        Self {
            ue_enb: PathLossParams {
                intercept_db: 128.1,
                exponent: 3.76,
                shadowing_db: 10.0,
            },
            ue_rn: PathLossParams {
                intercept_db: 140.7,
                exponent: 3.67,
                shadowing_db: 10.0,
            },
            rn_enb: PathLossParams {
                intercept_db: 124.5,
                exponent: 3.76,
                shadowing_db: 6.0,
            },
            seed: 0,
        }
    }
}

impl ChannelModel {
    pub fn validate(&self) -> Result<()> {
        self.ue_enb.validate("channel.ue_enb")?;
        self.ue_rn.validate("channel.ue_rn")?;
        self.rn_enb.validate("channel.rn_enb")
    }

    pub fn params(&self, class: LinkClass) -> &PathLossParams {
        match class {
            LinkClass::UeEnb => &self.ue_enb,
            LinkClass::UeRn => &self.ue_rn,
            LinkClass::RnEnb => &self.rn_enb,
        }
    }

    /// Shadowing in dB for a link, a deterministic function of
    /// (seed, class, source key, destination key).
    pub fn shadow_db(&self, class: LinkClass, src: u64, dst: SiteKey) -> f64 {
        let sigma = self.params(class).shadowing_db;
        if sigma == 0.0 {
            return 0.0;
        }
        let u = hash_uniform(self.seed, class.tag(), src, dst.raw());
        sigma * standard_normal_quantile(u)
    }

    /// Linear large-scale gain from a pixel (identified by `pixel` for the
    /// shadowing draw) towards a station or site. Downlink pilot gain is taken
    /// equal to this uplink gain.
    pub fn pixel_gain(
        &self,
        class: LinkClass,
        pixel: usize,
        src: &Point,
        dst_key: SiteKey,
        dst: &Point,
    ) -> f64 {
        let loss = self.params(class).path_loss_db(src.distance(dst));
        let shadow = self.shadow_db(class, pixel as u64, dst_key);
        gain_from_db(-loss - shadow)
    }

    /// Linear gain of a relay-to-eNB backhaul link.
    pub fn backhaul_gain(&self, src_key: SiteKey, src: &Point, enb_id: usize, dst: &Point) -> f64 {
        let class = LinkClass::RnEnb;
        let loss = self.params(class).path_loss_db(src.distance(dst));
        let shadow = self.shadow_db(class, src_key.raw(), SiteKey::Station(enb_id));
        gain_from_db(-loss - shadow)
    }
}

/// Gains are capped at 0 dB.
fn gain_from_db(db: f64) -> f64 {
    10f64.powf(db.min(0.0) / 10.0)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform in the open interval (0, 1).
fn hash_uniform(seed: u64, tag: u64, a: u64, b: u64) -> f64 {
    let mut h = splitmix64(seed ^ 0xA076_1D64_78BD_642F);
    h = splitmix64(h ^ tag);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b.rotate_left(17));
    ((h >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

pub(crate) fn standard_normal_quantile(u: f64) -> f64 {
    Normal::standard().inverse_cdf(u)
}

/// Per-pixel uplink transmit power under full compensation power control.
#[derive(Debug, Clone)]
pub struct TxPowerField {
    /// T(s) in watts.
    pub power: Vec<f64>,
    /// True where T(s) = T_max.
    pub clamped: Vec<bool>,
}

/// `T = min(T_max, P̄ / G)`.
#[inline]
pub fn fcpc(target_w: f64, gain: f64, t_max_w: f64) -> (f64, bool) {
    let required = target_w / gain;
    if required >= t_max_w {
        (t_max_w, true)
    } else {
        (required, false)
    }
}

/// FCPC transmit power of every pixel towards its serving station.
pub fn fcpc_power(dep: &Deployment, assoc: &AssociationMap) -> TxPowerField {
    let t_max = dep.scenario().t_max_w;
    let (power, clamped) = assoc
        .server
        .iter()
        .enumerate()
        .map(|(p, &k)| {
            let st = &dep.stations[k];
            fcpc(st.target_w, st.gain[p], t_max)
        })
        .unzip();
    TxPowerField { power, clamped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{dbm_to_w, lin_to_db, w_to_dbm};

    fn no_shadow() -> ChannelModel {
        let mut m = ChannelModel::default();
        m.ue_enb.shadowing_db = 0.0;
        m
    }

    #[test]
    fn reference_distance_loss() {
        let m = no_shadow();
        let g = m.pixel_gain(
            LinkClass::UeEnb,
            3,
            &Point::new(1000.0, 0.0),
            SiteKey::Station(0),
            &Point::new(0.0, 0.0),
        );
        assert!((lin_to_db(g) + 128.1).abs() < 1e-9);
    }

    #[test]
    fn distance_clamped_at_one_metre() {
        let p = ChannelModel::default().ue_enb;
        assert_eq!(p.path_loss_db(0.0), p.path_loss_db(1.0));
        assert_eq!(p.path_loss_db(0.3), p.path_loss_db(1.0));
    }

    #[test]
    fn shadowing_is_deterministic() {
        let m = ChannelModel {
            seed: 42,
            ..ChannelModel::default()
        };
        let a = m.shadow_db(LinkClass::UeRn, 17, SiteKey::Candidate(4));
        let b = m.shadow_db(LinkClass::UeRn, 17, SiteKey::Candidate(4));
        assert_eq!(a.to_bits(), b.to_bits());
        let c = m.shadow_db(LinkClass::UeRn, 17, SiteKey::Candidate(5));
        assert_ne!(a, c);
        let other_seed = ChannelModel {
            seed: 43,
            ..m.clone()
        };
        assert_ne!(a, other_seed.shadow_db(LinkClass::UeRn, 17, SiteKey::Candidate(4)));
    }

    #[test]
    fn shadowing_sample_statistics() {
        let m = ChannelModel {
            seed: 9,
            ..ChannelModel::default()
        };
        let n = 10_000;
        let draws: Vec<f64> = (0..n)
            .map(|p| m.shadow_db(LinkClass::UeEnb, p as u64, SiteKey::Station(2)))
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.3, "mean {mean}");
        assert!((var.sqrt() - 10.0).abs() < 0.5, "std {}", var.sqrt());
    }

    #[test]
    fn gains_within_unit_interval() {
        let m = ChannelModel {
            seed: 1,
            ..ChannelModel::default()
        };
        for p in 0..2000 {
            let g = m.pixel_gain(
                LinkClass::UeRn,
                p,
                &Point::new(0.5, 0.0),
                SiteKey::Station(0),
                &Point::new(0.0, 0.0),
            );
            assert!(g > 0.0 && g <= 1.0);
        }
    }

    #[test]
    fn fcpc_branches() {
        let t_max = dbm_to_w(23.0);
        let (t, clamped) = fcpc(dbm_to_w(-60.0), 1e-10, t_max);
        assert!(clamped);
        assert!((w_to_dbm(t) - 23.0).abs() < 1e-12);

        let (t, clamped) = fcpc(dbm_to_w(-60.0), 1e-8, t_max);
        assert!(!clamped);
        assert!((w_to_dbm(t) - 20.0).abs() < 1e-9);
        assert!((t * 1e-8 / dbm_to_w(-60.0) - 1.0).abs() < 1e-12);
    }
}
