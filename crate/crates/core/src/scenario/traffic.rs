use serde::{Deserialize, Serialize};

use super::geometry::{PixelGrid, Point};

/// Spatial shape of the offered traffic.
///
/// The realised field is always rescaled so that its network average is one,
/// which makes `traffic_mean` the average density in bits/s/m².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrafficProfile {
    Uniform,
    /// Uniform background plus a 2D isotropic Gaussian bump. `mass` is the
    /// fraction of the total traffic carried by the bump.
    Hotspot { center: Point, sigma: f64, mass: f64 },
}

impl Default for TrafficProfile {
    fn default() -> Self {
        TrafficProfile::Uniform
    }
}

impl TrafficProfile {
    /// Per-pixel φ(s), normalised so that (1/A_nw) Σ φ(s)·pixel_area = 1.
    pub fn field(&self, grid: &PixelGrid) -> Vec<f64> {
        let raw: Vec<f64> = match self {
            TrafficProfile::Uniform => vec![1.0; grid.len()],
            TrafficProfile::Hotspot {
                center,
                sigma,
                mass,
            } => {
                let area = grid.area();
                let norm = 1.0 / (2.0 * std::f64::consts::PI * sigma * sigma);
                grid.centers()
                    .iter()
                    .map(|p| {
                        let r2 = (p.x - center.x).powi(2) + (p.y - center.y).powi(2);
                        let bump = norm * (-r2 / (2.0 * sigma * sigma)).exp();
                        (1.0 - mass) + mass * area * bump
                    })
                    .collect()
            }
        };
        let total: f64 = raw.iter().sum::<f64>() * grid.pixel_area();
        let scale = grid.area() / total;
        raw.into_iter().map(|v| v * scale).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::geometry::Rect;

    fn grid() -> PixelGrid {
        PixelGrid::new(
            Rect {
                x_min: -500.0,
                x_max: 500.0,
                y_min: -400.0,
                y_max: 400.0,
            },
            20.0,
        )
    }

    #[test]
    fn profiles_average_to_one() {
        let g = grid();
        for profile in [
            TrafficProfile::Uniform,
            TrafficProfile::Hotspot {
                center: Point::new(115.0, 143.0),
                sigma: 60.0,
                mass: 0.4,
            },
        ] {
            let phi = profile.field(&g);
            let avg = phi.iter().sum::<f64>() * g.pixel_area() / g.area();
            assert!((avg - 1.0).abs() < 1e-9);
            assert!(phi.iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn hotspot_peaks_at_center() {
        let g = grid();
        let phi = TrafficProfile::Hotspot {
            center: Point::new(110.0, 150.0),
            sigma: 50.0,
            mass: 0.5,
        }
        .field(&g);
        let peak = g.pixel_of(&Point::new(110.0, 150.0)).unwrap();
        let max = phi.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(phi[peak], max);
    }
}
