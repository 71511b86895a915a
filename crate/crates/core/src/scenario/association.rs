use super::network::Deployment;

/// Serving station of every pixel and per-station served area and traffic.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationMap {
    /// Serving station (deployment index) per pixel.
    pub server: Vec<usize>,
    /// A_k, m².
    pub area: Vec<f64>,
    /// Φ_k = Σ_{s ∈ A_k} φ(s)·pixel_area, m².
    pub mass: Vec<f64>,
    /// Pixels served by each station, increasing.
    pub pixels: Vec<Vec<usize>>,
}

impl AssociationMap {
    /// Area of a cell: union of its stations' served areas.
    pub fn cell_area(&self, dep: &Deployment, cell: usize) -> f64 {
        dep.cell_members(cell).map(|k| self.area[k]).sum()
    }
}

/// Each pixel picks the station with the largest biased received pilot
/// `pilot · G_k(s) · bias_k`; ties go to the lower station index.
pub fn build_association(dep: &Deployment) -> AssociationMap {
    let grid = dep.network.grid();
    let phi = dep.network.phi();
    let n = dep.stations.len();
    let pa = grid.pixel_area();
    let weights: Vec<f64> = dep.stations.iter().map(|s| s.pilot_w * s.bias).collect();

    let mut server = Vec::with_capacity(grid.len());
    let mut area = vec![0.0; n];
    let mut mass = vec![0.0; n];
    let mut pixels = vec![Vec::new(); n];
    for p in 0..grid.len() {
        let mut best = 0;
        let mut best_rx = weights[0] * dep.stations[0].gain[p];
        for k in 1..n {
            let rx = weights[k] * dep.stations[k].gain[p];
            if rx > best_rx {
                best = k;
                best_rx = rx;
            }
        }
        server.push(best);
        area[best] += pa;
        mass[best] += phi[p] * pa;
        pixels[best].push(p);
    }
    AssociationMap {
        server,
        area,
        mass,
        pixels,
    }
}
