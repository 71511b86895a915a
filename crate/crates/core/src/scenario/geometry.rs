use std::collections::HashMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned rectangle in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }
}

/// Regular square pixel grid covering the network extent. All area integrals
/// are sums over pixel centres weighted by `pixel_area`.
#[derive(Debug, Clone)]
pub struct PixelGrid {
    pub extent: Rect,
    pub pixel_size: f64,
    pub nx: usize,
    pub ny: usize,
    centers: Vec<Point>,
}

impl PixelGrid {
    pub fn new(extent: Rect, pixel_size: f64) -> Self {
        let nx = (extent.width() / pixel_size).round().max(1.0) as usize;
        let ny = (extent.height() / pixel_size).round().max(1.0) as usize;
        let mut centers = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                centers.push(Point::new(
                    extent.x_min + (ix as f64 + 0.5) * pixel_size,
                    extent.y_min + (iy as f64 + 0.5) * pixel_size,
                ));
            }
        }
        Self {
            extent,
            pixel_size,
            nx,
            ny,
            centers,
        }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn pixel_area(&self) -> f64 {
        self.pixel_size * self.pixel_size
    }

    /// Total area covered by the pixels (may differ from the extent's area by
    /// rounding of the pixel counts).
    pub fn area(&self) -> f64 {
        self.len() as f64 * self.pixel_area()
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn center(&self, pixel: usize) -> Point {
        self.centers[pixel]
    }

    /// Index of the pixel containing `p`, if it lies inside the grid.
    pub fn pixel_of(&self, p: &Point) -> Option<usize> {
        let fx = (p.x - self.extent.x_min) / self.pixel_size;
        let fy = (p.y - self.extent.y_min) / self.pixel_size;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (ix, iy) = (fx.floor() as usize, fy.floor() as usize);
        // points on the upper boundary belong to the last row/column
        let ix = if ix == self.nx && fx <= self.nx as f64 { ix - 1 } else { ix };
        let iy = if iy == self.ny && fy <= self.ny as f64 { iy - 1 } else { iy };
        (ix < self.nx && iy < self.ny).then_some(iy * self.nx + ix)
    }
}

/// Candidate relay sites: a regular grid anchored at the focus eNB.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub step: f64,
    pub anchor: Point,
    sites: Vec<Point>,
    coords: Vec<(i32, i32)>,
    lookup: HashMap<(i32, i32), usize>,
}

impl CandidateSet {
    pub fn new(step: f64, anchor: Point, coords: Vec<(i32, i32)>) -> Self {
        let sites = coords
            .iter()
            .map(|&(i, j)| Point::new(anchor.x + i as f64 * step, anchor.y + j as f64 * step))
            .collect();
        let lookup = coords.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        Self {
            step,
            anchor,
            sites,
            coords,
            lookup,
        }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[Point] {
        &self.sites
    }

    pub fn site(&self, index: usize) -> Point {
        self.sites[index]
    }

    pub fn grid_coord(&self, index: usize) -> (i32, i32) {
        self.coords[index]
    }

    pub fn index_at(&self, coord: (i32, i32)) -> Option<usize> {
        self.lookup.get(&coord).copied()
    }

    /// Restrict to a subset of sites (keeps grid coordinates so neighbour
    /// moves remain well defined).
    pub fn restricted(&self, keep: &[usize]) -> Self {
        let coords = keep.iter().map(|&k| self.coords[k]).collect();
        Self::new(self.step, self.anchor, coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_covers_extent() {
        let g = PixelGrid::new(
            Rect {
                x_min: -100.0,
                x_max: 100.0,
                y_min: 0.0,
                y_max: 60.0,
            },
            20.0,
        );
        assert_eq!((g.nx, g.ny), (10, 3));
        assert!((g.area() - 200.0 * 60.0).abs() < 1e-9);
        assert_eq!(g.center(0), Point::new(-90.0, 10.0));
        assert_eq!(g.pixel_of(&Point::new(-90.0, 10.0)), Some(0));
        assert_eq!(g.pixel_of(&Point::new(100.0, 60.0)), Some(29));
        assert_eq!(g.pixel_of(&Point::new(100.1, 0.0)), None);
    }
}
