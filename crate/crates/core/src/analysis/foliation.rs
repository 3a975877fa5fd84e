use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::Result;
use crate::geom::{mesh_distance, radius, Isometry, TriMesh};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoliationReport {
    pub count: usize,
    pub r_min: f64,
    /// Smallest distance between distinct rotated copies; `+inf` for one copy.
    pub min_distance: f64,
    pub edge_scale: f64,
    pub passed: bool,
}

/// Rotates every vertex of `m` about the vertical axis.
pub fn rotated(m: &TriMesh, angle: f64) -> TriMesh {
    let iso = Isometry::RotateAboutZ(angle);
    let mut out = m.clone();
    for v in &mut out.vertices {
        v.position = iso.apply(&v.position);
    }
    out
}

/// Pairwise distance between the copies `R_{2 pi k / count} m`, restricted to
/// `r >= r_min`. Rotations commute, so only offsets `1..=count/2` are measured.
/// Passes when the minimum exceeds a tenth of the mean edge length.
pub fn foliation_disjointness(m: &TriMesh, count: usize, r_min: f64) -> Result<FoliationReport> {
    let edge_scale = m.edge_scale();
    let mut min_distance = f64::INFINITY;
    for k in 1..=count / 2 {
        let copy = rotated(m, TAU * k as f64 / count as f64);
        let d = mesh_distance(m, &copy, |p| radius(p) >= r_min)?;
        min_distance = min_distance.min(d);
    }
    Ok(FoliationReport {
        count,
        r_min,
        min_distance,
        edge_scale,
        passed: min_distance > 0.1 * edge_scale,
    })
}
