use serde::Serialize;

use crate::geom::{angle_defects, mixed_areas, TriMesh};

/// `|A|` per vertex from the angle defect, using `|A|^2 = -2 K` on a
/// minimal surface. Boundary vertices get `NaN`.
pub fn vertex_curvature(m: &TriMesh) -> Vec<f64> {
    let defect = angle_defects(m);
    let area = mixed_areas(m);
    m.vertices
        .iter()
        .enumerate()
        .map(|(v, vert)| {
            if vert.boundary {
                f64::NAN
            } else {
                let gauss = defect[v] / area[v];
                (2.0 * (-gauss).max(0.0)).sqrt()
            }
        })
        .collect()
}

/// `|nu_h| / |nu_z|` for the area-weighted vertex normal; `+inf` for
/// vertical tangent planes.
pub fn tangent_slope(m: &TriMesh) -> Vec<f64> {
    m.vertex_normals()
        .iter()
        .map(|n| {
            if n.z.abs() < 1e-14 {
                f64::INFINITY
            } else {
                n.x.hypot(n.y) / n.z.abs()
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiReport {
    pub min_u: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip)]
    pub u: Vec<f64>,
}

/// Rotation Jacobi field `u = nu . (-y, x, 0)`. The normal is oriented
/// downward on average, which makes `u` positive on a right-handed helicoid.
pub fn jacobi_field(m: &TriMesh) -> Vec<f64> {
    let normals = m.vertex_normals();
    let down: f64 = normals.iter().map(|n| n.z).sum();
    let sign = if down > 0.0 { -1.0 } else { 1.0 };
    m.vertices
        .iter()
        .zip(&normals)
        .map(|(v, n)| sign * (-v.position.y * n.x + v.position.x * n.y))
        .collect()
}

/// Passes when `u >= -1e-6 * diagonal` at every interior vertex off the axis.
pub fn jacobi_positivity(m: &TriMesh) -> JacobiReport {
    let u = jacobi_field(m);
    let tolerance = 1e-6 * m.bounding_diagonal();
    let min_u = m
        .vertices
        .iter()
        .zip(&u)
        .filter(|(v, _)| !v.boundary && v.position.x.hypot(v.position.y) > 1e-12)
        .map(|(_, &u)| u)
        .fold(f64::INFINITY, f64::min);
    JacobiReport {
        min_u,
        tolerance,
        passed: min_u >= -tolerance,
        u,
    }
}

/// Largest `|A|(p) * dist(p, slab boundary)` over interior vertices of the
/// slab `a + delta < z < b - delta`.
pub fn curvature_distance_constant(m: &TriMesh, absa: &[f64], a: f64, b: f64, delta: f64) -> f64 {
    let (lo, hi) = (a + delta, b - delta);
    m.vertices
        .iter()
        .zip(absa)
        .filter(|(v, k)| !v.boundary && k.is_finite() && v.position.z > lo && v.position.z < hi)
        .map(|(v, k)| k * (v.position.z - lo).min(hi - v.position.z))
        .fold(0.0, f64::max)
}
