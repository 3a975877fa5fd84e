use serde::Serialize;

use crate::geom::{radius, TriMesh};
use crate::kset::ClosedSetSpec;

/// Largest `|A|` over interior vertices within 3D distance `rho` of the axis
/// point at height `p`; `None` when no vertex lies in the ball.
pub fn kappa_near(m: &TriMesh, absa: &[f64], p: f64, rho: f64) -> Option<f64> {
    m.vertices
        .iter()
        .zip(absa)
        .filter(|(v, k)| {
            !v.boundary && k.is_finite() && radius(&v.position).hypot(v.position.z - p) <= rho
        })
        .map(|(_, &k)| k)
        .reduce(f64::max)
}

/// Largest `|A|` over interior vertices at distance at least `3 rho` from K
/// on the axis and with horizontal radius at most 0.9.
pub fn kappa_far(m: &TriMesh, absa: &[f64], kset: &ClosedSetSpec, rho: f64) -> Option<f64> {
    m.vertices
        .iter()
        .zip(absa)
        .filter(|(v, k)| {
            let r = radius(&v.position);
            !v.boundary && k.is_finite() && r <= 0.9 && r.hypot(kset.distance(v.position.z)) >= 3.0 * rho
        })
        .map(|(_, &k)| k)
        .reduce(f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupRow {
    pub n: u32,
    /// Height of the K sample, or `None` for the far-field row of an empty K.
    pub p: Option<f64>,
    pub kappa_near: Option<f64>,
    pub kappa_far: Option<f64>,
}

/// One row per `(n, K sample)`; an empty K gives one far-field row per n.
pub fn blowup_series(solves: &[(u32, &TriMesh, &[f64])], kset: &ClosedSetSpec, rho: f64) -> Vec<BlowupRow> {
    let samples = kset.sample_points();
    let mut rows = Vec::new();
    for &(n, m, absa) in solves {
        let far = kappa_far(m, absa, kset, rho);
        if samples.is_empty() {
            rows.push(BlowupRow { n, p: None, kappa_near: None, kappa_far: far });
        }
        for &p in &samples {
            rows.push(BlowupRow { n, p: Some(p), kappa_near: kappa_near(m, absa, p, rho), kappa_far: far });
        }
    }
    rows
}

pub fn blowup_csv(rows: &[BlowupRow]) -> String {
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    let mut out = String::from("n,p,kappa_near,kappa_far\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.n, opt(r.p), opt(r.kappa_near), opt(r.kappa_far)));
    }
    out
}

/// Mean of `kappa_near` over the K samples divided by its mean over the
/// midpoints of the gaps between K pieces.
pub fn gap_contrast(m: &TriMesh, absa: &[f64], kset: &ClosedSetSpec, rho: f64) -> Option<f64> {
    let mean = |pts: Vec<f64>| {
        let vals: Vec<f64> = pts.iter().filter_map(|&p| kappa_near(m, absa, p, rho)).collect();
        (vals.len() == pts.len() && !vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    };
    let on_k = mean(kset.sample_points())?;
    let off_k = mean(kset.gap_midpoints())?;
    Some(on_k / off_k)
}

/// Ratio of the last to the first value of a series, skipping missing entries.
pub fn growth_ratio(values: &[Option<f64>]) -> Option<f64> {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    match (present.first(), present.last()) {
        (Some(&a), Some(&b)) if present.len() >= 2 && a > 0.0 => Some(b / a),
        _ => None,
    }
}
