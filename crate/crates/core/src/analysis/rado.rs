use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::TriMesh;

const SECTION_EPS: f64 = 1e-12;

/// Boundary slope `|dz| / |dxy|` along the open slab between the lowest and
/// highest boundary heights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundarySlope {
    /// Smallest slope over boundary edges touching the open slab.
    pub epsilon: f64,
    /// Connected boundary arcs inside the slab.
    pub components: usize,
}

pub fn boundary_slope(m: &TriMesh) -> Option<BoundarySlope> {
    let lp = m.boundary_loop()?;
    let zs: Vec<f64> = lp.iter().map(|&v| m.vertices[v].position.z).collect();
    let a = zs.iter().copied().fold(f64::INFINITY, f64::min);
    let b = zs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let inside = |z: f64| z > a && z < b;
    let n = lp.len();
    let mut epsilon = f64::INFINITY;
    let mut touching = vec![false; n];
    for k in 0..n {
        let (p, q) = (m.vertices[lp[k]].position, m.vertices[lp[(k + 1) % n]].position);
        if inside(p.z) || inside(q.z) {
            touching[k] = true;
            let d = q - p;
            let h = d.x.hypot(d.y);
            let s = if h == 0.0 { f64::INFINITY } else { d.z.abs() / h };
            epsilon = epsilon.min(s);
        }
    }
    let components = (0..n).filter(|&k| touching[k] && !touching[(k + n - 1) % n]).count();
    let components = if components == 0 && touching.iter().all(|&t| t) { 1 } else { components };
    Some(BoundarySlope { epsilon, components })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadoVerdict {
    Pass,
    Fail,
    /// The slab `a + delta < z < b - delta` is empty.
    Vacuous,
    HypothesisNotMet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadoReport {
    pub epsilon: f64,
    pub delta: f64,
    pub radius: f64,
    pub bound: f64,
    pub min_slope: f64,
    pub verdict: RadoVerdict,
}

/// Checks `slope >= min(epsilon, delta / (2 radius))` up to a 10% allowance
/// on interior vertices of the slab `a + delta < z < b - delta`. The
/// boundary must meet the open slab in two arcs of slope at least `epsilon`.
pub fn rado_slope_check(m: &TriMesh, slopes: &[f64], epsilon: f64, delta: f64, radius: f64) -> RadoReport {
    let bound = epsilon.min(delta / (2.0 * radius));
    let mut report = RadoReport {
        epsilon,
        delta,
        radius,
        bound,
        min_slope: f64::INFINITY,
        verdict: RadoVerdict::HypothesisNotMet,
    };
    let Some(bs) = boundary_slope(m) else {
        return report;
    };
    if bs.components != 2 || bs.epsilon < epsilon * (1.0 - 1e-12) || !(epsilon > 0.0) {
        return report;
    }
    let (lo, hi) = m.vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v.position.z), hi.max(v.position.z))
    });
    if delta >= 0.5 * (hi - lo) {
        report.verdict = RadoVerdict::Vacuous;
        return report;
    }
    report.min_slope = m
        .vertices
        .iter()
        .zip(slopes)
        .filter(|(v, _)| !v.boundary && v.position.z > lo + delta && v.position.z < hi - delta)
        .map(|(_, &s)| s)
        .fold(f64::INFINITY, f64::min);
    report.verdict = if report.min_slope >= 0.9 * bound {
        RadoVerdict::Pass
    } else {
        RadoVerdict::Fail
    };
    report
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Number of connected arcs in the section of `m` by the plane `z = t`.
pub fn level_set_arcs(m: &TriMesh, t: f64) -> Result<usize> {
    for tri in &m.triangles {
        if tri.iter().all(|&i| (m.vertices[i].position.z - t).abs() <= SECTION_EPS) {
            return Err(Error::DegenerateSection(t));
        }
    }
    let mut t = t;
    for _ in 0..8 {
        if m.vertices.iter().any(|v| v.position.z == t) {
            t += SECTION_EPS;
        }
    }
    let edges = m.edges();
    let index: std::collections::HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let crosses = |&(i, j): &(usize, usize)| {
        let (zi, zj) = (m.vertices[i].position.z, m.vertices[j].position.z);
        (zi - t) * (zj - t) < 0.0
    };
    let mut parent: Vec<usize> = (0..edges.len()).collect();
    for tri in &m.triangles {
        let mut hit = Vec::with_capacity(3);
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let e = (a.min(b), a.max(b));
            if crosses(&e) {
                hit.push(index[&e]);
            }
        }
        for w in hit.windows(2) {
            let (ra, rb) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[ra] = rb;
        }
    }
    let mut roots = std::collections::BTreeSet::new();
    for (k, e) in edges.iter().enumerate() {
        if crosses(e) {
            roots.insert(find(&mut parent, k));
        }
    }
    Ok(roots.len())
}

/// Arc counts at `count` equally spaced heights strictly inside the mesh's
/// height range.
pub fn level_set_survey(m: &TriMesh, count: usize) -> Result<Vec<(f64, usize)>> {
    let (lo, hi) = m.vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v.position.z), hi.max(v.position.z))
    });
    (1..=count)
        .map(|k| {
            let t = lo + (hi - lo) * k as f64 / (count + 1) as f64;
            Ok((t, level_set_arcs(m, t)?))
        })
        .collect()
}
