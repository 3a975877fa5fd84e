use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::TriMesh;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub passed: bool,
    /// Smallest forward difference of z along a chart row.
    pub min_dz: f64,
    /// Chart radius of the row holding `min_dz`.
    pub worst_row: Option<f64>,
    pub rows: usize,
}

/// Checks that z strictly increases with theta along every chart row with
/// `r != 0`.
pub fn theta_monotonicity(m: &TriMesh) -> Result<MonotonicityReport> {
    let mut rows: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
    for (i, v) in m.vertices.iter().enumerate() {
        let c = v.chart.ok_or(Error::MissingChart(i))?;
        if c.r != 0.0 {
            rows.entry(c.r.to_bits()).or_default().push((c.theta, v.position.z));
        }
    }
    let mut report = MonotonicityReport {
        passed: true,
        min_dz: f64::INFINITY,
        worst_row: None,
        rows: rows.len(),
    };
    for (key, row) in &mut rows {
        row.sort_by(|p, q| p.0.total_cmp(&q.0));
        for w in row.windows(2) {
            let dz = w[1].1 - w[0].1;
            if dz < report.min_dz {
                report.min_dz = dz;
                report.worst_row = Some(f64::from_bits(*key));
            }
        }
    }
    report.passed = report.min_dz > 0.0;
    Ok(report)
}

/// True when no two vertices share chart coordinates.
pub fn chart_injective(m: &TriMesh) -> Result<bool> {
    let mut coords = m
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| v.chart.map(|c| (c.r, c.theta)).ok_or(Error::MissingChart(i)))
        .collect::<Result<Vec<_>>>()?;
    coords.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    Ok(coords.windows(2).all(|w| w[0] != w[1]))
}

/// Rectangle in chart coordinates resampled on an `nr x ntheta` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartPatch {
    pub r0: f64,
    pub r1: f64,
    pub theta0: f64,
    pub theta1: f64,
    pub nr: usize,
    pub ntheta: usize,
}

impl ChartPatch {
    fn validate(&self) -> Result<()> {
        if !(self.r0 >= 0.2 && self.r0 < self.r1 && self.theta0 < self.theta1) {
            return Err(Error::ChartNotSingleValued(format!("patch {self:?} must have 0.2 <= r0 < r1")));
        }
        if self.nr < 2 || self.ntheta < 2 {
            return Err(Error::ChartNotSingleValued("patch grid needs at least 2 x 2 cells".into()));
        }
        Ok(())
    }

    fn radius(&self, i: usize) -> f64 {
        self.r0 + (self.r1 - self.r0) * i as f64 / self.nr as f64
    }

    fn angle(&self, j: usize) -> f64 {
        self.theta0 + (self.theta1 - self.theta0) * j as f64 / self.ntheta as f64
    }
}

/// Samples `z(r, theta)` on the patch grid by linear interpolation over the
/// chart triangulation. Fails when a grid point is uncovered or covered by
/// triangles that disagree on z.
pub fn resample_chart(m: &TriMesh, patch: &ChartPatch) -> Result<Vec<Vec<f64>>> {
    patch.validate()?;
    let chart: Vec<(f64, f64)> = m
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| v.chart.map(|c| (c.r, c.theta)).ok_or(Error::MissingChart(i)))
        .collect::<Result<Vec<_>>>()?;
    // bucket triangles by the patch cells their chart bounding box touches
    let (nr, nt) = (patch.nr, patch.ntheta);
    let (hr, ht) = ((patch.r1 - patch.r0) / nr as f64, (patch.theta1 - patch.theta0) / nt as f64);
    let cell = |r: f64, t: f64| {
        let i = ((r - patch.r0) / hr).floor().clamp(-1.0, nr as f64 + 1.0) as i64;
        let j = ((t - patch.theta0) / ht).floor().clamp(-1.0, nt as f64 + 1.0) as i64;
        (i, j)
    };
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); (nr + 1) * (nt + 1)];
    for (t, tri) in m.triangles.iter().enumerate() {
        let cs = tri.map(|v| chart[v]);
        let rmin = cs.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        let rmax = cs.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
        let tmin = cs.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        let tmax = cs.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        let (i0, j0) = cell(rmin, tmin);
        let (i1, j1) = cell(rmax, tmax);
        for i in i0.max(0)..=i1.min(nr as i64) {
            for j in j0.max(0)..=j1.min(nt as i64) {
                buckets[i as usize * (nt + 1) + j as usize].push(t);
            }
        }
    }
    let mut grid = vec![vec![0.0; nt + 1]; nr + 1];
    for (i, row) in grid.iter_mut().enumerate() {
        for (j, out) in row.iter_mut().enumerate() {
            let (r, t) = (patch.radius(i), patch.angle(j));
            let mut found: Option<f64> = None;
            let mut near: Vec<usize> = Vec::new();
            for di in [-1i64, 0] {
                for dj in [-1i64, 0] {
                    let (bi, bj) = (i as i64 + di, j as i64 + dj);
                    if bi >= 0 && bj >= 0 && bi <= nr as i64 && bj <= nt as i64 {
                        near.extend(&buckets[bi as usize * (nt + 1) + bj as usize]);
                    }
                }
            }
            near.sort_unstable();
            near.dedup();
            for &tri in &near {
                let [a, b, c] = m.triangles[tri];
                let (pa, pb, pc) = (chart[a], chart[b], chart[c]);
                let det = (pb.0 - pa.0) * (pc.1 - pa.1) - (pc.0 - pa.0) * (pb.1 - pa.1);
                if det.abs() < 1e-300 {
                    continue;
                }
                let l1 = ((r - pa.0) * (pc.1 - pa.1) - (pc.0 - pa.0) * (t - pa.1)) / det;
                let l2 = ((pb.0 - pa.0) * (t - pa.1) - (r - pa.0) * (pb.1 - pa.1)) / det;
                let l0 = 1.0 - l1 - l2;
                if l0 < -1e-10 || l1 < -1e-10 || l2 < -1e-10 {
                    continue;
                }
                let v = m.vertices.as_slice();
                let z = l0 * v[a].position.z + l1 * v[b].position.z + l2 * v[c].position.z;
                match found {
                    None => found = Some(z),
                    Some(z0) if (z - z0).abs() > 1e-8 * (1.0 + z0.abs()) => {
                        return Err(Error::ChartNotSingleValued(format!(
                            "z = {z0} and z = {z} over chart point ({r}, {t})"
                        )));
                    }
                    Some(_) => {}
                }
            }
            *out = found.ok_or_else(|| {
                Error::ChartNotSingleValued(format!("chart point ({r}, {t}) is not covered by the mesh"))
            })?;
        }
    }
    Ok(grid)
}

/// Residual of the minimal surface equation in divergence form,
/// `(1/r) d_r(r f_r / W) + (1/r^2) d_theta(f_theta / W)`, at every grid node,
/// with flux-conservative central differences. Edge nodes hold zero.
pub fn mse_residual_field(f: &[Vec<f64>], patch: &ChartPatch) -> Vec<Vec<f64>> {
    let (nr, nt) = (patch.nr, patch.ntheta);
    let hr = (patch.r1 - patch.r0) / nr as f64;
    let ht = (patch.theta1 - patch.theta0) / nt as f64;
    let w = |fr: f64, ft: f64, r: f64| (1.0 + fr * fr + ft * ft / (r * r)).sqrt();
    // radial flux between nodes (i, j) and (i + 1, j)
    let flux_r = |i: usize, j: usize| {
        let r = patch.radius(i) + 0.5 * hr;
        let fr = (f[i + 1][j] - f[i][j]) / hr;
        let ft = 0.25 * (f[i][j + 1] - f[i][j - 1] + f[i + 1][j + 1] - f[i + 1][j - 1]) / ht;
        r * fr / w(fr, ft, r)
    };
    // angular flux between nodes (i, j) and (i, j + 1)
    let flux_t = |i: usize, j: usize| {
        let r = patch.radius(i);
        let ft = (f[i][j + 1] - f[i][j]) / ht;
        let fr = 0.25 * (f[i + 1][j] - f[i - 1][j] + f[i + 1][j + 1] - f[i - 1][j + 1]) / hr;
        ft / w(fr, ft, r)
    };
    let mut out = vec![vec![0.0; nt + 1]; nr + 1];
    for i in 1..nr {
        let r = patch.radius(i);
        for j in 1..nt {
            let radial = (flux_r(i, j) - flux_r(i - 1, j)) / (r * hr);
            let angular = (flux_t(i, j) - flux_t(i, j - 1)) / (r * r * ht);
            out[i][j] = radial + angular;
        }
    }
    out
}

/// Largest absolute value of [`mse_residual_field`].
pub fn mse_residual_grid(f: &[Vec<f64>], patch: &ChartPatch) -> f64 {
    mse_residual_field(f, patch)
        .iter()
        .flatten()
        .fold(0.0, |acc, r| acc.max(r.abs()))
}

/// Resamples `m` on the patch and returns the largest divergence-form
/// minimal surface residual.
pub fn mse_residual_patch(m: &TriMesh, patch: &ChartPatch) -> Result<f64> {
    Ok(mse_residual_grid(&resample_chart(m, patch)?, patch))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::f64::consts::{PI, TAU};

    fn analytic(patch: &ChartPatch, f: impl Fn(f64, f64) -> f64) -> Vec<Vec<f64>> {
        (0..=patch.nr)
            .map(|i| (0..=patch.ntheta).map(|j| f(patch.radius(i), patch.angle(j))).collect())
            .collect()
    }

    fn patch(nr: usize, nt: usize) -> ChartPatch {
        ChartPatch {
            r0: 0.25,
            r1: 0.75,
            theta0: 1.0,
            theta1: 3.0,
            nr,
            ntheta: nt,
        }
    }

    #[test]
    fn helicoid_rows_are_monotone() {
        let m = fixtures::helicoid_patch(0.2, 8, 32, 0.0, TAU);
        let rep = theta_monotonicity(&m).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.rows, 8);
        assert!((rep.min_dz - 0.2 * TAU / 32.0).abs() < 1e-12);
        assert!(chart_injective(&m).unwrap());
    }

    #[test]
    fn flat_row_fails() {
        let mut m = fixtures::helicoid_patch(0.2, 4, 16, 0.0, TAU);
        for v in &mut m.vertices {
            if v.chart.unwrap().r == 0.5 {
                v.position.z = 0.0;
            }
        }
        let rep = theta_monotonicity(&m).unwrap();
        assert!(!rep.passed);
        assert_eq!(rep.worst_row, Some(0.5));
    }

    #[test]
    fn missing_chart_is_reported() {
        let m = fixtures::flat_disk(2, 8, 0.0);
        assert!(matches!(theta_monotonicity(&m), Err(Error::MissingChart(0))));
    }

    #[test]
    fn duplicate_chart_is_not_injective() {
        let mut m = fixtures::helicoid_patch(0.2, 4, 16, 0.0, TAU);
        m.vertices[3].chart = m.vertices[9].chart;
        assert!(!chart_injective(&m).unwrap());
    }

    #[test]
    fn flat_ramp_and_helicoid_have_zero_residual() {
        let p = patch(16, 32);
        assert!(mse_residual_grid(&analytic(&p, |_, _| 0.3), &p) < 1e-14);
        assert!(mse_residual_grid(&analytic(&p, |_, t| 0.2 * t), &p) < 1e-12);
    }

    #[test]
    fn sphere_cap_residual_is_about_two_over_radius() {
        let radius = 2.0;
        let p = patch(32, 32);
        let f = analytic(&p, |r, _| radius - (radius * radius - r * r).sqrt());
        let res = mse_residual_grid(&f, &p);
        assert!(res >= 1.0 / radius);
        assert!((res - 2.0 / radius).abs() < 1e-2, "{res}");
    }

    #[test]
    fn catenoid_residual_is_second_order() {
        let c = 0.15;
        let cat = |r: f64, _| c * (r / c).acosh();
        let mut p = patch(16, 8);
        p.r0 = 0.2;
        p.r1 = 1.0;
        let coarse = mse_residual_field(&analytic(&p, cat), &p);
        p.nr = 32;
        let fine = mse_residual_field(&analytic(&p, cat), &p);
        // compare at the nodes both grids share
        for i in 1..16 {
            let ratio = coarse[i][4] / fine[2 * i][4];
            assert!((3.0..5.0).contains(&ratio), "node {i}: ratio {ratio}");
        }
    }

    #[test]
    fn resampled_helicoid_is_exact() {
        let lambda = 0.2;
        let m = fixtures::helicoid_patch(lambda, 16, 96, 0.0, TAU);
        let p = patch(10, 20);
        let grid = resample_chart(&m, &p).unwrap();
        for row in &grid {
            for (j, z) in row.iter().enumerate() {
                assert!((z - lambda * p.angle(j)).abs() < 1e-12);
            }
        }
        assert!(mse_residual_patch(&m, &p).unwrap() < 1e-10);
    }

    #[test]
    fn bad_patches_are_rejected() {
        let m = fixtures::helicoid_patch(0.2, 8, 32, 0.0, TAU);
        let mut p = patch(8, 8);
        p.r0 = 0.1;
        assert!(matches!(mse_residual_patch(&m, &p), Err(Error::ChartNotSingleValued(_))));
        let mut p = patch(8, 8);
        p.theta1 = 3.0 * PI;
        assert!(matches!(mse_residual_patch(&m, &p), Err(Error::ChartNotSingleValued(_))));
    }

    #[test]
    fn overlapping_charts_are_rejected() {
        let a = fixtures::helicoid_patch(0.2, 8, 32, 0.0, TAU);
        let mut b = fixtures::helicoid_patch(0.2, 8, 32, 0.0, TAU);
        for v in &mut b.vertices {
            v.position.z += 1.0;
        }
        let offset = a.vertices.len();
        let mut m = a.clone();
        m.vertices.extend(b.vertices.iter().cloned());
        m.triangles.extend(b.triangles.iter().map(|t| t.map(|v| v + offset)));
        assert!(m.vertices.iter().all(|v| v.chart.is_some()));
        assert!(matches!(mse_residual_patch(&m, &patch(8, 8)), Err(Error::ChartNotSingleValued(_))));
    }
}
