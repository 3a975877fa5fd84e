//! Winding profiles and the closed spanning curve.
//!
//! The helix-like curve on the unit cylinder is `z -> (cos t(z), sin t(z), z)`
//! with winding rate
//!
//! ```text
//! t'(z) = lambda0 + min(n, 1 / (dist(z, K) + 1/n))
//! ```
//!
//! frozen to its collar-edge value within `collar * (b - a)` of either end,
//! so every derivative of order two and up of `t` vanishes at the endpoints.
//! The spanning curve is the helix, the axis segment between the same
//! heights, and the two radial segments joining them at `z = a` and `z = b`.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point3, Role};
use crate::kset::ClosedSetSpec;

pub const MAX_HELIX_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundaryParams {
    /// Base winding rate in radians per unit height.
    pub lambda0: f64,
    /// Width of each end collar as a fraction of the height range.
    pub collar: f64,
    /// Largest angle between consecutive helix samples.
    pub theta_step_max: f64,
    /// The height step is capped at `(b - a) / z_divisions`.
    pub z_divisions: usize,
}

impl Default for BoundaryParams {
    fn default() -> Self {
        BoundaryParams {
            lambda0: 2.0 * PI,
            collar: 0.05,
            theta_step_max: PI / 24.0,
            z_divisions: 64,
        }
    }
}

/// Monotone angle function `t(z)` on `[a, b]`, tabulated for fast evaluation.
#[derive(Debug, Clone)]
pub struct WindingProfile {
    n: u32,
    lambda0: f64,
    collar: f64,
    kset: ClosedSetSpec,
    range: (f64, f64),
    // table nodes: height, angle, rate
    nodes: Vec<(f64, f64, f64)>,
}

/// Rate formula without the collar freeze.
fn raw_rate(z: f64, n: u32, lambda0: f64, kset: &ClosedSetSpec) -> f64 {
    let n = n as f64;
    lambda0 + n.min(1.0 / (kset.distance(z) + 1.0 / n))
}

/// Adaptive Simpson quadrature on `[a, b]` to absolute tolerance `tol`.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 48)
}

fn hermite(z0: f64, z1: f64, y0: f64, y1: f64, d0: f64, d1: f64, z: f64) -> f64 {
    let h = z1 - z0;
    let s = (z - z0) / h;
    let (s2, s3) = (s * s, s * s * s);
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * h * d1
}

/// Fritsch-Carlson limiter: scales the end slopes so the cubic stays monotone.
fn limited_slopes(h: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> (f64, f64) {
    let secant = (y1 - y0) / h;
    if secant <= 0.0 {
        return (0.0, 0.0);
    }
    let (a, b) = (d0 / secant, d1 / secant);
    let s = a * a + b * b;
    if s > 9.0 {
        let tau = 3.0 / s.sqrt();
        (tau * d0, tau * d1)
    } else {
        (d0, d1)
    }
}

impl WindingProfile {
    pub fn new(n: u32, params: &BoundaryParams, kset: ClosedSetSpec) -> Result<Self> {
        if n == 0 {
            return Err(Error::Boundary("winding scale n must be positive".into()));
        }
        if !(params.lambda0 > 0.0) {
            return Err(Error::Boundary("base rate lambda0 must be positive".into()));
        }
        if !(0.0..0.5).contains(&params.collar) {
            return Err(Error::Boundary("collar fraction must lie in [0, 0.5)".into()));
        }
        let range = kset.range();
        let mut p = WindingProfile {
            n,
            lambda0: params.lambda0,
            collar: params.collar,
            kset,
            range,
            nodes: Vec::new(),
        };
        p.tabulate();
        Ok(p)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn kset(&self) -> &ClosedSetSpec {
        &self.kset
    }

    /// Truncation range `[a, b]`.
    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    fn collar_edges(&self) -> (f64, f64) {
        let (a, b) = self.range;
        let w = self.collar * (b - a);
        (a + w, b - w)
    }

    /// Heights where the rate has a kink.
    fn breakpoints(&self) -> Vec<f64> {
        let (a, b) = self.range;
        let (lo, hi) = self.collar_edges();
        let mut pts = vec![a, lo, hi, b];
        let pieces = self.kset.pieces();
        for &(l, u) in pieces {
            pts.extend([l, u]);
        }
        for w in pieces.windows(2) {
            pts.push(0.5 * (w[0].1 + w[1].0));
        }
        // where 1/(d + 1/n) meets n only at d = 0, so no extra kinks
        pts.retain(|&z| (lo..=hi).contains(&z) || z == a || z == b);
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + y.abs()));
        pts
    }

    /// Winding rate `t'(z)` in radians per unit height; strictly positive.
    pub fn winding_rate(&self, z: f64) -> f64 {
        let (lo, hi) = self.collar_edges();
        raw_rate(z.clamp(lo, hi), self.n, self.lambda0, &self.kset)
    }

    fn tabulate(&mut self) {
        let f = |z: f64| self.winding_rate(z);
        let bps = self.breakpoints();
        let mut nodes = vec![(bps[0], 0.0, f(bps[0]))];
        let scale = adaptive_simpson(&f, bps[0], *bps.last().unwrap(), 1e-13);
        let tol = 1e-12 * (1.0 + scale);
        for w in bps.windows(2) {
            let mut stack = vec![(w[0], w[1])];
            // depth-first over cells, left to right
            while let Some((z0, z1)) = stack.pop() {
                let &(_, t0, d0) = nodes.last().unwrap();
                let t1 = t0 + adaptive_simpson(&f, z0, z1, tol * (z1 - z0));
                let d1 = f(z1);
                let zm = 0.5 * (z0 + z1);
                let tm = t0 + adaptive_simpson(&f, z0, zm, tol * (zm - z0));
                let (e0, e1) = limited_slopes(z1 - z0, t0, t1, d0, d1);
                let guess = hermite(z0, z1, t0, t1, e0, e1, zm);
                if (guess - tm).abs() > 1e-11 * (1.0 + tm.abs()) && z1 - z0 > 1e-9 {
                    stack.push((zm, z1));
                    stack.push((z0, zm));
                } else {
                    nodes.push((z1, t1, d1));
                }
            }
        }
        self.nodes = nodes;
    }

    /// Unwrapped angle `t(z)` with `t(a) = 0`.
    pub fn winding_angle(&self, z: f64) -> f64 {
        let nodes = &self.nodes;
        let z = z.clamp(self.range.0, self.range.1);
        let k = nodes.partition_point(|n| n.0 < z).clamp(1, nodes.len() - 1);
        let (z0, t0, d0) = nodes[k - 1];
        let (z1, t1, d1) = nodes[k];
        let (e0, e1) = limited_slopes(z1 - z0, t0, t1, d0, d1);
        hermite(z0, z1, t0, t1, e0, e1, z)
    }

    /// Total winding `t(b) - t(a)`.
    pub fn total_winding(&self) -> f64 {
        self.nodes.last().unwrap().1
    }

    /// Number of table nodes (diagnostics).
    pub fn table_len(&self) -> usize {
        self.nodes.len()
    }

    /// Helix samples with adaptive height spacing: consecutive samples
    /// differ by at most `theta_step_max` in angle and `(b - a) / z_divisions`
    /// in height.
    pub fn sample_gamma(&self, theta_step_max: f64, z_divisions: usize) -> Result<Vec<HelixSample>> {
        if !(theta_step_max > 0.0) || z_divisions == 0 {
            return Err(Error::Boundary("sampling steps must be positive".into()));
        }
        let (a, b) = self.range;
        let min_density = z_divisions as f64 / (b - a);
        // sample density in "steps per unit height"
        let density = |z: f64| (self.winding_rate(z) / theta_step_max).max(min_density);
        let bps = self.breakpoints();
        let mut cum = vec![(a, 0.0)];
        for w in bps.windows(2) {
            // fine cells so that linear inversion of the cumulative count is accurate
            let cells = 64;
            for c in 1..=cells {
                let z0 = cum.last().unwrap().0;
                let z1 = w[0] + (w[1] - w[0]) * c as f64 / cells as f64;
                let s = adaptive_simpson(&density, z0, z1, 1e-12);
                let prev = cum.last().unwrap().1;
                cum.push((z1, prev + s));
            }
        }
        let total = cum.last().unwrap().1;
        let steps = ((total * (1.0 - 1e-12)).ceil() as usize).max(1);
        if steps + 1 > MAX_HELIX_SAMPLES {
            return Err(Error::SampleCap {
                what: "helix",
                count: steps + 1,
                cap: MAX_HELIX_SAMPLES,
            });
        }
        let mut zs = Vec::with_capacity(steps + 1);
        zs.push(a);
        let mut cell = 1;
        for k in 1..steps {
            let target = total * k as f64 / steps as f64;
            while cum[cell].1 < target {
                cell += 1;
            }
            let (z0, s0) = cum[cell - 1];
            let (z1, s1) = cum[cell];
            // Newton-bisection on the cumulative count within the cell
            let (mut lo, mut hi) = (z0, z1);
            let mut z = z0 + (z1 - z0) * (target - s0) / (s1 - s0);
            for _ in 0..60 {
                let s = s0 + adaptive_simpson(&density, z0, z, 1e-13);
                if (s - target).abs() < 1e-12 {
                    break;
                }
                if s < target {
                    lo = z;
                } else {
                    hi = z;
                }
                let newton = z - (s - target) / density(z);
                z = if newton > lo && newton < hi {
                    newton
                } else {
                    0.5 * (lo + hi)
                };
            }
            zs.push(z);
        }
        zs.push(b);
        Ok(zs
            .into_iter()
            .map(|z| {
                let theta = self.winding_angle(z);
                HelixSample {
                    position: Point3::new(theta.cos(), theta.sin(), z),
                    theta,
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelixSample {
    pub position: Point3,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopPoint {
    pub position: Point3,
    pub role: Role,
    pub theta: f64,
}

/// Closed polyline: helix ascending, radial-top inward, axis descending,
/// radial-bottom outward, and the first point repeated at the end.
#[derive(Debug, Clone)]
pub struct BoundaryLoop {
    pub points: Vec<LoopPoint>,
    pub helix_count: usize,
    pub radial_divisions: usize,
    pub profile: Option<Arc<WindingProfile>>,
}

/// Assembles the spanning curve from ascending helix samples. The radial
/// segments are split into `radial_divisions` equal pieces; the axis gets
/// one sample per helix sample at the same height.
pub fn assemble_boundary(
    samples: &[HelixSample],
    a: f64,
    b: f64,
    radial_divisions: usize,
) -> Result<BoundaryLoop> {
    let m = samples.len();
    if m < 2 {
        return Err(Error::Boundary("need at least two helix samples".into()));
    }
    if radial_divisions < 1 {
        return Err(Error::Boundary("radial segments need at least one division".into()));
    }
    if samples.windows(2).any(|w| !(w[1].position.z > w[0].position.z)) {
        return Err(Error::Boundary("helix samples must be strictly increasing in z".into()));
    }
    let (first, last) = (samples[0], samples[m - 1]);
    if (first.position.z - a).abs() > 1e-9 || (last.position.z - b).abs() > 1e-9 {
        return Err(Error::Boundary(format!(
            "helix samples span [{}, {}], expected [{a}, {b}]",
            first.position.z, last.position.z
        )));
    }
    let nr = radial_divisions as f64;
    let mut points = Vec::with_capacity(2 * m + 2 * radial_divisions);
    points.extend(samples.iter().map(|s| LoopPoint {
        position: s.position,
        role: Role::Helix,
        theta: s.theta,
    }));
    let top = last.theta;
    for i in (1..radial_divisions).rev() {
        let r = i as f64 / nr;
        points.push(LoopPoint {
            position: Point3::new(r * top.cos(), r * top.sin(), b),
            role: Role::RadialTop,
            theta: top,
        });
    }
    points.extend(samples.iter().rev().map(|s| LoopPoint {
        position: Point3::new(0.0, 0.0, s.position.z),
        role: Role::Axis,
        theta: s.theta,
    }));
    let bottom = first.theta;
    for i in 1..radial_divisions {
        let r = i as f64 / nr;
        points.push(LoopPoint {
            position: Point3::new(r * bottom.cos(), r * bottom.sin(), a),
            role: Role::RadialBottom,
            theta: bottom,
        });
    }
    // closing edge runs from the last radial-bottom sample to the first helix sample
    let tail = points.last().unwrap().position;
    let step = (first.position - tail).norm();
    if step > 1.0 / nr + 1e-9 {
        return Err(Error::Boundary(format!("closure gap {step} too large")));
    }
    points.push(points[0]);
    let gap = (points[0].position - points.last().unwrap().position).norm();
    if gap > 1e-9 {
        return Err(Error::Boundary(format!("open loop, closure gap {gap}")));
    }
    Ok(BoundaryLoop {
        points,
        helix_count: m,
        radial_divisions,
        profile: None,
    })
}

impl BoundaryLoop {
    /// Profile, sampling and assembly in one step.
    pub fn from_profile(
        profile: Arc<WindingProfile>,
        params: &BoundaryParams,
        radial_divisions: usize,
    ) -> Result<Self> {
        let samples = profile.sample_gamma(params.theta_step_max, params.z_divisions)?;
        let (a, b) = profile.range();
        let mut lp = assemble_boundary(&samples, a, b, radial_divisions)?;
        lp.profile = Some(profile);
        Ok(lp)
    }

    pub fn helix(&self) -> &[LoopPoint] {
        &self.points[..self.helix_count]
    }

    /// Axis samples in ascending height.
    pub fn axis(&self) -> Vec<LoopPoint> {
        let start = self.helix_count + self.radial_divisions - 1;
        let mut axis = self.points[start..start + self.helix_count].to_vec();
        axis.reverse();
        axis
    }

    pub fn length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].position - w[0].position).norm())
            .sum()
    }

    /// CSV with columns `s, x, y, z, role, theta_unwrapped`, where `s` is
    /// the cumulative arclength.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["s", "x", "y", "z", "role", "theta_unwrapped"])
            .expect("in-memory write");
        let mut s = 0.0;
        for (k, p) in self.points.iter().enumerate() {
            if k > 0 {
                s += (p.position - self.points[k - 1].position).norm();
            }
            let q = p.position;
            w.write_record([
                s.to_string(),
                q.x.to_string(),
                q.y.to_string(),
                q.z.to_string(),
                p.role.to_string(),
                p.theta.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
    }

    pub fn to_obj(&self) -> String {
        let pts: Vec<Point3> = self.points[..self.points.len() - 1]
            .iter()
            .map(|p| p.position)
            .collect();
        let mut s = crate::geom::io::polyline_obj_string(&pts);
        // close the polyline back to the first vertex
        s.pop();
        s.push_str(" 1\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kset::Members;
    use proptest::prelude::*;

    fn point_k(range: (f64, f64)) -> ClosedSetSpec {
        ClosedSetSpec::new(Members::Points { z: vec![0.0] }, range).unwrap()
    }

    fn profile(n: u32, kset: ClosedSetSpec) -> WindingProfile {
        WindingProfile::new(n, &BoundaryParams::default(), kset).unwrap()
    }

    #[test]
    fn rate_examples() {
        let empty = profile(8, ClosedSetSpec::empty((-1.0, 1.0)).unwrap());
        assert_eq!(empty.winding_rate(0.3), 2.0 * PI);
        let p = profile(8, point_k((-1.0, 1.0)));
        assert!((p.winding_rate(0.0) - (2.0 * PI + 8.0)).abs() < 1e-12);
        let expected = 2.0 * PI + 8.0 / 3.0;
        assert!((p.winding_rate(0.25) - expected).abs() < 1e-12);
        assert!((expected - 8.9499).abs() < 1e-4);
    }

    #[test]
    fn collar_freezes_rate() {
        let p = profile(8, point_k((-0.5, 0.5)));
        let edge = p.winding_rate(-0.45);
        for k in 0..=10 {
            let z = -0.5 + 0.05 * k as f64 / 10.0;
            assert_eq!(p.winding_rate(z), edge);
            assert_eq!(p.winding_rate(-z), edge);
        }
        assert!(p.winding_rate(-0.44) > edge);
    }

    #[test]
    fn constant_rate_angle_is_linear() {
        let p = profile(3, ClosedSetSpec::empty((0.0, 1.0)).unwrap());
        for k in 0..=20 {
            let z = k as f64 / 20.0;
            assert!((p.winding_angle(z) - 2.0 * PI * z).abs() < 1e-12);
        }
    }

    /// Dense trapezoid rule, independent of the adaptive table.
    fn trapezoid_total(p: &WindingProfile, cells: usize) -> f64 {
        let (a, b) = p.range();
        let h = (b - a) / cells as f64;
        let mut s = 0.5 * (p.winding_rate(a) + p.winding_rate(b));
        for i in 1..cells {
            s += p.winding_rate(a + h * i as f64);
        }
        s * h
    }

    #[test]
    fn total_winding_matches_trapezoid_oracle() {
        for (n, k) in [
            (8, point_k((-0.5, 0.5))),
            (32, point_k((-0.5, 0.5))),
            (
                16,
                ClosedSetSpec::new(
                    Members::Cantor {
                        base: (-0.3, 0.3),
                        depth: 2,
                    },
                    (-0.5, 0.5),
                )
                .unwrap(),
            ),
        ] {
            let p = profile(n, k);
            let oracle = trapezoid_total(&p, 2_000_000);
            let rel = (p.total_winding() - oracle).abs() / oracle;
            assert!(rel < 1e-8, "n={n}: table {} oracle {oracle} rel {rel}", p.total_winding());
            let end = p.winding_angle(0.5) - p.winding_angle(-0.5);
            assert!((end - oracle).abs() / oracle < 1e-8);
        }
    }

    #[test]
    fn interior_point_angles_match_quadrature() {
        let p = profile(16, point_k((-0.5, 0.5)));
        for &z in &[-0.31, -0.02, 0.0, 0.004, 0.17, 0.44] {
            let direct = adaptive_simpson(&|x| p.winding_rate(x), -0.5, z, 1e-14);
            assert!((p.winding_angle(z) - direct).abs() < 1e-9 * (1.0 + direct));
        }
    }

    #[test]
    fn constant_rate_sampling_is_uniform() {
        let p = profile(1, ClosedSetSpec::empty((0.0, 1.0)).unwrap());
        let s = p.sample_gamma(PI / 2.0, 64).unwrap();
        assert!(s.len() >= 5);
        // the height cap dominates here: 64 uniform steps
        assert_eq!(s.len(), 65);
        for w in s.windows(2) {
            assert!((w[1].position.z - w[0].position.z - 1.0 / 64.0).abs() < 1e-9);
        }
        for q in &s {
            assert!((q.position.x.hypot(q.position.y) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sample_steps_respect_caps() {
        let p = profile(32, point_k((-0.5, 0.5)));
        let step = PI / 24.0;
        let s = p.sample_gamma(step, 64).unwrap();
        for w in s.windows(2) {
            assert!(w[1].theta - w[0].theta > 0.0);
            assert!(w[1].theta - w[0].theta <= step * (1.0 + 1e-6));
            assert!(w[1].position.z - w[0].position.z <= (1.0 / 64.0) * (1.0 + 1e-6));
        }
    }

    #[test]
    fn sample_density_follows_rate() {
        let p = profile(16, point_k((-0.5, 0.5)));
        let s = p.sample_gamma(PI / 24.0, 64).unwrap();
        let count = |lo: f64, hi: f64| s.iter().filter(|q| q.position.z >= lo && q.position.z < hi).count() as f64;
        let w = 0.02;
        let near = count(-w, w);
        let far = 0.5 * (count(0.4 - w, 0.4 + w) + count(-0.4 - w, -0.4 + w));
        let rate_ratio = adaptive_simpson(&|z| p.winding_rate(z), -w, w, 1e-12)
            / adaptive_simpson(&|z| p.winding_rate(z), 0.4 - w, 0.4 + w, 1e-12);
        let observed = near / far;
        assert!(observed > rate_ratio / 2.0 && observed < rate_ratio * 2.0, "{observed} vs {rate_ratio}");
    }

    #[test]
    fn sample_cap_is_enforced() {
        let params = BoundaryParams {
            theta_step_max: 1e-7,
            ..BoundaryParams::default()
        };
        let p = WindingProfile::new(1, &params, ClosedSetSpec::empty((0.0, 1.0)).unwrap()).unwrap();
        assert!(matches!(p.sample_gamma(1e-7, 64), Err(Error::SampleCap { .. })));
    }

    #[test]
    fn loop_is_closed_and_tagged() {
        let p = Arc::new(profile(1, ClosedSetSpec::empty((0.0, 1.0)).unwrap()));
        let lp = BoundaryLoop::from_profile(p, &BoundaryParams::default(), 16).unwrap();
        assert_eq!(lp.points.first().unwrap().position, lp.points.last().unwrap().position);
        let m = lp.helix_count;
        let count = |r: Role| lp.points[..lp.points.len() - 1].iter().filter(|q| q.role == r).count();
        assert_eq!(count(Role::Helix), m);
        assert_eq!(count(Role::Axis), m);
        assert_eq!(count(Role::RadialTop), 15);
        assert_eq!(count(Role::RadialBottom), 15);
        assert_eq!(lp.points.len() - 1, 2 * m + 30);
        for q in &lp.points {
            let r = q.position.x.hypot(q.position.y);
            match q.role {
                Role::Helix => assert!((r - 1.0).abs() < 1e-12),
                Role::Axis => assert_eq!(r, 0.0),
                Role::RadialTop => assert_eq!(q.position.z, 1.0),
                Role::RadialBottom => assert_eq!(q.position.z, 0.0),
                Role::Interior => unreachable!(),
            }
        }
    }

    #[test]
    fn loop_length_matches_helix_arclength() {
        // closed form: helix sqrt(1 + 4 pi^2), two unit radials, unit axis
        let exact = (1.0 + 4.0 * PI * PI).sqrt() + 3.0;
        assert!((exact - 9.3623).abs() < 1e-4);
        let fine = BoundaryParams {
            theta_step_max: PI / 720.0,
            ..BoundaryParams::default()
        };
        let p = Arc::new(WindingProfile::new(1, &fine, ClosedSetSpec::empty((0.0, 1.0)).unwrap()).unwrap());
        let lp = BoundaryLoop::from_profile(p.clone(), &fine, 16).unwrap();
        assert!((lp.length() - exact).abs() / exact < 1e-5);
        let coarse = BoundaryLoop::from_profile(p, &BoundaryParams::default(), 16).unwrap();
        assert!((coarse.length() - exact).abs() / exact < 1e-3);
    }

    #[test]
    fn assemble_rejects_bad_samples() {
        let s = |z: f64| HelixSample {
            position: Point3::new(1.0, 0.0, z),
            theta: 0.0,
        };
        assert!(assemble_boundary(&[s(0.0), s(0.5)], 0.0, 1.0, 4).is_err());
        assert!(assemble_boundary(&[s(0.0), s(0.6), s(0.5), s(1.0)], 0.0, 1.0, 4).is_err());
        assert!(assemble_boundary(&[s(0.0), s(1.0)], 0.0, 1.0, 4).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn rate_is_positive_and_bounded(n in 1u32..64, z in -0.5..0.5f64) {
            let p = profile(n, point_k((-0.5, 0.5)));
            let r = p.winding_rate(z);
            prop_assert!(r > 0.0);
            prop_assert!(r <= p.lambda0() + n as f64 + 1e-12);
        }

        #[test]
        fn angle_is_increasing(z1 in -0.5..0.5f64, z2 in -0.5..0.5f64, n in 1u32..40) {
            prop_assume!((z1 - z2).abs() > 1e-9);
            let p = profile(n, point_k((-0.5, 0.5)));
            let (lo, hi) = if z1 < z2 { (z1, z2) } else { (z2, z1) };
            prop_assert!(p.winding_angle(hi) > p.winding_angle(lo));
        }

        #[test]
        fn rate_grows_with_n_off_k(z in 0.01..0.44f64, n in 1u32..200) {
            let kset = point_k((-0.5, 0.5));
            let lo = WindingProfile::new(n, &BoundaryParams::default(), kset.clone()).unwrap().winding_rate(z);
            let hi = WindingProfile::new(n + 1, &BoundaryParams::default(), kset).unwrap().winding_rate(z);
            prop_assert!(hi >= lo);
            prop_assert!(hi <= 2.0 * PI + 1.0 / z + 1e-12);
        }
    }
}
