//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;
use std::time::{Duration, Instant};

use lamlab_core::analysis::{growth_ratio, Pass, Verdict};
use lamlab_core::fixtures::{helicoid_abs_a, helicoid_area_per_radian, helicoid_distance};
use lamlab_core::geom::{radius, Point3, TriMesh};
use lamlab_core::harness::{emit_outputs, run_sequence, ExperimentConfig, Preset, RunOutcome};
use lamlab_core::plateau::mean_curvature_normalized;
use lamlab_core::reflect::{axis_double, schwarz_extend};
use lamlab_core::Isometry;

struct Check {
    id: u8,
    name: &'static str,
    pass: bool,
    detail: String,
}

struct Timed {
    outcome: RunOutcome,
    elapsed: Duration,
}

fn timed(cfg: &ExperimentConfig) -> Timed {
    let start = Instant::now();
    let outcome = run_sequence(cfg).expect("preset configs are valid");
    Timed {
        outcome,
        elapsed: start.elapsed(),
    }
}

fn converged<'a>(runs: &[&'a Timed]) -> Vec<(String, &'a lamlab_core::harness::NResult)> {
    runs.iter()
        .flat_map(|t| {
            let label = t.outcome.config.kset.clone();
            t.outcome
                .results
                .iter()
                .filter(|r| r.converged())
                .map(move |r| (format!("{}/n={}", kind(&label), r.n), r))
        })
        .collect()
}

fn kind(m: &lamlab_core::Members) -> &'static str {
    match m {
        lamlab_core::Members::Points { z } if z.is_empty() => "empty",
        lamlab_core::Members::Points { .. } => "points",
        lamlab_core::Members::Intervals { .. } => "intervals",
        lamlab_core::Members::Cantor { .. } => "cantor",
    }
}

fn all_solves(runs: &[&Timed]) -> usize {
    runs.iter().map(|t| t.outcome.results.len()).sum()
}

/// Every converged solve has `pass` at verdict `Pass`; names the offenders.
fn pass_on_all(runs: &[&Timed], pass: Pass) -> (bool, String) {
    let solves = converged(runs);
    let bad: Vec<String> = solves
        .iter()
        .filter(|(_, r)| r.report.as_ref().and_then(|rep| rep.summary.verdicts.get(&pass)) != Some(&Verdict::Pass))
        .map(|(l, _)| l.clone())
        .collect();
    let ok = bad.is_empty() && solves.len() == all_solves(runs);
    (ok, format!("{}/{} solves converged, failing: {:?}", solves.len(), all_solves(runs), bad))
}

fn helicoid_oracle(h: &Timed) -> Check {
    let r = &h.outcome.results[0];
    let lambda = 1.0 / TAU;
    let (Some(m), Some(rep)) = (&r.mesh, &r.report) else {
        return Check { id: 1, name: "helicoid oracle", pass: false, detail: format!("no mesh: {:?}", r.error) };
    };
    let max_dist = m.vertices.iter().map(|v| helicoid_distance(lambda, &v.position)).fold(0.0, f64::max);
    let exact_area = helicoid_area_per_radian(lambda) * TAU;
    let area_err = (m.area() - exact_area).abs() / exact_area;
    let mut worst_a: f64 = 0.0;
    for (v, k) in m.vertices.iter().zip(&rep.abs_a) {
        if !v.boundary {
            let e = helicoid_abs_a(lambda, radius(&v.position));
            worst_a = worst_a.max((k - e).abs() / e);
        }
    }
    let pass = r.converged() && max_dist <= 1e-2 && area_err <= 0.01 && worst_a <= 0.1 && h.elapsed.as_secs_f64() <= 60.0;
    Check {
        id: 1,
        name: "helicoid oracle",
        pass,
        detail: format!(
            "max distance {max_dist:.2e} (<= 1e-2), area error {:.3}% (<= 1%), worst |A| error {:.1}% (<= 10%), {:.1} s",
            100.0 * area_err,
            100.0 * worst_a,
            h.elapsed.as_secs_f64()
        ),
    }
}

fn rado(h: &Timed, p: &Timed) -> Check {
    let mut lines = Vec::new();
    let mut pass = true;
    for t in [h, p] {
        for r in &t.outcome.results {
            let Some(rado) = r.report.as_ref().and_then(|rep| rep.summary.rado.clone()) else {
                pass = false;
                lines.push(format!("n={} missing", r.n));
                continue;
            };
            pass &= r.converged() && rado.verdict == lamlab_core::analysis::RadoVerdict::Pass && rado.delta == 0.1;
            lines.push(format!("n={} min {:.4} vs bound {:.4}", r.n, rado.min_slope, rado.bound));
        }
    }
    Check { id: 2, name: "rado slope", pass, detail: lines.join("; ") }
}

fn blowup(p: &Timed, c: &Timed) -> Check {
    let Some(pb) = &p.outcome.summary.blowup else {
        return Check { id: 6, name: "blow-up localization", pass: false, detail: "no blow-up table".into() };
    };
    let near = &pb.samples[0].kappa_near;
    let values: Vec<f64> = near.iter().flatten().copied().collect();
    let growth = growth_ratio(near).unwrap_or(0.0);
    let drops: Vec<f64> = values.windows(2).filter(|w| w[1] < w[0]).map(|w| 1.0 - w[1] / w[0]).collect();
    let monotone = drops.len() <= 1 && drops.iter().all(|&d| d <= 0.1);
    let far_ok = pb.far_ratios.iter().all(|&r| r <= 1.5) && pb.far_ratios.len() == p.outcome.results.len() - 1;
    let contrast = c.outcome.summary.blowup.as_ref().and_then(|b| b.gap_contrast);
    let samples = c.outcome.summary.blowup.as_ref().map_or(0, |b| b.samples.len());
    let runtime = (p.elapsed + c.elapsed).as_secs_f64();
    let pass = values.len() == 4
        && growth >= 4.0
        && monotone
        && far_ok
        && samples == 8
        && contrast.is_some_and(|g| g >= 3.0)
        && runtime <= 600.0;
    Check {
        id: 6,
        name: "blow-up localization",
        pass,
        detail: format!(
            "near(0) {values:.2?} growth {growth:.2} (>= 4), monotone {monotone}, far ratios {:.2?} (<= 1.5), cantor contrast {} (>= 3), {runtime:.0} s",
            pb.far_ratios,
            contrast.map_or("-".into(), |g| format!("{g:.2}")),
        ),
    }
}

/// Distance from `q` to the segment `a b`.
fn segment_distance(q: &Point3, a: &Point3, b: &Point3) -> f64 {
    let d = b - a;
    let t = ((q - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
    (q - (a + d * t)).norm()
}

/// Source vertex of every vertex of `ext` under one of `isos`, matched within `tol`.
fn sources(base: &TriMesh, ext: &TriMesh, isos: &[Isometry], tol: f64) -> Option<Vec<usize>> {
    ext.vertices
        .iter()
        .map(|v| {
            isos.iter().find_map(|iso| {
                let q = iso.apply(&v.position);
                base.vertices.iter().position(|b| (b.position - q).norm() <= tol)
            })
        })
        .collect()
}

fn reflection(h: &Timed) -> Check {
    let r = &h.outcome.results[0];
    let Some(m) = &r.mesh else {
        return Check { id: 8, name: "reflection fidelity", pass: false, detail: "no mesh".into() };
    };
    let lambda = 1.0 / TAU;
    let hscale = m.edge_scale();
    let base_res = mean_curvature_normalized(m);
    let max_interior = |vals: &[f64], keep: &dyn Fn(usize) -> bool| {
        vals.iter().enumerate().filter(|(i, v)| v.is_finite() && keep(*i)).map(|(_, v)| *v).fold(0.0, f64::max)
    };
    let base_max = max_interior(&base_res, &|_| true);
    let mut detail = Vec::new();
    let mut pass = true;

    // Schwarz extension across the two radial segments
    let top = m.boundary_chain(lamlab_core::Role::RadialTop).unwrap();
    let bottom = m.boundary_chain(lamlab_core::Role::RadialBottom).unwrap();
    let ends = |c: &lamlab_core::geom::BoundaryChain| {
        (m.vertices[c.vertices[0]].position, m.vertices[*c.vertices.last().unwrap()].position)
    };
    let (t0, t1) = ends(&top);
    let (b0, b1) = ends(&bottom);
    match schwarz_extend(m, 1) {
        Ok(ext) => {
            let nr = h.outcome.config.radial_divisions;
            let expected = 3 * m.vertices.len() - 2 * (nr + 1);
            let isos = [
                Isometry::RotateAboutZ(0.0),
                Isometry::half_turn(t0, t1 - t0),
                Isometry::half_turn(b0, b1 - b0),
            ];
            let src = sources(m, &ext, &isos, 1e-9);
            let dist_err = src.as_ref().map(|s| {
                ext.vertices
                    .iter()
                    .zip(s)
                    .map(|(v, &i)| {
                        (helicoid_distance(lambda, &v.position) - helicoid_distance(lambda, &m.vertices[i].position)).abs()
                    })
                    .fold(0.0, f64::max)
            });
            let res = mean_curvature_normalized(&ext);
            let far = |i: usize| {
                let q = ext.vertices[i].position;
                segment_distance(&q, &t0, &t1) > 2.0 * hscale && segment_distance(&q, &b0, &b1) > 2.0 * hscale
            };
            let away = max_interior(&res, &far);
            let weld = max_interior(&res, &|i| !far(i));
            let ok = ext.vertices.len() == expected && dist_err.is_some_and(|e| e <= 1e-9) && away < 1e-3;
            pass &= ok;
            detail.push(format!(
                "extend: V {} (expect {expected}), helicoid-distance drift {}, residual away {away:.2e} (< 1e-3; input {base_max:.2e}), at welds {weld:.2e}",
                ext.vertices.len(),
                dist_err.map_or("unmatched".into(), |e| format!("{e:.1e}")),
            ));
        }
        Err(e) => {
            pass = false;
            detail.push(format!("extend failed: {e}"));
        }
    }

    match axis_double(m) {
        Ok(dbl) => {
            let axis = m.vertices.iter().filter(|v| radius(&v.position) == 0.0).count();
            let expected = 2 * m.vertices.len() - axis;
            let isos = [Isometry::RotateAboutZ(0.0), Isometry::RotateAboutZ(std::f64::consts::PI)];
            let src = sources(m, &dbl, &isos, 1e-9);
            let dist_err = src.as_ref().map(|s| {
                dbl.vertices
                    .iter()
                    .zip(s)
                    .map(|(v, &i)| {
                        (helicoid_distance(lambda, &v.position) - helicoid_distance(lambda, &m.vertices[i].position)).abs()
                    })
                    .fold(0.0, f64::max)
            });
            let res = mean_curvature_normalized(&dbl);
            let far = |i: usize| radius(&dbl.vertices[i].position) > 2.0 * hscale;
            let away = max_interior(&res, &far);
            let weld = max_interior(&res, &|i| !far(i));
            let ok = dbl.vertices.len() == expected && dist_err.is_some_and(|e| e <= 1e-9) && away < 1e-3;
            pass &= ok;
            detail.push(format!(
                "double: V {} (expect {expected}), helicoid-distance drift {}, residual away {away:.2e} (< 1e-3), at axis {weld:.2e}",
                dbl.vertices.len(),
                dist_err.map_or("unmatched".into(), |e| format!("{e:.1e}")),
            ));
        }
        Err(e) => {
            pass = false;
            detail.push(format!("double failed: {e}"));
        }
    }
    Check { id: 8, name: "reflection fidelity", pass, detail: detail.join("; ") }
}

fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in std::fs::read_dir(&dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let key = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(key, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn determinism() -> Check {
    let mut small_point = Preset::Point.config();
    small_point.radial_divisions = 16;
    small_point.boundary.theta_step_max = std::f64::consts::PI / 24.0;
    small_point.n = vec![4, 8];
    let mut detail = Vec::new();
    let mut pass = true;
    for (label, cfg) in [("helicoid", Preset::Helicoid.config()), ("point n=4,8", small_point)] {
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for d in &dirs {
            let out = run_sequence(&cfg).unwrap();
            emit_outputs(&out, d.path()).unwrap();
        }
        let (a, b) = (tree(dirs[0].path()), tree(dirs[1].path()));
        let same = a == b && !a.is_empty();
        pass &= same;
        detail.push(format!("{label}: {} files, identical {same}", a.len()));
    }
    Check { id: 9, name: "determinism", pass, detail: detail.join("; ") }
}

fn main() {
    // the libtest flags passed by cargo are not used here
    let helicoid = timed(&Preset::Helicoid.config());
    let point = timed(&Preset::Point.config());
    let cantor = timed(&Preset::Cantor2.config());
    let interval = timed(&Preset::Interval.config());
    let presets = [&helicoid, &point, &cantor, &interval];

    let mut checks = vec![helicoid_oracle(&helicoid), rado(&helicoid, &point)];
    let (ok, d) = pass_on_all(&presets, Pass::LevelSets);
    checks.push(Check { id: 3, name: "level sets", pass: ok, detail: d });
    let (ok, d) = pass_on_all(&presets, Pass::Monotonicity);
    checks.push(Check { id: 4, name: "multigraph monotonicity", pass: ok, detail: d });
    let (ok, d) = pass_on_all(&presets, Pass::Foliation);
    let min_gap = converged(&presets)
        .iter()
        .filter_map(|(_, r)| r.report.as_ref()?.summary.foliation.as_ref().map(|f| f.min_distance / f.edge_scale))
        .fold(f64::INFINITY, f64::min);
    checks.push(Check { id: 5, name: "foliation", pass: ok, detail: format!("{d}, min distance {min_gap:.3} h (> 0.1 h)") });
    checks.push(blowup(&point, &cantor));
    let (ok, d) = pass_on_all(&presets, Pass::Jacobi);
    let min_u = converged(&presets)
        .iter()
        .filter_map(|(_, r)| r.report.as_ref()?.summary.jacobi.as_ref().map(|j| j.min_u / j.tolerance * 1e-6))
        .fold(f64::INFINITY, f64::min);
    checks.push(Check { id: 7, name: "jacobi positivity", pass: ok, detail: format!("{d}, min u / diagonal {min_u:.2e}") });
    checks.push(reflection(&helicoid));
    checks.push(determinism());

    checks.sort_by_key(|c| c.id);
    let mut failed = 0;
    for c in &checks {
        println!(
            "criterion {} {:<24} {}  {}",
            c.id,
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            c.detail
        );
        failed += usize::from(!c.pass);
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
