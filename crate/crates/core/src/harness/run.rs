use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{parse_config, ExperimentConfig, RestartParams};
use crate::analysis::{
    analyze, blowup_csv, blowup_series, gap_contrast, growth_ratio, AnalysisReport, AnalysisSummary, BlowupRow,
    Pass, Verdict,
};
use crate::boundary::{BoundaryLoop, WindingProfile};
use crate::error::{Error, Result};
use crate::geom::io::{obj_string, read_obj};
use crate::geom::{Chart, TriMesh};
use crate::kset::ClosedSetSpec;
use crate::plateau::{solve_mesh, solve_plateau, SolveRecord, SolveStatus};
use crate::reflect::{axis_double, schwarz_extend};

/// Worker cap read from the environment.
pub const THREADS_VAR: &str = "LAMLAB_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveInfo {
    pub status: SolveStatus,
    pub iterations: usize,
    pub initial_area: f64,
    pub final_area: f64,
    pub final_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restart: Option<RestartCheck>,
}

/// Outcome of the perturbed restarts of one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartCheck {
    pub count: usize,
    pub converged: usize,
    /// Lowest area reached by a converged restart.
    pub min_area: f64,
    /// Largest vertex distance between a restart and the original solve.
    pub max_distance: f64,
    /// Set when some restart ends with area below the original by more
    /// than the relative margin.
    pub lower_area_found: bool,
}

impl SolveInfo {
    fn from_record(r: &SolveRecord) -> Self {
        SolveInfo {
            status: r.status,
            iterations: r.iterations.len(),
            initial_area: r.initial_area,
            final_area: r.final_area(),
            final_residual: r.final_residual,
            restart: None,
        }
    }
}

/// Everything computed for one winding scale.
#[derive(Debug, Clone)]
pub struct NResult {
    pub n: u32,
    pub boundary: Option<BoundaryLoop>,
    pub mesh: Option<TriMesh>,
    /// Iteration history; absent when the mesh was loaded from disk.
    pub record: Option<SolveRecord>,
    pub solve: Option<SolveInfo>,
    pub report: Option<AnalysisReport>,
    pub extended: Option<TriMesh>,
    pub doubled: Option<TriMesh>,
    pub error: Option<String>,
}

impl NResult {
    fn empty(n: u32) -> Self {
        NResult {
            n,
            boundary: None,
            mesh: None,
            record: None,
            solve: None,
            report: None,
            extended: None,
            doubled: None,
            error: None,
        }
    }

    pub fn converged(&self) -> bool {
        self.error.is_none() && self.solve.as_ref().is_some_and(|s| s.status == SolveStatus::Converged)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NSummary {
    pub n: u32,
    pub solve: Option<SolveInfo>,
    pub error: Option<String>,
    pub analysis: Option<AnalysisSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleGrowth {
    pub p: f64,
    pub kappa_near: Vec<Option<f64>>,
    /// Last over first `kappa_near`.
    pub growth: Option<f64>,
    /// Number of decreases between consecutive n, and the worst relative drop.
    pub inversions: usize,
    pub worst_drop: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupSummary {
    pub rho: f64,
    pub n: Vec<u32>,
    pub samples: Vec<SampleGrowth>,
    pub kappa_far: Vec<Option<f64>>,
    pub far_ratios: Vec<f64>,
    /// Mean near-curvature on K over mean near-curvature at gap midpoints,
    /// for the largest n.
    pub gap_contrast: Option<f64>,
    pub verdicts: BTreeMap<String, Verdict>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Pass,
    AnalysisFailure,
    SolverFailure,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Pass => 0,
            RunStatus::AnalysisFailure => 2,
            RunStatus::SolverFailure => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub status: RunStatus,
    /// Worst verdict per pass over all n, plus the sequence-level checks.
    pub verdicts: BTreeMap<String, Verdict>,
    pub runs: Vec<NSummary>,
    pub blowup: Option<BlowupSummary>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: ExperimentConfig,
    pub results: Vec<NResult>,
    pub blowup_rows: Vec<BlowupRow>,
    pub summary: RunSummary,
}

/// Worker count from `LAMLAB_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_VAR).ok()?.trim().parse().ok().filter(|&t| t > 0)
}

fn in_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = thread_cap() {
        builder = builder.num_threads(t);
    }
    match builder.build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

fn panic_message(e: Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| e.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}

fn build_loop(cfg: &ExperimentConfig, kset: &ClosedSetSpec, n: u32) -> Result<BoundaryLoop> {
    let profile = Arc::new(WindingProfile::new(n, &cfg.boundary, kset.clone())?);
    BoundaryLoop::from_profile(profile, &cfg.boundary, cfg.radial_divisions)
}

fn run_one(cfg: &ExperimentConfig, kset: &ClosedSetSpec, n: u32) -> NResult {
    let mut out = NResult::empty(n);
    let stage = (|| -> Result<()> {
        let lp = build_loop(cfg, kset, n)?;
        let (mesh, record) = solve_plateau(&lp, cfg.radial_divisions, &cfg.solver)?;
        out.boundary = Some(lp);
        let mut info = SolveInfo::from_record(&record);
        if cfg.restarts.count > 0 && record.status == SolveStatus::Converged {
            info.restart = Some(restart_check(&mesh, cfg, n)?);
        }
        out.solve = Some(info);
        out.record = Some(record);
        out.report = Some(analyze(&mesh, &cfg.analysis));
        if cfg.reflect.schwarz_levels > 0 {
            out.extended = Some(schwarz_extend(&mesh, cfg.reflect.schwarz_levels)?);
        }
        if cfg.reflect.axis_double {
            out.doubled = Some(axis_double(&mesh)?);
        }
        out.mesh = Some(mesh);
        Ok(())
    })();
    if let Err(e) = stage {
        out.error = Some(e.to_string());
    }
    out
}

/// Relative area margin below which a restart counts as the same minimum.
const RESTART_AREA_MARGIN: f64 = 1e-6;

/// Re-solves from copies of `m` whose interior heights carry seeded noise.
fn restart_check(m: &TriMesh, cfg: &ExperimentConfig, n: u32) -> Result<RestartCheck> {
    let RestartParams { count, amplitude, seed } = cfg.restarts;
    let scale = amplitude * m.bounding_diagonal();
    let base = m.area();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ u64::from(n).rotate_left(32));
    let mut check = RestartCheck {
        count,
        converged: 0,
        min_area: f64::INFINITY,
        max_distance: 0.0,
        lower_area_found: false,
    };
    for _ in 0..count {
        let mut start = m.clone();
        for v in start.vertices.iter_mut().filter(|v| !v.boundary) {
            v.position.z += scale * rng.gen_range(-1.0..=1.0);
        }
        let (end, rec) = solve_mesh(start, &cfg.solver)?;
        if rec.status != SolveStatus::Converged {
            continue;
        }
        check.converged += 1;
        check.min_area = check.min_area.min(end.area());
        let d = end
            .vertices
            .iter()
            .zip(&m.vertices)
            .map(|(a, b)| (a.position - b.position).norm())
            .fold(0.0, f64::max);
        check.max_distance = check.max_distance.max(d);
    }
    check.lower_area_found = check.min_area < base * (1.0 - RESTART_AREA_MARGIN);
    Ok(check)
}

/// Solves and analyzes every `n` of the config. Per-n failures, including
/// panics, are recorded in the result and never stop the other runs.
pub fn run_sequence(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let kset = cfg.kset_spec()?;
    let results: Vec<NResult> = in_pool(|| {
        cfg.n
            .par_iter()
            .map(|&n| {
                catch_unwind(AssertUnwindSafe(|| run_one(cfg, &kset, n))).unwrap_or_else(|e| NResult {
                    error: Some(format!("panic: {}", panic_message(e))),
                    ..NResult::empty(n)
                })
            })
            .collect()
    });
    Ok(finish(cfg.clone(), &kset, results))
}

fn worst(verdicts: impl IntoIterator<Item = Verdict>) -> Option<Verdict> {
    let rank = |v: Verdict| match v {
        Verdict::Error => 5,
        Verdict::Fail => 4,
        Verdict::HypothesisNotMet => 3,
        Verdict::Pass => 2,
        Verdict::Reported => 1,
        Verdict::Vacuous => 0,
    };
    verdicts.into_iter().max_by_key(|&v| rank(v))
}

fn blowup_summary(cfg: &ExperimentConfig, kset: &ClosedSetSpec, results: &[NResult], rows: &[BlowupRow]) -> BlowupSummary {
    let rho = cfg.analysis.rho;
    let ns: Vec<u32> = results.iter().map(|r| r.n).collect();
    let far_of = |n: u32| rows.iter().find(|r| r.n == n).and_then(|r| r.kappa_far);
    let kappa_far: Vec<Option<f64>> = ns.iter().map(|&n| far_of(n)).collect();
    let far_values: Vec<f64> = kappa_far.iter().flatten().copied().collect();
    let far_ratios: Vec<f64> = far_values.windows(2).map(|w| w[1] / w[0]).collect();
    let samples: Vec<SampleGrowth> = kset
        .sample_points()
        .into_iter()
        .map(|p| {
            let kappa_near: Vec<Option<f64>> = ns
                .iter()
                .map(|&n| rows.iter().find(|r| r.n == n && r.p == Some(p)).and_then(|r| r.kappa_near))
                .collect();
            let present: Vec<f64> = kappa_near.iter().flatten().copied().collect();
            let drops: Vec<f64> = present.windows(2).filter(|w| w[1] < w[0]).map(|w| 1.0 - w[1] / w[0]).collect();
            SampleGrowth {
                p,
                growth: growth_ratio(&kappa_near),
                inversions: drops.len(),
                worst_drop: drops.iter().copied().fold(0.0, f64::max),
                kappa_near,
            }
        })
        .collect();
    let gap = results
        .iter()
        .rev()
        .find_map(|r| Some((r.mesh.as_ref()?, r.report.as_ref()?)))
        .and_then(|(m, rep)| gap_contrast(m, &rep.abs_a, kset, rho));

    let mut verdicts = BTreeMap::new();
    let span = match (ns.first(), ns.last()) {
        (Some(&a), Some(&b)) => b as f64 / a as f64,
        _ => 1.0,
    };
    // growth is judged only over at least an 8-fold range of n
    if !samples.is_empty() && span >= 8.0 {
        let ok = samples.iter().all(|s| {
            s.growth.is_some_and(|g| g >= 4.0) && s.inversions <= 1 && s.worst_drop <= 0.1
        });
        verdicts.insert("blowup-near-growth".to_string(), Verdict::from_bool(ok));
    }
    if far_values.len() >= 2 {
        let cap = if kset.is_empty() { 1.1 } else { 1.5 };
        let ok = far_ratios.iter().all(|&r| r <= cap);
        verdicts.insert("blowup-far-bounded".to_string(), Verdict::from_bool(ok));
    }
    if !kset.gap_midpoints().is_empty() {
        let v = match gap {
            Some(g) => Verdict::from_bool(g >= 3.0),
            None => Verdict::Error,
        };
        verdicts.insert("blowup-gap-contrast".to_string(), v);
    }
    BlowupSummary {
        rho,
        n: ns,
        samples,
        kappa_far,
        far_ratios,
        gap_contrast: gap,
        verdicts,
    }
}

fn finish(config: ExperimentConfig, kset: &ClosedSetSpec, results: Vec<NResult>) -> RunOutcome {
    let rho = config.analysis.rho;
    let solved: Vec<(u32, &TriMesh, &[f64])> = results
        .iter()
        .filter_map(|r| Some((r.n, r.mesh.as_ref()?, r.report.as_ref()?.abs_a.as_slice())))
        .collect();
    let blowup_rows = blowup_series(&solved, kset, rho);
    let blowup = config
        .analysis
        .enabled(Pass::Blowup)
        .then(|| blowup_summary(&config, kset, &results, &blowup_rows));

    let mut verdicts = BTreeMap::new();
    for pass in Pass::ALL {
        let v = worst(
            results
                .iter()
                .filter_map(|r| r.report.as_ref()?.summary.verdicts.get(&pass).copied()),
        );
        if let Some(v) = v {
            verdicts.insert(pass.as_str().to_string(), v);
        }
    }
    if let Some(b) = &blowup {
        verdicts.extend(b.verdicts.clone());
    }
    let restarts: Vec<&RestartCheck> = results
        .iter()
        .filter_map(|r| r.solve.as_ref()?.restart.as_ref())
        .collect();
    if !restarts.is_empty() {
        let v = Verdict::from_bool(restarts.iter().all(|c| !c.lower_area_found));
        verdicts.insert("restart-minimum".to_string(), v);
    }
    let status = if results.iter().any(|r| !r.converged()) {
        RunStatus::SolverFailure
    } else if verdicts.values().any(|v| v.is_failure()) {
        RunStatus::AnalysisFailure
    } else {
        RunStatus::Pass
    };
    let runs = results
        .iter()
        .map(|r| NSummary {
            n: r.n,
            solve: r.solve.clone(),
            error: r.error.clone(),
            analysis: r.report.as_ref().map(|rep| rep.summary.clone()),
        })
        .collect();
    RunOutcome {
        config,
        summary: RunSummary {
            status,
            verdicts,
            runs,
            blowup,
        },
        results,
        blowup_rows,
    }
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn make_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

pub fn n_dir(root: &Path, n: u32) -> PathBuf {
    root.join(format!("n_{n}"))
}

#[derive(Serialize, Deserialize)]
struct RunManifest {
    version: String,
    config: ExperimentConfig,
}

/// Writes the run directory: `run.json`, `n_<n>/mesh.obj`,
/// `n_<n>/vertices.csv`, `n_<n>/solve.csv`, `blowup.csv` and `summary.json`.
/// Reflected meshes and boundary curves are added when the config asks for
/// them. Contents depend only on the config.
pub fn emit_outputs(outcome: &RunOutcome, root: &Path) -> Result<()> {
    make_dir(root)?;
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: outcome.config.clone(),
    };
    write(&root.join("run.json"), to_json(&manifest)?)?;
    for r in &outcome.results {
        let dir = n_dir(root, r.n);
        make_dir(&dir)?;
        if let Some(m) = &r.mesh {
            write(&dir.join("mesh.obj"), obj_string(m))?;
            if let Some(rep) = &r.report {
                write(&dir.join("vertices.csv"), rep.vertices_csv(m))?;
            }
        }
        if let Some(rec) = &r.record {
            write(&dir.join("solve.csv"), rec.to_csv())?;
        }
        if outcome.config.output.boundary {
            if let Some(lp) = &r.boundary {
                write(&dir.join("boundary.csv"), lp.to_csv())?;
                write(&dir.join("boundary.obj"), lp.to_obj())?;
            }
        }
        if let Some(m) = &r.extended {
            write(&dir.join("extended.obj"), obj_string(m))?;
        }
        if let Some(m) = &r.doubled {
            write(&dir.join("doubled.obj"), obj_string(m))?;
        }
    }
    write(&root.join("blowup.csv"), blowup_csv(&outcome.blowup_rows))?;
    write(&root.join("summary.json"), to_json(&outcome.summary)?)?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::config("", e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Reads a run directory's config.
pub fn read_run_config(root: &Path) -> Result<ExperimentConfig> {
    let path = root.join("run.json");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse { path: path.clone(), message: e.to_string() })?;
    let config = value
        .get("config")
        .ok_or_else(|| Error::Parse { path: path.clone(), message: "missing config".into() })?;
    parse_config(&config.to_string())
}

/// Restores chart coordinates from a `vertices.csv` table.
fn apply_vertex_table(m: &mut TriMesh, path: &Path) -> Result<()> {
    let bad = |message: String| Error::Parse { path: path.to_path_buf(), message };
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let id: usize = rec[0].parse().map_err(|_| bad(format!("bad vertex id {}", &rec[0])))?;
        let r: f64 = rec[1].parse().map_err(|_| bad(format!("bad r {}", &rec[1])))?;
        let theta: f64 = rec[2].parse().map_err(|_| bad(format!("bad theta {}", &rec[2])))?;
        let v = m.vertices.get_mut(id).ok_or_else(|| bad(format!("vertex {id} not in mesh")))?;
        v.chart = Some(Chart { r, theta });
    }
    Ok(())
}

/// Re-runs the analysis passes on the meshes stored in a run directory.
/// Solve outcomes are taken from the stored summary when present.
pub fn analyze_run_dir(root: &Path) -> Result<RunOutcome> {
    let config = read_run_config(root)?;
    let kset = config.kset_spec()?;
    let stored: Option<serde_json::Value> = fs::read_to_string(root.join("summary.json"))
        .ok()
        .and_then(|t| serde_json::from_str(&t).ok());
    let stored_solve = |n: u32| -> Option<SolveInfo> {
        let runs = stored.as_ref()?.get("runs")?.as_array()?;
        let run = runs.iter().find(|r| r.get("n").and_then(|v| v.as_u64()) == Some(n as u64))?;
        serde_json::from_value(run.get("solve")?.clone()).ok()
    };
    let results: Vec<NResult> = in_pool(|| {
        config
            .n
            .par_iter()
            .map(|&n| {
                let mut out = NResult::empty(n);
                out.solve = stored_solve(n);
                let dir = n_dir(root, n);
                let loaded = (|| -> Result<TriMesh> {
                    let mut m = read_obj(&dir.join("mesh.obj"))?;
                    apply_vertex_table(&mut m, &dir.join("vertices.csv"))?;
                    Ok(m)
                })();
                match loaded {
                    Ok(m) => {
                        out.report = Some(analyze(&m, &config.analysis));
                        out.mesh = Some(m);
                    }
                    Err(e) => out.error = Some(e.to_string()),
                }
                out
            })
            .collect()
    });
    Ok(finish(config, &kset, results))
}

/// Writes only the analysis products of an outcome: per-n `vertices.csv`,
/// `blowup.csv` and `summary.json`.
pub fn emit_analysis(outcome: &RunOutcome, root: &Path) -> Result<()> {
    make_dir(root)?;
    for r in &outcome.results {
        if let (Some(m), Some(rep)) = (&r.mesh, &r.report) {
            let dir = n_dir(root, r.n);
            make_dir(&dir)?;
            write(&dir.join("vertices.csv"), rep.vertices_csv(m))?;
        }
    }
    write(&root.join("blowup.csv"), blowup_csv(&outcome.blowup_rows))?;
    write(&root.join("summary.json"), to_json(&outcome.summary)?)?;
    Ok(())
}

/// Writes `n_<n>/boundary.csv` and `n_<n>/boundary.obj` for every n of the
/// config without solving.
pub fn export_boundaries(cfg: &ExperimentConfig, root: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let kset = cfg.kset_spec()?;
    let mut written = Vec::new();
    for &n in &cfg.n {
        let lp = build_loop(cfg, &kset, n)?;
        let dir = n_dir(root, n);
        make_dir(&dir)?;
        for (name, text) in [("boundary.csv", lp.to_csv()), ("boundary.obj", lp.to_obj())] {
            let path = dir.join(name);
            write(&path, text)?;
            written.push(path);
        }
    }
    Ok(written)
}
