//! Geometric diagnostics of a computed disk: curvature, slope bounds, level
//! set topology, chart monotonicity, rotation foliation, Jacobi field sign
//! and the minimal surface residual on a chart patch.

mod blowup;
mod chart;
mod curvature;
mod foliation;
mod rado;

pub use blowup::{blowup_csv, blowup_series, gap_contrast, growth_ratio, kappa_far, kappa_near, BlowupRow};
pub use chart::{
    chart_injective, mse_residual_field, mse_residual_grid, mse_residual_patch, resample_chart, theta_monotonicity, ChartPatch,
    MonotonicityReport,
};
pub use curvature::{
    curvature_distance_constant, jacobi_field, jacobi_positivity, tangent_slope, vertex_curvature, JacobiReport,
};
pub use foliation::{foliation_disjointness, rotated, FoliationReport};
pub use rado::{
    boundary_slope, level_set_arcs, level_set_survey, rado_slope_check, BoundarySlope, RadoReport, RadoVerdict,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geom::{radius, TriMesh};
use crate::plateau::mean_curvature_residual;

/// Diagnostic passes that can be switched on in a config.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pass {
    Rado,
    LevelSets,
    Monotonicity,
    Foliation,
    Jacobi,
    Mse,
    Blowup,
}

impl Pass {
    pub const ALL: [Pass; 7] = [
        Pass::Rado,
        Pass::LevelSets,
        Pass::Monotonicity,
        Pass::Foliation,
        Pass::Jacobi,
        Pass::Mse,
        Pass::Blowup,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Pass::Rado => "rado",
            Pass::LevelSets => "level-sets",
            Pass::Monotonicity => "monotonicity",
            Pass::Foliation => "foliation",
            Pass::Jacobi => "jacobi",
            Pass::Mse => "mse",
            Pass::Blowup => "blowup",
        }
    }
}

/// Outcome of one pass on one mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Holds for lack of anything to check.
    Vacuous,
    /// Preconditions of the check do not hold; no verdict.
    HypothesisNotMet,
    /// Value recorded without a threshold.
    Reported,
    Error,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Vacuous => "vacuous",
            Verdict::HypothesisNotMet => "hypothesis-not-met",
            Verdict::Reported => "reported",
            Verdict::Error => "error",
        }
    }

    pub fn is_failure(self) -> bool {
        matches!(self, Verdict::Fail | Verdict::Error)
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisParams {
    pub passes: Vec<Pass>,
    /// Ball radius for the curvature blow-up measurements.
    pub rho: f64,
    /// Slab inset for the slope bound.
    pub delta: f64,
    /// Boundary slope for the slope bound; measured from the mesh when absent.
    pub epsilon: Option<f64>,
    pub rotation_count: usize,
    pub r_min: f64,
    pub level_sets: usize,
    /// Chart patch for the residual check; defaults to `r in [0.25, 0.75]`
    /// over the middle half of the chart angles.
    pub patch: Option<ChartPatch>,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams {
            passes: Pass::ALL.to_vec(),
            rho: 0.1,
            delta: 0.1,
            epsilon: None,
            rotation_count: 8,
            r_min: 0.25,
            level_sets: 20,
            patch: None,
        }
    }
}

impl AnalysisParams {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(self.rho > 0.0) {
            return Err("rho must be positive".into());
        }
        if !(self.delta > 0.0) {
            return Err("delta must be positive".into());
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0) {
                return Err("epsilon must be positive".into());
            }
        }
        if self.rotation_count == 0 {
            return Err("rotation_count must be at least 1".into());
        }
        if !(self.r_min >= 0.0 && self.r_min < 1.0) {
            return Err("r_min must lie in [0, 1)".into());
        }
        Ok(())
    }

    pub fn enabled(&self, pass: Pass) -> bool {
        self.passes.contains(&pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSet {
    pub height: f64,
    pub arcs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisSummary {
    pub vertices: usize,
    pub triangles: usize,
    pub area: f64,
    pub max_abs_a: f64,
    pub min_interior_slope: f64,
    pub boundary_slope: Option<BoundarySlope>,
    pub rado: Option<RadoReport>,
    pub level_sets: Option<Vec<LevelSet>>,
    pub monotonicity: Option<MonotonicityReport>,
    pub chart_injective: Option<bool>,
    pub foliation: Option<FoliationReport>,
    pub jacobi: Option<JacobiReport>,
    pub mse_patch: Option<ChartPatch>,
    pub mse_residual: Option<f64>,
    pub curvature_distance_constant: f64,
    pub mean_curvature_residual: f64,
    /// One entry per enabled pass other than the sequence-level blow-up.
    pub verdicts: BTreeMap<Pass, Verdict>,
    /// Messages of checks that could not be evaluated, keyed by pass.
    pub errors: BTreeMap<Pass, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub summary: AnalysisSummary,
    pub abs_a: Vec<f64>,
    pub slope: Vec<f64>,
    pub u: Vec<f64>,
}

fn default_patch(m: &TriMesh) -> Option<ChartPatch> {
    let thetas: Vec<f64> = m.vertices.iter().filter_map(|v| v.chart.map(|c| c.theta)).collect();
    if thetas.len() != m.vertices.len() {
        return None;
    }
    let lo = thetas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = thetas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    Some(ChartPatch {
        r0: 0.25,
        r1: 0.75,
        theta0: lo + 0.25 * span,
        theta1: hi - 0.25 * span,
        nr: 16,
        ntheta: 32,
    })
}

/// Runs the enabled diagnostics on `m`. Checks that cannot be evaluated
/// get an `Error` verdict rather than aborting the report.
pub fn analyze(m: &TriMesh, params: &AnalysisParams) -> AnalysisReport {
    let mut errors = BTreeMap::new();
    let mut verdicts = BTreeMap::new();
    let abs_a = vertex_curvature(m);
    let slope = tangent_slope(m);
    let jacobi = jacobi_field(m);
    let bs = boundary_slope(m);

    let rado = params.enabled(Pass::Rado).then(|| {
        let epsilon = params.epsilon.or(bs.as_ref().map(|b| b.epsilon)).unwrap_or(f64::NAN);
        let r = rado_slope_check(m, &slope, epsilon, params.delta, 1.0);
        verdicts.insert(
            Pass::Rado,
            match r.verdict {
                RadoVerdict::Pass => Verdict::Pass,
                RadoVerdict::Fail => Verdict::Fail,
                RadoVerdict::Vacuous => Verdict::Vacuous,
                RadoVerdict::HypothesisNotMet => Verdict::HypothesisNotMet,
            },
        );
        r
    });

    let level_sets = if params.enabled(Pass::LevelSets) {
        match level_set_survey(m, params.level_sets) {
            Ok(v) => {
                let v: Vec<LevelSet> = v.into_iter().map(|(height, arcs)| LevelSet { height, arcs }).collect();
                verdicts.insert(Pass::LevelSets, Verdict::from_bool(v.iter().all(|l| l.arcs == 1)));
                Some(v)
            }
            Err(e) => {
                errors.insert(Pass::LevelSets, e.to_string());
                verdicts.insert(Pass::LevelSets, Verdict::Error);
                None
            }
        }
    } else {
        None
    };

    let mut chart_ok = None;
    let monotonicity = if params.enabled(Pass::Monotonicity) {
        match theta_monotonicity(m) {
            Ok(r) => {
                verdicts.insert(Pass::Monotonicity, Verdict::from_bool(r.passed));
                chart_ok = chart_injective(m).ok();
                Some(r)
            }
            Err(e) => {
                errors.insert(Pass::Monotonicity, e.to_string());
                verdicts.insert(Pass::Monotonicity, Verdict::Error);
                None
            }
        }
    } else {
        None
    };

    let foliation = if params.enabled(Pass::Foliation) {
        match foliation_disjointness(m, params.rotation_count, params.r_min) {
            Ok(r) => {
                verdicts.insert(Pass::Foliation, Verdict::from_bool(r.passed));
                Some(r)
            }
            Err(e) => {
                errors.insert(Pass::Foliation, e.to_string());
                verdicts.insert(Pass::Foliation, Verdict::Error);
                None
            }
        }
    } else {
        None
    };

    let jacobi_report = params.enabled(Pass::Jacobi).then(|| {
        let r = jacobi_positivity(m);
        verdicts.insert(Pass::Jacobi, Verdict::from_bool(r.passed));
        r
    });

    let mut mse_patch = None;
    let mut mse_residual = None;
    if params.enabled(Pass::Mse) {
        mse_patch = params.patch.or_else(|| default_patch(m));
        match mse_patch.map(|p| mse_residual_patch(m, &p)) {
            Some(Ok(r)) => {
                mse_residual = Some(r);
                verdicts.insert(Pass::Mse, Verdict::Reported);
            }
            Some(Err(e)) => {
                errors.insert(Pass::Mse, e.to_string());
                verdicts.insert(Pass::Mse, Verdict::Error);
            }
            None => {
                errors.insert(Pass::Mse, "mesh has no chart".into());
                verdicts.insert(Pass::Mse, Verdict::Error);
            }
        }
    }

    let (lo, hi) = m.vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v.position.z), hi.max(v.position.z))
    });
    let summary = AnalysisSummary {
        vertices: m.vertices.len(),
        triangles: m.triangles.len(),
        area: m.area(),
        max_abs_a: abs_a.iter().copied().filter(|k| k.is_finite()).fold(0.0, f64::max),
        min_interior_slope: m
            .vertices
            .iter()
            .zip(&slope)
            .filter(|(v, _)| !v.boundary)
            .map(|(_, &s)| s)
            .fold(f64::INFINITY, f64::min),
        boundary_slope: bs,
        rado,
        level_sets,
        monotonicity,
        chart_injective: chart_ok,
        foliation,
        jacobi: jacobi_report,
        mse_patch,
        mse_residual,
        curvature_distance_constant: curvature_distance_constant(m, &abs_a, lo, hi, params.delta),
        mean_curvature_residual: mean_curvature_residual(m),
        verdicts,
        errors,
    };
    AnalysisReport {
        summary,
        abs_a,
        slope,
        u: jacobi,
    }
}

impl AnalysisReport {
    /// Per-vertex table `vertex_id,r,theta,z,absA,slope,u`. `r` and `theta`
    /// are the chart coordinates when the vertex has them; boundary
    /// curvature is left empty.
    pub fn vertices_csv(&self, m: &TriMesh) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["vertex_id", "r", "theta", "z", "absA", "slope", "u"])
            .expect("in-memory write");
        for (i, v) in m.vertices.iter().enumerate() {
            let (r, theta) = match v.chart {
                Some(c) => (c.r, c.theta),
                None => (radius(&v.position), v.position.y.atan2(v.position.x)),
            };
            let k = self.abs_a[i];
            w.write_record([
                i.to_string(),
                r.to_string(),
                theta.to_string(),
                v.position.z.to_string(),
                if k.is_finite() { k.to_string() } else { String::new() },
                self.slope[i].to_string(),
                self.u[i].to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 csv")
    }
}
