use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_path_to_error::Segment;

use crate::analysis::AnalysisParams;
use crate::boundary::BoundaryParams;
use crate::error::{Error, Result};
use crate::kset::{ClosedSetSpec, Interval, Members};
use crate::plateau::SolverParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReflectParams {
    /// Schwarz reflection levels applied to each solved disk; 0 disables.
    pub schwarz_levels: usize,
    /// Also emit the disk doubled across the axis.
    pub axis_double: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputParams {
    /// Run directory; the CLI `--out` flag takes precedence.
    pub dir: Option<PathBuf>,
    /// Also write `n_<k>/boundary.csv` and `n_<k>/boundary.obj`.
    pub boundary: bool,
}

/// Perturbed restarts of each converged solve. A restart that settles at a
/// clearly lower area marks the original as a non-minimizing critical point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RestartParams {
    /// Number of restarts per n; 0 disables the check.
    pub count: usize,
    /// Height noise amplitude relative to the bounding diagonal.
    pub amplitude: f64,
    pub seed: u64,
}

impl Default for RestartParams {
    fn default() -> Self {
        RestartParams {
            count: 0,
            amplitude: 1e-3,
            seed: 0,
        }
    }
}

fn default_range() -> Interval {
    (-0.5, 0.5)
}

fn default_kset() -> Members {
    Members::Points { z: Vec::new() }
}

fn default_radial_divisions() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Open height range `(a, b)` of the cylinder.
    #[serde(default = "default_range")]
    pub range: Interval,
    #[serde(default = "default_kset")]
    pub kset: Members,
    /// Winding scales, strictly increasing.
    pub n: Vec<u32>,
    #[serde(default)]
    pub boundary: BoundaryParams,
    /// Radial grid divisions of the initial mesh.
    #[serde(default = "default_radial_divisions")]
    pub radial_divisions: usize,
    #[serde(default)]
    pub solver: SolverParams,
    #[serde(default)]
    pub analysis: AnalysisParams,
    #[serde(default)]
    pub reflect: ReflectParams,
    #[serde(default)]
    pub restarts: RestartParams,
    #[serde(default)]
    pub output: OutputParams,
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

/// Parses and validates a JSON experiment document. Errors carry the JSON
/// pointer of the offending value.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let p = pointer(e.path());
        Error::config(p, e.into_inner().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n.is_empty() {
            return Err(Error::config("/n", "at least one winding scale is required"));
        }
        if let Some(k) = self.n.iter().position(|&n| n == 0) {
            return Err(Error::config(format!("/n/{k}"), "winding scales must be positive"));
        }
        if let Some(k) = self.n.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::config(format!("/n/{}", k + 1), "n list must be strictly increasing"));
        }
        let (a, b) = self.range;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::config("/range", "range needs finite a < b"));
        }
        self.kset_spec()?;
        let bp = &self.boundary;
        if !(bp.lambda0 > 0.0) {
            return Err(Error::config("/boundary/lambda0", "must be positive"));
        }
        if !(0.0..0.5).contains(&bp.collar) {
            return Err(Error::config("/boundary/collar", "must lie in [0, 0.5)"));
        }
        if !(bp.theta_step_max > 0.0) {
            return Err(Error::config("/boundary/theta_step_max", "must be positive"));
        }
        if bp.z_divisions == 0 {
            return Err(Error::config("/boundary/z_divisions", "must be positive"));
        }
        if self.radial_divisions < 4 {
            return Err(Error::config("/radial_divisions", "need at least 4 radial divisions"));
        }
        if !(self.restarts.amplitude > 0.0 && self.restarts.amplitude < 0.1) {
            return Err(Error::config("/restarts/amplitude", "must lie in (0, 0.1)"));
        }
        self.solver.validate().map_err(|m| Error::config("/solver", m))?;
        self.analysis.validate().map_err(|m| Error::config("/analysis", m))?;
        Ok(())
    }

    pub fn kset_spec(&self) -> Result<ClosedSetSpec> {
        ClosedSetSpec::new(self.kset.clone(), self.range).map_err(|e| {
            let p = match (&self.kset, &e) {
                (Members::Cantor { .. }, Error::CantorDepth(_)) => "/kset/depth",
                _ => "/kset",
            };
            Error::config(p, e.to_string())
        })
    }
}

/// Named experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Empty K: the boundary is a plain helix and the disk a helicoid piece.
    Helicoid,
    /// K is the single point 0.
    Point,
    /// K is a depth-2 middle-thirds Cantor set.
    Cantor2,
    /// K is the interval `[0, 0.3]`.
    Interval,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Helicoid, Preset::Point, Preset::Cantor2, Preset::Interval];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Helicoid => "helicoid",
            Preset::Point => "point",
            Preset::Cantor2 => "cantor2",
            Preset::Interval => "interval",
        }
    }

    pub fn config(self) -> ExperimentConfig {
        let base = ExperimentConfig {
            range: default_range(),
            kset: default_kset(),
            n: vec![1],
            boundary: BoundaryParams::default(),
            radial_divisions: default_radial_divisions(),
            solver: SolverParams::default(),
            analysis: AnalysisParams::default(),
            reflect: ReflectParams::default(),
            restarts: RestartParams::default(),
            output: OutputParams::default(),
        };
        // the concentrating presets need a fine grid near the axis to resolve
        // the curvature growth
        let fine = BoundaryParams {
            theta_step_max: PI / 96.0,
            ..BoundaryParams::default()
        };
        match self {
            Preset::Helicoid => ExperimentConfig { range: (0.0, 1.0), ..base },
            Preset::Point => ExperimentConfig {
                kset: Members::Points { z: vec![0.0] },
                n: vec![4, 8, 16, 32],
                boundary: fine,
                radial_divisions: 64,
                ..base
            },
            Preset::Cantor2 => ExperimentConfig {
                range: (-0.75, 0.75),
                kset: Members::Cantor { base: (-0.5, 0.5), depth: 2 },
                n: vec![8, 32],
                boundary: fine,
                radial_divisions: 64,
                analysis: AnalysisParams { rho: 0.05, ..AnalysisParams::default() },
                ..base
            },
            Preset::Interval => ExperimentConfig {
                kset: Members::Intervals { intervals: vec![(0.0, 0.3)] },
                n: vec![4, 8, 16],
                boundary: BoundaryParams {
                    theta_step_max: PI / 48.0,
                    ..BoundaryParams::default()
                },
                radial_divisions: 32,
                ..base
            },
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::config("", format!("unknown preset {s}")))
    }
}
