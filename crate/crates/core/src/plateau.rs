//! Discrete Plateau solver: iterated cotangent-weight harmonic maps with
//! the boundary pinned.
//!
//! Each outer step freezes the cotangent weights of the current mesh and
//! solves the coordinate Laplace systems for the interior vertices. The
//! grid connectivity never changes, so the polar chart of the initial mesh
//! survives the whole solve. By default only heights move: with all three
//! coordinates free, the near-rectangular quads next to the axis shear
//! until their fixed diagonals pick up negative weights.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryLoop;
use crate::error::{Error, Result};
use crate::geom::{cotan_weights, mixed_areas, unwrap_near, Point3, TriMesh, Vec3};
use crate::sparse::{conjugate_gradient, CsrMatrix};

pub const LINEAR_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverParams {
    pub max_iterations: usize,
    /// Stop once the largest vertex move falls below this fraction of the
    /// bounding-box diagonal.
    pub tol_disp: f64,
    pub w_min: f64,
    pub w_max: f64,
    /// Smallest admissible triangle area as a fraction of the mesh area.
    pub area_floor: f64,
    pub damping: f64,
    pub update: UpdateMode,
}

/// Which coordinates a harmonic step moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateMode {
    /// Heights only; the polar grid `(r, theta)` stays put, so the surface
    /// is always a multigraph over the initial chart.
    Vertical,
    /// All three coordinates.
    Full,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            max_iterations: 500,
            tol_disp: 1e-7,
            w_min: 1e-6,
            w_max: 1e6,
            area_floor: 1e-12,
            damping: 1.0,
            update: UpdateMode::Vertical,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.max_iterations == 0 {
            return Err("max_iterations must be positive".into());
        }
        if !(self.tol_disp > 0.0 && self.area_floor > 0.0) {
            return Err("tolerances must be positive".into());
        }
        if !(self.w_min > 0.0 && self.w_min < self.w_max) {
            return Err("weight clamp needs 0 < w_min < w_max".into());
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err("damping must lie in (0, 1]".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    #[serde(rename = "max-iters")]
    MaxIterations,
    Degenerate,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIterations => "max-iters",
            SolveStatus::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub area: f64,
    pub max_disp: f64,
    pub residual: f64,
    /// A cotangent weight hit the clamp, or the step was damped.
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub initial_area: f64,
    pub iterations: Vec<IterationRecord>,
    pub status: SolveStatus,
    pub final_residual: f64,
}

impl SolveRecord {
    /// CSV with columns `iter, area, max_disp, residual, clamped_flag`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["iter", "area", "max_disp", "residual", "clamped_flag"])
            .expect("in-memory write");
        for r in &self.iterations {
            w.write_record([
                r.iter.to_string(),
                r.area.to_string(),
                r.max_disp.to_string(),
                r.residual.to_string(),
                u8::from(r.clamped).to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
    }

    pub fn final_area(&self) -> f64 {
        self.iterations.last().map_or(self.initial_area, |r| r.area)
    }
}

/// Ruled polar-grid mesh `(r_i cos t_j, r_i sin t_j, z_j)` with
/// `r_i = i / radial_divisions` and `(t_j, z_j)` the helix samples.
pub fn initial_mesh(lp: &BoundaryLoop, radial_divisions: usize) -> Result<TriMesh> {
    if radial_divisions < 4 {
        return Err(Error::InvalidMesh("radial divisions must be at least 4".into()));
    }
    if radial_divisions != lp.radial_divisions {
        return Err(Error::Boundary(format!(
            "loop has {} radial divisions, mesh asked for {radial_divisions}",
            lp.radial_divisions
        )));
    }
    let helix = lp.helix();
    let radii: Vec<f64> = (0..=radial_divisions)
        .map(|i| i as f64 / radial_divisions as f64)
        .collect();
    let thetas: Vec<f64> = helix.iter().map(|p| p.theta).collect();
    Ok(TriMesh::polar_grid(&radii, &thetas, |i, j| {
        if i == radial_divisions {
            return helix[j].position;
        }
        let (r, t) = (radii[i], thetas[j]);
        Point3::new(r * t.cos(), r * t.sin(), helix[j].position.z)
    }))
}

pub fn area(m: &TriMesh) -> f64 {
    m.area()
}

/// Result of one harmonic step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub mesh: TriMesh,
    pub max_disp: f64,
    pub clamped: bool,
}

struct LaplaceSystem {
    matrix: CsrMatrix,
    rhs: [Vec<f64>; 3],
    interior: Vec<usize>,
    clamped: bool,
}

fn assemble(m: &TriMesh, params: &SolverParams) -> LaplaceSystem {
    let interior = m.interior_vertices();
    let mut slot = vec![usize::MAX; m.vertices.len()];
    for (k, &v) in interior.iter().enumerate() {
        slot[v] = k;
    }
    let n = interior.len();
    let mut clamped = false;
    let mut triplets = Vec::new();
    let mut diag = vec![0.0; n];
    let mut rhs = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for ((i, j), raw) in cotan_weights(m) {
        let w = if raw.is_nan() {
            params.w_min
        } else {
            raw.clamp(params.w_min, params.w_max)
        };
        clamped |= w != raw;
        for (a, b) in [(i, j), (j, i)] {
            let sa = slot[a];
            if sa == usize::MAX {
                continue;
            }
            diag[sa] += w;
            let sb = slot[b];
            if sb == usize::MAX {
                let p = m.vertices[b].position;
                for c in 0..3 {
                    rhs[c][sa] += w * p[c];
                }
            } else {
                triplets.push((sa, sb, -w));
            }
        }
    }
    triplets.extend(diag.iter().enumerate().map(|(k, &d)| (k, k, d)));
    LaplaceSystem {
        matrix: CsrMatrix::from_triplets(n, triplets),
        rhs,
        interior,
        clamped,
    }
}

/// One harmonic step: solve the frozen-weight Laplace systems and move the
/// interior vertices `damping` of the way to the solution. Chart angles are
/// carried along by continuation.
pub fn dirichlet_step(m: &TriMesh, params: &SolverParams) -> Result<StepOutcome> {
    let sys = assemble(m, params);
    let n = sys.interior.len();
    let max_iter = 10 * m.vertices.len().max(1);
    let axes: &[usize] = match params.update {
        UpdateMode::Vertical => &[2],
        UpdateMode::Full => &[0, 1, 2],
    };
    let solved: Vec<Result<Vec<f64>>> = {
        use rayon::prelude::*;
        axes.par_iter()
            .map(|&c| {
                let mut x: Vec<f64> = sys
                    .interior
                    .iter()
                    .map(|&v| m.vertices[v].position[c])
                    .collect();
                conjugate_gradient(&sys.matrix, &sys.rhs[c], &mut x, LINEAR_TOLERANCE, max_iter)?;
                Ok(x)
            })
            .collect()
    };
    let mut coords: Vec<Vec<f64>> = sys
        .interior
        .iter()
        .map(|&v| m.vertices[v].position.coords.iter().copied().collect())
        .collect::<Vec<Vec<f64>>>();
    for (&c, s) in axes.iter().zip(solved) {
        for (k, value) in s?.into_iter().enumerate() {
            coords[k][c] = value;
        }
    }
    let mut out = m.clone();
    let mut max_disp: f64 = 0.0;
    for k in 0..n {
        let v = sys.interior[k];
        let old = m.vertices[v].position;
        let target = Point3::new(coords[k][0], coords[k][1], coords[k][2]);
        let new = old + params.damping * (target - old);
        max_disp = max_disp.max((new - old).norm());
        let vert = &mut out.vertices[v];
        vert.position = new;
        if let Some(chart) = vert.chart.as_mut() {
            if new.x.hypot(new.y) > 1e-12 {
                chart.theta = unwrap_near(new.y.atan2(new.x), chart.theta);
            }
        }
    }
    Ok(StepOutcome {
        mesh: out,
        max_disp,
        clamped: sys.clamped,
    })
}

/// Per-vertex discrete mean curvature `|L x| / (2 A_mixed)`, scaled by the
/// bounding-box diagonal. Boundary vertices get `NaN`.
pub fn mean_curvature_normalized(m: &TriMesh) -> Vec<f64> {
    let diag = m.bounding_diagonal();
    let areas = mixed_areas(m);
    let mut lap = vec![Vec3::zeros(); m.vertices.len()];
    for ((i, j), w) in cotan_weights(m) {
        let d = m.vertices[j].position - m.vertices[i].position;
        lap[i] += w * d;
        lap[j] -= w * d;
    }
    m.vertices
        .iter()
        .enumerate()
        .map(|(v, vert)| {
            if vert.boundary {
                f64::NAN
            } else {
                diag * lap[v].norm() / (2.0 * areas[v])
            }
        })
        .collect()
}

/// Largest normalized mean curvature over interior vertices.
pub fn mean_curvature_residual(m: &TriMesh) -> f64 {
    mean_curvature_normalized(m)
        .into_iter()
        .filter(|v| !v.is_nan())
        .fold(0.0, f64::max)
}

fn min_triangle_area(m: &TriMesh) -> f64 {
    (0..m.triangles.len())
        .map(|t| m.triangle_area(t))
        .fold(f64::INFINITY, f64::min)
}

/// Iterates [`dirichlet_step`] from `start` until the displacement test
/// passes or the iteration budget runs out.
pub fn solve_mesh(start: TriMesh, params: &SolverParams) -> Result<(TriMesh, SolveRecord)> {
    params.validate().map_err(Error::InvalidMesh)?;
    let mut mesh = start;
    let initial_area = mesh.area();
    let mut iterations = Vec::new();
    let mut status = SolveStatus::MaxIterations;
    'outer: for iter in 1..=params.max_iterations {
        let floor = params.area_floor * mesh.area();
        let mut damping = params.damping;
        let mut step = None;
        for attempt in 0..3 {
            let trial = dirichlet_step(&mesh, &SolverParams { damping, ..*params })?;
            if min_triangle_area(&trial.mesh) > floor {
                step = Some((trial, attempt > 0));
                break;
            }
            damping *= 0.5;
        }
        let Some((step, damped)) = step else {
            status = SolveStatus::Degenerate;
            break 'outer;
        };
        let diag = step.mesh.bounding_diagonal();
        mesh = step.mesh;
        iterations.push(IterationRecord {
            iter,
            area: mesh.area(),
            max_disp: step.max_disp,
            residual: mean_curvature_residual(&mesh),
            clamped: step.clamped || damped,
        });
        if step.max_disp < params.tol_disp * diag {
            status = SolveStatus::Converged;
            break;
        }
    }
    let final_residual = mean_curvature_residual(&mesh);
    Ok((
        mesh,
        SolveRecord {
            initial_area,
            iterations,
            status,
            final_residual,
        },
    ))
}

/// Builds the initial grid over `lp` and solves.
pub fn solve_plateau(
    lp: &BoundaryLoop,
    radial_divisions: usize,
    params: &SolverParams,
) -> Result<(TriMesh, SolveRecord)> {
    solve_mesh(initial_mesh(lp, radial_divisions)?, params)
}

/// Clamped weights of the current mesh keyed by sorted edge, for diagnostics.
pub fn clamped_weights(m: &TriMesh, params: &SolverParams) -> BTreeMap<(usize, usize), f64> {
    cotan_weights(m)
        .into_iter()
        .map(|(e, w)| (e, if w.is_nan() { params.w_min } else { w.clamp(params.w_min, params.w_max) }))
        .collect()
}
