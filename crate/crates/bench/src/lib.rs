//! Shared setup for the pipeline benchmarks.

use std::sync::Arc;

use lamlab_core::boundary::{BoundaryLoop, WindingProfile};
use lamlab_core::harness::{ExperimentConfig, Preset};
use lamlab_core::plateau::{initial_mesh, solve_mesh};
use lamlab_core::TriMesh;

/// Point preset shrunk to a size that solves in well under a second.
pub fn small_point(n: u32) -> ExperimentConfig {
    let mut cfg = Preset::Point.config();
    cfg.n = vec![n];
    cfg.radial_divisions = 16;
    cfg.boundary.theta_step_max = std::f64::consts::PI / 24.0;
    cfg
}

pub fn boundary(cfg: &ExperimentConfig) -> BoundaryLoop {
    let kset = cfg.kset_spec().expect("valid kset");
    let profile = Arc::new(WindingProfile::new(cfg.n[0], &cfg.boundary, kset).expect("valid profile"));
    BoundaryLoop::from_profile(profile, &cfg.boundary, cfg.radial_divisions).expect("boundary assembles")
}

pub fn start_mesh(cfg: &ExperimentConfig) -> TriMesh {
    initial_mesh(&boundary(cfg), cfg.radial_divisions).expect("grid builds")
}

pub fn solved_mesh(cfg: &ExperimentConfig) -> TriMesh {
    solve_mesh(start_mesh(cfg), &cfg.solver).expect("solver runs").0
}
