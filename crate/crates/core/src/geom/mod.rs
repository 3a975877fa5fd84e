//! Geometric primitives shared by the solver and the analysis passes.
//!
//! Model units put the cylinder radius at 1. Points are plain
//! `nalgebra` points; the only rigid motions we ever need are rotations
//! about the vertical axis and half-turns about horizontal lines, which
//! realize Schwarz reflection across straight boundary segments.

mod distance;
pub mod io;
mod mesh;
mod operators;

pub use distance::{
    mesh_distance, mesh_distance_brute_force, point_triangle_distance, segment_triangle_intersect,
    triangles_intersect,
};
pub use operators::{angle_defects, cotan_weights, mixed_areas};
pub use mesh::{
    BoundaryChain, Chart, MeshIssue, Role, TriMesh, ValidationReport, Vertex, DEFAULT_AREA_FLOOR,
};

pub type Point3 = nalgebra::Point3<f64>;
pub type Vec3 = nalgebra::Vector3<f64>;

/// Radial distance from the vertical axis.
#[inline]
pub fn radius(p: &Point3) -> f64 {
    p.x.hypot(p.y)
}

/// Rigid motion fixing the vertical axis setwise (rotations) or a
/// horizontal line pointwise (half-turns).
#[derive(Debug, Clone, PartialEq)]
pub enum Isometry {
    RotateAboutZ(f64),
    /// Rotation by pi about the line through `point` with horizontal unit
    /// direction `direction`.
    HalfTurnAboutLine { point: Point3, direction: Vec3 },
    /// Applied left to right: the first element acts first.
    Compose(Vec<Isometry>),
}

impl Isometry {
    /// Half-turn about a horizontal line. The direction is normalized and
    /// its vertical component dropped.
    pub fn half_turn(point: Point3, direction: Vec3) -> Self {
        let d = Vec3::new(direction.x, direction.y, 0.0);
        let n = d.norm();
        assert!(n > 0.0, "half-turn direction must have a horizontal part");
        Isometry::HalfTurnAboutLine {
            point,
            direction: d / n,
        }
    }

    pub fn apply(&self, p: &Point3) -> Point3 {
        match self {
            Isometry::RotateAboutZ(angle) => {
                let (s, c) = angle.sin_cos();
                Point3::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z)
            }
            Isometry::HalfTurnAboutLine { point, direction } => {
                // v -> 2 (v.d) d - v for v relative to the line
                let v = p - point;
                let along = direction * v.dot(direction);
                point + (2.0 * along - v)
            }
            Isometry::Compose(parts) => parts.iter().fold(*p, |q, iso| iso.apply(&q)),
        }
    }

    /// Linear part applied to a direction vector.
    pub fn apply_vector(&self, v: &Vec3) -> Vec3 {
        let origin = Point3::origin();
        self.apply(&(origin + v)) - self.apply(&origin)
    }

    /// 3x3 linear part.
    pub fn linear_part(&self) -> nalgebra::Matrix3<f64> {
        let cols = [Vec3::x(), Vec3::y(), Vec3::z()].map(|e| self.apply_vector(&e));
        nalgebra::Matrix3::from_columns(&cols)
    }
}

/// Applies `iso` to `p`.
pub fn apply_isometry(iso: &Isometry, p: &Point3) -> Point3 {
    iso.apply(p)
}

/// Nearest representative of `angle` (mod 2 pi) to `reference`.
pub fn unwrap_near(angle: f64, reference: f64) -> f64 {
    use std::f64::consts::TAU;
    angle + TAU * ((reference - angle) / TAU).round()
}

/// Oriented triangle area vector (half the cross product).
#[inline]
pub fn triangle_area_vector(a: &Point3, b: &Point3, c: &Point3) -> Vec3 {
    0.5 * (b - a).cross(&(c - a))
}

#[inline]
pub fn triangle_area(a: &Point3, b: &Point3, c: &Point3) -> f64 {
    triangle_area_vector(a, b, c).norm()
}
