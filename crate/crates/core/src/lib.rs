//! Numerical laboratory for sequences of embedded minimal disks spanning
//! helix-axis boundary curves whose winding concentrates near a prescribed
//! closed subset of the vertical axis.

pub mod analysis;
pub mod boundary;
pub mod error;
pub mod fixtures;
pub mod geom;
pub mod harness;
pub mod kset;
pub mod plateau;
pub mod reflect;
pub mod sparse;

pub use error::{Error, Result};
pub use geom::{Chart, Isometry, Point3, Role, TriMesh, Vec3, Vertex};
pub use kset::{ClosedSetSpec, Members};
