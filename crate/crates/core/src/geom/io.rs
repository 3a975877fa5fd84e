//! Wavefront OBJ meshes plus the role/chart sidecar CSV.
//!
//! Floats are written with Rust's shortest round-trip formatting so that
//! identical meshes produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::mesh::{Chart, Role, TriMesh, Vertex};
use super::{radius, Point3};
use crate::error::{Error, Result};

pub const SIDECAR_HEADER: [&str; 4] = ["vertex_id", "role", "r", "theta_unwrapped"];

pub fn obj_string(m: &TriMesh) -> String {
    let mut s = String::with_capacity(48 * (m.vertices.len() + m.triangles.len()));
    for v in &m.vertices {
        let p = v.position;
        let _ = writeln!(s, "v {} {} {}", p.x, p.y, p.z);
    }
    for t in &m.triangles {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

pub fn write_obj(m: &TriMesh, path: &Path) -> Result<()> {
    fs::write(path, obj_string(m)).map_err(|e| Error::io(path, e))
}

/// Parses `v` and `f` lines; other statements are ignored. Face entries of
/// the form `i/t/n` keep only the position index.
pub fn parse_obj(text: &str, path: &Path) -> Result<TriMesh> {
    let bad = |line: usize, msg: &str| Error::Parse {
        path: path.to_path_buf(),
        message: format!("line {}: {msg}", line + 1),
    };
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it
                    .take(3)
                    .map(|s| s.parse::<f64>().map_err(|_| bad(ln, "bad coordinate")))
                    .collect::<Result<_>>()?;
                if c.len() != 3 {
                    return Err(bad(ln, "vertex needs three coordinates"));
                }
                vertices.push(Vertex::interior(Point3::new(c[0], c[1], c[2])));
            }
            Some("f") => {
                let idx: Vec<usize> = it
                    .map(|s| {
                        s.split('/')
                            .next()
                            .and_then(|i| i.parse::<usize>().ok())
                            .filter(|&i| i >= 1)
                            .map(|i| i - 1)
                            .ok_or_else(|| bad(ln, "bad face index"))
                    })
                    .collect::<Result<_>>()?;
                if idx.len() != 3 {
                    return Err(bad(ln, "only triangles are supported"));
                }
                triangles.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    let mut m = TriMesh::new(vertices, triangles);
    if m.triangles.iter().flatten().any(|&i| i >= m.vertices.len()) {
        return Err(bad(0, "face references a missing vertex"));
    }
    m.refresh_boundary_flags();
    infer_roles(&mut m);
    Ok(m)
}

pub fn read_obj(path: &Path) -> Result<TriMesh> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_obj(&text, path)
}

/// Guesses boundary roles from geometry when no sidecar is available:
/// r = 1 is helix, r = 0 is axis, anything else is radial (top or bottom
/// by height).
pub fn infer_roles(m: &mut TriMesh) {
    let (lo, hi) = m.bounding_box();
    let mid = 0.5 * (lo.z + hi.z);
    for v in &mut m.vertices {
        if !v.boundary {
            continue;
        }
        let r = radius(&v.position);
        v.role = if (r - 1.0).abs() < 1e-9 {
            Role::Helix
        } else if r < 1e-9 {
            Role::Axis
        } else if v.position.z > mid {
            Role::RadialTop
        } else {
            Role::RadialBottom
        };
    }
}

pub fn sidecar_string(m: &TriMesh) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SIDECAR_HEADER).expect("in-memory write");
    for (i, v) in m.vertices.iter().enumerate() {
        let (r, th) = match v.chart {
            Some(c) => (c.r.to_string(), c.theta.to_string()),
            None => (String::new(), String::new()),
        };
        w.write_record([i.to_string(), v.role.to_string(), r, th])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
}

pub fn write_sidecar(m: &TriMesh, path: &Path) -> Result<()> {
    fs::write(path, sidecar_string(m)).map_err(|e| Error::io(path, e))
}

/// Applies roles and chart pairs from a sidecar to a mesh read from OBJ.
pub fn apply_sidecar(m: &mut TriMesh, text: &str, path: &Path) -> Result<()> {
    let bad = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != SIDECAR_HEADER {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let id: usize = rec[0].parse().map_err(|_| bad(format!("bad vertex id {}", &rec[0])))?;
        let v = m
            .vertices
            .get_mut(id)
            .ok_or_else(|| bad(format!("vertex {id} not in mesh")))?;
        v.role = Role::parse(&rec[1]).ok_or_else(|| bad(format!("unknown role {}", &rec[1])))?;
        v.boundary = v.role != Role::Interior;
        v.chart = if rec[2].is_empty() {
            None
        } else {
            let r = rec[2].parse().map_err(|_| bad(format!("bad r {}", &rec[2])))?;
            let theta = rec[3].parse().map_err(|_| bad(format!("bad theta {}", &rec[3])))?;
            Some(Chart { r, theta })
        };
    }
    Ok(())
}

pub fn read_sidecar(m: &mut TriMesh, path: &Path) -> Result<()> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    apply_sidecar(m, &text, path)
}

/// Closed polyline as OBJ `v` lines plus one `l` statement.
pub fn polyline_obj_string(points: &[Point3]) -> String {
    let mut s = String::new();
    for p in points {
        let _ = writeln!(s, "v {} {} {}", p.x, p.y, p.z);
    }
    s.push('l');
    for i in 1..=points.len() {
        let _ = write!(s, " {i}");
    }
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn obj_and_sidecar_round_trip() {
        let m = fixtures::helicoid_patch(0.2, 4, 12, 0.0, 1.0);
        let path = Path::new("mem.obj");
        let mut back = parse_obj(&obj_string(&m), path).unwrap();
        apply_sidecar(&mut back, &sidecar_string(&m), path).unwrap();
        assert_eq!(back, m);
        assert_eq!(obj_string(&back), obj_string(&m));
    }

    #[test]
    fn obj_uses_one_based_indices() {
        let m = fixtures::helicoid_patch(0.2, 4, 12, 0.0, 1.0);
        let s = obj_string(&m);
        assert!(s.lines().any(|l| l.starts_with("f 1 ")));
        assert!(!s.lines().any(|l| l.starts_with("f ") && l.split(' ').any(|t| t == "0")));
    }

    #[test]
    fn bad_face_is_an_error() {
        let err = parse_obj("v 0 0 0\nf 1 2 3\n", Path::new("x.obj")).unwrap_err();
        assert!(err.to_string().contains("missing vertex"));
    }

    #[test]
    fn polyline_lists_every_point() {
        let s = polyline_obj_string(&[Point3::origin(), Point3::new(1.0, 0.0, 0.0)]);
        assert_eq!(s, "v 0 0 0\nv 1 0 0\nl 1 2\n");
    }
}
