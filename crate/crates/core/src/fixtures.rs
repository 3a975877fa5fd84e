//! Analytic surfaces sampled as meshes, used by tests, benches and the
//! oracle checks of the acceptance suite.

use std::f64::consts::TAU;

use crate::geom::{Point3, Role, TriMesh, Vertex};

/// Helicoid `z = lambda * theta` over `r in [0, 1]`, `theta in [theta0, theta1]`,
/// sampled on an `nr x ntheta` polar grid (uniform in both chart coordinates).
pub fn helicoid_patch(lambda: f64, nr: usize, ntheta: usize, theta0: f64, theta1: f64) -> TriMesh {
    let radii: Vec<f64> = (0..=nr).map(|i| i as f64 / nr as f64).collect();
    let thetas: Vec<f64> = (0..=ntheta)
        .map(|j| theta0 + (theta1 - theta0) * j as f64 / ntheta as f64)
        .collect();
    TriMesh::polar_grid(&radii, &thetas, |i, j| {
        let (r, t) = (radii[i], thetas[j]);
        Point3::new(r * t.cos(), r * t.sin(), lambda * t)
    })
}

/// Graph `z = f(r, theta)` over the annulus `r in [r0, r1]`, full polar grid.
pub fn polar_graph<F: Fn(f64, f64) -> f64>(
    f: F,
    r0: f64,
    r1: f64,
    nr: usize,
    theta0: f64,
    theta1: f64,
    ntheta: usize,
) -> TriMesh {
    let radii: Vec<f64> = (0..=nr).map(|i| r0 + (r1 - r0) * i as f64 / nr as f64).collect();
    let thetas: Vec<f64> = (0..=ntheta)
        .map(|j| theta0 + (theta1 - theta0) * j as f64 / ntheta as f64)
        .collect();
    TriMesh::polar_grid(&radii, &thetas, |i, j| {
        let (r, t) = (radii[i], thetas[j]);
        Point3::new(r * t.cos(), r * t.sin(), f(r, t))
    })
}

/// Distance from `p` to the full helicoid `(s cos t, s sin t, lambda t)`,
/// `s` of either sign, measured vertically and corrected by the local
/// sheet inclination. Sheets repeat every `pi * lambda` in height.
pub fn helicoid_distance(lambda: f64, p: &Point3) -> f64 {
    let r = p.x.hypot(p.y);
    let theta = p.y.atan2(p.x);
    let pitch = lambda * std::f64::consts::PI;
    let dz = (p.z - lambda * theta).rem_euclid(pitch);
    let dz = dz.min(pitch - dz);
    // unit normal of the helicoid has vertical component r / sqrt(r^2 + lambda^2)
    dz * r / (r * r + lambda * lambda).sqrt()
}

/// Closed-form norm of the second fundamental form of `z = lambda * theta`.
pub fn helicoid_abs_a(lambda: f64, r: f64) -> f64 {
    2f64.sqrt() * lambda / (lambda * lambda + r * r)
}

/// Area of the helicoid `z = lambda * theta` over `r in [0, 1]` per radian of theta.
pub fn helicoid_area_per_radian(lambda: f64) -> f64 {
    let s = (1.0 + lambda * lambda).sqrt();
    0.5 * s + 0.5 * lambda * lambda * ((1.0 + s) / lambda).ln()
}

/// Unit disk at height `z` as concentric rings around a centre vertex;
/// `rings` rings of `sectors` vertices each give
/// `sectors * (2 * rings - 1)` triangles.
pub fn flat_disk(rings: usize, sectors: usize, z: f64) -> TriMesh {
    radial_fan(rings, sectors, 1.0, |_, _| z)
}

/// Spherical cap of sphere radius `sphere_r` over the disk of radius
/// `disk_r`, touching the plane z = 0 at the centre.
pub fn sphere_cap(sphere_r: f64, disk_r: f64, rings: usize, sectors: usize) -> TriMesh {
    radial_fan(rings, sectors, disk_r, |x, y| {
        sphere_r - (sphere_r * sphere_r - x * x - y * y).sqrt()
    })
}

fn radial_fan<F: Fn(f64, f64) -> f64>(rings: usize, sectors: usize, radius: f64, z: F) -> TriMesh {
    let mut vertices = vec![Vertex::interior(Point3::new(0.0, 0.0, z(0.0, 0.0)))];
    for k in 1..=rings {
        let r = radius * k as f64 / rings as f64;
        for s in 0..sectors {
            let t = TAU * s as f64 / sectors as f64;
            let (x, y) = (r * t.cos(), r * t.sin());
            let mut v = Vertex::interior(Point3::new(x, y, z(x, y)));
            if k == rings {
                v.boundary = true;
                v.role = Role::Helix;
            }
            vertices.push(v);
        }
    }
    let ring = |k: usize, s: usize| 1 + (k - 1) * sectors + s % sectors;
    let mut triangles = Vec::new();
    for s in 0..sectors {
        triangles.push([0, ring(1, s), ring(1, s + 1)]);
    }
    for k in 1..rings {
        for s in 0..sectors {
            triangles.push([ring(k, s), ring(k + 1, s), ring(k + 1, s + 1)]);
            triangles.push([ring(k, s), ring(k + 1, s + 1), ring(k, s + 1)]);
        }
    }
    TriMesh::new(vertices, triangles)
}

/// Closed unit icosphere after `subdivisions` rounds of 4-to-1 splitting.
pub fn icosphere(subdivisions: usize) -> TriMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts: Vec<Point3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Point3::from(nalgebra::Vector3::new(x, y, z).normalize()))
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut mid = std::collections::HashMap::new();
        let mut midpoint = |a: usize, b: usize, pts: &mut Vec<Point3>| -> usize {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let m = (pts[a].coords + pts[b].coords).normalize();
                pts.push(Point3::from(m));
                pts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut pts);
            let bc = midpoint(b, c, &mut pts);
            let ca = midpoint(c, a, &mut pts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    TriMesh::new(pts.into_iter().map(Vertex::interior).collect(), faces)
}

/// Two parallel, disjoint square sheets based at heights `z0` and `z1`,
/// tilted so that horizontal sections cross both.
pub fn stacked_sheets(z0: f64, z1: f64) -> TriMesh {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (k, z) in [z0, z1].into_iter().enumerate() {
        let base = 4 * k;
        for (x, y) in [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)] {
            let mut v = Vertex::interior(Point3::new(x, y, z));
            v.boundary = true;
            v.role = Role::Helix;
            vertices.push(v);
        }
        triangles.push([base, base + 1, base + 2]);
        triangles.push([base, base + 2, base + 3]);
    }
    for v in &mut vertices {
        v.position.z += 0.5 * v.position.x;
    }
    TriMesh::new(vertices, triangles)
}

/// Planar patch of equilateral triangles (side `1 / k`) filling a regular
/// hexagon of circumradius 1 at height `z`.
pub fn hex_patch(k: i64, z: f64) -> TriMesh {
    let inside = |a: i64, b: i64| a.abs() <= k && b.abs() <= k && (a + b).abs() <= k;
    let mut index = std::collections::BTreeMap::new();
    let mut vertices = Vec::new();
    for a in -k..=k {
        for b in -k..=k {
            if inside(a, b) {
                index.insert((a, b), vertices.len());
                let (x, y) = (a as f64 + 0.5 * b as f64, 0.75f64.sqrt() * b as f64);
                vertices.push(Vertex::interior(Point3::new(x / k as f64, y / k as f64, z)));
            }
        }
    }
    let mut triangles = Vec::new();
    for (&(a, b), &v) in &index {
        if let (Some(&p), Some(&q)) = (index.get(&(a + 1, b)), index.get(&(a, b + 1))) {
            triangles.push([v, p, q]);
        }
        if let (Some(&p), Some(&q)) = (index.get(&(a + 1, b)), index.get(&(a + 1, b - 1))) {
            triangles.push([v, q, p]);
        }
    }
    let mut m = TriMesh::new(vertices, triangles);
    m.refresh_boundary_flags();
    for v in m.vertices.iter_mut().filter(|v| v.boundary) {
        v.role = Role::Helix;
    }
    m
}
