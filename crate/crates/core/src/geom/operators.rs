//! Cotangent weights, mixed Voronoi areas and angle defects.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use super::{Point3, TriMesh};

fn cot(a: &Point3, o: &Point3, b: &Point3) -> f64 {
    // cotangent of the angle at `o` in triangle (a, o, b)
    let (u, v) = (a - o, b - o);
    let cross = u.cross(&v).norm();
    if cross == 0.0 {
        return if u.dot(&v) >= 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    u.dot(&v) / cross
}

fn angle(a: &Point3, o: &Point3, b: &Point3) -> f64 {
    let (u, v) = (a - o, b - o);
    u.cross(&v).norm().atan2(u.dot(&v))
}

/// Edge weights `(cot alpha + cot beta) / 2` keyed by sorted vertex pair,
/// with one term for boundary edges. Unclamped.
pub fn cotan_weights(m: &TriMesh) -> BTreeMap<(usize, usize), f64> {
    let mut w = BTreeMap::new();
    for t in &m.triangles {
        for k in 0..3 {
            let (i, j, o) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            let p = &m.vertices;
            let c = cot(&p[i].position, &p[o].position, &p[j].position);
            *w.entry((i.min(j), i.max(j))).or_insert(0.0) += 0.5 * c;
        }
    }
    w
}

/// Mixed Voronoi area per vertex: Voronoi regions inside non-obtuse
/// triangles, half or quarter triangle areas for obtuse ones.
pub fn mixed_areas(m: &TriMesh) -> Vec<f64> {
    let mut area = vec![0.0; m.vertices.len()];
    for t in &m.triangles {
        let p = t.map(|i| m.vertices[i].position);
        let full = super::triangle_area(&p[0], &p[1], &p[2]);
        let ang = [
            angle(&p[1], &p[0], &p[2]),
            angle(&p[2], &p[1], &p[0]),
            angle(&p[0], &p[2], &p[1]),
        ];
        let obtuse = ang.iter().position(|&a| a > 0.5 * PI);
        for k in 0..3 {
            let add = match obtuse {
                Some(o) if o == k => 0.5 * full,
                Some(_) => 0.25 * full,
                None => {
                    let (k1, k2) = ((k + 1) % 3, (k + 2) % 3);
                    let e1 = (p[k1] - p[k]).norm_squared();
                    let e2 = (p[k2] - p[k]).norm_squared();
                    // edge k-k1 is opposite corner k2, edge k-k2 opposite k1
                    0.125 * (e1 / ang[k2].tan() + e2 / ang[k1].tan())
                }
            };
            area[t[k]] += add;
        }
    }
    area
}

/// `2 pi` minus the sum of incident triangle angles, per vertex.
pub fn angle_defects(m: &TriMesh) -> Vec<f64> {
    let mut def = vec![TAU; m.vertices.len()];
    for t in &m.triangles {
        let p = t.map(|i| m.vertices[i].position);
        for k in 0..3 {
            def[t[k]] -= angle(&p[(k + 1) % 3], &p[k], &p[(k + 2) % 3]);
        }
    }
    def
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn right_triangle_weights() {
        let m = TriMesh::new(
            vec![
                super::super::Vertex::interior(Point3::new(0.0, 0.0, 0.0)),
                super::super::Vertex::interior(Point3::new(1.0, 0.0, 0.0)),
                super::super::Vertex::interior(Point3::new(0.0, 1.0, 0.0)),
            ],
            vec![[0, 1, 2]],
        );
        let w = cotan_weights(&m);
        // legs see 45 degree angles, the hypotenuse sees the right angle
        assert!((w[&(0, 1)] - 0.5).abs() < 1e-15);
        assert!((w[&(0, 2)] - 0.5).abs() < 1e-15);
        assert!(w[&(1, 2)].abs() < 1e-15);
        let a = mixed_areas(&m);
        assert!((a.iter().sum::<f64>() - 0.5).abs() < 1e-15);
        assert!((a[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn mixed_areas_partition_total_area() {
        let m = fixtures::helicoid_patch(0.2, 8, 24, 0.0, 2.0);
        let s: f64 = mixed_areas(&m).iter().sum();
        assert!((s - m.area()).abs() < 1e-12 * m.area());
    }

    #[test]
    fn flat_interior_defects_vanish() {
        let m = fixtures::flat_disk(4, 16, 0.0);
        let d = angle_defects(&m);
        for v in m.interior_vertices() {
            assert!(d[v].abs() < 1e-12);
        }
    }
}
