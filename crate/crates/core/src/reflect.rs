//! Schwarz extension across the straight boundary segments.
//!
//! A half-turn about a straight boundary line maps a minimal disk onto its
//! continuation across that line. Copies are welded to the original along
//! the shared segment, so the result is again a single disk.

use crate::error::{Error, Result};
use crate::geom::{Chart, Isometry, MeshIssue, Role, TriMesh};

pub const WELD_TOLERANCE: f64 = 1e-9;

/// Which boundary chain of each mesh gets identified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pairing {
    pub keep: Role,
    pub attach: Role,
}

/// Merges `b` into `a` along the chains named by `pairing`. Paired
/// vertices must agree to within `tol`; `b` is reoriented if needed. Weld
/// vertices that end up inside the disk become interior.
pub fn weld(a: &TriMesh, b: &TriMesh, pairing: Pairing, tol: f64) -> Result<TriMesh> {
    let ca = a
        .boundary_chain(pairing.keep)
        .ok_or_else(|| Error::Weld(format!("first mesh has no {} chain", pairing.keep)))?;
    let cb = b
        .boundary_chain(pairing.attach)
        .ok_or_else(|| Error::Weld(format!("second mesh has no {} chain", pairing.attach)))?;
    if ca.vertices.len() != cb.vertices.len() {
        return Err(Error::Weld(format!(
            "chain lengths differ: {} vs {}",
            ca.vertices.len(),
            cb.vertices.len()
        )));
    }
    let gap = |order: &mut dyn Iterator<Item = usize>| -> f64 {
        ca.vertices
            .iter()
            .zip(order)
            .map(|(&i, j)| (a.vertices[i].position - b.vertices[j].position).norm())
            .fold(0.0, f64::max)
    };
    let forward = gap(&mut cb.vertices.iter().copied());
    let backward = gap(&mut cb.vertices.iter().rev().copied());
    let mut partner = cb.vertices.clone();
    let worst = if backward < forward {
        partner.reverse();
        backward
    } else {
        forward
    };
    if worst > tol {
        return Err(Error::Weld(format!(
            "paired vertices differ by {worst:e}, tolerance {tol:e}"
        )));
    }

    // b's vertices land after a's unless they are identified with a chain vertex
    let mut map = vec![usize::MAX; b.vertices.len()];
    for (&i, &j) in ca.vertices.iter().zip(&partner) {
        map[j] = i;
    }
    let mut vertices = a.vertices.clone();
    for (j, v) in b.vertices.iter().enumerate() {
        if map[j] == usize::MAX {
            map[j] = vertices.len();
            vertices.push(v.clone());
        }
    }
    let mut b_tris: Vec<[usize; 3]> = b.triangles.iter().map(|t| t.map(|i| map[i])).collect();

    // a directed edge shared by both halves must run opposite ways
    let directed: std::collections::HashSet<(usize, usize)> = a
        .triangles
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .collect();
    let same_way = b_tris
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .any(|e| directed.contains(&e));
    if same_way {
        for t in &mut b_tris {
            t.swap(1, 2);
        }
    }
    let mut triangles = a.triangles.clone();
    triangles.extend(b_tris);
    let mut out = TriMesh::new(vertices, triangles);
    out.refresh_boundary_flags();
    let report = out.validate();
    if let Some(issue) = report.issues.iter().find(|i| {
        matches!(
            i,
            MeshIssue::NonManifoldEdge { .. }
                | MeshIssue::NonManifoldVertex { .. }
                | MeshIssue::InconsistentOrientation { .. }
                | MeshIssue::BoundaryLoops { .. }
        )
    }) {
        return Err(Error::Weld(format!("welded mesh is not a disk: {issue}")));
    }
    Ok(out)
}

fn chain_line(m: &TriMesh, role: Role) -> Result<Isometry> {
    let chain = m
        .boundary_chain(role)
        .ok_or_else(|| Error::Weld(format!("mesh has no {role} chain")))?;
    let first = m.vertices[chain.vertices[0]].position;
    let last = m.vertices[*chain.vertices.last().unwrap()].position;
    let (axis_end, rim_end) = if first.x.hypot(first.y) <= last.x.hypot(last.y) {
        (first, last)
    } else {
        (last, first)
    };
    let dir = rim_end - axis_end;
    if dir.x.hypot(dir.y) == 0.0 {
        return Err(Error::Weld(format!("{role} chain is not a horizontal segment")));
    }
    Ok(Isometry::half_turn(axis_end, dir))
}

/// Half-turn image of `m` about its `role` line: roles of the two radial
/// chains swap, charts follow `theta -> 2 theta_line - theta`, and
/// orientation is reversed so the copy can be welded onto `m`.
fn reflected_copy(m: &TriMesh, role: Role) -> Result<TriMesh> {
    let iso = chain_line(m, role)?;
    let chain = m.boundary_chain(role).expect("checked by chain_line");
    let theta_line = chain
        .vertices
        .iter()
        .find_map(|&i| m.vertices[i].chart.filter(|c| c.r > 0.0).map(|c| c.theta));
    let mut copy = m.clone();
    for v in &mut copy.vertices {
        v.position = iso.apply(&v.position);
        v.role = match v.role {
            Role::RadialTop => Role::RadialBottom,
            Role::RadialBottom => Role::RadialTop,
            r => r,
        };
        if let (Some(c), Some(t)) = (v.chart.as_mut(), theta_line) {
            c.theta = 2.0 * t - c.theta;
        }
    }
    copy.flip_orientation();
    Ok(copy)
}

/// Repeated Schwarz reflection across the radial boundary segments:
/// `levels` copies are stacked above and `levels` below.
pub fn schwarz_extend(m: &TriMesh, levels: usize) -> Result<TriMesh> {
    let mut out = m.clone();
    let (mut top, mut bottom) = (m.clone(), m.clone());
    for _ in 0..levels {
        let up = reflected_copy(&top, Role::RadialTop)?;
        out = weld(
            &out,
            &up,
            Pairing {
                keep: Role::RadialTop,
                attach: Role::RadialBottom,
            },
            WELD_TOLERANCE,
        )?;
        top = up;
        let down = reflected_copy(&bottom, Role::RadialBottom)?;
        out = weld(
            &out,
            &down,
            Pairing {
                keep: Role::RadialBottom,
                attach: Role::RadialTop,
            },
            WELD_TOLERANCE,
        )?;
        bottom = down;
    }
    Ok(out)
}

/// Welds `m` to its rotation by pi about the axis. Charts on the copy get
/// `theta + pi` and a negated `r`, which keeps its rows apart from the
/// original ones.
pub fn axis_double(m: &TriMesh) -> Result<TriMesh> {
    let iso = Isometry::RotateAboutZ(std::f64::consts::PI);
    let mut copy = m.clone();
    for v in &mut copy.vertices {
        v.position = iso.apply(&v.position);
        if let Some(c) = v.chart.as_mut() {
            *c = Chart {
                r: -c.r,
                theta: c.theta + std::f64::consts::PI,
            };
        }
    }
    weld(
        m,
        &copy,
        Pairing {
            keep: Role::Axis,
            attach: Role::Axis,
        },
        WELD_TOLERANCE,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geom::{triangles_intersect, Point3};
    use std::f64::consts::TAU;

    #[test]
    fn zero_levels_is_identity() {
        let m = fixtures::helicoid_patch(0.2, 4, 12, 0.0, TAU);
        let e = schwarz_extend(&m, 0).unwrap();
        assert_eq!(e.vertices, m.vertices);
        assert_eq!(e.triangles, m.triangles);
    }

    #[test]
    fn one_level_reproduces_helicoid() {
        let lambda = 0.2;
        let (nr, nt) = (6, 24);
        let m = fixtures::helicoid_patch(lambda, nr, nt, 0.0, TAU);
        let e = schwarz_extend(&m, 1).unwrap();
        // each copy shares its nr + 1 radial vertices with the middle piece
        assert_eq!(e.vertices.len(), 3 * m.vertices.len() - 2 * (nr + 1));
        assert_eq!(e.triangles.len(), 3 * m.triangles.len());
        let rep = e.validate();
        assert!(rep.passed(), "{:?}", rep.issues);
        for v in &e.vertices {
            assert!(fixtures::helicoid_distance(lambda, &v.position) < 1e-9);
        }
        let (lo, hi) = e
            .vertices
            .iter()
            .filter_map(|v| v.chart)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c.theta), hi.max(c.theta)));
        assert!((lo + TAU).abs() < 1e-9 && (hi - 2.0 * TAU).abs() < 1e-9);
        // charts track positions: z = lambda * theta on every copy
        for v in &e.vertices {
            let c = v.chart.unwrap();
            assert!((v.position.z - lambda * c.theta).abs() < 1e-9);
        }
        assert!((e.area() - 3.0 * m.area()).abs() < 1e-12 * e.area());
    }

    #[test]
    fn reflected_triangles_keep_their_areas() {
        let m = fixtures::helicoid_patch(0.3, 5, 17, 0.0, 3.0);
        let e = schwarz_extend(&m, 2).unwrap();
        let mut src: Vec<f64> = (0..m.triangles.len()).map(|t| m.triangle_area(t)).collect();
        src.sort_by(f64::total_cmp);
        let mut ext: Vec<f64> = (0..e.triangles.len()).map(|t| e.triangle_area(t)).collect();
        ext.sort_by(f64::total_cmp);
        for (k, a) in src.iter().enumerate() {
            // five copies of every triangle
            for c in 0..5 {
                assert!((ext[5 * k + c] - a).abs() <= 1e-12 * a.max(1e-3));
            }
        }
    }

    #[test]
    fn axis_double_welds_axis_once() {
        let lambda = 0.2;
        let (nr, nt) = (5, 20);
        let m = fixtures::helicoid_patch(lambda, nr, nt, 0.0, TAU);
        let d = axis_double(&m).unwrap();
        assert_eq!(d.vertices.len(), 2 * m.vertices.len() - (nt + 1));
        let rep = d.validate();
        assert!(rep.passed(), "{:?}", rep.issues);
        let on_axis = d
            .vertices
            .iter()
            .filter(|v| v.position.x.hypot(v.position.y) < 1e-12)
            .count();
        assert_eq!(on_axis, nt + 1);
        // interior axis vertices are no longer boundary
        let interior_axis = d
            .vertices
            .iter()
            .filter(|v| v.position.x.hypot(v.position.y) < 1e-12 && !v.boundary)
            .count();
        assert_eq!(interior_axis, nt - 1);
        for v in &d.vertices {
            assert!(fixtures::helicoid_distance(lambda, &v.position) < 1e-9);
        }
    }

    #[test]
    fn shifted_copy_fails_to_weld() {
        let m = fixtures::helicoid_patch(0.2, 4, 12, 0.0, TAU);
        let mut shifted = m.clone();
        for v in &mut shifted.vertices {
            v.position.x += 1e-6;
        }
        let pairing = Pairing {
            keep: Role::Axis,
            attach: Role::Axis,
        };
        assert!(matches!(weld(&m, &shifted, pairing, 1e-9), Err(Error::Weld(_))));
    }

    #[test]
    fn mirror_weld_keeps_disk_topology_and_area() {
        // unit square split in two, welded to its mirror image across x = 1
        let tagged = |x: f64, y: f64, role: Role| crate::geom::Vertex {
            position: Point3::new(x, y, 0.0),
            boundary: true,
            role,
            chart: None,
        };
        let a = TriMesh::new(
            vec![
                tagged(0.0, 0.0, Role::Helix),
                tagged(1.0, 0.0, Role::RadialTop),
                tagged(1.0, 1.0, Role::RadialTop),
                tagged(0.0, 1.0, Role::Helix),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        );
        let mut b = a.clone();
        for v in &mut b.vertices {
            v.position.x = 2.0 - v.position.x;
        }
        let w = weld(
            &a,
            &b,
            Pairing {
                keep: Role::RadialTop,
                attach: Role::RadialTop,
            },
            1e-12,
        )
        .unwrap();
        let rep = w.validate();
        assert!(rep.passed(), "{:?}", rep.issues);
        assert_eq!(rep.euler_characteristic, 1);
        assert_eq!(w.vertices.len(), 6);
        assert!((w.area() - a.area() - b.area()).abs() < 1e-15);
    }

    #[test]
    fn doubled_helicoid_is_embedded_away_from_axis() {
        let m = fixtures::helicoid_patch(0.25, 6, 30, 0.0, TAU);
        let d = axis_double(&m).unwrap();
        let h = d.edge_scale();
        let keep: Vec<usize> = (0..d.triangles.len())
            .filter(|&t| {
                d.corners(t)
                    .iter()
                    .all(|p| p.x.hypot(p.y) >= 2.0 * h)
            })
            .collect();
        for (k, &s) in keep.iter().enumerate() {
            for &t in &keep[k + 1..] {
                let (ts, tt) = (d.triangles[s], d.triangles[t]);
                if ts.iter().any(|i| tt.contains(i)) {
                    continue;
                }
                assert!(!triangles_intersect(&d.corners(s), &d.corners(t)));
            }
        }
    }
}
