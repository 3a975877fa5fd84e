use super::{Point3, TriMesh};
use crate::error::{Error, Result};

/// Euclidean distance from `p` to the closed triangle `abc`.
///
/// Closest-feature classification over the Voronoi regions of the
/// triangle's vertices, edges and face.
pub fn point_triangle_distance(p: &Point3, a: &Point3, b: &Point3, c: &Point3) -> f64 {
    (p - closest_point_on_triangle(p, a, b, c)).norm()
}

fn closest_point_on_triangle(p: &Point3, a: &Point3, b: &Point3, c: &Point3) -> Point3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

/// Whether the closed segment `pq` crosses the triangle `abc`
/// (coplanar contact is not reported).
pub fn segment_triangle_intersect(p: &Point3, q: &Point3, a: &Point3, b: &Point3, c: &Point3) -> bool {
    let dir = q - p;
    let e1 = b - a;
    let e2 = c - a;
    let h = dir.cross(&e2);
    let det = e1.dot(&h);
    let scale = e1.norm() * e2.norm() * dir.norm();
    if det.abs() <= 1e-14 * scale {
        return false;
    }
    let inv = 1.0 / det;
    let s = p - a;
    let u = inv * s.dot(&h);
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let qv = s.cross(&e1);
    let v = inv * dir.dot(&qv);
    if v < 0.0 || u + v > 1.0 {
        return false;
    }
    let t = inv * e2.dot(&qv);
    (0.0..=1.0).contains(&t)
}

/// Whether two triangles in general position intersect.
pub fn triangles_intersect(t1: &[Point3; 3], t2: &[Point3; 3]) -> bool {
    let crosses = |s: &[Point3; 3], t: &[Point3; 3]| {
        (0..3).any(|k| segment_triangle_intersect(&s[k], &s[(k + 1) % 3], &t[0], &t[1], &t[2]))
    };
    crosses(t1, t2) || crosses(t2, t1)
}

#[derive(Debug, Clone, Copy)]
struct Aabb {
    lo: [f64; 3],
    hi: [f64; 3],
}

impl Aabb {
    fn empty() -> Self {
        Aabb {
            lo: [f64::INFINITY; 3],
            hi: [f64::NEG_INFINITY; 3],
        }
    }

    fn grow(&mut self, p: &Point3) {
        for k in 0..3 {
            self.lo[k] = self.lo[k].min(p[k]);
            self.hi[k] = self.hi[k].max(p[k]);
        }
    }

    fn merge(&mut self, o: &Aabb) {
        for k in 0..3 {
            self.lo[k] = self.lo[k].min(o.lo[k]);
            self.hi[k] = self.hi[k].max(o.hi[k]);
        }
    }

    fn distance(&self, p: &Point3) -> f64 {
        let mut s = 0.0;
        for k in 0..3 {
            let d = (self.lo[k] - p[k]).max(p[k] - self.hi[k]).max(0.0);
            s += d * d;
        }
        s.sqrt()
    }
}

enum Node {
    Leaf { bounds: Aabb, tris: Vec<usize> },
    Split { bounds: Aabb, left: Box<Node>, right: Box<Node> },
}

impl Node {
    fn bounds(&self) -> &Aabb {
        match self {
            Node::Leaf { bounds, .. } | Node::Split { bounds, .. } => bounds,
        }
    }
}

/// Bounding-volume hierarchy over a triangle subset, for nearest-triangle queries.
struct TriangleTree<'a> {
    mesh: &'a TriMesh,
    root: Option<Node>,
}

impl<'a> TriangleTree<'a> {
    fn new(mesh: &'a TriMesh, tris: Vec<usize>) -> Self {
        let boxes: Vec<(Aabb, Point3)> = (0..mesh.triangles.len())
            .map(|t| {
                let c = mesh.corners(t);
                let mut b = Aabb::empty();
                c.iter().for_each(|p| b.grow(p));
                (b, Point3::from((c[0].coords + c[1].coords + c[2].coords) / 3.0))
            })
            .collect();
        let root = (!tris.is_empty()).then(|| Self::build(&boxes, tris));
        TriangleTree { mesh, root }
    }

    fn build(boxes: &[(Aabb, Point3)], mut tris: Vec<usize>) -> Node {
        let mut bounds = Aabb::empty();
        tris.iter().for_each(|&t| bounds.merge(&boxes[t].0));
        if tris.len() <= 4 {
            return Node::Leaf { bounds, tris };
        }
        let mut cb = Aabb::empty();
        tris.iter().for_each(|&t| cb.grow(&boxes[t].1));
        let axis = (0..3)
            .max_by(|&i, &j| (cb.hi[i] - cb.lo[i]).total_cmp(&(cb.hi[j] - cb.lo[j])))
            .unwrap();
        let mid = tris.len() / 2;
        tris.select_nth_unstable_by(mid, |&s, &t| boxes[s].1[axis].total_cmp(&boxes[t].1[axis]));
        let right = tris.split_off(mid);
        Node::Split {
            bounds,
            left: Box::new(Self::build(boxes, tris)),
            right: Box::new(Self::build(boxes, right)),
        }
    }

    fn nearest(&self, p: &Point3) -> f64 {
        let mut best = f64::INFINITY;
        let Some(root) = &self.root else {
            return best;
        };
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            if node.bounds().distance(p) >= best {
                continue;
            }
            match node {
                Node::Leaf { tris, .. } => {
                    for &t in tris {
                        let [a, b, c] = self.mesh.corners(t);
                        best = best.min(point_triangle_distance(p, &a, &b, &c));
                    }
                }
                Node::Split { left, right, .. } => {
                    let (dl, dr) = (left.bounds().distance(p), right.bounds().distance(p));
                    if dl < dr {
                        stack.push(right);
                        stack.push(left);
                    } else {
                        stack.push(left);
                        stack.push(right);
                    }
                }
            }
        }
        best
    }
}

fn region_parts<F: Fn(&Point3) -> bool>(m: &TriMesh, region: &F) -> (Vec<usize>, Vec<usize>) {
    let verts = (0..m.vertices.len())
        .filter(|&i| region(&m.vertices[i].position))
        .collect();
    let tris = (0..m.triangles.len())
        .filter(|&t| m.triangles[t].iter().any(|&i| region(&m.vertices[i].position)))
        .collect();
    (verts, tris)
}

/// Symmetric minimum vertex-to-triangle distance between two meshes,
/// restricted to vertices inside `region` and triangles touching it.
pub fn mesh_distance<F>(a: &TriMesh, b: &TriMesh, region: F) -> Result<f64>
where
    F: Fn(&Point3) -> bool + Sync,
{
    use rayon::prelude::*;
    let (va, ta) = region_parts(a, &region);
    let (vb, tb) = region_parts(b, &region);
    if (va.is_empty() || tb.is_empty()) && (vb.is_empty() || ta.is_empty()) {
        return Err(Error::EmptyRegion);
    }
    let tree_a = TriangleTree::new(a, ta);
    let tree_b = TriangleTree::new(b, tb);
    let ab = va
        .par_iter()
        .map(|&i| tree_b.nearest(&a.vertices[i].position))
        .reduce(|| f64::INFINITY, f64::min);
    let ba = vb
        .par_iter()
        .map(|&i| tree_a.nearest(&b.vertices[i].position))
        .reduce(|| f64::INFINITY, f64::min);
    Ok(ab.min(ba))
}

/// Exhaustive pairwise version of [`mesh_distance`]; quadratic, meant as
/// an oracle on small meshes.
pub fn mesh_distance_brute_force<F>(a: &TriMesh, b: &TriMesh, region: F) -> Result<f64>
where
    F: Fn(&Point3) -> bool,
{
    let (va, ta) = region_parts(a, &region);
    let (vb, tb) = region_parts(b, &region);
    if (va.is_empty() || tb.is_empty()) && (vb.is_empty() || ta.is_empty()) {
        return Err(Error::EmptyRegion);
    }
    let one_sided = |verts: &[usize], vm: &TriMesh, tris: &[usize], tm: &TriMesh| {
        let mut best = f64::INFINITY;
        for &i in verts {
            let p = vm.vertices[i].position;
            for &t in tris {
                let [x, y, z] = tm.corners(t);
                best = best.min(point_triangle_distance(&p, &x, &y, &z));
            }
        }
        best
    };
    Ok(one_sided(&va, a, &tb, b).min(one_sided(&vb, b, &ta, a)))
}
