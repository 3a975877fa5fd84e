use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{triangle_area, triangle_area_vector, Point3, Vec3};

/// Relative area floor: triangles smaller than this fraction of the total
/// area are treated as degenerate.
pub const DEFAULT_AREA_FLOOR: f64 = 1e-12;

/// Which part of the spanning curve a vertex sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Helix,
    RadialTop,
    Axis,
    RadialBottom,
    Interior,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Helix => "helix",
            Role::RadialTop => "radial-top",
            Role::Axis => "axis",
            Role::RadialBottom => "radial-bottom",
            Role::Interior => "interior",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "helix" => Role::Helix,
            "radial-top" => Role::RadialTop,
            "axis" => Role::Axis,
            "radial-bottom" => Role::RadialBottom,
            "interior" => Role::Interior,
            _ => return None,
        })
    }

    pub fn is_radial(self) -> bool {
        matches!(self, Role::RadialTop | Role::RadialBottom)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Multigraph chart coordinates of a vertex.
///
/// `r` is the grid radius label the vertex was created with (rows of the
/// chart share it); `theta` is the unwrapped polar angle, kept single-valued
/// by continuation as the vertex moves. A negative `r` marks the
/// axis-rotated half of a doubled surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub r: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub position: Point3,
    pub boundary: bool,
    pub role: Role,
    pub chart: Option<Chart>,
}

impl Vertex {
    pub fn interior(position: Point3) -> Self {
        Vertex {
            position,
            boundary: false,
            role: Role::Interior,
            chart: None,
        }
    }
}

/// Index-based triangle mesh. Adjacency is derived on demand.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TriMesh {
    pub vertices: Vec<Vertex>,
    pub triangles: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshIssue {
    IndexOutOfRange { triangle: usize },
    RepeatedVertex { triangle: usize },
    DuplicateTriangle { first: usize, second: usize },
    NonManifoldEdge { edge: (usize, usize), faces: usize },
    InconsistentOrientation { edge: (usize, usize) },
    NonManifoldVertex { vertex: usize },
    UnreferencedVertex { vertex: usize },
    BoundaryLoops { count: usize },
    EulerCharacteristic { chi: i64 },
    AreaBelowFloor { triangle: usize, area: f64, floor: f64 },
    BoundaryFlag { vertex: usize, flagged: bool },
    Empty,
}

impl fmt::Display for MeshIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshIssue::IndexOutOfRange { triangle } => {
                write!(f, "triangle {triangle} references a missing vertex")
            }
            MeshIssue::RepeatedVertex { triangle } => {
                write!(f, "triangle {triangle} repeats a vertex")
            }
            MeshIssue::DuplicateTriangle { first, second } => {
                write!(f, "triangles {first} and {second} share all three vertices")
            }
            MeshIssue::NonManifoldEdge { edge, faces } => {
                write!(f, "edge {edge:?} is shared by {faces} triangles")
            }
            MeshIssue::InconsistentOrientation { edge } => {
                write!(f, "edge {edge:?} is traversed twice in the same direction")
            }
            MeshIssue::NonManifoldVertex { vertex } => {
                write!(f, "vertex {vertex} has more than one boundary fan")
            }
            MeshIssue::UnreferencedVertex { vertex } => {
                write!(f, "vertex {vertex} belongs to no triangle")
            }
            MeshIssue::BoundaryLoops { count } => write!(f, "{count} boundary loops (expected 1)"),
            MeshIssue::EulerCharacteristic { chi } => write!(f, "Euler characteristic {chi} (expected 1)"),
            MeshIssue::AreaBelowFloor { triangle, area, floor } => {
                write!(f, "triangle {triangle} has area {area:e} below floor {floor:e}")
            }
            MeshIssue::BoundaryFlag { vertex, flagged } => write!(
                f,
                "vertex {vertex} boundary flag is {flagged} but edge incidence says {}",
                !flagged
            ),
            MeshIssue::Empty => f.write_str("mesh has no triangles"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub euler_characteristic: i64,
    pub boundary_loops: usize,
    pub min_area: f64,
    pub issues: Vec<MeshIssue>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Ordered run of boundary vertices sharing a role, extended by the
/// neighbouring corner vertices that lie on the same straight line.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryChain {
    pub role: Role,
    pub vertices: Vec<usize>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl TriMesh {
    pub fn new(vertices: Vec<Vertex>, triangles: Vec<[usize; 3]>) -> Self {
        TriMesh {
            vertices,
            triangles,
        }
    }

    pub fn positions(&self) -> Vec<Point3> {
        self.vertices.iter().map(|v| v.position).collect()
    }

    #[inline]
    pub fn corners(&self, t: usize) -> [Point3; 3] {
        self.triangles[t].map(|i| self.vertices[i].position)
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        triangle_area(&a, &b, &c)
    }

    pub fn triangle_area_vector(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.corners(t);
        triangle_area_vector(&a, &b, &c)
    }

    /// Sum of triangle areas.
    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn bounding_box(&self) -> (Point3, Point3) {
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            let p = v.position;
            lo = Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        (lo, hi)
    }

    pub fn bounding_diagonal(&self) -> f64 {
        if self.vertices.is_empty() {
            return 0.0;
        }
        let (lo, hi) = self.bounding_box();
        (hi - lo).norm()
    }

    /// Undirected edges, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self
            .triangles
            .iter()
            .flat_map(|t| [edge_key(t[0], t[1]), edge_key(t[1], t[2]), edge_key(t[2], t[0])])
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// Mean edge length, used as the mesh scale `h`.
    pub fn edge_scale(&self) -> f64 {
        let edges = self.edges();
        if edges.is_empty() {
            return 0.0;
        }
        let total: f64 = edges
            .iter()
            .map(|&(a, b)| (self.vertices[a].position - self.vertices[b].position).norm())
            .sum();
        total / edges.len() as f64
    }

    /// Directed edges that appear in exactly one triangle, keyed by start vertex.
    fn boundary_successors(&self) -> HashMap<usize, Vec<usize>> {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                *count.entry(edge_key(t[k], t[(k + 1) % 3])).or_default() += 1;
            }
        }
        let mut next: HashMap<usize, Vec<usize>> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if count[&edge_key(a, b)] == 1 {
                    next.entry(a).or_default().push(b);
                }
            }
        }
        next
    }

    /// Vertices incident to a boundary edge.
    pub fn boundary_vertex_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.vertices.len()];
        for (a, succ) in self.boundary_successors() {
            mask[a] = true;
            for b in succ {
                mask[b] = true;
            }
        }
        mask
    }

    /// All boundary loops, each following triangle orientation and
    /// starting at its smallest vertex index.
    pub fn boundary_loops(&self) -> Vec<Vec<usize>> {
        let next = self.boundary_successors();
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        let mut seen = vec![false; self.vertices.len()];
        let mut loops = Vec::new();
        for s in starts {
            if seen[s] {
                continue;
            }
            let mut lp = vec![s];
            seen[s] = true;
            let mut cur = s;
            loop {
                let Some(&nxt) = next.get(&cur).and_then(|v| v.first()) else {
                    break;
                };
                if nxt == s || seen[nxt] {
                    break;
                }
                seen[nxt] = true;
                lp.push(nxt);
                cur = nxt;
            }
            loops.push(lp);
        }
        loops
    }

    /// The single boundary loop of a disk, if there is exactly one.
    pub fn boundary_loop(&self) -> Option<Vec<usize>> {
        let mut loops = self.boundary_loops();
        (loops.len() == 1).then(|| loops.pop().unwrap())
    }

    /// Boundary vertices tagged `role`, in boundary-loop order, with the
    /// adjacent corner vertices attached when they are collinear with the run.
    pub fn boundary_chain(&self, role: Role) -> Option<BoundaryChain> {
        let lp = self.boundary_loop()?;
        let n = lp.len();
        let first = (0..n).find(|&k| {
            self.vertices[lp[k]].role == role && self.vertices[lp[(k + n - 1) % n]].role != role
        })?;
        let mut run = Vec::new();
        let mut k = first;
        while self.vertices[lp[k]].role == role && run.len() < n {
            run.push(lp[k]);
            k = (k + 1) % n;
        }
        let before = lp[(first + n - 1) % n];
        let after = lp[k];
        let pos = |i: usize| self.vertices[i].position;
        let collinear = |c: usize| -> bool {
            if run.len() < 2 {
                return true;
            }
            let a = pos(run[0]);
            let d = pos(*run.last().unwrap()) - a;
            let len = d.norm();
            len > 0.0 && (pos(c) - a).cross(&(d / len)).norm() <= 1e-9 * (1.0 + len)
        };
        let mut vertices = Vec::with_capacity(run.len() + 2);
        if collinear(before) {
            vertices.push(before);
        }
        vertices.extend_from_slice(&run);
        if collinear(after) {
            vertices.push(after);
        }
        Some(BoundaryChain { role, vertices })
    }

    /// Structural and geometric checks; never aborts.
    pub fn validate(&self) -> ValidationReport {
        self.validate_with_floor(DEFAULT_AREA_FLOOR * self.area())
    }

    pub fn validate_with_floor(&self, area_floor: f64) -> ValidationReport {
        let mut issues = Vec::new();
        let nv = self.vertices.len();
        if self.triangles.is_empty() {
            issues.push(MeshIssue::Empty);
        }
        let mut usable = true;
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= nv) {
                issues.push(MeshIssue::IndexOutOfRange { triangle: t });
                usable = false;
            } else if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                issues.push(MeshIssue::RepeatedVertex { triangle: t });
                usable = false;
            }
        }
        if !usable {
            return ValidationReport {
                euler_characteristic: 0,
                boundary_loops: 0,
                min_area: 0.0,
                issues,
            };
        }

        let mut by_set: HashMap<[usize; 3], usize> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            let mut key = *tri;
            key.sort_unstable();
            if let Some(&first) = by_set.get(&key) {
                issues.push(MeshIssue::DuplicateTriangle { first, second: t });
            } else {
                by_set.insert(key, t);
            }
        }

        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                *directed.entry((tri[k], tri[(k + 1) % 3])).or_default() += 1;
            }
        }
        let edges = self.edges();
        for &(a, b) in &edges {
            let ab = directed.get(&(a, b)).copied().unwrap_or(0);
            let ba = directed.get(&(b, a)).copied().unwrap_or(0);
            if ab + ba > 2 {
                issues.push(MeshIssue::NonManifoldEdge {
                    edge: (a, b),
                    faces: ab + ba,
                });
            } else if ab == 2 || ba == 2 {
                issues.push(MeshIssue::InconsistentOrientation { edge: (a, b) });
            }
        }

        let next = self.boundary_successors();
        let mut branching: Vec<usize> = next
            .iter()
            .filter(|(_, succ)| succ.len() > 1)
            .map(|(&v, _)| v)
            .collect();
        branching.sort_unstable();
        issues.extend(branching.into_iter().map(|vertex| MeshIssue::NonManifoldVertex { vertex }));

        let mut referenced = vec![false; nv];
        for tri in &self.triangles {
            for &i in tri {
                referenced[i] = true;
            }
        }
        issues.extend(
            (0..nv)
                .filter(|&i| !referenced[i])
                .map(|vertex| MeshIssue::UnreferencedVertex { vertex }),
        );

        let loops = self.boundary_loops().len();
        if loops != 1 {
            issues.push(MeshIssue::BoundaryLoops { count: loops });
        }
        let chi = nv as i64 - edges.len() as i64 + self.triangles.len() as i64;
        if chi != 1 {
            issues.push(MeshIssue::EulerCharacteristic { chi });
        }

        let mut min_area = f64::INFINITY;
        for t in 0..self.triangles.len() {
            let area = self.triangle_area(t);
            min_area = min_area.min(area);
            if area <= area_floor {
                issues.push(MeshIssue::AreaBelowFloor {
                    triangle: t,
                    area,
                    floor: area_floor,
                });
            }
        }

        let mask = self.boundary_vertex_mask();
        for (i, v) in self.vertices.iter().enumerate() {
            if referenced[i] && v.boundary != mask[i] {
                issues.push(MeshIssue::BoundaryFlag {
                    vertex: i,
                    flagged: v.boundary,
                });
            }
        }

        ValidationReport {
            euler_characteristic: chi,
            boundary_loops: loops,
            min_area,
            issues,
        }
    }

    /// Structured grid over chart coordinates `(radii[i], thetas[j])`.
    ///
    /// Vertex `(i, j)` has index `i * thetas.len() + j`. Row 0 is tagged
    /// axis, the last row helix, the first and last columns radial-bottom
    /// and radial-top; everything else is interior.
    pub fn polar_grid<F>(radii: &[f64], thetas: &[f64], position: F) -> TriMesh
    where
        F: Fn(usize, usize) -> Point3,
    {
        let (nr, nc) = (radii.len(), thetas.len());
        assert!(nr >= 2 && nc >= 2, "grid needs at least two rows and columns");
        let mut vertices = Vec::with_capacity(nr * nc);
        for (i, &r) in radii.iter().enumerate() {
            for (j, &theta) in thetas.iter().enumerate() {
                let role = if i == 0 {
                    Role::Axis
                } else if i == nr - 1 {
                    Role::Helix
                } else if j == 0 {
                    Role::RadialBottom
                } else if j == nc - 1 {
                    Role::RadialTop
                } else {
                    Role::Interior
                };
                vertices.push(Vertex {
                    position: position(i, j),
                    boundary: role != Role::Interior,
                    role,
                    chart: Some(Chart { r, theta }),
                });
            }
        }
        let id = |i: usize, j: usize| i * nc + j;
        let mut triangles = Vec::with_capacity(2 * (nr - 1) * (nc - 1));
        for i in 0..nr - 1 {
            for j in 0..nc - 1 {
                triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        TriMesh::new(vertices, triangles)
    }

    /// Reverses the orientation of every triangle.
    pub fn flip_orientation(&mut self) {
        for t in &mut self.triangles {
            t.swap(1, 2);
        }
    }

    /// Rebuilds boundary flags from edge incidence; vertices that become
    /// interior lose their boundary role.
    pub fn refresh_boundary_flags(&mut self) {
        let mask = self.boundary_vertex_mask();
        for (v, on_boundary) in self.vertices.iter_mut().zip(mask) {
            v.boundary = on_boundary;
            if !on_boundary {
                v.role = Role::Interior;
            }
        }
    }

    /// Vertex indices that are not on the boundary.
    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&i| !self.vertices[i].boundary)
            .collect()
    }

    /// Triangles incident to each vertex.
    pub fn vertex_triangles(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &i in tri {
                inc[i].push(t);
            }
        }
        inc
    }

    /// Area-weighted vertex normals (unnormalized sums of face area vectors
    /// are normalized at the end; isolated vertices get zero).
    pub fn vertex_normals(&self) -> Vec<Vec3> {
        let mut n = vec![Vec3::zeros(); self.vertices.len()];
        for t in 0..self.triangles.len() {
            let a = self.triangle_area_vector(t);
            for &i in &self.triangles[t] {
                n[i] += a;
            }
        }
        for v in &mut n {
            let len = v.norm();
            if len > 0.0 {
                *v /= len;
            }
        }
        n
    }
}
