//! Conforming triangular meshes of the unit square.
//!
//! A [`Mesh`] owns its vertices, counter-clockwise triangles and the derived
//! face topology. Construction validates orientation, conformity and
//! coverage of `[0,1]^2`, so every `Mesh` value in the program satisfies
//! those invariants.

mod generate;
mod grading;
mod io;
mod refine;

use std::collections::HashMap;

use crate::{Error, Point, Result};

pub use generate::{gen_geometric, gen_shishkin, gen_uniform, shishkin_transition};
pub use grading::{
    alpha_threshold, face_grading_ratios, grading_ratio, geometric_face_bounds, grading_report, GradingReport,
};
pub use io::MeshFile;
pub use refine::{refine_nvb, refine_red};

/// Coordinates closer than this to a side of the unit square count as on it.
const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceKind {
    Interior,
    Boundary,
}

/// An edge of the triangulation.
///
/// `normal` is the unit normal pointing out of `left`; the outward normal of
/// `right` is its exact negation.
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub vertices: [usize; 2],
    pub left: usize,
    pub right: Option<usize>,
    pub normal: Point,
    pub length: f64,
    /// Meshsize on the face: `{h}` on interior faces, `h_K` on boundary faces.
    pub h: f64,
}

impl Face {
    pub fn kind(&self) -> FaceKind {
        if self.right.is_some() {
            FaceKind::Interior
        } else {
            FaceKind::Boundary
        }
    }

    pub fn is_interior(&self) -> bool {
        self.right.is_some()
    }

    /// Outward unit normals of the two sides, `(n_K1, n_K2)`.
    pub fn normals(&self) -> (Point, Option<Point>) {
        let n = self.normal;
        (n, self.right.map(|_| [-n[0], -n[1]]))
    }

    /// Point on the face at parameter `t` in `[0,1]`, measured from `vertices[0]`.
    pub fn point(&self, mesh: &Mesh, t: f64) -> Point {
        let a = mesh.vertices[self.vertices[0]];
        let b = mesh.vertices[self.vertices[1]];
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    faces: Vec<Face>,
    elem_faces: Vec<[usize; 3]>,
    elem_diameter: Vec<f64>,
    boundary: Vec<bool>,
    refinement_edge: Vec<u8>,
}

impl PartialEq for Mesh {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.triangles == other.triangles
            && self.refinement_edge == other.refinement_edge
    }
}

pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn dist(a: Point, b: Point) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// Which sides of the unit square a point lies on, as a bitmask
/// (x=0, x=1, y=0, y=1).
fn boundary_sides(p: Point) -> u8 {
    let mut m = 0;
    if p[0].abs() <= BOUNDARY_TOL {
        m |= 1;
    }
    if (p[0] - 1.0).abs() <= BOUNDARY_TOL {
        m |= 2;
    }
    if p[1].abs() <= BOUNDARY_TOL {
        m |= 4;
    }
    if (p[1] - 1.0).abs() <= BOUNDARY_TOL {
        m |= 8;
    }
    m
}

/// Local refinement edge by the longest-edge rule. Local edge `e` joins
/// `v[e]` and `v[(e+1)%3]`; ties are broken by the lowest global index of the
/// opposite vertex.
fn longest_edge(vertices: &[Point], tri: [usize; 3]) -> u8 {
    let lens: [f64; 3] =
        std::array::from_fn(|e| dist(vertices[tri[e]], vertices[tri[(e + 1) % 3]]));
    let max = lens.iter().cloned().fold(0.0, f64::max);
    (0..3)
        .filter(|&e| lens[e] >= max * (1.0 - 1e-12))
        .min_by_key(|&e| tri[(e + 2) % 3])
        .unwrap() as u8
}

impl Mesh {
    /// Builds and validates a mesh from raw arrays.
    ///
    /// Without explicit refinement edges the longest-edge rule is applied.
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        refinement_edge: Option<Vec<u8>>,
    ) -> Result<Mesh> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("mesh has no triangles".into()));
        }
        for (i, p) in vertices.iter().enumerate() {
            let inside = p.iter().all(|c| c.is_finite() && *c >= -BOUNDARY_TOL && *c <= 1.0 + BOUNDARY_TOL);
            if !inside {
                return Err(Error::InvalidMesh(format!(
                    "vertex {i} at ({}, {}) lies outside the unit square",
                    p[0], p[1]
                )));
            }
        }
        let mut total_area = 0.0;
        let mut elem_diameter = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} references a vertex index out of range"
                )));
            }
            let [a, b, c] = tri.map(|v| vertices[v]);
            let area = signed_area(a, b, c);
            if !(area > 0.0) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} {:?} has non-positive signed area {area:e}",
                    tri
                )));
            }
            total_area += area;
            elem_diameter.push(dist(a, b).max(dist(b, c)).max(dist(c, a)));
        }
        if (total_area - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMesh(format!(
                "triangles cover area {total_area}, not the unit square"
            )));
        }

        let refinement_edge = match refinement_edge {
            Some(r) => {
                if r.len() != triangles.len() || r.iter().any(|&e| e > 2) {
                    return Err(Error::InvalidMesh(
                        "refinement_edge must hold one local edge (0, 1 or 2) per triangle".into(),
                    ));
                }
                r
            }
            None => triangles.iter().map(|&t| longest_edge(&vertices, t)).collect(),
        };

        // Edge -> (element, local edge) incidences, in first-seen order.
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut incidences: Vec<((usize, usize), Vec<(usize, usize)>)> = Vec::new();
        for (t, tri) in triangles.iter().enumerate() {
            for e in 0..3 {
                let key = edge_key(tri[e], tri[(e + 1) % 3]);
                let slot = *index.entry(key).or_insert_with(|| {
                    incidences.push((key, Vec::new()));
                    incidences.len() - 1
                });
                incidences[slot].1.push((t, e));
            }
        }

        let mut faces = Vec::with_capacity(incidences.len());
        let mut elem_faces = vec![[usize::MAX; 3]; triangles.len()];
        let mut boundary = vec![false; vertices.len()];
        for (key, inc) in incidences {
            let (left, le) = inc[0];
            let a = triangles[left][le];
            let b = triangles[left][(le + 1) % 3];
            let right = match inc.len() {
                1 => {
                    let common = boundary_sides(vertices[a]) & boundary_sides(vertices[b]);
                    if common == 0 {
                        return Err(Error::InvalidMesh(format!(
                            "face ({}, {}) belongs to a single triangle but is not on the domain \
                             boundary (hanging node or gap)",
                            key.0, key.1
                        )));
                    }
                    boundary[a] = true;
                    boundary[b] = true;
                    None
                }
                2 => {
                    let (r, re) = inc[1];
                    // Conforming neighbours traverse a shared edge in opposite directions.
                    if triangles[r][re] != b {
                        return Err(Error::InvalidMesh(format!(
                            "face ({}, {}) is shared by overlapping triangles {left} and {r}",
                            key.0, key.1
                        )));
                    }
                    Some(r)
                }
                n => {
                    return Err(Error::InvalidMesh(format!(
                        "face ({}, {}) is shared by {n} triangles",
                        key.0, key.1
                    )))
                }
            };
            let (pa, pb) = (vertices[a], vertices[b]);
            let length = dist(pa, pb);
            // Counter-clockwise triangles have their exterior on the right of a->b.
            let normal = [(pb[1] - pa[1]) / length, -(pb[0] - pa[0]) / length];
            let h = match right {
                Some(r) => 0.5 * (elem_diameter[left] + elem_diameter[r]),
                None => elem_diameter[left],
            };
            let f = faces.len();
            for &(t, e) in &inc {
                elem_faces[t][e] = f;
            }
            faces.push(Face { vertices: [a, b], left, right, normal, length, h });
        }

        Ok(Mesh { vertices, triangles, faces, elem_faces, elem_diameter, boundary, refinement_edge })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Face indices of the three local edges of element `t`.
    pub fn elem_faces(&self, t: usize) -> [usize; 3] {
        self.elem_faces[t]
    }

    pub fn n_elems(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    /// Diameter `h_K` (longest edge) of element `t`.
    pub fn h(&self, t: usize) -> f64 {
        self.elem_diameter[t]
    }

    pub fn diameters(&self) -> &[f64] {
        &self.elem_diameter
    }

    pub fn max_h(&self) -> f64 {
        self.elem_diameter.iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_h(&self) -> f64 {
        self.elem_diameter.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.boundary[v]).collect()
    }

    pub fn refinement_edges(&self) -> &[u8] {
        &self.refinement_edge
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        signed_area(a, b, c)
    }

    /// Radius of the inscribed circle of element `t`.
    pub fn inradius(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        2.0 * self.area(t) / (dist(a, b) + dist(b, c) + dist(c, a))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_elems()).map(|t| self.area(t)).sum()
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.corners(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Index of an element whose closure contains `p`, if any.
    pub fn locate(&self, p: Point) -> Option<usize> {
        (0..self.n_elems()).find(|&t| {
            let [a, b, c] = self.corners(t);
            let area = signed_area(a, b, c);
            let tol = -1e-12 * area;
            signed_area(p, b, c) >= tol && signed_area(a, p, c) >= tol && signed_area(a, b, p) >= tol
        })
    }

    /// Elements sharing vertex `v`, for every vertex.
    pub fn vertex_patches(&self) -> Vec<Vec<usize>> {
        let mut patches = vec![Vec::new(); self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                patches[v].push(t);
            }
        }
        patches
    }
}
