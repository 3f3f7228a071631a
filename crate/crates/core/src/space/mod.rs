//! Broken polynomial spaces, reference quadrature and element maps.

mod basis;
mod quadrature;

pub use basis::{ReferenceBasis, ReferenceEval};
pub use quadrature::{
    face_quadrature, gauss_legendre, volume_quadrature, EdgeRule, QuadratureRule, TriangleRule,
    MAX_VOLUME_ORDER,
};
pub(crate) use quadrature::volume_rule_for;

use crate::linalg::{gen_sym_eig, DenseMatrix};
use crate::mesh::Mesh;
use crate::{Error, Point, Result};

/// Affine map `x = origin + J xi` from the reference triangle onto an element.
#[derive(Clone, Copy, Debug)]
pub struct ElementMap {
    pub origin: Point,
    /// Columns are the edge vectors `v1 - v0` and `v2 - v0`.
    pub jac: [[f64; 2]; 2],
    pub inv: [[f64; 2]; 2],
    pub det: f64,
}

impl ElementMap {
    pub fn new(corners: [Point; 3]) -> Self {
        let [v0, v1, v2] = corners;
        let jac = [[v1[0] - v0[0], v2[0] - v0[0]], [v1[1] - v0[1], v2[1] - v0[1]]];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let inv = [[jac[1][1] / det, -jac[0][1] / det], [-jac[1][0] / det, jac[0][0] / det]];
        ElementMap { origin: v0, jac, inv, det }
    }

    pub fn to_physical(&self, xi: Point) -> Point {
        let j = &self.jac;
        [
            self.origin[0] + j[0][0] * xi[0] + j[0][1] * xi[1],
            self.origin[1] + j[1][0] * xi[0] + j[1][1] * xi[1],
        ]
    }

    pub fn to_reference(&self, x: Point) -> Point {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        let m = &self.inv;
        [m[0][0] * d[0] + m[0][1] * d[1], m[1][0] * d[0] + m[1][1] * d[1]]
    }

    /// `J^{-T} g` for a reference gradient `g`.
    fn push_gradient(&self, g: Point) -> Point {
        let m = &self.inv;
        [m[0][0] * g[0] + m[1][0] * g[1], m[0][1] * g[0] + m[1][1] * g[1]]
    }

    /// Laplacian of `v o F^{-1}` from the reference Hessian `[h_xx, h_xy, h_yy]`:
    /// `trace(J^{-T} H J^{-1})`.
    fn push_laplacian(&self, h: [f64; 3]) -> f64 {
        let m = &self.inv;
        let mut lap = 0.0;
        for c in 0..2 {
            let (a, b) = (m[0][c], m[1][c]);
            lap += a * a * h[0] + 2.0 * a * b * h[1] + b * b * h[2];
        }
        lap
    }
}

/// Basis values, physical gradients and Laplacians on one element at one point.
#[derive(Clone, Debug)]
pub struct BasisAt {
    pub values: Vec<f64>,
    pub grads: Vec<Point>,
    pub laplacians: Vec<f64>,
}

/// Discontinuous space of elementwise polynomials of total degree `k`.
///
/// Element basis functions are the reference Dubiner modes pulled back by
/// the affine map and scaled by `det(J)^{-1/2}`, which makes them
/// `L^2(K)`-orthonormal. Degrees of freedom are numbered element-major.
#[derive(Clone, Debug)]
pub struct DGSpace {
    k: usize,
    basis: ReferenceBasis,
    maps: Vec<ElementMap>,
}

pub fn make_space(mesh: &Mesh, k: usize) -> Result<DGSpace> {
    DGSpace::new(mesh, k)
}

impl DGSpace {
    pub fn new(mesh: &Mesh, k: usize) -> Result<DGSpace> {
        if k == 0 {
            return Err(Error::param("k", "polynomial degree must be at least 1"));
        }
        if 2 * k + 4 > MAX_VOLUME_ORDER {
            return Err(Error::param(
                "k",
                format!("degree {k} needs quadrature beyond order {MAX_VOLUME_ORDER}; use k <= 8"),
            ));
        }
        let maps = (0..mesh.n_elems()).map(|t| ElementMap::new(mesh.corners(t))).collect();
        Ok(DGSpace { k, basis: ReferenceBasis::new(k), maps })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn dofs_per_elem(&self) -> usize {
        (self.k + 1) * (self.k + 2) / 2
    }

    pub fn n_elems(&self) -> usize {
        self.maps.len()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_elems() * self.dofs_per_elem()
    }

    /// Global DOF range of element `t`.
    pub fn dofs(&self, t: usize) -> std::ops::Range<usize> {
        let n = self.dofs_per_elem();
        t * n..(t + 1) * n
    }

    pub fn map(&self, t: usize) -> &ElementMap {
        &self.maps[t]
    }

    pub fn reference_basis(&self) -> &ReferenceBasis {
        &self.basis
    }

    /// Normalisation factor of the element basis.
    fn scale(&self, t: usize) -> f64 {
        1.0 / self.maps[t].det.sqrt()
    }

    /// Element basis values at physical point `x`.
    pub fn values(&self, t: usize, x: Point) -> Vec<f64> {
        let s = self.scale(t);
        let mut v = self.basis.values(self.maps[t].to_reference(x));
        v.iter_mut().for_each(|v| *v *= s);
        v
    }

    /// Element basis values, gradients and Laplacians at physical point `x`.
    pub fn eval(&self, t: usize, x: Point) -> BasisAt {
        let map = &self.maps[t];
        self.push_eval(t, &self.basis.eval(map.to_reference(x)))
    }

    /// Same as [`eval`](Self::eval) for a point given in reference coordinates.
    pub fn eval_reference(&self, t: usize, xi: Point) -> BasisAt {
        self.push_eval(t, &self.basis.eval(xi))
    }

    /// Pushes a reference evaluation forward onto element `t`.
    pub(crate) fn push_eval(&self, t: usize, r: &ReferenceEval) -> BasisAt {
        let map = &self.maps[t];
        let s = self.scale(t);
        BasisAt {
            values: r.values.iter().map(|v| s * v).collect(),
            grads: r
                .grads
                .iter()
                .map(|&g| {
                    let p = map.push_gradient(g);
                    [s * p[0], s * p[1]]
                })
                .collect(),
            laplacians: r.hessians.iter().map(|&h| s * map.push_laplacian(h)).collect(),
        }
    }

    /// Physical quadrature points and weights on element `t`.
    pub fn element_quadrature<'a>(
        &'a self,
        t: usize,
        rule: &'a TriangleRule,
    ) -> impl Iterator<Item = (Point, Point, f64)> + 'a {
        let map = self.maps[t];
        rule.iter().map(move |(xi, w)| (xi, map.to_physical(xi), w * map.det))
    }
}

/// Trace-inverse constant `C_inv` in `||v||^2_e <= C_inv k^2 h_K^{-1} ||v||^2_K`,
/// measured on the reference triangle (diameter `sqrt 2`).
///
/// For each reference edge the largest generalized eigenvalue of the edge
/// mass form against the volume mass form is computed; the result is the
/// maximum over edges times `h / k^2`. Elements similar to the reference
/// triangle (uniform and bisection meshes) satisfy the inequality with this
/// constant; other shapes scale it by `|e| h_K / (4 |K|)`.
pub fn estimate_trace_inverse_constant(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::param("k", "polynomial degree must be at least 1"));
    }
    let basis = ReferenceBasis::new(k);
    let n = basis.len();
    let vol = volume_quadrature(2 * k)?;
    let mut mass = DenseMatrix::zeros(n, n);
    for (xi, w) in vol.iter() {
        let v = basis.values(xi);
        for i in 0..n {
            for j in 0..n {
                mass[(i, j)] += w * v[i] * v[j];
            }
        }
    }
    let corners = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let edge_rule = face_quadrature(2 * k);
    let mut worst: f64 = 0.0;
    for e in 0..3 {
        let (a, b): (Point, Point) = (corners[e], corners[(e + 1) % 3]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let mut edge = DenseMatrix::zeros(n, n);
        for ([t], w) in edge_rule.iter() {
            let v = basis.values([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            for i in 0..n {
                for j in 0..n {
                    edge[(i, j)] += w * len * v[i] * v[j];
                }
            }
        }
        let eig = gen_sym_eig(&edge, &mass)?;
        worst = worst.max(*eig.values.last().unwrap());
    }
    Ok(worst * 2f64.sqrt() / (k * k) as f64)
}
