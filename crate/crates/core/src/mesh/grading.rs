use serde::{Deserialize, Serialize};

use super::Mesh;
use crate::{Error, Result};

/// Mesh-level quantities the stability theory is stated in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradingReport {
    /// `max |[h]| / {h}` over interior faces.
    pub alpha: f64,
    /// Shape regularity `min rho_K / h_K`.
    pub mu: f64,
    /// Measured local quasi-uniformity: largest `max h / min h` over vertex patches.
    pub cqu: f64,
    pub face_count: usize,
    pub elem_count: usize,
}

/// `|[h]| / {h}` for neighbours of diameters `h1` and `h2`.
pub fn grading_ratio(h1: f64, h2: f64) -> f64 {
    (h1 - h2).abs() / (0.5 * (h1 + h2))
}

/// `|h_K1 - h_K2| / {h}` for every interior face, as `(face index, ratio)`.
pub fn face_grading_ratios(mesh: &Mesh) -> Vec<(usize, f64)> {
    mesh.faces()
        .iter()
        .enumerate()
        .filter_map(|(f, face)| {
            let r = face.right?;
            Some((f, grading_ratio(mesh.h(face.left), mesh.h(r))))
        })
        .collect()
}

pub fn grading_report(mesh: &Mesh) -> GradingReport {
    let alpha = face_grading_ratios(mesh).into_iter().map(|(_, r)| r).fold(0.0, f64::max);
    let mu = (0..mesh.n_elems())
        .map(|t| mesh.inradius(t) / mesh.h(t))
        .fold(f64::INFINITY, f64::min);
    let cqu = mesh
        .vertex_patches()
        .iter()
        .filter(|p| !p.is_empty())
        .map(|p| {
            let hs = p.iter().map(|&t| mesh.h(t));
            let max = hs.clone().fold(0.0, f64::max);
            let min = hs.fold(f64::INFINITY, f64::min);
            max / min
        })
        .fold(1.0, f64::max);
    GradingReport { alpha, mu, cqu, face_count: mesh.n_faces(), elem_count: mesh.n_elems() }
}

/// Cell index along one axis of a geometric grid; `None` is the band `(0, beta^N)`.
fn geometric_cell_index(lo: f64, hi: f64, beta: f64) -> Option<i32> {
    if lo == 0.0 {
        None
    } else {
        Some((hi.ln() / beta.ln()).round() as i32)
    }
}

fn geometric_cell(mesh: &Mesh, t: usize, beta: f64) -> (Option<i32>, Option<i32>) {
    let c = mesh.corners(t);
    let axis = |d: usize| {
        let lo = c.iter().map(|p| p[d]).fold(f64::INFINITY, f64::min);
        let hi = c.iter().map(|p| p[d]).fold(0.0, f64::max);
        geometric_cell_index(lo, hi, beta)
    };
    (axis(0), axis(1))
}

/// Analytic grading bound `4(1 - beta^2) / (1 + beta^2 + 2 beta^(2(j - i)))`
/// for every face of a mesh produced by [`gen_geometric`](super::gen_geometric).
///
/// For two cells adjacent across the `i` direction, `i` is the (finite) index
/// of the cell nearer to `1` and `j` the shared index in the other direction,
/// with `beta^inf = 0`. Faces inside one cell get `0` and boundary faces
/// `None`.
pub fn geometric_face_bounds(mesh: &Mesh, beta: f64) -> Vec<Option<f64>> {
    let bound = |i: i32, j: Option<i32>| {
        let tail = j.map_or(0.0, |j| 2.0 * beta.powi(2 * (j - i)));
        4.0 * (1.0 - beta * beta) / (1.0 + beta * beta + tail)
    };
    let smaller = |a: Option<i32>, b: Option<i32>| match (a, b) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => unreachable!("distinct cells share an infinite index"),
    };
    mesh.faces()
        .iter()
        .map(|face| {
            let r = face.right?;
            let (ia, ja) = geometric_cell(mesh, face.left, beta);
            let (ib, jb) = geometric_cell(mesh, r, beta);
            Some(if (ia, ja) == (ib, jb) {
                0.0
            } else if ja == jb {
                bound(smaller(ia, ib), ja)
            } else {
                bound(smaller(ja, jb), ia)
            })
        })
        .collect()
}

/// Largest grading `alpha` admitted by the sufficient condition
/// `min{1, 1/(8 C_inv C_qu), c~ / (32 C_inv C_qu (2 k^2 C_sigma + 1))}`.
///
/// Purely diagnostic: `c~` has no computable value and must be supplied.
pub fn alpha_threshold(k: usize, csigma: f64, cinv: f64, cqu: f64, ctilde: f64) -> Result<f64> {
    for (name, v) in [("csigma", csigma), ("cinv", cinv), ("cqu", cqu), ("ctilde", ctilde)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(name, format!("must be positive, got {v}")));
        }
    }
    if k == 0 {
        return Err(Error::param("k", "polynomial degree must be at least 1"));
    }
    let k2 = (k * k) as f64;
    let a = 1.0 / (8.0 * cinv * cqu);
    let b = ctilde / (32.0 * cinv * cqu * (2.0 * k2 * csigma + 1.0));
    Ok(1.0f64.min(a).min(b))
}
