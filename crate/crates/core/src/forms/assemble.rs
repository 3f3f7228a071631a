use super::trace::{face_points, FaceBasis};
use super::{sigma_on_face, ExactFunction, PenaltyConfig};
use crate::linalg::{SparseMatrix, TripletBuilder};
use crate::mesh::Mesh;
use crate::space::{face_quadrature, volume_rule_for, DGSpace};
use crate::{Error, Point, Result};

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Adds `sum_K int_K f(a, b)` blocks for every element.
pub(crate) fn add_volume_blocks(
    space: &DGSpace,
    order: usize,
    b: &mut TripletBuilder,
    f: impl Fn(&crate::space::BasisAt, usize, usize) -> f64,
) {
    let rule = volume_rule_for(order);
    let reference: Vec<_> = rule.points.iter().map(|&xi| space.reference_basis().eval(xi)).collect();
    let n = space.dofs_per_elem();
    for t in 0..space.n_elems() {
        let det = space.map(t).det;
        let mut block = vec![0.0; n * n];
        for (r, &w) in reference.iter().zip(&rule.weights) {
            let at = space.push_eval(t, r);
            let w = w * det;
            for i in 0..n {
                for j in 0..n {
                    block[i * n + j] += w * f(&at, i, j);
                }
            }
        }
        let dofs: Vec<usize> = space.dofs(t).collect();
        b.add_block(&dofs, &dofs, &block);
    }
}

/// The interior penalty matrix with `A[i][j] = A_h(phi_j, phi_i)`, so that
/// `v^T A w = A_h(w, v)`.
///
/// For `theta = 1` every entry is computed by an expression symmetric in its
/// two indices, so the result equals its transpose bit for bit.
pub fn assemble_sip(mesh: &Mesh, space: &DGSpace, cfg: &PenaltyConfig) -> Result<SparseMatrix> {
    cfg.validate()?;
    check_space(mesh, space)?;
    let k = space.degree();
    let mut b = TripletBuilder::new(space.n_dofs());
    add_volume_blocks(space, 2 * k, &mut b, |at, i, j| dot(at.grads[i], at.grads[j]));
    let rule = face_quadrature(2 * k + 2);
    for face in mesh.faces() {
        let fb = FaceBasis::new(mesh, space, face, &rule);
        let sigma = sigma_on_face(face, cfg, k);
        let n = fb.normal;
        // t[a][b] = int [phi_a] . {grad phi_b}
        let t = fb.block(|p, a, b| p.jump[a] * dot(p.grad_avg[b], n));
        let pen = fb.block(|p, a, b| p.jump[a] * p.jump[b]);
        let m = fb.dofs.len();
        let block: Vec<f64> = (0..m * m)
            .map(|ab| {
                let (a, b) = (ab / m, ab % m);
                sigma * pen[ab] - (t[ab] + cfg.theta * t[b * m + a])
            })
            .collect();
        b.add_block(&fb.dofs, &fb.dofs, &block);
    }
    Ok(b.build(cfg.theta == 1.0))
}

pub(crate) fn check_space(mesh: &Mesh, space: &DGSpace) -> Result<()> {
    if mesh.n_elems() != space.n_elems() {
        return Err(Error::DimensionMismatch { expected: mesh.n_elems(), found: space.n_elems() });
    }
    Ok(())
}

/// Load vector `(f, phi_i)` with quadrature exact to degree `2k + 4`.
pub fn assemble_load(space: &DGSpace, f: impl Fn(Point) -> f64) -> Vec<f64> {
    assemble_load_with_order(space, f, 2 * space.degree() + 4)
}

pub fn assemble_load_with_order(space: &DGSpace, f: impl Fn(Point) -> f64, order: usize) -> Vec<f64> {
    super::DGFunction::project(space, f, order).into_coeffs()
}

/// Ritz right-hand side `A_h(u, phi_i) = (grad u, grad phi_i) - <[phi_i], {grad u}>`
/// for a continuous `u` vanishing on the boundary (its jump terms drop out).
pub fn assemble_ritz_rhs(
    mesh: &Mesh,
    space: &DGSpace,
    u: &dyn ExactFunction,
    cfg: &PenaltyConfig,
    order: Option<usize>,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    check_space(mesh, space)?;
    if !u.satisfies_dirichlet() {
        return Err(Error::param(
            "u",
            format!("{} is not flagged as vanishing on the boundary; the Ritz right-hand side needs [u] = 0", u.name()),
        ));
    }
    let order = order.unwrap_or(2 * space.degree() + 4);
    let mut rhs = vec![0.0; space.n_dofs()];
    let rule = volume_rule_for(order);
    for t in 0..space.n_elems() {
        let dofs = space.dofs(t);
        for (_, x, w) in space.element_quadrature(t, &rule) {
            let g = u.gradient(x);
            let at = space.eval(t, x);
            for (r, gi) in rhs[dofs.clone()].iter_mut().zip(&at.grads) {
                *r += w * dot(g, *gi);
            }
        }
    }
    let rule = face_quadrature(order);
    for face in mesh.faces() {
        for (x, w) in face_points(mesh, face, &rule) {
            let dn = dot(u.gradient(x), face.normal);
            for (elem, sign) in std::iter::once((face.left, 1.0)).chain(face.right.map(|r| (r, -1.0))) {
                let dofs = space.dofs(elem);
                for (r, v) in rhs[dofs].iter_mut().zip(space.values(elem, x)) {
                    *r -= w * sign * v * dn;
                }
            }
        }
    }
    Ok(rhs)
}
