use std::fmt;
use std::str::FromStr;

use super::assemble::{add_volume_blocks, check_space};
use super::trace::{face_points, FaceBasis};
use super::{jump_average_eval, BrokenField, PenaltyConfig, SideTrace};
use crate::linalg::{SparseMatrix, TripletBuilder};
use crate::mesh::Mesh;
use crate::space::{face_quadrature, volume_rule_for, DGSpace};
use crate::{Error, Point, Result};

/// The mesh-dependent norms.
///
/// * `L2`: `||w||`
/// * `Energy`: `||grad_h w||^2 + ||sqrt(sigma) [w]||^2_Gamma`
/// * `Z`: `||w||^2 + ||h^{3/2} {grad w}||^2_Gamma + ||h^{1/2} {w}||^2_{Gamma_int} + ||h^{1/2} [w]||^2_Gamma`
/// * `H2h`: `||grad_h w||^2 + ||Lap_h w||^2 + ||h^{-1/2} [grad w]||^2_{Gamma_int} + ||h^{-3/2} [w]||^2_Gamma`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormKind {
    L2,
    Energy,
    Z,
    H2h,
}

impl NormKind {
    pub const ALL: [NormKind; 4] = [NormKind::L2, NormKind::Energy, NormKind::Z, NormKind::H2h];
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormKind::L2 => "l2",
            NormKind::Energy => "energy",
            NormKind::Z => "z",
            NormKind::H2h => "h2h",
        })
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l2" => Ok(NormKind::L2),
            "energy" => Ok(NormKind::Energy),
            "z" => Ok(NormKind::Z),
            "h2h" => Ok(NormKind::H2h),
            _ => Err(Error::param("norm", format!("unknown norm {s:?}; expected l2, energy, z or h2h"))),
        }
    }
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Matrix `M` with `w^T M w = ||w||^2` for the chosen norm; exactly symmetric.
pub fn assemble_norm_matrix(kind: NormKind, mesh: &Mesh, space: &DGSpace, cfg: &PenaltyConfig) -> Result<SparseMatrix> {
    cfg.validate()?;
    check_space(mesh, space)?;
    let k = space.degree();
    let order = 2 * k + 2;
    let mut b = TripletBuilder::new(space.n_dofs());
    match kind {
        NormKind::L2 | NormKind::Z => add_volume_blocks(space, order, &mut b, |at, i, j| at.values[i] * at.values[j]),
        NormKind::Energy => add_volume_blocks(space, order, &mut b, |at, i, j| dot(at.grads[i], at.grads[j])),
        NormKind::H2h => add_volume_blocks(space, order, &mut b, |at, i, j| {
            dot(at.grads[i], at.grads[j]) + at.laplacians[i] * at.laplacians[j]
        }),
    }
    if kind != NormKind::L2 {
        let rule = face_quadrature(order);
        for face in mesh.faces() {
            let fb = FaceBasis::new(mesh, space, face, &rule);
            let h = face.h;
            let int = if fb.interior { 1.0 } else { 0.0 };
            let block = match kind {
                NormKind::Energy => {
                    let sigma = cfg.sigma(h, k);
                    fb.block(|p, a, b| sigma * (p.jump[a] * p.jump[b]))
                }
                NormKind::Z => {
                    let (h3, hi) = (h.powi(3), int * h);
                    fb.block(|p, a, b| {
                        h3 * dot(p.grad_avg[a], p.grad_avg[b]) + hi * (p.avg[a] * p.avg[b]) + h * (p.jump[a] * p.jump[b])
                    })
                }
                NormKind::H2h => {
                    let (hi, hm3) = (int / h, h.powi(-3));
                    fb.block(|p, a, b| hi * (p.grad_jump[a] * p.grad_jump[b]) + hm3 * (p.jump[a] * p.jump[b]))
                }
                NormKind::L2 => unreachable!(),
            };
            b.add_block(&fb.dofs, &fb.dofs, &block);
        }
    }
    Ok(b.build(true))
}

/// `sqrt(w^T M w)`, clamped at zero against roundoff.
pub fn matrix_norm(m: &SparseMatrix, w: &[f64]) -> f64 {
    m.form(w, w).max(0.0).sqrt()
}

/// Norm of an arbitrary broken field by direct quadrature of every term,
/// with rules exact to degree `order`.
pub fn field_norm(
    kind: NormKind,
    field: &dyn BrokenField,
    mesh: &Mesh,
    k: usize,
    cfg: &PenaltyConfig,
    order: usize,
) -> f64 {
    let rule = volume_rule_for(order);
    let mut sum = 0.0;
    for t in 0..mesh.n_elems() {
        let map = crate::space::ElementMap::new(mesh.corners(t));
        for (xi, w) in rule.iter() {
            let v = field.eval_on(t, map.to_physical(xi));
            let w = w * map.det;
            sum += w * match kind {
                NormKind::L2 | NormKind::Z => v.value * v.value,
                NormKind::Energy => dot(v.grad, v.grad),
                NormKind::H2h => dot(v.grad, v.grad) + v.laplacian * v.laplacian,
            };
        }
    }
    if kind != NormKind::L2 {
        let rule = face_quadrature(order);
        for face in mesh.faces() {
            let h = face.h;
            let (n1, n2) = face.normals();
            for (x, w) in face_points(mesh, face, &rule) {
                let side = |t: usize, normal: Point| {
                    let v = field.eval_on(t, x);
                    SideTrace { value: v.value, grad: v.grad, normal }
                };
                let ja = jump_average_eval(side(face.left, n1), face.right.zip(n2).map(|(r, n)| side(r, n)));
                let jj = dot(ja.jump, ja.jump);
                sum += w * match kind {
                    NormKind::Energy => cfg.sigma(h, k) * jj,
                    NormKind::Z => {
                        let avg = if face.is_interior() { h * ja.avg * ja.avg } else { 0.0 };
                        h.powi(3) * dot(ja.grad_avg, ja.grad_avg) + avg + h * jj
                    }
                    NormKind::H2h => {
                        let gj = if face.is_interior() { ja.grad_jump * ja.grad_jump / h } else { 0.0 };
                        gj + jj / h.powi(3)
                    }
                    NormKind::L2 => unreachable!(),
                };
            }
        }
    }
    sum.max(0.0).sqrt()
}
