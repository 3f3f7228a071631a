use crate::mesh::{Face, Mesh};
use crate::space::{BasisAt, DGSpace, EdgeRule};
use crate::Point;

/// One-sided trace of a scalar function on a face.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SideTrace {
    pub value: f64,
    pub grad: Point,
    /// Outward unit normal of this side.
    pub normal: Point,
}

/// Averages and jumps at one point of a face.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpAverage {
    /// `{v}`.
    pub avg: f64,
    /// `[v] = v1 n1 + v2 n2`.
    pub jump: Point,
    /// `{grad v}`.
    pub grad_avg: Point,
    /// `[grad v] = grad v1 . n1 + grad v2 . n2`.
    pub grad_jump: f64,
}

/// Jump and average operators; a missing second side means a boundary face,
/// where `{v} = v` and `[v] = v n`.
pub fn jump_average_eval(first: SideTrace, second: Option<SideTrace>) -> JumpAverage {
    let dot = |a: Point, b: Point| a[0] * b[0] + a[1] * b[1];
    match second {
        None => JumpAverage {
            avg: first.value,
            jump: [first.value * first.normal[0], first.value * first.normal[1]],
            grad_avg: first.grad,
            grad_jump: dot(first.grad, first.normal),
        },
        Some(s) => JumpAverage {
            avg: 0.5 * (first.value + s.value),
            jump: [
                first.value * first.normal[0] + s.value * s.normal[0],
                first.value * first.normal[1] + s.value * s.normal[1],
            ],
            grad_avg: [0.5 * (first.grad[0] + s.grad[0]), 0.5 * (first.grad[1] + s.grad[1])],
            grad_jump: dot(first.grad, first.normal) + dot(s.grad, s.normal),
        },
    }
}

/// Physical quadrature on a face: points and weights scaled by the length.
pub(crate) fn face_points(mesh: &Mesh, face: &Face, rule: &EdgeRule) -> Vec<(Point, f64)> {
    rule.iter().map(|([t], w)| (face.point(mesh, t), w * face.length)).collect()
}

/// Traces of every basis function of the (one or two) elements touching a
/// face, at one quadrature point.
///
/// Jumps and normal derivatives are expressed against the left normal `n1`:
/// `[phi_a] = jump[a] n1` and `[grad phi_a] = grad_jump[a]`.
pub(crate) struct FaceBasisPoint {
    pub weight: f64,
    pub jump: Vec<f64>,
    pub avg: Vec<f64>,
    pub grad_avg: Vec<Point>,
    pub grad_jump: Vec<f64>,
}

pub(crate) struct FaceBasis {
    pub dofs: Vec<usize>,
    pub interior: bool,
    pub normal: Point,
    pub points: Vec<FaceBasisPoint>,
}

impl FaceBasis {
    pub fn new(mesh: &Mesh, space: &DGSpace, face: &Face, rule: &EdgeRule) -> FaceBasis {
        let mut dofs: Vec<usize> = space.dofs(face.left).collect();
        if let Some(r) = face.right {
            dofs.extend(space.dofs(r));
        }
        let n = face.normal;
        let interior = face.is_interior();
        let w_avg = if interior { 0.5 } else { 1.0 };
        let points = face_points(mesh, face, rule)
            .into_iter()
            .map(|(x, weight)| {
                let mut p = FaceBasisPoint {
                    weight,
                    jump: Vec::with_capacity(dofs.len()),
                    avg: Vec::with_capacity(dofs.len()),
                    grad_avg: Vec::with_capacity(dofs.len()),
                    grad_jump: Vec::with_capacity(dofs.len()),
                };
                let mut push_side = |b: BasisAt, sign: f64| {
                    for (v, g) in b.values.iter().zip(&b.grads) {
                        p.jump.push(sign * v);
                        p.avg.push(w_avg * v);
                        p.grad_avg.push([w_avg * g[0], w_avg * g[1]]);
                        p.grad_jump.push(sign * (g[0] * n[0] + g[1] * n[1]));
                    }
                };
                push_side(space.eval(face.left, x), 1.0);
                if let Some(r) = face.right {
                    push_side(space.eval(r, x), -1.0);
                }
                p
            })
            .collect();
        FaceBasis { dofs, interior, normal: n, points }
    }

    /// Dense block `B[a][b] = sum_q w_q f(q, a, b)`, row-major.
    pub fn block(&self, f: impl Fn(&FaceBasisPoint, usize, usize) -> f64) -> Vec<f64> {
        let n = self.dofs.len();
        let mut out = vec![0.0; n * n];
        for p in &self.points {
            for a in 0..n {
                for b in 0..n {
                    out[a * n + b] += p.weight * f(p, a, b);
                }
            }
        }
        out
    }
}
