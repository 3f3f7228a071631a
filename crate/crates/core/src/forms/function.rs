use super::ExactFunction;
use crate::mesh::Mesh;
use crate::space::{volume_rule_for, DGSpace};
use crate::{Error, Point, Result};

/// Value, gradient and Laplacian of a field at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FieldValue {
    pub value: f64,
    pub grad: Point,
    pub laplacian: f64,
}

impl std::ops::Sub for FieldValue {
    type Output = FieldValue;

    fn sub(self, o: FieldValue) -> FieldValue {
        FieldValue {
            value: self.value - o.value,
            grad: [self.grad[0] - o.grad[0], self.grad[1] - o.grad[1]],
            laplacian: self.laplacian - o.laplacian,
        }
    }
}

/// A piecewise smooth field, evaluated through its restriction to an element
/// (so both one-sided traces on a face are available).
pub trait BrokenField {
    fn eval_on(&self, elem: usize, x: Point) -> FieldValue;
}

/// Adapts an [`ExactFunction`] to [`BrokenField`]; the element is ignored.
#[derive(Clone, Copy)]
pub struct ExactField<'a>(pub &'a dyn ExactFunction);

impl BrokenField for ExactField<'_> {
    fn eval_on(&self, _elem: usize, x: Point) -> FieldValue {
        FieldValue { value: self.0.value(x), grad: self.0.gradient(x), laplacian: self.0.laplacian(x) }
    }
}

/// `a - b`.
#[derive(Clone, Copy)]
pub struct Difference<'a>(pub &'a dyn BrokenField, pub &'a dyn BrokenField);

impl BrokenField for Difference<'_> {
    fn eval_on(&self, elem: usize, x: Point) -> FieldValue {
        self.0.eval_on(elem, x) - self.1.eval_on(elem, x)
    }
}

/// A member of the broken polynomial space.
#[derive(Clone, Debug)]
pub struct DGFunction<'a> {
    space: &'a DGSpace,
    coeffs: Vec<f64>,
}

impl<'a> DGFunction<'a> {
    pub fn new(space: &'a DGSpace, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.n_dofs() {
            return Err(Error::DimensionMismatch { expected: space.n_dofs(), found: coeffs.len() });
        }
        Ok(DGFunction { space, coeffs })
    }

    pub fn zeros(space: &'a DGSpace) -> Self {
        DGFunction { space, coeffs: vec![0.0; space.n_dofs()] }
    }

    /// Elementwise `L^2` projection `P_k f`, computed with quadrature exact to `order`.
    ///
    /// The basis is orthonormal, so the coefficients are the moments `(f, phi_i)_K`.
    pub fn project(space: &'a DGSpace, f: impl Fn(Point) -> f64, order: usize) -> Self {
        let rule = volume_rule_for(order);
        let mut coeffs = vec![0.0; space.n_dofs()];
        for t in 0..space.n_elems() {
            let dofs = space.dofs(t);
            for (_, x, w) in space.element_quadrature(t, &rule) {
                let fx = f(x);
                for (c, v) in coeffs[dofs.clone()].iter_mut().zip(space.values(t, x)) {
                    *c += w * fx * v;
                }
            }
        }
        DGFunction { space, coeffs }
    }

    pub fn space(&self) -> &'a DGSpace {
        self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Coefficients belonging to element `t`.
    pub fn local(&self, t: usize) -> &[f64] {
        &self.coeffs[self.space.dofs(t)]
    }

    /// Value of the restriction to element `t` at `x`.
    pub fn value_on(&self, t: usize, x: Point) -> f64 {
        self.space.values(t, x).iter().zip(self.local(t)).map(|(v, c)| v * c).sum()
    }

    /// Value at `x`, using the first element of `mesh` that contains it.
    pub fn value_at(&self, mesh: &Mesh, x: Point) -> Option<f64> {
        mesh.locate(x).map(|t| self.value_on(t, x))
    }
}

impl BrokenField for DGFunction<'_> {
    fn eval_on(&self, elem: usize, x: Point) -> FieldValue {
        let b = self.space.eval(elem, x);
        let mut out = FieldValue::default();
        for (i, &c) in self.local(elem).iter().enumerate() {
            out.value += c * b.values[i];
            out.grad[0] += c * b.grads[i][0];
            out.grad[1] += c * b.grads[i][1];
            out.laplacian += c * b.laplacians[i];
        }
        out
    }
}
