use std::f64::consts::PI;
use std::fmt;

use crate::{Error, Point, Result};

/// A smooth function on the closed unit square with computable derivatives.
pub trait ExactFunction: Send + Sync {
    fn name(&self) -> String;

    fn value(&self, x: Point) -> f64;

    fn gradient(&self, x: Point) -> Point;

    fn laplacian(&self, x: Point) -> f64;

    /// `[u_xx, u_xy, u_yy]` when available.
    fn hessian(&self, _x: Point) -> Option<[f64; 3]> {
        None
    }

    /// Mixed partial derivative `d^dx/dx^dx d^dy/dy^dy` when available.
    fn derivative(&self, dx: usize, dy: usize, x: Point) -> Option<f64> {
        match (dx, dy) {
            (0, 0) => Some(self.value(x)),
            (1, 0) => Some(self.gradient(x)[0]),
            (0, 1) => Some(self.gradient(x)[1]),
            (2, 0) => self.hessian(x).map(|h| h[0]),
            (1, 1) => self.hessian(x).map(|h| h[1]),
            (0, 2) => self.hessian(x).map(|h| h[2]),
            _ => None,
        }
    }

    /// Whether `u = 0` on the boundary of the unit square.
    fn satisfies_dirichlet(&self) -> bool;

    /// Right-hand side `f = -Laplace u`.
    fn source(&self, x: Point) -> f64 {
        -self.laplacian(x)
    }
}

/// One-dimensional factor of a separable manufactured solution.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Factor {
    /// `sin(pi t)`
    Sine,
    /// `t (1 - t)`
    Bubble,
    /// `(1 - exp(-t / eps)) (1 - t)`
    Layer(f64),
}

impl Factor {
    fn derivative(self, n: usize, t: f64) -> f64 {
        match self {
            Factor::Sine => PI.powi(n as i32) * (PI * t + n as f64 * PI / 2.0).sin(),
            Factor::Bubble => match n {
                0 => t * (1.0 - t),
                1 => 1.0 - 2.0 * t,
                2 => -2.0,
                _ => 0.0,
            },
            Factor::Layer(eps) => {
                // (1 - t) - (1 - t) e, with e = exp(-t/eps) and e^(m) = (-1/eps)^m e.
                let e = (-t / eps).exp();
                let c = -1.0 / eps;
                let poly = match n {
                    0 => 1.0 - t,
                    1 => -1.0,
                    _ => 0.0,
                };
                let mut prod = (1.0 - t) * c.powi(n as i32) * e;
                if n >= 1 {
                    prod -= n as f64 * c.powi(n as i32 - 1) * e;
                }
                poly - prod
            }
        }
    }
}

/// The shipped manufactured solutions, all of the form `X(x) Y(y)` and all
/// vanishing on the boundary of the unit square.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Manufactured {
    fx: Factor,
    fy: Factor,
}

impl Manufactured {
    /// `sin(pi x) sin(pi y)`.
    pub fn sinsin() -> Self {
        Manufactured { fx: Factor::Sine, fy: Factor::Sine }
    }

    /// `x (1 - x) y (1 - y)`.
    pub fn poly_bubble() -> Self {
        Manufactured { fx: Factor::Bubble, fy: Factor::Bubble }
    }

    /// `(1 - exp(-x/eps)) (1 - x) y (1 - y)`, a boundary layer at `x = 0`.
    pub fn layer(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::param("epsilon", format!("layer width must be positive, got {eps}")));
        }
        Ok(Manufactured { fx: Factor::Layer(eps), fy: Factor::Bubble })
    }

    /// Parses `sinsin`, `polybubble` or `layer:<eps>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "sinsin" => Ok(Self::sinsin()),
            None if s == "polybubble" => Ok(Self::poly_bubble()),
            None if s == "layer" => Err(Error::param("problem", "layer needs a width, e.g. layer:0.01")),
            Some(("layer", eps)) => {
                let eps: f64 = eps
                    .parse()
                    .map_err(|_| Error::param("problem", format!("bad layer width {eps:?}")))?;
                Self::layer(eps)
            }
            _ => Err(Error::param(
                "problem",
                format!("unknown problem {s:?}; expected sinsin, polybubble or layer:<eps>"),
            )),
        }
    }
}

impl fmt::Display for Manufactured {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.fx {
            Factor::Sine => write!(f, "sinsin"),
            Factor::Bubble => write!(f, "polybubble"),
            Factor::Layer(eps) => write!(f, "layer:{eps}"),
        }
    }
}

impl ExactFunction for Manufactured {
    fn name(&self) -> String {
        self.to_string()
    }

    fn value(&self, x: Point) -> f64 {
        self.fx.derivative(0, x[0]) * self.fy.derivative(0, x[1])
    }

    fn gradient(&self, x: Point) -> Point {
        [
            self.fx.derivative(1, x[0]) * self.fy.derivative(0, x[1]),
            self.fx.derivative(0, x[0]) * self.fy.derivative(1, x[1]),
        ]
    }

    fn laplacian(&self, x: Point) -> f64 {
        let h = self.hessian(x).expect("separable functions have Hessians");
        h[0] + h[2]
    }

    fn hessian(&self, x: Point) -> Option<[f64; 3]> {
        Some([
            self.fx.derivative(2, x[0]) * self.fy.derivative(0, x[1]),
            self.fx.derivative(1, x[0]) * self.fy.derivative(1, x[1]),
            self.fx.derivative(0, x[0]) * self.fy.derivative(2, x[1]),
        ])
    }

    fn derivative(&self, dx: usize, dy: usize, x: Point) -> Option<f64> {
        Some(self.fx.derivative(dx, x[0]) * self.fy.derivative(dy, x[1]))
    }

    fn satisfies_dirichlet(&self) -> bool {
        true
    }
}

type ScalarFn = Box<dyn Fn(Point) -> f64 + Send + Sync>;
type VectorFn = Box<dyn Fn(Point) -> Point + Send + Sync>;
type HessianFn = Box<dyn Fn(Point) -> [f64; 3] + Send + Sync>;

/// An [`ExactFunction`] assembled from closures.
pub struct FnExact {
    name: String,
    value: ScalarFn,
    gradient: VectorFn,
    laplacian: ScalarFn,
    hessian: Option<HessianFn>,
    dirichlet: bool,
}

impl FnExact {
    /// A function with the given value, gradient and Laplacian, not flagged
    /// as vanishing on the boundary.
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(Point) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(Point) -> Point + Send + Sync + 'static,
        laplacian: impl Fn(Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        FnExact {
            name: name.into(),
            value: Box::new(value),
            gradient: Box::new(gradient),
            laplacian: Box::new(laplacian),
            hessian: None,
            dirichlet: false,
        }
    }

    /// A constant function.
    pub fn constant(c: f64) -> Self {
        FnExact::new(format!("constant {c}"), move |_| c, |_| [0.0, 0.0], |_| 0.0).with_hessian(|_| [0.0; 3])
    }

    pub fn with_hessian(mut self, h: impl Fn(Point) -> [f64; 3] + Send + Sync + 'static) -> Self {
        self.hessian = Some(Box::new(h));
        self
    }

    /// Flags the function as vanishing on the boundary of the unit square.
    pub fn dirichlet(mut self, flag: bool) -> Self {
        self.dirichlet = flag;
        self
    }
}

impl fmt::Debug for FnExact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnExact").field("name", &self.name).field("dirichlet", &self.dirichlet).finish()
    }
}

impl ExactFunction for FnExact {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn value(&self, x: Point) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: Point) -> Point {
        (self.gradient)(x)
    }

    fn laplacian(&self, x: Point) -> f64 {
        (self.laplacian)(x)
    }

    fn hessian(&self, x: Point) -> Option<[f64; 3]> {
        self.hessian.as_ref().map(|h| h(x))
    }

    fn satisfies_dirichlet(&self) -> bool {
        self.dirichlet
    }
}
