use crate::{Error, Result};

/// Quadrature on a reference domain of dimension `D`: the unit interval
/// `[0,1]` for `D = 1`, the triangle `{x, y >= 0, x + y <= 1}` for `D = 2`.
#[derive(Clone, Debug)]
pub struct QuadratureRule<const D: usize> {
    pub points: Vec<[f64; D]>,
    pub weights: Vec<f64>,
    /// Polynomials up to this total degree are integrated exactly.
    pub degree: usize,
}

pub type EdgeRule = QuadratureRule<1>;
pub type TriangleRule = QuadratureRule<2>;

pub const MAX_VOLUME_ORDER: usize = 20;

impl<const D: usize> QuadratureRule<D> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; D], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Legendre polynomial `P_n` and its derivative at `x` in `[-1,1]`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let j = j as f64;
        let p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `n`-point Gauss-Legendre rule mapped to `[0,1]`, exact to degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> EdgeRule {
    assert!(n >= 1, "a Gauss rule needs at least one point");
    let mut points = vec![[0.0]; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Symmetric pair on [-1,1], mapped to [0,1].
        points[i] = [0.5 * (1.0 - x)];
        points[n - 1 - i] = [0.5 * (1.0 + x)];
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    EdgeRule { points, weights, degree: 2 * n - 1 }
}

/// Gauss-Legendre rule on `[0,1]` exact to degree `order`.
pub fn face_quadrature(order: usize) -> EdgeRule {
    gauss_legendre(order / 2 + 1)
}

/// Collapsed (Duffy) tensor Gauss rule on the reference triangle, exact to
/// total degree `order`.
pub fn volume_quadrature(order: usize) -> Result<TriangleRule> {
    if !(1..=MAX_VOLUME_ORDER).contains(&order) {
        return Err(Error::param(
            "order",
            format!("volume quadrature supports exactness 1..={MAX_VOLUME_ORDER}, got {order}"),
        ));
    }
    // The collapse adds one power of (1 - u) in the first direction.
    let g = gauss_legendre((order + 3) / 2);
    let mut points = Vec::with_capacity(g.len() * g.len());
    let mut weights = Vec::with_capacity(g.len() * g.len());
    for ([u], wu) in g.iter() {
        for ([v], wv) in g.iter() {
            points.push([u, v * (1.0 - u)]);
            weights.push(wu * wv * (1.0 - u));
        }
    }
    Ok(TriangleRule { points, weights, degree: order })
}

/// Volume rule for integrands of degree `order`, saturating at the largest
/// supported exactness (integrands beyond it are not polynomial anyway).
pub(crate) fn volume_rule_for(order: usize) -> TriangleRule {
    volume_quadrature(order.clamp(1, MAX_VOLUME_ORDER)).expect("order clamped to supported range")
}
