//! Orthonormal Dubiner basis on the reference triangle.
//!
//! The basis is built once per degree as explicit polynomials in the
//! collapsed-coordinate variables `r = 2x - 1`, `s = 2y - 1` (both in
//! `[-1,1]` on the triangle), so derivatives of any order are exact
//! coefficient manipulations rather than separate recurrences.

use super::quadrature::volume_quadrature;
use crate::Point;

/// Dense bivariate polynomial `sum c[a][b] r^a s^b` with `a + b <= deg`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Poly2 {
    deg: usize,
    coef: Vec<f64>,
}

impl Poly2 {
    fn zero(deg: usize) -> Self {
        Poly2 { deg, coef: vec![0.0; (deg + 1) * (deg + 1)] }
    }

    fn linear(c: f64, cr: f64, cs: f64) -> Self {
        let mut p = Poly2::zero(1);
        p.set(0, 0, c);
        p.set(1, 0, cr);
        p.set(0, 1, cs);
        p
    }

    fn constant(c: f64) -> Self {
        let mut p = Poly2::zero(0);
        p.set(0, 0, c);
        p
    }

    fn get(&self, a: usize, b: usize) -> f64 {
        self.coef[a * (self.deg + 1) + b]
    }

    fn set(&mut self, a: usize, b: usize, v: f64) {
        self.coef[a * (self.deg + 1) + b] = v;
    }

    fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..=self.deg).flat_map(move |a| (0..=self.deg - a).map(move |b| (a, b, self.get(a, b))))
    }

    fn mul(&self, o: &Poly2) -> Poly2 {
        let mut p = Poly2::zero(self.deg + o.deg);
        for (a, b, c) in self.terms() {
            for (a2, b2, c2) in o.terms() {
                let v = p.get(a + a2, b + b2) + c * c2;
                p.set(a + a2, b + b2, v);
            }
        }
        p
    }

    /// `alpha * self + beta * o`.
    fn axpby(&self, alpha: f64, o: &Poly2, beta: f64) -> Poly2 {
        let mut p = Poly2::zero(self.deg.max(o.deg));
        for (a, b, c) in self.terms() {
            p.set(a, b, alpha * c);
        }
        for (a, b, c) in o.terms() {
            let v = p.get(a, b) + beta * c;
            p.set(a, b, v);
        }
        p
    }

    fn scale(&self, alpha: f64) -> Poly2 {
        Poly2 { deg: self.deg, coef: self.coef.iter().map(|c| alpha * c).collect() }
    }

    fn dr(&self) -> Poly2 {
        let mut p = Poly2::zero(self.deg.saturating_sub(1));
        for (a, b, c) in self.terms().filter(|t| t.0 > 0) {
            p.set(a - 1, b, a as f64 * c);
        }
        p
    }

    fn ds(&self) -> Poly2 {
        let mut p = Poly2::zero(self.deg.saturating_sub(1));
        for (a, b, c) in self.terms().filter(|t| t.1 > 0) {
            p.set(a, b - 1, b as f64 * c);
        }
        p
    }

    /// Evaluates with precomputed powers `rp[a] = r^a`, `sp[b] = s^b`.
    fn eval_powers(&self, rp: &[f64], sp: &[f64]) -> f64 {
        let mut acc = 0.0;
        for a in 0..=self.deg {
            let row = &self.coef[a * (self.deg + 1)..];
            let mut inner = 0.0;
            for b in 0..=self.deg - a {
                inner += row[b] * sp[b];
            }
            acc += rp[a] * inner;
        }
        acc
    }
}

/// Jacobi polynomials `P_n^(alpha, 0)(s)` for `n = 0..=max` as polynomials in `s`.
fn jacobi_in_s(alpha: f64, max: usize) -> Vec<Poly2> {
    let mut out = vec![Poly2::constant(1.0)];
    if max >= 1 {
        out.push(Poly2::linear(0.5 * alpha, 0.0, 0.5 * (alpha + 2.0)));
    }
    for n in 2..=max {
        let nf = n as f64;
        let c = 2.0 * nf + alpha;
        let a1 = 2.0 * nf * (nf + alpha) * (c - 2.0);
        let a2 = (c - 1.0) * alpha * alpha;
        let a3 = (c - 1.0) * c * (c - 2.0);
        let a4 = 2.0 * (nf + alpha - 1.0) * (nf - 1.0) * c;
        let lin = Poly2::linear(a2, 0.0, a3);
        let next = lin.mul(&out[n - 1]).axpby(1.0 / a1, &out[n - 2], -a4 / a1);
        out.push(next);
    }
    out
}

/// Index pairs `(i, j)` of the Dubiner modes in basis order: by total
/// degree, then by `i`.
pub(crate) fn mode_indices(k: usize) -> Vec<(usize, usize)> {
    (0..=k).flat_map(|d| (0..=d).map(move |i| (i, d - i))).collect()
}

/// Values, gradients and Hessians of all reference basis functions at a point.
#[derive(Clone, Debug)]
pub struct ReferenceEval {
    pub values: Vec<f64>,
    pub grads: Vec<Point>,
    /// `[d_xx, d_xy, d_yy]`.
    pub hessians: Vec<[f64; 3]>,
}

#[derive(Clone, Debug)]
pub struct ReferenceBasis {
    k: usize,
    phi: Vec<Poly2>,
    phi_r: Vec<Poly2>,
    phi_s: Vec<Poly2>,
    phi_rr: Vec<Poly2>,
    phi_rs: Vec<Poly2>,
    phi_ss: Vec<Poly2>,
}

impl ReferenceBasis {
    /// Orthonormal basis of `P_k` on the reference triangle (unit `L^2` norm
    /// with respect to `dx dy`).
    pub fn new(k: usize) -> Self {
        let t = Poly2::linear(0.5, 0.0, -0.5); // (1 - s) / 2
        let at = Poly2::linear(0.5, 1.0, 0.5); // a (1 - s) / 2 with a the collapsed coordinate
        let t2 = t.mul(&t);
        // Legendre P_i(a) t^i via the division-free three-term recurrence.
        let mut legendre_t = vec![Poly2::constant(1.0)];
        if k >= 1 {
            legendre_t.push(at.clone());
        }
        for n in 1..k {
            let nf = n as f64;
            let next = at
                .mul(&legendre_t[n])
                .axpby((2.0 * nf + 1.0) / (nf + 1.0), &t2.mul(&legendre_t[n - 1]), -nf / (nf + 1.0));
            legendre_t.push(next);
        }
        let mut phi: Vec<Poly2> = mode_indices(k)
            .into_iter()
            .map(|(i, j)| legendre_t[i].mul(&jacobi_in_s(2.0 * i as f64 + 1.0, j)[j]))
            .collect();

        // The modes are orthogonal; normalise with a rule exact for degree 2k.
        let q = volume_quadrature((2 * k).max(1)).expect("2k within supported range");
        for p in &mut phi {
            let norm2: f64 = q
                .iter()
                .map(|([x, y], w)| {
                    let v = eval_poly(p, 2.0 * x - 1.0, 2.0 * y - 1.0);
                    w * v * v
                })
                .sum();
            *p = p.scale(1.0 / norm2.sqrt());
        }

        let phi_r: Vec<Poly2> = phi.iter().map(Poly2::dr).collect();
        let phi_s: Vec<Poly2> = phi.iter().map(Poly2::ds).collect();
        let phi_rr = phi_r.iter().map(Poly2::dr).collect();
        let phi_rs = phi_r.iter().map(Poly2::ds).collect();
        let phi_ss = phi_s.iter().map(Poly2::ds).collect();
        ReferenceBasis { k, phi, phi_r, phi_s, phi_rr, phi_rs, phi_ss }
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    fn powers(&self, xi: Point) -> (Vec<f64>, Vec<f64>) {
        let (r, s) = (2.0 * xi[0] - 1.0, 2.0 * xi[1] - 1.0);
        let mut rp = vec![1.0; self.k + 1];
        let mut sp = vec![1.0; self.k + 1];
        for i in 1..=self.k {
            rp[i] = rp[i - 1] * r;
            sp[i] = sp[i - 1] * s;
        }
        (rp, sp)
    }

    /// Values at reference point `xi = (x, y)`.
    pub fn values(&self, xi: Point) -> Vec<f64> {
        let (rp, sp) = self.powers(xi);
        self.phi.iter().map(|p| p.eval_powers(&rp, &sp)).collect()
    }

    /// Values, gradients and Hessians with respect to the reference `(x, y)`.
    pub fn eval(&self, xi: Point) -> ReferenceEval {
        let (rp, sp) = self.powers(xi);
        let ev = |ps: &[Poly2], i: usize| ps[i].eval_powers(&rp, &sp);
        let n = self.len();
        // d/dx = 2 d/dr and d/dy = 2 d/ds.
        ReferenceEval {
            values: (0..n).map(|i| ev(&self.phi, i)).collect(),
            grads: (0..n).map(|i| [2.0 * ev(&self.phi_r, i), 2.0 * ev(&self.phi_s, i)]).collect(),
            hessians: (0..n)
                .map(|i| [4.0 * ev(&self.phi_rr, i), 4.0 * ev(&self.phi_rs, i), 4.0 * ev(&self.phi_ss, i)])
                .collect(),
        }
    }
}

fn eval_poly(p: &Poly2, r: f64, s: f64) -> f64 {
    p.terms().map(|(a, b, c)| c * r.powi(a as i32) * s.powi(b as i32)).sum()
}
