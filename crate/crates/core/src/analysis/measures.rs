use crate::forms::{DGFunction, ExactFunction};
use crate::mesh::Mesh;
use crate::space::{volume_rule_for, DGSpace, ElementMap};
use crate::{Error, Point, Result};

/// `(sum_K h_K^{2 power} int_K g^2)^{1/2}` with `g` evaluated elementwise.
fn weighted_l2(mesh: &Mesh, power: i32, order: usize, g: impl Fn(usize, Point) -> f64) -> f64 {
    let rule = volume_rule_for(order);
    let mut sum = 0.0;
    for t in 0..mesh.n_elems() {
        let map = ElementMap::new(mesh.corners(t));
        let local: f64 = rule.iter().map(|(xi, w)| w * g(t, map.to_physical(xi)).powi(2)).sum();
        sum += mesh.h(t).powi(2 * power) * local * map.det;
    }
    sum.sqrt()
}

/// `||h^2 (f - P_k f)||` with `P_k` the elementwise `L^2` projection.
pub fn data_oscillation(f: impl Fn(Point) -> f64, mesh: &Mesh, space: &DGSpace) -> f64 {
    let order = 2 * space.degree() + 4;
    let pf = DGFunction::project(space, &f, order);
    weighted_l2(mesh, 2, order, |t, x| f(x) - pf.value_on(t, x))
}

/// `||u - P_k u||`, the best `L^2` approximation error in the space.
pub fn best_l2_error(u: &dyn ExactFunction, mesh: &Mesh, space: &DGSpace) -> f64 {
    let order = 2 * space.degree() + 4;
    let pu = DGFunction::project(space, |x| u.value(x), order);
    weighted_l2(mesh, 0, order, |t, x| u.value(x) - pu.value_on(t, x))
}

fn binomial(n: usize, k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * (n + 1 - i) as f64 / i as f64)
}

/// `(sum_K h_K^{2m} |u|^2_{m,K})^{1/2}`, where `|D^m u|^2` is the Frobenius
/// norm of the full `m`-th derivative tensor, `sum_a C(m, a) (d_x^a d_y^{m-a} u)^2`.
pub fn local_seminorm(u: &dyn ExactFunction, mesh: &Mesh, m: usize, order: usize) -> Result<f64> {
    let probe = mesh.centroid(0);
    for a in 0..=m {
        if u.derivative(a, m - a, probe).is_none() {
            return Err(Error::param("u", format!("{} has no derivatives of order {m}", u.name())));
        }
    }
    let frob = |x: Point| -> f64 {
        (0..=m).map(|a| binomial(m, a) * u.derivative(a, m - a, x).unwrap().powi(2)).sum::<f64>().sqrt()
    };
    Ok(weighted_l2(mesh, m as i32, order, |_, x| frob(x)))
}

/// `(sum_K h_K^4 ||D^2 u||^2_K)^{1/2}`.
pub fn local_h4_seminorm(u: &dyn ExactFunction, mesh: &Mesh, order: usize) -> Result<f64> {
    local_seminorm(u, mesh, 2, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{FnExact, Manufactured};
    use crate::mesh::gen_uniform;
    use std::f64::consts::PI;

    #[test]
    fn oscillation_vanishes_on_the_space() {
        let mesh = gen_uniform(3).unwrap();
        let space = DGSpace::new(&mesh, 2).unwrap();
        assert!(data_oscillation(|_| 4.5, &mesh, &space) < 1e-12);
        assert!(data_oscillation(|p| 1.0 + p[0] * p[1] - 3.0 * p[1] * p[1], &mesh, &space) < 1e-12);
    }

    #[test]
    fn oscillation_rate() {
        let f = |p: Point| 2.0 * PI * PI * (PI * p[0]).sin() * (PI * p[1]).sin();
        let osc = |n| {
            let mesh = gen_uniform(n).unwrap();
            data_oscillation(f, &mesh, &DGSpace::new(&mesh, 1).unwrap())
        };
        let ratio = osc(8) / osc(16);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn h4_seminorm_cases() {
        let mesh = gen_uniform(2).unwrap();
        let lin = FnExact::new("linear", |p| 2.0 * p[0] - p[1], |_| [2.0, -1.0], |_| 0.0).with_hessian(|_| [0.0; 3]);
        assert_eq!(local_h4_seminorm(&lin, &mesh, 4).unwrap(), 0.0);

        let one = crate::mesh::Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
            None,
        )
        .unwrap();
        let q = FnExact::new("x^2/2", |p| 0.5 * p[0] * p[0], |p| [p[0], 0.0], |_| 1.0).with_hessian(|_| [1.0, 0.0, 0.0]);
        // Two elements of diameter sqrt 2 and area 1/2: (2 h^4 / 2)^{1/2} = h^2.
        let h = 2f64.sqrt();
        assert!((local_h4_seminorm(&q, &one, 4).unwrap() - h * h).abs() < 1e-13);
        let single = crate::mesh::Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
            vec![[0, 1, 2], [1, 3, 2]],
            None,
        )
        .unwrap();
        let per_elem = (h.powi(4) * single.area(0)).sqrt();
        assert!((local_h4_seminorm(&q, &single, 4).unwrap() - per_elem * 2f64.sqrt()).abs() < 1e-13);

        let u = Manufactured::sinsin();
        let a = local_h4_seminorm(&u, &gen_uniform(16).unwrap(), 8).unwrap();
        let b = local_h4_seminorm(&u, &gen_uniform(32).unwrap(), 8).unwrap();
        assert!((a / b - 4.0).abs() < 1e-3, "ratio {}", a / b);

        assert!(local_seminorm(&q, &mesh, 3, 4).is_err());
    }

    #[test]
    fn frobenius_weights() {
        // u = x^2 y: D^3 u has d_xxy = 2 with multiplicity 3.
        let u = FnExact::new("x^2 y", |p| p[0] * p[0] * p[1], |p| [2.0 * p[0] * p[1], p[0] * p[0]], |p| 2.0 * p[1]);
        struct Cubic(FnExact);
        impl ExactFunction for Cubic {
            fn name(&self) -> String {
                self.0.name()
            }
            fn value(&self, x: Point) -> f64 {
                self.0.value(x)
            }
            fn gradient(&self, x: Point) -> Point {
                self.0.gradient(x)
            }
            fn laplacian(&self, x: Point) -> f64 {
                self.0.laplacian(x)
            }
            fn derivative(&self, dx: usize, dy: usize, _x: Point) -> Option<f64> {
                Some(if (dx, dy) == (2, 1) { 2.0 } else { 0.0 })
            }
            fn satisfies_dirichlet(&self) -> bool {
                false
            }
        }
        let mesh = gen_uniform(1).unwrap();
        let s = local_seminorm(&Cubic(u), &mesh, 3, 2).unwrap();
        let h = 2f64.sqrt();
        assert!((s - (h.powi(6) * 12.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn best_approximation() {
        let mesh = gen_uniform(2).unwrap();
        let space = DGSpace::new(&mesh, 4).unwrap();
        assert!(best_l2_error(&Manufactured::poly_bubble(), &mesh, &space) < 1e-13);
        let space = DGSpace::new(&mesh, 1).unwrap();
        assert!(best_l2_error(&Manufactured::sinsin(), &mesh, &space) > 1e-3);
    }
}
