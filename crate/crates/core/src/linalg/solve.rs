use super::SparseMatrix;
use crate::{Error, Result};

/// Largest system handed to dense LU when the iterative solver fails.
pub const LU_FALLBACK_CAP: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Target relative residual `||b - Ax|| / ||b||`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-10, max_iter: 20_000 }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// True relative residual of `x`, recomputed from `A` and `b`.
    pub residual: f64,
    pub method: Method,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ConjugateGradient,
    BiCgStab,
    DenseLu,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `||b - Ax|| / ||b||`, or `||Ax||` when `b = 0`.
pub fn relative_residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let nb = norm(b);
    if nb == 0.0 {
        norm(&r)
    } else {
        norm(&r) / nb
    }
}

fn check_dims(a: &SparseMatrix, b: &[f64]) -> Result<()> {
    if a.dim() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.len() });
    }
    Ok(())
}

fn check_options(opts: &SolveOptions) -> Result<()> {
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::param("tol", format!("must be positive, got {}", opts.tol)));
    }
    if opts.max_iter == 0 {
        return Err(Error::param("max_iter", "must be at least 1"));
    }
    Ok(())
}

/// Jacobi-preconditioned conjugate gradients for symmetric positive definite `A`.
///
/// Non-positive curvature `p^T A p <= 0` (or a non-positive diagonal entry)
/// aborts with [`Error::Indefinite`].
pub fn solve_spd(a: &SparseMatrix, b: &[f64], opts: SolveOptions) -> Result<Solution> {
    check_dims(a, b)?;
    check_options(&opts)?;
    let n = b.len();
    let diag = a.diagonal();
    if let Some(&d) = diag.iter().find(|d| **d <= 0.0) {
        return Err(Error::Indefinite { iteration: 0, curvature: d });
    }
    let nb = norm(b);
    let mut x = vec![0.0; n];
    if nb == 0.0 {
        return Ok(Solution { x, iterations: 0, residual: 0.0, method: Method::ConjugateGradient });
    }
    let mut r = b.to_vec();
    let mut ap = vec![0.0; n];
    let mut iterations = 0;
    // Restarts from the true residual guard against drift of the recursive one.
    for _restart in 0..5 {
        let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, d)| ri / d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        while norm(&r) > opts.tol * nb {
            if iterations >= opts.max_iter {
                let residual = relative_residual(a, &x, b);
                return Err(Error::NotConverged { iterations, residual });
            }
            iterations += 1;
            a.mul_vec_into(&p, &mut ap);
            let pap = dot(&p, &ap);
            if pap <= 0.0 || !pap.is_finite() {
                return Err(Error::Indefinite { iteration: iterations, curvature: pap / dot(&p, &p) });
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            for i in 0..n {
                z[i] = r[i] / diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        let ax = a.mul_vec(&x);
        r = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        if norm(&r) <= opts.tol * nb {
            break;
        }
    }
    let residual = norm(&r) / nb;
    if residual > opts.tol {
        return Err(Error::NotConverged { iterations, residual });
    }
    Ok(Solution { x, iterations, residual, method: Method::ConjugateGradient })
}

/// Jacobi-preconditioned BiCGStab; on failure falls back to dense LU for
/// systems of dimension at most [`LU_FALLBACK_CAP`].
pub fn solve_general(a: &SparseMatrix, b: &[f64], opts: SolveOptions) -> Result<Solution> {
    check_dims(a, b)?;
    check_options(&opts)?;
    match bicgstab(a, b, opts) {
        Ok(s) => Ok(s),
        Err(e) if a.dim() <= LU_FALLBACK_CAP => {
            let x = a.to_dense().lu_solve(b)?;
            let residual = relative_residual(a, &x, b);
            if residual > opts.tol {
                return Err(match e {
                    Error::NotConverged { iterations, .. } => Error::NotConverged { iterations, residual },
                    _ => Error::NotConverged { iterations: 0, residual },
                });
            }
            Ok(Solution { x, iterations: 0, residual, method: Method::DenseLu })
        }
        Err(e) => Err(e),
    }
}

fn bicgstab(a: &SparseMatrix, b: &[f64], opts: SolveOptions) -> Result<Solution> {
    let n = b.len();
    let nb = norm(b);
    let mut x = vec![0.0; n];
    if nb == 0.0 {
        return Ok(Solution { x, iterations: 0, residual: 0.0, method: Method::BiCgStab });
    }
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 }).collect();
    let precond = |v: &[f64]| -> Vec<f64> { v.iter().zip(&inv_diag).map(|(a, d)| a * d).collect() };

    let mut r = b.to_vec();
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut iterations = 0;
    while norm(&r) > opts.tol * nb {
        if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 || omega == 0.0 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let p_hat = precond(&p);
        v = a.mul_vec(&p_hat);
        let denom = dot(&r_hat, &v);
        if denom == 0.0 {
            break;
        }
        alpha = rho / denom;
        let s: Vec<f64> = r.iter().zip(&v).map(|(ri, vi)| ri - alpha * vi).collect();
        if norm(&s) <= opts.tol * nb {
            for i in 0..n {
                x[i] += alpha * p_hat[i];
            }
            break;
        }
        let s_hat = precond(&s);
        let t = a.mul_vec(&s_hat);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] = s[i] - omega * t[i];
        }
        if !x.iter().all(|v| v.is_finite()) {
            break;
        }
    }
    let residual = relative_residual(a, &x, b);
    if residual <= opts.tol {
        Ok(Solution { x, iterations, residual, method: Method::BiCgStab })
    } else {
        Err(Error::NotConverged { iterations, residual })
    }
}
