use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::{get_global_parallelism, Mat, MatRef, Side};

use super::{DenseMatrix, DENSE_CAP};
use crate::{Error, Result};

/// Eigenpairs sorted by ascending eigenvalue; column `j` of `vectors`
/// belongs to `values[j]`.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl Eigen {
    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.vectors.rows()).map(|i| self.vectors[(i, j)]).collect()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }
}

fn check_square(a: &DenseMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    if a.rows() > DENSE_CAP {
        return Err(Error::TooLarge { dofs: a.rows(), cap: DENSE_CAP });
    }
    Ok(())
}

fn check_symmetric(a: &DenseMatrix) -> Result<()> {
    let asym = a.asymmetry();
    if asym > 1e-12 * a.max_abs().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

fn sorted(values: &[f64], vectors: MatRef<'_, f64>) -> Eigen {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    Eigen {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: DenseMatrix::from_fn(vectors.nrows(), order.len(), |i, j| vectors[(i, order[j])]),
    }
}

fn eigen_of(m: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let e = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence("symmetric eigensolver"))?;
    let s = e.S().column_vector();
    Ok(((0..s.nrows()).map(|i| s[i]).collect(), e.U().to_owned()))
}

/// `(M + M^T) / 2`, so roundoff asymmetry cannot bias the result.
pub(crate) fn symmetric_part(m: &Mat<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

/// Symmetric eigendecomposition.
pub fn sym_eig(a: &DenseMatrix) -> Result<Eigen> {
    check_square(a)?;
    check_symmetric(a)?;
    let (values, vectors) = eigen_of(&symmetric_part(&a.to_faer()))?;
    Ok(sorted(&values, vectors.as_ref()))
}

/// Generalized symmetric-definite problem `A x = λ B x`; eigenvectors are
/// `B`-orthonormal.
pub fn gen_sym_eig(a: &DenseMatrix, b: &DenseMatrix) -> Result<Eigen> {
    check_square(a)?;
    check_square(b)?;
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: b.rows() });
    }
    check_symmetric(a)?;
    check_symmetric(b)?;
    let par = get_global_parallelism();
    let llt = symmetric_part(&b.to_faer()).llt(Side::Lower).map_err(|_| Error::NotPositiveDefinite("B"))?;
    let l = llt.L();
    // C = L^{-1} A L^{-T}
    let mut c = a.to_faer();
    solve_lower_triangular_in_place(l, c.as_mut(), par);
    let mut ct = c.transpose().to_owned();
    solve_lower_triangular_in_place(l, ct.as_mut(), par);
    let (values, mut y) = eigen_of(&symmetric_part(&ct))?;
    solve_upper_triangular_in_place(l.transpose(), y.as_mut(), par);
    Ok(sorted(&values, y.as_ref()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = rng.random_range(-1.0..1.0);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        a
    }

    #[test]
    fn small_spectra() {
        let e = sym_eig(&DenseMatrix::diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        let e = sym_eig(&DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_symmetric_trace_and_residuals() {
        let a = random_symmetric(30, 7);
        let e = sym_eig(&a).unwrap();
        let sum: f64 = e.values.iter().sum();
        assert!((sum - a.trace()).abs() < 1e-9);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let norm = a.max_abs() * 30.0;
        for j in 0..30 {
            let v = e.vector(j);
            let av = a.mul_vec(&v);
            let r: f64 = av.iter().zip(&v).map(|(x, y)| (x - e.values[j] * y).powi(2)).sum::<f64>().sqrt();
            assert!(r <= 1e-8 * norm);
        }
        let vtv = e.vectors.transpose().matmul(&e.vectors);
        for i in 0..30 {
            for j in 0..30 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((vtv[(i, j)] - target).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn asymmetric_input_rejected() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0 + 1e-9, 1.0]]);
        assert!(matches!(sym_eig(&a), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn generalized_problem() {
        let a = DenseMatrix::diag(&[2.0, 12.0]);
        let b = DenseMatrix::diag(&[1.0, 4.0]);
        let e = gen_sym_eig(&a, &b).unwrap();
        assert!((e.values[0] - 2.0).abs() < 1e-14 && (e.values[1] - 3.0).abs() < 1e-14);
        let bad = DenseMatrix::diag(&[1.0, -1.0]);
        assert!(matches!(gen_sym_eig(&a, &bad), Err(Error::NotPositiveDefinite(_))));

        let a = random_symmetric(12, 3);
        let g = random_symmetric(12, 4);
        let b = g.transpose().matmul(&g).scale(1.0);
        let b = DenseMatrix::from_fn(12, 12, |i, j| b[(i, j)] + if i == j { 1.0 } else { 0.0 });
        let e = gen_sym_eig(&a, &b).unwrap();
        for j in 0..12 {
            let x = e.vector(j);
            let ax = a.mul_vec(&x);
            let bx = b.mul_vec(&x);
            let r = ax.iter().zip(&bx).map(|(p, q)| (p - e.values[j] * q).abs()).fold(0.0, f64::max);
            assert!(r < 1e-10, "pair {j}: residual {r}");
            assert!((b.form(&x, &x) - 1.0).abs() < 1e-10);
        }
    }
}
