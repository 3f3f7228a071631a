use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::{get_global_parallelism, Mat, Side};

use super::eig::symmetric_part;

use super::{SparseMatrix, DENSE_CAP};
use crate::{Error, Result};

/// Extreme generalized singular values of `A` between two norms.
///
/// With `M_left = L L^T` and `M_right = R R^T`, these are the extreme
/// singular values of `L^{-1} A R^{-T}`, i.e. the extremes over `w` of
/// `sup_v (v^T A w) / (|v|_left |w|_right)`.
#[derive(Clone, Debug)]
pub struct GeneralizedSingular {
    pub gamma: f64,
    pub sigma_max: f64,
    /// Coefficient vector `w` attaining `gamma`, normalized to `|w|_right = 1`.
    pub direction: Vec<f64>,
}

fn lower_factor(m: &SparseMatrix, what: &'static str) -> Result<Mat<f64>> {
    let sym = symmetric_part(&m.to_dense().to_faer());
    Ok(sym.llt(Side::Lower).map_err(|_| Error::NotPositiveDefinite(what))?.L().to_owned())
}

pub fn smallest_gsv(a: &SparseMatrix, m_left: &SparseMatrix, m_right: &SparseMatrix) -> Result<GeneralizedSingular> {
    let n = a.dim();
    for m in [m_left, m_right] {
        if m.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m.dim() });
        }
    }
    if n > DENSE_CAP {
        return Err(Error::TooLarge { dofs: n, cap: DENSE_CAP });
    }
    let par = get_global_parallelism();
    let l = lower_factor(m_left, "left norm matrix")?;
    let r = lower_factor(m_right, "right norm matrix")?;
    // C = L^{-1} A R^{-T}, formed as (R^{-1} (L^{-1} A)^T)^T.
    let mut c = a.to_dense().to_faer();
    solve_lower_triangular_in_place(l.as_ref(), c.as_mut(), par);
    let mut ct = c.transpose().to_owned();
    solve_lower_triangular_in_place(r.as_ref(), ct.as_mut(), par);
    let svd = ct.transpose().svd().map_err(|_| Error::NoConvergence("singular value decomposition"))?;
    let sv = svd.S().column_vector();
    let sv: Vec<f64> = (0..sv.nrows()).map(|i| sv[i]).collect();
    if sv.iter().any(|s| !s.is_finite()) {
        return Err(Error::Singular);
    }
    let (imin, &gamma) = sv.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).ok_or(Error::Singular)?;
    let sigma_max = sv.iter().copied().fold(0.0, f64::max);
    let mut y = Mat::from_fn(n, 1, |i, _| svd.V()[(i, imin)]);
    solve_upper_triangular_in_place(r.transpose(), y.as_mut(), par);
    Ok(GeneralizedSingular { gamma, sigma_max, direction: (0..n).map(|i| y[(i, 0)]).collect() })
}
