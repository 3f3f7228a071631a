use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::forms::{assemble_norm_matrix, assemble_sip, NormKind, PenaltyConfig};
use crate::linalg::{gen_sym_eig, smallest_gsv, DenseMatrix, SparseMatrix, DENSE_CAP};
use crate::mesh::Mesh;
use crate::space::DGSpace;
use crate::{Error, Result};

/// Discrete inf-sup constant between the broken `H^2` norm (test side) and
/// the `Z` norm (trial side).
#[derive(Clone, Debug, Serialize)]
pub struct InfSup {
    pub gamma: f64,
    /// Largest generalized singular value with the same norms.
    pub sigma_max: f64,
    pub dofs: usize,
    /// Trial coefficients attaining `gamma`, unit `Z` norm.
    #[serde(skip)]
    pub direction: Vec<f64>,
}

fn require_symmetric(cfg: &PenaltyConfig) -> Result<()> {
    if cfg.theta != 1.0 {
        return Err(Error::param("theta", format!("the symmetric form is required (theta = 1), got {}", cfg.theta)));
    }
    Ok(())
}

fn require_dense(space: &DGSpace) -> Result<()> {
    if space.n_dofs() > DENSE_CAP {
        return Err(Error::TooLarge { dofs: space.n_dofs(), cap: DENSE_CAP });
    }
    Ok(())
}

/// `gamma = min_w sup_v A_h(w, v) / (|||v|||_{2,h} ||w||_Z)`.
pub fn infsup_gamma(mesh: &Mesh, space: &DGSpace, cfg: &PenaltyConfig) -> Result<InfSup> {
    require_symmetric(cfg)?;
    require_dense(space)?;
    let a = assemble_sip(mesh, space, cfg)?;
    let h2 = assemble_norm_matrix(NormKind::H2h, mesh, space, cfg)?;
    let z = assemble_norm_matrix(NormKind::Z, mesh, space, cfg)?;
    let g = smallest_gsv(&a, &h2, &z)?;
    Ok(InfSup { gamma: g.gamma, sigma_max: g.sigma_max, dofs: space.n_dofs(), direction: g.direction })
}

/// `c0 = min_w A_h(w, w) / |||w|||^2`, the smallest generalized eigenvalue of
/// the symmetric part of `A` against the energy norm matrix. Negative values
/// mean coercivity is lost.
pub fn coercivity_constant(mesh: &Mesh, space: &DGSpace, cfg: &PenaltyConfig) -> Result<f64> {
    require_dense(space)?;
    let a = assemble_sip(mesh, space, cfg)?.to_dense();
    let sym = DenseMatrix::from_fn(a.rows(), a.cols(), |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let e = assemble_norm_matrix(NormKind::Energy, mesh, space, cfg)?.to_dense();
    Ok(gen_sym_eig(&sym, &e)?.min())
}

/// Continuity of `A_h` in the unbalanced norms `|||w|||_{2,h}` and `||v||_Z`.
#[derive(Clone, Debug, Serialize)]
pub struct Continuity {
    /// Largest `|A_h(w, v)| / (|||w|||_{2,h} ||v||_Z)` over the random pairs.
    pub sampled_max: f64,
    pub samples: usize,
    pub seed: u64,
    /// The supremum, when the space is small enough for the dense path.
    pub exact: Option<f64>,
}

pub const MIN_CONTINUITY_SAMPLES: usize = 100;

pub fn continuity_constant(
    mesh: &Mesh,
    space: &DGSpace,
    cfg: &PenaltyConfig,
    samples: usize,
    seed: u64,
) -> Result<Continuity> {
    if samples < MIN_CONTINUITY_SAMPLES {
        return Err(Error::param("samples", format!("need at least {MIN_CONTINUITY_SAMPLES}, got {samples}")));
    }
    let a = assemble_sip(mesh, space, cfg)?;
    let h2 = assemble_norm_matrix(NormKind::H2h, mesh, space, cfg)?;
    let z = assemble_norm_matrix(NormKind::Z, mesh, space, cfg)?;
    let sampled_max = sampled_ratio(&a, &h2, &z, samples, seed);
    let exact = if space.n_dofs() <= DENSE_CAP {
        // sup_{v,w} v^T A w / (|v|_Z |w|_H2h): Z on the left, H2h on the right.
        Some(smallest_gsv(&a, &z, &h2)?.sigma_max)
    } else {
        None
    };
    Ok(Continuity { sampled_max, samples, seed, exact })
}

fn sampled_ratio(a: &SparseMatrix, h2: &SparseMatrix, z: &SparseMatrix, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = a.dim();
    let mut best: f64 = 0.0;
    let mut drawn = 0;
    while drawn < samples {
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (nw, nv) = (h2.form(&w, &w).sqrt(), z.form(&v, &v).sqrt());
        if nw == 0.0 || nv == 0.0 {
            continue;
        }
        drawn += 1;
        best = best.max(a.form(&v, &w).abs() / (nw * nv));
    }
    best
}
