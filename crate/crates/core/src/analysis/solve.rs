use serde::Serialize;

use super::measures::{best_l2_error, data_oscillation, local_h4_seminorm, local_seminorm};
use super::Problem;
use crate::forms::{
    assemble_load, assemble_ritz_rhs, assemble_sip, field_norm, DGFunction, Difference, ExactField, NormKind,
    PenaltyConfig,
};
use crate::linalg::{solve_general, solve_spd, Method, SolveOptions, SparseMatrix};
use crate::mesh::{grading_report, GradingReport, Mesh};
use crate::space::DGSpace;
use crate::{Error, Result};

/// Errors of a discrete solution against the exact one, plus approximation
/// and data quantities on the same mesh.
#[derive(Clone, Debug, Serialize)]
pub struct ErrorReport {
    pub l2_error: f64,
    pub z_error: f64,
    pub energy_error: f64,
    pub h2h_error: f64,
    /// `(sum_K h_K^4 ||D^2 u||^2_K)^{1/2}`.
    pub local_h4_seminorm: f64,
    /// `(sum_K h_K^{2(k+1)} |u|^2_{k+1,K})^{1/2}`; equals the previous field for `k = 1`.
    pub local_bound: f64,
    /// `||u - P_k u||`.
    pub best_l2: f64,
    /// `||h^2 (f - P_k f)||`.
    pub data_osc: f64,
    pub dofs: usize,
    pub grading: GradingReport,
}

/// Measures `u - u_h` in all four norms with rules exact to degree `2k + 4`.
pub fn error_report(
    mesh: &Mesh,
    uh: &DGFunction<'_>,
    problem: &Problem,
    cfg: &PenaltyConfig,
) -> Result<ErrorReport> {
    let space = uh.space();
    let k = space.degree();
    let order = 2 * k + 4;
    let exact = ExactField(problem.exact());
    let diff = Difference(&exact, uh);
    let norm = |kind| field_norm(kind, &diff, mesh, k, cfg, order);
    Ok(ErrorReport {
        l2_error: norm(NormKind::L2),
        z_error: norm(NormKind::Z),
        energy_error: norm(NormKind::Energy),
        h2h_error: norm(NormKind::H2h),
        local_h4_seminorm: local_h4_seminorm(problem.exact(), mesh, order)?,
        local_bound: local_seminorm(problem.exact(), mesh, k + 1, order)?,
        best_l2: best_l2_error(problem.exact(), mesh, space),
        data_osc: data_oscillation(|x| problem.source(x), mesh, space),
        dofs: space.n_dofs(),
        grading: grading_report(mesh),
    })
}

/// Linear solve outcome.
#[derive(Clone, Debug, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
    pub method: String,
    /// Set when conjugate gradients met negative curvature and the general
    /// solver took over.
    pub indefinite: bool,
}

/// Solves `A x = b`: conjugate gradients for the symmetric form, falling
/// back to the general solver when the matrix turns out indefinite.
pub fn solve_system(a: &SparseMatrix, b: &[f64], cfg: &PenaltyConfig) -> Result<(Vec<f64>, SolveStats)> {
    let opts = SolveOptions::default();
    let (solution, indefinite) = if cfg.theta == 1.0 {
        match solve_spd(a, b, opts) {
            Ok(s) => (s, false),
            Err(Error::Indefinite { .. }) => (solve_general(a, b, opts)?, true),
            Err(e) => return Err(e),
        }
    } else {
        (solve_general(a, b, opts)?, false)
    };
    let method = match solution.method {
        Method::ConjugateGradient => "cg",
        Method::BiCgStab => "bicgstab",
        Method::DenseLu => "lu",
    };
    let stats = SolveStats {
        iterations: solution.iterations,
        residual: solution.residual,
        method: method.to_string(),
        indefinite,
    };
    Ok((solution.x, stats))
}

/// A discrete solution with its diagnostics.
#[derive(Clone, Debug)]
pub struct Solved<'a> {
    pub uh: DGFunction<'a>,
    pub report: ErrorReport,
    pub stats: SolveStats,
}

/// Solves `A_h(u_h, v_h) = (f, v_h)` for all `v_h` and measures the error.
pub fn solve_poisson<'a>(
    mesh: &Mesh,
    space: &'a DGSpace,
    cfg: &PenaltyConfig,
    problem: &Problem,
) -> Result<Solved<'a>> {
    let a = assemble_sip(mesh, space, cfg)?;
    let b = assemble_load(space, |x| problem.source(x));
    let (x, stats) = solve_system(&a, &b, cfg)?;
    let uh = DGFunction::new(space, x)?;
    let report = error_report(mesh, &uh, problem, cfg)?;
    Ok(Solved { uh, report, stats })
}

/// Ritz projection and the quantities of its stability and quasi-optimality.
#[derive(Clone, Debug)]
pub struct Ritz<'a> {
    pub ru: DGFunction<'a>,
    /// `||u||_Z` of the exact function by direct quadrature.
    pub u_z: f64,
    pub ru_z: f64,
    /// `||u - R u||_Z`.
    pub error_z: f64,
    /// `||u - P_k u||_Z`.
    pub best_z: f64,
    pub stats: SolveStats,
}

impl Ritz<'_> {
    /// `||R u||_Z / ||u||_Z`.
    pub fn stability_ratio(&self) -> f64 {
        self.ru_z / self.u_z
    }

    /// `||u - R u||_Z / ||u - P_k u||_Z`.
    pub fn quasi_optimality_ratio(&self) -> f64 {
        self.error_z / self.best_z
    }
}

/// `R u` with `A_h(R u, v_h) = A_h(u, v_h)` for all `v_h`.
pub fn ritz_project<'a>(mesh: &Mesh, space: &'a DGSpace, problem: &Problem, cfg: &PenaltyConfig) -> Result<Ritz<'a>> {
    if cfg.theta != 1.0 {
        return Err(Error::param("theta", format!("the Ritz projection needs theta = 1, got {}", cfg.theta)));
    }
    let k = space.degree();
    let order = 2 * k + 4;
    let a = assemble_sip(mesh, space, cfg)?;
    let b = assemble_ritz_rhs(mesh, space, problem.exact(), cfg, None)?;
    let (x, stats) = solve_system(&a, &b, cfg)?;
    let ru = DGFunction::new(space, x)?;
    let exact = ExactField(problem.exact());
    let pu = DGFunction::project(space, |x| problem.exact().value(x), order);
    let z = |f: &dyn crate::forms::BrokenField| field_norm(NormKind::Z, f, mesh, k, cfg, order);
    Ok(Ritz {
        u_z: z(&exact),
        ru_z: z(&ru),
        error_z: z(&Difference(&exact, &ru)),
        best_z: z(&Difference(&exact, &pu)),
        ru,
        stats,
    })
}
