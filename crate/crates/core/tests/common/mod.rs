//! Property checks shared by the property tests and the acceptance target.
//! Each check returns a short summary on success and the violation otherwise.
#![allow(dead_code)]

use ipdg::analysis::{
    coercivity_constant, continuity_constant, infsup_gamma, ritz_project, run_study, solve_poisson, Family, Problem,
    StudyConfig,
};
use ipdg::forms::{
    assemble_load, assemble_norm_matrix, assemble_ritz_rhs, assemble_sip, field_norm, matrix_norm, DGFunction,
    NormKind, PenaltyConfig,
};
use ipdg::linalg::gen_sym_eig;
use ipdg::mesh::{gen_geometric, gen_shishkin, gen_uniform, Mesh};
use ipdg::space::{volume_quadrature, DGSpace, MAX_VOLUME_ORDER};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<String, String>;

pub fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Each value within `tol` (relative) of the first.
pub fn stable_against_first(values: &[f64], tol: f64) -> bool {
    values.iter().all(|v| (v / values[0] - 1.0).abs() <= tol)
}

pub fn sinsin() -> Problem {
    Problem::parse("sinsin").unwrap()
}

/// A mesh of each generated family at small size.
pub fn sample_meshes() -> Vec<(&'static str, Mesh)> {
    let nvb = Family::Nvb { n0: 2 }.meshes(2).unwrap().pop().unwrap();
    vec![
        ("uniform", gen_uniform(3).unwrap()),
        ("geometric", gen_geometric(0.9, 4).unwrap()),
        ("shishkin", gen_shishkin(0.01, 3).unwrap()),
        ("nvb", nvb),
    ]
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Matrix norms of random discrete functions agree with direct quadrature.
pub fn norm_matrices_match_quadrature() -> Check {
    let cfg = PenaltyConfig::default();
    let mut worst: f64 = 0.0;
    let mut r = rng(1);
    for (name, mesh) in sample_meshes() {
        for k in 1..=3 {
            let space = DGSpace::new(&mesh, k).unwrap();
            let w = DGFunction::new(&space, random_vec(&mut r, space.n_dofs())).unwrap();
            for kind in NormKind::ALL {
                let m = assemble_norm_matrix(kind, &mesh, &space, &cfg).unwrap();
                let a = matrix_norm(&m, w.coeffs());
                let b = field_norm(kind, &w, &mesh, k, &cfg, 2 * k + 2);
                let rel = (a - b).abs() / b;
                worst = worst.max(rel);
                ensure(rel < 1e-12, format!("{name} k={k} {kind}: matrix {a} vs quadrature {b}"))?;
            }
        }
    }
    Ok(format!("max relative difference {worst:.1e}"))
}

/// The symmetric form is exactly symmetric; for theta = -1 the consistency
/// and adjoint face terms cancel in `A + A^T`.
pub fn symmetry() -> Check {
    for (name, mesh) in sample_meshes() {
        for k in 1..=3 {
            let space = DGSpace::new(&mesh, k).unwrap();
            let sym = assemble_sip(&mesh, &space, &PenaltyConfig::default()).unwrap();
            ensure(sym.max_asymmetry() == 0.0, format!("{name} k={k}: asymmetry {:e}", sym.max_asymmetry()))?;

            // With C the consistency face part, A(theta) = V + P - C - theta C^T
            // and V + P symmetric, so A(-1) + A(-1)^T = 2 (A(0) + A(0)^T - A(1)).
            let non = assemble_sip(&mesh, &space, &PenaltyConfig::new(20.0, -1.0, 1.0).unwrap()).unwrap().to_dense();
            let inc = assemble_sip(&mesh, &space, &PenaltyConfig::new(20.0, 0.0, 1.0).unwrap()).unwrap().to_dense();
            let scale = inc.max_abs();
            for i in 0..non.rows() {
                for j in 0..non.cols() {
                    let lhs = non[(i, j)] + non[(j, i)];
                    let rhs = 2.0 * (inc[(i, j)] + inc[(j, i)] - sym.get(i, j));
                    ensure(
                        (lhs - rhs).abs() <= 1e-12 * scale,
                        format!("{name} k={k}: theta=-1 face part not antisymmetric at ({i},{j})"),
                    )?;
                }
            }
        }
    }
    Ok("exact for theta = 1; antisymmetric face part for theta = -1".into())
}

/// `A_h(u - u_h, v_h)` vanishes for random `v_h` after a solve.
pub fn galerkin_orthogonality() -> Check {
    let cfg = PenaltyConfig::default();
    let problem = sinsin();
    let mut worst: f64 = 0.0;
    let mut r = rng(2);
    for (name, mesh) in [("uniform", gen_uniform(16).unwrap()), ("geometric", gen_geometric(0.9, 20).unwrap())] {
        let space = DGSpace::new(&mesh, 2).unwrap();
        let solved = solve_poisson(&mesh, &space, &cfg, &problem).unwrap();
        let a = assemble_sip(&mesh, &space, &cfg).unwrap();
        // A_h(u, v) for every basis function, and A_h(u_h, v) = (A x)_v.
        let au = assemble_ritz_rhs(&mesh, &space, problem.exact(), &cfg, None).unwrap();
        let auh = a.mul_vec(solved.uh.coeffs());
        let g: Vec<f64> = au.iter().zip(&auh).map(|(x, y)| x - y).collect();
        for _ in 0..20 {
            let v = random_vec(&mut r, space.n_dofs());
            let rel = dot(&g, &v).abs() / (norm2(&au) * norm2(&v));
            worst = worst.max(rel);
            ensure(rel < 1e-9, format!("{name}: |A(u - u_h, v)| relative {rel:e}"))?;
        }
    }
    Ok(format!("max relative residual {worst:.1e} over 40 directions"))
}

/// `(f, v_h) - A_h(u, v_h)` vanishes up to quadrature error for every basis function.
pub fn consistency() -> Check {
    let cfg = PenaltyConfig::default();
    let problem = sinsin();
    let mesh = gen_uniform(16).unwrap();
    let space = DGSpace::new(&mesh, 2).unwrap();
    let load = assemble_load(&space, |x| problem.source(x));
    let au = assemble_ritz_rhs(&mesh, &space, problem.exact(), &cfg, None).unwrap();
    let scale = load.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let worst = load.iter().zip(&au).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
    ensure(worst < 1e-9, format!("consistency residual {worst:e}"))?;
    Ok(format!("max relative residual {worst:.1e}"))
}

/// Triangle rules integrate random polynomials of their order exactly.
pub fn quadrature_moments() -> Check {
    let mut r = rng(3);
    let factorial = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
    let mut worst: f64 = 0.0;
    for order in 1..=MAX_VOLUME_ORDER {
        let q = volume_quadrature(order).unwrap();
        let mut terms = Vec::new();
        for a in 0..=order {
            for b in 0..=order - a {
                terms.push((a, b, r.random_range(-1.0..1.0)));
            }
        }
        let exact: f64 =
            terms.iter().map(|&(a, b, c)| c * factorial(a) * factorial(b) / factorial(a + b + 2)).sum();
        let approx: f64 = q
            .iter()
            .map(|([x, y], w)| w * terms.iter().map(|&(a, b, c)| c * x.powi(a as i32) * y.powi(b as i32)).sum::<f64>())
            .sum();
        worst = worst.max((approx - exact).abs());
        ensure((approx - exact).abs() < 1e-13, format!("order {order}: {approx} vs {exact}"))?;
    }
    Ok(format!("max error {worst:.1e} for orders 1..={MAX_VOLUME_ORDER}"))
}

/// `||w||_{L2} <= ||w||_Z` for random discrete `w`, and the reverse constant
/// `max ||w||_Z / ||w||_{L2}` stays bounded under refinement.
pub fn norm_equivalence() -> Check {
    let cfg = PenaltyConfig::default();
    let mut r = rng(4);
    for (name, mesh) in sample_meshes() {
        let space = DGSpace::new(&mesh, 2).unwrap();
        let l2 = assemble_norm_matrix(NormKind::L2, &mesh, &space, &cfg).unwrap();
        let z = assemble_norm_matrix(NormKind::Z, &mesh, &space, &cfg).unwrap();
        for _ in 0..200 {
            let w = random_vec(&mut r, space.n_dofs());
            let (a, b) = (matrix_norm(&l2, &w), matrix_norm(&z, &w));
            ensure(a <= b, format!("{name}: L2 {a} exceeds Z {b}"))?;
        }
    }
    let constants: Vec<f64> = [2, 4, 8]
        .iter()
        .map(|&n| {
            let mesh = gen_uniform(n).unwrap();
            let space = DGSpace::new(&mesh, 1).unwrap();
            let l2 = assemble_norm_matrix(NormKind::L2, &mesh, &space, &cfg).unwrap().to_dense();
            let z = assemble_norm_matrix(NormKind::Z, &mesh, &space, &cfg).unwrap().to_dense();
            gen_sym_eig(&z, &l2).unwrap().max().sqrt()
        })
        .collect();
    ensure(stable_against_first(&constants, 0.2), format!("Z/L2 constants {constants:?} not bounded"))?;
    Ok(format!("ordering exact; Z/L2 constants {constants:.4?}"))
}

/// The Ritz projection reproduces members of the space that are continuous
/// and vanish on the boundary.
pub fn ritz_idempotence() -> Check {
    let cfg = PenaltyConfig::default();
    let problem = Problem::parse("polybubble").unwrap();
    let mut worst: f64 = 0.0;
    for (name, mesh) in [("uniform", gen_uniform(2).unwrap()), ("geometric", gen_geometric(0.9, 4).unwrap())] {
        for k in [4, 5] {
            let space = DGSpace::new(&mesh, k).unwrap();
            let ritz = ritz_project(&mesh, &space, &problem, &cfg).unwrap();
            let pu = DGFunction::project(&space, |x| problem.exact().value(x), 2 * k + 4);
            let d: Vec<f64> = ritz.ru.coeffs().iter().zip(pu.coeffs()).map(|(a, b)| a - b).collect();
            // Orthonormal basis: the coefficient norm is the L2 norm.
            let diff = norm2(&d);
            worst = worst.max(diff);
            ensure(diff < 1e-9, format!("{name} k={k}: ||Ru - u|| = {diff:e}"))?;
        }
    }
    Ok(format!("max L2 difference {worst:.1e}"))
}

/// Reverses the element order and rotates each triangle's vertex list.
pub fn relabelled(mesh: &Mesh) -> Mesh {
    let tris: Vec<[usize; 3]> = mesh.triangles().iter().rev().map(|&[a, b, c]| [b, c, a]).collect();
    Mesh::new(mesh.vertices().to_vec(), tris, None).unwrap()
}

/// `gamma` does not depend on the element and DOF numbering.
pub fn gamma_permutation_invariance() -> Check {
    let cfg = PenaltyConfig::default();
    let mut worst: f64 = 0.0;
    for (name, mesh) in [("uniform", gen_uniform(3).unwrap()), ("geometric", gen_geometric(0.9, 4).unwrap())] {
        let other = relabelled(&mesh);
        let g1 = infsup_gamma(&mesh, &DGSpace::new(&mesh, 1).unwrap(), &cfg).unwrap().gamma;
        let g2 = infsup_gamma(&other, &DGSpace::new(&other, 1).unwrap(), &cfg).unwrap().gamma;
        let rel = (g1 - g2).abs() / g1;
        worst = worst.max(rel);
        ensure(rel < 1e-10, format!("{name}: gamma {g1} vs {g2} after relabelling"))?;
    }
    Ok(format!("max relative change {worst:.1e}"))
}

/// Study rows come in decreasing `max h` and never beat the best approximation.
pub fn study_rows_are_consistent() -> Check {
    let cfg = PenaltyConfig::default();
    for family in [Family::Uniform { n0: 2 }, Family::Geometric { beta: 0.9, levels: 6 }, Family::Nvb { n0: 2 }] {
        let config = StudyConfig { family: family.clone(), levels: 3, k: 1, penalty: cfg.clone(), constants: false };
        let report = run_study(&config, &sinsin()).unwrap();
        ensure(report.failure.is_none(), format!("{}: {:?}", family.name(), report.failure))?;
        for w in report.rows.windows(2) {
            ensure(w[1].max_h < w[0].max_h, format!("{}: max h not decreasing", family.name()))?;
        }
        for row in &report.rows {
            ensure(
                row.report.l2_error >= row.report.best_l2,
                format!("{} level {}: error below best approximation", family.name(), row.level),
            )?;
        }
    }
    Ok("ordering and best-approximation bound hold".into())
}

/// `c0 > 0` and within 20% of its coarsest value over three levels, for
/// `k <= 3` on every family.
pub fn coercivity_stability() -> Check {
    let cfg = PenaltyConfig::default();
    let families = [
        Family::Uniform { n0: 1 },
        Family::Geometric { beta: 0.9, levels: 4 },
        Family::Shishkin { epsilon: 0.01, n0: 2 },
        Family::Nvb { n0: 1 },
    ];
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for family in &families {
        let meshes = family.meshes(3).unwrap();
        for k in 1..=3 {
            let c0: Vec<f64> = meshes
                .iter()
                .filter_map(|m| {
                    let space = DGSpace::new(m, k).unwrap();
                    coercivity_constant(m, &space, &cfg).ok()
                })
                .collect();
            summary.push(format!("{} k={k} {c0:.3?}", family.name()));
            if c0.len() < 2 || c0.iter().any(|&c| c <= 0.0) || !stable_against_first(&c0, 0.2) {
                failures.push(format!("{} k={k}: c0 = {c0:.4?}", family.name()));
            }
        }
    }
    if failures.is_empty() {
        Ok(summary.join("; "))
    } else {
        Err(failures.join("; "))
    }
}

/// The exact unbalanced continuity constant is within 20% of its coarsest
/// value over three levels, and random pairs never exceed it.
pub fn continuity_stability() -> Check {
    let cfg = PenaltyConfig::default();
    let mut summary = Vec::new();
    for family in [Family::Uniform { n0: 1 }, Family::Geometric { beta: 0.9, levels: 4 }, Family::Nvb { n0: 1 }] {
        let mut exact = Vec::new();
        for mesh in family.meshes(3).unwrap() {
            let space = DGSpace::new(&mesh, 1).unwrap();
            let c = continuity_constant(&mesh, &space, &cfg, 1000, 0).unwrap();
            let e = c.exact.unwrap();
            ensure(c.sampled_max <= e * (1.0 + 1e-12), format!("{}: sample {} above {e}", family.name(), c.sampled_max))?;
            exact.push(e);
        }
        ensure(stable_against_first(&exact, 0.2), format!("{}: continuity constants {exact:?}", family.name()))?;
        summary.push(format!("{} {exact:.3?}", family.name()));
    }
    Ok(summary.join("; "))
}
