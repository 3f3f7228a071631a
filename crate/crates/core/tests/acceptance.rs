//! Acceptance criteria 1 to 9. Each criterion prints one PASS/FAIL line; the
//! test fails if any criterion fails.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use common::{ensure, rng, random_vec, sinsin, stable_against_first, Check};
use ipdg::analysis::{
    coercivity_constant, data_oscillation, infsup_gamma, ritz_project, run_study, Family, Problem, StudyConfig,
    StudyReport,
};
use ipdg::forms::{assemble_norm_matrix, assemble_sip, NormKind, PenaltyConfig};
use ipdg::linalg::DenseMatrix;
use ipdg::mesh::{face_grading_ratios, gen_geometric, gen_uniform, geometric_face_bounds, grading_report};
use ipdg::space::DGSpace;
use rand::Rng;

fn study(family: Family, levels: usize, k: usize, penalty: PenaltyConfig) -> StudyReport {
    let config = StudyConfig { family, levels, k, penalty, constants: false };
    let report = run_study(&config, &sinsin()).unwrap();
    assert!(report.failure.is_none(), "{:?}", report.failure);
    report
}

fn cfg(csigma: f64, theta: f64) -> PenaltyConfig {
    PenaltyConfig::new(csigma, theta, 1.0).unwrap()
}

fn final_eoc(r: &StudyReport, kind: NormKind) -> f64 {
    r.final_eoc(kind).unwrap()
}

fn grading_reproduction() -> Check {
    let mesh = gen_geometric(0.9, 20).unwrap();
    let alpha = grading_report(&mesh).alpha;
    let bounds = geometric_face_bounds(&mesh, 0.9);
    let ratios = face_grading_ratios(&mesh);
    let violations: Vec<(usize, f64, f64)> = ratios
        .iter()
        .filter_map(|&(f, r)| {
            let b = bounds[f].unwrap();
            (r > b).then_some((f, r, b))
        })
        .collect();
    let (worst_r, worst_b) = violations
        .iter()
        .max_by(|a, b| (a.1 / a.2).total_cmp(&(b.1 / b.2)))
        .map_or((0.0, 0.0), |v| (v.1, v.2));
    let msg = format!(
        "alpha {alpha:.4} (<= 0.42 required); {} of {} interior faces exceed the analytic bound (worst {worst_r:.3} > {worst_b:.3})",
        violations.len(),
        ratios.len()
    );
    ensure(alpha <= 0.42 && violations.is_empty(), msg.clone())?;
    Ok(msg)
}

fn optimal_rates() -> Check {
    let k1 = study(Family::Uniform { n0: 4 }, 4, 1, PenaltyConfig::default());
    let k2 = study(Family::Uniform { n0: 4 }, 4, 2, PenaltyConfig::default());
    let (l2, en, l2k2) = (final_eoc(&k1, NormKind::L2), final_eoc(&k1, NormKind::Energy), final_eoc(&k2, NormKind::L2));
    let msg = format!("k=1 L2 EOC {l2:.3}, energy EOC {en:.3}; k=2 L2 EOC {l2k2:.3}");
    ensure(
        (1.85..=2.15).contains(&l2) && (0.85..=1.15).contains(&en) && (2.8..=3.2).contains(&l2k2),
        msg.clone(),
    )?;
    Ok(msg)
}

fn graded_local_bound() -> Check {
    let r = study(Family::Geometric { beta: 0.9, levels: 20 }, 3, 1, PenaltyConfig::default());
    let ratios: Vec<f64> = r.rows.iter().map(|row| row.report.l2_error / row.report.local_h4_seminorm).collect();
    let msg = format!("ratios {ratios:.5?}");
    ensure(ratios.windows(2).all(|w| w[1] <= 1.1 * w[0]), format!("{msg} grow by more than 10%"))?;
    Ok(msg)
}

/// `min_w sup_v A(w, v) / (|v|_H |w|_Z)` by random search over `w`. The
/// supremum over `v` is the dual norm `((A w)^T H^{-1} (A w))^{1/2}`, solved
/// densely; the minimum starts from the best of 1000 random directions and
/// refines it with random perturbations.
fn brute_force_gamma(a: &DenseMatrix, h: &DenseMatrix, z: &DenseMatrix, samples: usize) -> (f64, f64) {
    let quotient = |w: &[f64]| {
        let aw = a.mul_vec(w);
        let y = h.lu_solve(&aw).unwrap();
        let dual: f64 = aw.iter().zip(&y).map(|(p, q)| p * q).sum();
        (dual / z.form(w, w)).sqrt()
    };
    let n = a.rows();
    let mut r = rng(7);
    let mut lowest = f64::INFINITY;
    let mut best = Vec::new();
    let mut best_q = f64::INFINITY;
    for _ in 0..1000 {
        let w = random_vec(&mut r, n);
        let q = quotient(&w);
        lowest = lowest.min(q);
        if q < best_q {
            best_q = q;
            best = w;
        }
    }
    let mut step = 0.5;
    for _ in 1000..samples {
        let d = random_vec(&mut r, n);
        let scale = step * best.iter().map(|v| v * v).sum::<f64>().sqrt() / d.iter().map(|v| v * v).sum::<f64>().sqrt();
        let w: Vec<f64> = best.iter().zip(&d).map(|(b, d)| b + scale * d).collect();
        let q = quotient(&w);
        lowest = lowest.min(q);
        if q < best_q {
            best_q = q;
            best = w;
            step *= 1.5;
        } else {
            step = (step * 0.97).max(1e-8);
        }
        // Occasional fresh directions keep the search honest.
        if r.random_range(0.0..1.0) < 0.001 {
            step = 0.5;
        }
    }
    (best_q, lowest)
}

fn infsup_stability() -> Check {
    let c = PenaltyConfig::default();
    let gammas = |meshes: Vec<ipdg::mesh::Mesh>| -> Vec<f64> {
        meshes.iter().map(|m| infsup_gamma(m, &DGSpace::new(m, 1).unwrap(), &c).unwrap().gamma).collect()
    };
    let uni = gammas([2, 4, 8].iter().map(|&n| gen_uniform(n).unwrap()).collect());
    let geo = gammas([4, 6, 8].iter().map(|&n| gen_geometric(0.9, n).unwrap()).collect());
    let bounded = |g: &[f64]| g.iter().all(|&x| x > 0.0 && x >= 0.8 * g[0]);

    let mesh = gen_uniform(1).unwrap();
    let space = DGSpace::new(&mesh, 1).unwrap();
    let g6 = infsup_gamma(&mesh, &space, &c).unwrap().gamma;
    let a = assemble_sip(&mesh, &space, &c).unwrap().to_dense();
    let h = assemble_norm_matrix(NormKind::H2h, &mesh, &space, &c).unwrap().to_dense();
    let z = assemble_norm_matrix(NormKind::Z, &mesh, &space, &c).unwrap().to_dense();
    let (bf, lowest) = brute_force_gamma(&a, &h, &z, 100_000);
    let rel = (bf - g6).abs() / g6;

    let msg = format!(
        "uniform gamma {uni:.4?}; geometric gamma {geo:.4?}; 6-DOF gamma {g6:.5} vs brute force {bf:.5} ({:.2}%)",
        100.0 * rel
    );
    ensure(bounded(&uni) && bounded(&geo), format!("{msg}: not bounded below"))?;
    ensure(rel <= 0.02, format!("{msg}: brute force disagrees"))?;
    ensure(lowest >= g6 * (1.0 - 1e-12), format!("{msg}: a sample {lowest} lies below gamma"))?;
    Ok(msg)
}

fn ritz_stability() -> Check {
    let c = PenaltyConfig::default();
    let mesh = gen_geometric(0.9, 8).unwrap();
    let space = DGSpace::new(&mesh, 1).unwrap();
    let gamma = infsup_gamma(&mesh, &space, &c).unwrap().gamma;
    let ritz = ritz_project(&mesh, &space, &sinsin(), &c).unwrap();
    let stab = ritz.ru_z / ritz.u_z;
    let qo = ritz.error_z / ritz.best_z;
    let msg = format!(
        "gamma {gamma:.4}; |Ru|_Z/|u|_Z = {stab:.4} (bound {:.2}); |u-Ru|_Z/|u-Pu|_Z = {qo:.4} (bound {:.2})",
        1.0 / gamma,
        1.05 * (1.0 + 1.0 / gamma)
    );
    ensure(stab <= 1.0 / gamma && qo <= 1.05 * (1.0 + 1.0 / gamma), msg.clone())?;
    Ok(msg)
}

fn coercivity_threshold() -> Check {
    let mesh = gen_uniform(2).unwrap();
    let space = DGSpace::new(&mesh, 1).unwrap();
    let good = coercivity_constant(&mesh, &space, &cfg(20.0, 1.0)).unwrap();
    let bad = coercivity_constant(&mesh, &space, &cfg(0.01, 1.0)).unwrap();
    let weak = study(Family::Uniform { n0: 4 }, 3, 1, cfg(0.5, 1.0));
    let eoc = final_eoc(&weak, NormKind::L2);
    let msg = format!("c0 {good:.4} at C_sigma=20, {bad:.4} at C_sigma=0.01; L2 EOC {eoc:.3} at C_sigma=0.5 (< 1.7 required)");
    ensure(good > 0.0 && bad < 0.0 && eoc < 1.7, msg.clone())?;
    Ok(msg)
}

fn nonsymmetric_rate() -> Check {
    let non = study(Family::Uniform { n0: 4 }, 3, 2, cfg(20.0, -1.0));
    let sym = study(Family::Uniform { n0: 4 }, 4, 2, PenaltyConfig::default());
    let (a, b) = (final_eoc(&non, NormKind::L2), final_eoc(&sym, NormKind::L2));
    let msg = format!("theta=-1 L2 EOC {a:.3} (<= 2.4 required), theta=1 L2 EOC {b:.3}");
    ensure(a <= 2.4 && a < b, msg.clone())?;
    Ok(msg)
}

fn oscillation_bound() -> Check {
    let r = study(Family::Uniform { n0: 4 }, 3, 1, PenaltyConfig::default());
    let constants: Vec<f64> = r.rows.iter().map(|row| row.oscillation_ratio()).collect();

    let poly = Problem::parse("polybubble").unwrap();
    let mesh = gen_uniform(4).unwrap();
    let osc = data_oscillation(|x| poly.source(x), &mesh, &DGSpace::new(&mesh, 2).unwrap());
    let msg = format!("C per level {constants:.4?} (within 50% of the first required); polynomial data oscillation {osc:.1e}");
    ensure(osc < 1e-12, msg.clone())?;
    ensure(stable_against_first(&constants, 0.5), msg.clone())?;
    Ok(msg)
}

fn invariant_suites() -> Check {
    let checks: [(&str, fn() -> Check); 11] = [
        ("norm matrices", common::norm_matrices_match_quadrature),
        ("symmetry", common::symmetry),
        ("Galerkin orthogonality", common::galerkin_orthogonality),
        ("consistency", common::consistency),
        ("quadrature moments", common::quadrature_moments),
        ("norm equivalence", common::norm_equivalence),
        ("Ritz idempotence", common::ritz_idempotence),
        ("gamma relabelling", common::gamma_permutation_invariance),
        ("study rows", common::study_rows_are_consistent),
        ("coercivity stability", common::coercivity_stability),
        ("continuity stability", common::continuity_stability),
    ];
    let mut failed = Vec::new();
    for (name, check) in checks {
        if let Err(e) = check() {
            failed.push(format!("{name}: {e}"));
        }
    }
    ensure(failed.is_empty(), failed.join(" | "))?;
    Ok(format!("{} suites pass", checks.len()))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, Duration, fn() -> Check); 9] = [
        ("grading reproduction", Duration::from_secs(1), grading_reproduction),
        ("optimal L2 rates", Duration::from_secs(120), optimal_rates),
        ("graded-mesh local bound", Duration::from_secs(120), graded_local_bound),
        ("inf-sup positivity and stability", Duration::from_secs(180), infsup_stability),
        ("Ritz stability and quasi-optimality", Duration::from_secs(60), ritz_stability),
        ("coercivity threshold", Duration::from_secs(60), coercivity_threshold),
        ("nonsymmetric suboptimality", Duration::from_secs(120), nonsymmetric_rate),
        ("oscillation bound structure", Duration::from_secs(60), oscillation_bound),
        ("invariant suites", Duration::from_secs(120), invariant_suites),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|m| {
            if elapsed <= limit {
                Ok(m)
            } else {
                Err(format!("{m}; runtime {elapsed:.1?} exceeds {limit:?}"))
            }
        });
        let (tag, detail) = match &outcome {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        // Written past the test harness capture so the lines always show.
        let _ = writeln!(err, "criterion {}: {tag} {name} ({elapsed:.1?}): {detail}", i + 1);
        if outcome.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
