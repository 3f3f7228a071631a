use std::fmt::Write as _;

use serde::Serialize;

use super::solve::{solve_poisson, ErrorReport};
use super::stability::{coercivity_constant, infsup_gamma};
use super::Problem;
use crate::forms::{NormKind, PenaltyConfig};
use crate::linalg::DENSE_CAP;
use crate::mesh::{gen_geometric, gen_shishkin, gen_uniform, refine_nvb, refine_red, Mesh};
use crate::space::DGSpace;
use crate::{Error, Result};

/// A sequence of meshes indexed by refinement level.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    /// `n0 2^l` subdivisions per side.
    Uniform { n0: usize },
    /// The geometric mesh with `levels` grading steps, red-refined `l` times.
    Geometric { beta: f64, levels: usize },
    /// Shishkin mesh with `n0 2^l` cells per band.
    Shishkin { epsilon: f64, n0: usize },
    /// Uniform `n0` mesh; every level applies two rounds of global newest
    /// vertex bisection and then one extra bisection of the elements touching
    /// the origin, so the corner becomes progressively graded.
    Nvb { n0: usize },
}

impl Family {
    pub fn validate(&self) -> Result<()> {
        // Building the coarsest mesh runs every parameter check.
        self.first().map(|_| ())
    }

    fn first(&self) -> Result<Mesh> {
        match *self {
            Family::Uniform { n0 } | Family::Nvb { n0 } => gen_uniform(n0),
            Family::Geometric { beta, levels } => gen_geometric(beta, levels),
            Family::Shishkin { epsilon, n0 } => gen_shishkin(epsilon, n0),
        }
    }

    fn next(&self, level: usize, prev: &Mesh) -> Result<Mesh> {
        match *self {
            Family::Uniform { n0 } => gen_uniform(n0 << level),
            Family::Shishkin { epsilon, n0 } => gen_shishkin(epsilon, n0 << level),
            Family::Geometric { .. } => refine_red(prev),
            Family::Nvb { .. } => {
                let all: Vec<usize> = (0..prev.n_elems()).collect();
                let once = refine_nvb(prev, &all)?;
                let all: Vec<usize> = (0..once.n_elems()).collect();
                let twice = refine_nvb(&once, &all)?;
                let corner: Vec<usize> = (0..twice.n_elems())
                    .filter(|&t| twice.corners(t).iter().any(|p| p[0] == 0.0 && p[1] == 0.0))
                    .collect();
                refine_nvb(&twice, &corner)
            }
        }
    }

    /// Meshes for levels `0..count`.
    pub fn meshes(&self, count: usize) -> Result<Vec<Mesh>> {
        let mut out = vec![self.first()?];
        for level in 1..count {
            let m = self.next(level, &out[level - 1])?;
            out.push(m);
        }
        Ok(out)
    }

    /// Whether the family is locally refined, where DOF-based rates are the
    /// meaningful ones.
    pub fn is_graded(&self) -> bool {
        !matches!(self, Family::Uniform { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Uniform { .. } => "uniform",
            Family::Geometric { .. } => "geometric",
            Family::Shishkin { .. } => "shishkin",
            Family::Nvb { .. } => "nvb",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StudyConfig {
    pub family: Family,
    pub levels: usize,
    pub k: usize,
    pub penalty: PenaltyConfig,
    /// Also compute the inf-sup and coercivity constants (dense, capped DOFs).
    pub constants: bool,
}

pub const MIN_STUDY_LEVELS: usize = 3;

#[derive(Clone, Debug, Serialize)]
pub struct StudyRow {
    pub level: usize,
    pub max_h: f64,
    pub min_h: f64,
    pub report: ErrorReport,
    pub gamma: Option<f64>,
    pub c0: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
}

impl StudyRow {
    pub fn error(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::L2 => self.report.l2_error,
            NormKind::Z => self.report.z_error,
            NormKind::Energy => self.report.energy_error,
            NormKind::H2h => self.report.h2h_error,
        }
    }

    /// `||u - u_h|| / (sum_K h_K^{2(k+1)} |u|^2_{k+1,K})^{1/2}`.
    pub fn ratio(&self) -> f64 {
        self.report.l2_error / self.report.local_bound
    }

    /// `||u - u_h|| / (||u - P_k u|| + ||h^2 (f - P_k f)||)`.
    pub fn oscillation_ratio(&self) -> f64 {
        self.report.l2_error / (self.report.best_l2 + self.report.data_osc)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StudyReport {
    pub config: StudyConfig,
    pub problem: String,
    pub rows: Vec<StudyRow>,
    /// Skipped columns and similar remarks.
    pub notices: Vec<String>,
    /// Set when a level failed; `rows` then holds the levels before it.
    pub failure: Option<String>,
}

fn rate(e0: f64, e1: f64, h0: f64, h1: f64) -> Option<f64> {
    let r = (e0 / e1).ln() / (h0 / h1).ln();
    r.is_finite().then_some(r)
}

impl StudyReport {
    /// `log(e_i / e_{i+1}) / log(h_i / h_{i+1})` against the largest element
    /// diameter; the first entry is `None`.
    pub fn eoc(&self, kind: NormKind) -> Vec<Option<f64>> {
        self.rates(kind, |r| r.max_h)
    }

    /// Rates against `dofs^{-1/2}`.
    pub fn eoc_dofs(&self, kind: NormKind) -> Vec<Option<f64>> {
        self.rates(kind, |r| (r.report.dofs as f64).powf(-0.5))
    }

    fn rates(&self, kind: NormKind, size: impl Fn(&StudyRow) -> f64) -> Vec<Option<f64>> {
        std::iter::once(None)
            .chain(self.rows.windows(2).map(|w| rate(w[0].error(kind), w[1].error(kind), size(&w[0]), size(&w[1]))))
            .collect()
    }

    /// Last computed rate.
    pub fn final_eoc(&self, kind: NormKind) -> Option<f64> {
        self.eoc(kind).last().copied().flatten()
    }

    /// Largest `||u - u_h|| / (best + oscillation)` over the levels.
    pub fn oscillation_constant(&self) -> f64 {
        self.rows.iter().map(StudyRow::oscillation_ratio).fold(0.0, f64::max)
    }
}

/// Solves the problem on every level of the family and collects the
/// diagnostics. A numerical failure stops the study and is recorded in
/// [`StudyReport::failure`]; invalid parameters are returned as errors.
pub fn run_study(config: &StudyConfig, problem: &Problem) -> Result<StudyReport> {
    if config.levels < MIN_STUDY_LEVELS {
        return Err(Error::param("levels", format!("a study needs at least {MIN_STUDY_LEVELS} levels")));
    }
    config.penalty.validate()?;
    config.family.validate()?;
    let mut report = StudyReport {
        config: config.clone(),
        problem: problem.name().to_string(),
        rows: Vec::new(),
        notices: Vec::new(),
        failure: None,
    };
    let meshes = match config.family.meshes(config.levels) {
        Ok(m) => m,
        Err(e) if e.is_validation() => return Err(e),
        Err(e) => {
            report.failure = Some(e.to_string());
            return Ok(report);
        }
    };
    for (level, mesh) in meshes.iter().enumerate() {
        match study_level(config, problem, level, mesh, &mut report.notices) {
            Ok(row) => report.rows.push(row),
            Err(e) if e.is_validation() => return Err(e),
            Err(e) => {
                report.failure = Some(format!("level {level}: {e}"));
                break;
            }
        }
    }
    Ok(report)
}

fn study_level(
    config: &StudyConfig,
    problem: &Problem,
    level: usize,
    mesh: &Mesh,
    notices: &mut Vec<String>,
) -> Result<StudyRow> {
    let space = DGSpace::new(mesh, config.k)?;
    let solved = solve_poisson(mesh, &space, &config.penalty, problem)?;
    if solved.stats.indefinite {
        notices.push(format!("level {level}: the matrix is indefinite; solved with {}", solved.stats.method));
    }
    let (mut gamma, mut c0) = (None, None);
    if config.constants {
        if space.n_dofs() > DENSE_CAP {
            notices.push(format!(
                "level {level}: {} DOFs exceed the dense cap {DENSE_CAP}; gamma and c0 skipped",
                space.n_dofs()
            ));
        } else {
            if config.penalty.theta == 1.0 {
                gamma = Some(infsup_gamma(mesh, &space, &config.penalty)?.gamma);
            } else if level == 0 {
                notices.push("gamma needs theta = 1; skipped".to_string());
            }
            c0 = Some(coercivity_constant(mesh, &space, &config.penalty)?);
        }
    }
    Ok(StudyRow {
        level,
        max_h: mesh.max_h(),
        min_h: mesh.min_h(),
        report: solved.report,
        gamma,
        c0,
        iterations: solved.stats.iterations,
        residual: solved.stats.residual,
    })
}

/// Shortest representation that parses back to the same value.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub const CSV_COLUMNS: [&str; 25] = [
    "level",
    "max_h",
    "min_h",
    "alpha",
    "mu",
    "cqu",
    "dofs",
    "l2_error",
    "z_error",
    "energy_error",
    "h2h_error",
    "local_h4",
    "local_bound",
    "best_l2",
    "data_osc",
    "ratio",
    "osc_ratio",
    "gamma",
    "c0",
    "eoc_l2",
    "eoc_z",
    "eoc_energy",
    "eoc_h2h",
    "eoc_dofs_l2",
    "eoc_dofs_energy",
];

impl StudyReport {
    /// CSV with a leading `# ` comment line, a header and one row per level.
    pub fn to_csv(&self, comment: &str) -> String {
        let mut out = String::new();
        for line in comment.lines() {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "{}", CSV_COLUMNS.join(","));
        let eocs: Vec<Vec<Option<f64>>> = vec![
            self.eoc(NormKind::L2),
            self.eoc(NormKind::Z),
            self.eoc(NormKind::Energy),
            self.eoc(NormKind::H2h),
            self.eoc_dofs(NormKind::L2),
            self.eoc_dofs(NormKind::Energy),
        ];
        for (i, r) in self.rows.iter().enumerate() {
            let g = &r.report.grading;
            let mut cells = vec![
                r.level.to_string(),
                num(r.max_h),
                num(r.min_h),
                num(g.alpha),
                num(g.mu),
                num(g.cqu),
                r.report.dofs.to_string(),
                num(r.report.l2_error),
                num(r.report.z_error),
                num(r.report.energy_error),
                num(r.report.h2h_error),
                num(r.report.local_h4_seminorm),
                num(r.report.local_bound),
                num(r.report.best_l2),
                num(r.report.data_osc),
                num(r.ratio()),
                num(r.oscillation_ratio()),
                opt(r.gamma),
                opt(r.c0),
            ];
            cells.extend(eocs.iter().map(|e| opt(e[i])));
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Log-log plot of the four error norms against `max h` with reference
    /// slopes `k` and `k + 1`.
    pub fn to_svg(&self) -> String {
        let (w, h, pad) = (640.0, 480.0, 60.0);
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        );
        let series: Vec<(NormKind, &str)> = vec![
            (NormKind::L2, "#1f77b4"),
            (NormKind::Energy, "#d62728"),
            (NormKind::Z, "#2ca02c"),
            (NormKind::H2h, "#9467bd"),
        ];
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .flat_map(|r| series.iter().map(move |(k, _)| (r.max_h, r.error(*k))))
            .filter(|(x, y)| *x > 0.0 && *y > 0.0)
            .map(|(x, y)| (x.log10(), y.log10()))
            .collect();
        if pts.is_empty() {
            svg.push_str("</svg>\n");
            return svg;
        }
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in &pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let (x0, x1) = (x0 - 0.1, x1 + 0.1);
        let (y0, y1) = (y0 - 0.3, y1 + 0.3);
        let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
        let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
        let _ = writeln!(
            svg,
            "<rect x=\"{pad}\" y=\"{pad}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            w - 2.0 * pad,
            h - 2.0 * pad
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">max h (log)</text>",
            w / 2.0,
            h - 15.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"15\" y=\"{}\" font-size=\"14\" transform=\"rotate(-90 15 {})\">error (log)</text>",
            h / 2.0,
            h / 2.0
        );
        for e in (x0.ceil() as i32)..=(x1.floor() as i32) {
            let _ = writeln!(
                svg,
                "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">1e{e}</text>",
                sx(e as f64),
                h - pad + 16.0
            );
        }
        for e in (y0.ceil() as i32)..=(y1.floor() as i32) {
            let _ = writeln!(
                svg,
                "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"11\">1e{e}</text>",
                pad - 4.0,
                sy(e as f64) + 4.0
            );
        }
        for (i, (kind, color)) in series.iter().enumerate() {
            let line: Vec<String> = self
                .rows
                .iter()
                .filter(|r| r.error(*kind) > 0.0)
                .map(|r| format!("{:.2},{:.2}", sx(r.max_h.log10()), sy(r.error(*kind).log10())))
                .collect();
            let _ = writeln!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>",
                line.join(" ")
            );
            for p in &line {
                let (px, py) = p.split_once(',').unwrap();
                let _ = writeln!(svg, "<circle cx=\"{px}\" cy=\"{py}\" r=\"3\" fill=\"{color}\"/>");
            }
            let _ = writeln!(
                svg,
                "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{kind}</text>",
                pad + 10.0,
                pad + 18.0 + 16.0 * i as f64
            );
        }
        // Reference slope triangles anchored at the finest L2 point.
        if let Some(last) = self.rows.last() {
            let k = self.config.k as f64;
            let (bx, by) = (last.max_h.log10(), last.error(NormKind::L2).log10() - 0.2);
            for (j, slope) in [k + 1.0, k].into_iter().enumerate() {
                let run = 0.3;
                let by = by - 0.5 * j as f64;
                let (ax, ay) = (bx + run, by + slope * run);
                let _ = writeln!(
                    svg,
                    "<polygon points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" fill=\"none\" stroke=\"gray\" stroke-dasharray=\"4 2\"/>",
                    sx(bx), sy(by), sx(ax), sy(by), sx(ax), sy(ay)
                );
                let _ = writeln!(
                    svg,
                    "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"gray\">{slope}</text>",
                    sx(ax) + 4.0,
                    sy(0.5 * (ay + by))
                );
            }
        }
        svg.push_str("</svg>\n");
        svg
    }
}
