use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ipdg::analysis::{
    coercivity_constant, continuity_constant, infsup_gamma, ritz_project, run_study, solve_poisson, ErrorReport,
    Family, Problem, SolveStats, StudyConfig, MIN_CONTINUITY_SAMPLES,
};
use ipdg::forms::{assemble_sip, PenaltyConfig};
use ipdg::linalg::DENSE_CAP;
use ipdg::mesh::{alpha_threshold, geometric_face_bounds, grading_report, face_grading_ratios, GradingReport, Mesh};
use ipdg::space::{estimate_trace_inverse_constant, DGSpace};

/// Bad flag combinations that clap cannot express.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Usage(String);

#[derive(Parser, Debug)]
#[command(name = "ipdg", version, about = "Interior penalty dG laboratory for the Poisson problem on the unit square")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a mesh, write it as JSON and print its grading report.
    Mesh(MeshCmd),
    /// Print grading diagnostics of a mesh.
    Grading(GradingCmd),
    /// Solve the Poisson problem and report the errors.
    Solve(SolveCmd),
    /// Ritz projection of the exact solution and its stability ratios.
    Ritz(RitzCmd),
    /// Inf-sup, coercivity and continuity constants (dense).
    Infsup(InfsupCmd),
    /// Convergence study over a mesh family.
    Study(StudyCmd),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum FamilyArg {
    Uniform,
    Geometric,
    Shishkin,
    Nvb,
}

#[derive(Args, Debug)]
struct MeshSource {
    /// Mesh JSON file.
    #[arg(long, conflicts_with = "family")]
    mesh: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Subdivisions per side (uniform, nvb) or cells per band (shishkin).
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Geometric ratio.
    #[arg(long, default_value_t = 0.9)]
    beta: f64,
    /// Number of geometric grading steps.
    #[arg(long, default_value_t = 20)]
    levels: usize,
    /// Shishkin layer width parameter.
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Refinement levels applied to the generated mesh, as in a study.
    #[arg(long, default_value_t = 0)]
    refine: usize,
}

impl MeshSource {
    fn family(&self) -> Option<Family> {
        Some(family_of(self.family?, self.n, self.beta, self.levels, self.epsilon))
    }

    fn load(&self) -> Result<Mesh> {
        if let Some(path) = &self.mesh {
            if self.refine > 0 {
                return Err(Usage("--refine applies to generated meshes only".into()).into());
            }
            // An unreadable input file is a bad flag, not a numerical failure.
            return Mesh::read_json(path).map_err(|e| match e {
                ipdg::Error::Io(io) => Usage(format!("cannot read {}: {io}", path.display())).into(),
                e => anyhow::Error::new(e).context(format!("reading {}", path.display())),
            });
        }
        let family = self.family().ok_or_else(|| Usage("give either --mesh <file> or --family".into()))?;
        Ok(family.meshes(self.refine + 1)?.pop().expect("at least one level"))
    }

    fn describe(&self) -> String {
        match (&self.mesh, self.family) {
            (Some(p), _) => format!("--mesh {}", p.display()),
            (None, Some(f)) => {
                let mut s = format!("--family {}", f.to_possible_value().unwrap().get_name());
                match f {
                    FamilyArg::Uniform | FamilyArg::Nvb => s += &format!(" --n {}", self.n),
                    FamilyArg::Geometric => s += &format!(" --beta {} --levels {}", self.beta, self.levels),
                    FamilyArg::Shishkin => s += &format!(" --epsilon {} --n {}", self.epsilon, self.n),
                }
                if self.refine > 0 {
                    s += &format!(" --refine {}", self.refine);
                }
                s
            }
            (None, None) => String::new(),
        }
    }
}

fn family_of(f: FamilyArg, n: usize, beta: f64, levels: usize, epsilon: f64) -> Family {
    match f {
        FamilyArg::Uniform => Family::Uniform { n0: n },
        FamilyArg::Geometric => Family::Geometric { beta, levels },
        FamilyArg::Shishkin => Family::Shishkin { epsilon, n0: n },
        FamilyArg::Nvb => Family::Nvb { n0: n },
    }
}

#[derive(Args, Debug)]
struct Discretisation {
    /// Polynomial degree.
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 20.0)]
    csigma: f64,
    /// 1 for the symmetric form, -1 for the nonsymmetric one.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    theta: f64,
    #[arg(long, default_value_t = 1.0)]
    penalty_exponent: f64,
}

impl Discretisation {
    fn penalty(&self) -> Result<PenaltyConfig> {
        Ok(PenaltyConfig::new(self.csigma, self.theta, self.penalty_exponent)?)
    }

    fn describe(&self) -> String {
        format!(
            "--k {} --csigma {} --theta {} --penalty-exponent {}",
            self.k, self.csigma, self.theta, self.penalty_exponent
        )
    }
}

#[derive(Args, Debug)]
struct MeshCmd {
    #[command(flatten)]
    source: MeshSource,
    /// Output JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GradingCmd {
    #[command(flatten)]
    source: MeshSource,
    /// Degree and penalty used for the admissible-alpha diagnostic.
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 20.0)]
    csigma: f64,
    /// Approximation-regularity constant; enables the admissible-alpha line.
    #[arg(long)]
    ctilde: Option<f64>,
}

#[derive(Args, Debug)]
struct SolveCmd {
    #[command(flatten)]
    source: MeshSource,
    #[command(flatten)]
    disc: Discretisation,
    /// sinsin, polybubble or layer:<eps>.
    #[arg(long, default_value = "sinsin")]
    problem: String,
    /// Write the error report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the system matrix in MatrixMarket format.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RitzCmd {
    #[command(flatten)]
    source: MeshSource,
    #[command(flatten)]
    disc: Discretisation,
    #[arg(long, default_value = "sinsin")]
    problem: String,
}

#[derive(Args, Debug)]
struct InfsupCmd {
    #[command(flatten)]
    source: MeshSource,
    #[command(flatten)]
    disc: Discretisation,
    /// Random pairs for the sampled continuity constant.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct StudyCmd {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Coarsest subdivisions per side (uniform, nvb) or cells per band (shishkin).
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 0.9)]
    beta: f64,
    /// Number of geometric grading steps.
    #[arg(long, default_value_t = 20)]
    geo_levels: usize,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Number of study levels.
    #[arg(long, default_value_t = 4)]
    levels: usize,
    #[command(flatten)]
    disc: Discretisation,
    #[arg(long, default_value = "sinsin")]
    problem: String,
    /// Also compute gamma and c0 on levels within the dense cap.
    #[arg(long)]
    constants: bool,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG rate plot path.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// JSON report path.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn print_grading(g: &GradingReport, mesh: &Mesh) {
    println!("elements: {}", g.elem_count);
    println!("faces: {}", g.face_count);
    println!("max_h: {:?}", mesh.max_h());
    println!("min_h: {:?}", mesh.min_h());
    println!("alpha: {:?}", g.alpha);
    println!("mu: {:?}", g.mu);
    println!("cqu: {:?}", g.cqu);
}

fn print_report(r: &ErrorReport) {
    println!("dofs: {}", r.dofs);
    println!("l2_error: {:?}", r.l2_error);
    println!("z_error: {:?}", r.z_error);
    println!("energy_error: {:?}", r.energy_error);
    println!("h2h_error: {:?}", r.h2h_error);
    println!("local_h4_seminorm: {:?}", r.local_h4_seminorm);
    println!("local_bound: {:?}", r.local_bound);
    println!("best_l2: {:?}", r.best_l2);
    println!("data_osc: {:?}", r.data_osc);
    println!("alpha: {:?}", r.grading.alpha);
    println!("mu: {:?}", r.grading.mu);
    println!("cqu: {:?}", r.grading.cqu);
}

fn print_stats(s: &SolveStats) {
    println!("solver: {}", s.method);
    println!("iterations: {}", s.iterations);
    println!("residual: {:?}", s.residual);
    if s.indefinite {
        println!("note: the matrix is indefinite (penalty below the coercivity threshold)");
    }
}

fn cmd_mesh(c: &MeshCmd) -> Result<()> {
    let mesh = c.source.load()?;
    if let Some(out) = &c.out {
        mesh.write_json(out).with_context(|| format!("writing {}", out.display()))?;
        println!("wrote {}", out.display());
    }
    print_grading(&grading_report(&mesh), &mesh);
    Ok(())
}

fn cmd_grading(c: &GradingCmd) -> Result<()> {
    let mesh = c.source.load()?;
    let g = grading_report(&mesh);
    print_grading(&g, &mesh);
    if c.source.family == Some(FamilyArg::Geometric) && c.source.refine == 0 {
        let bounds = geometric_face_bounds(&mesh, c.source.beta);
        let ratios = face_grading_ratios(&mesh);
        let held = ratios.iter().filter(|&&(f, r)| bounds[f].is_some_and(|b| r <= b + 1e-12)).count();
        println!("faces within the analytic bound: {held} of {}", ratios.len());
    }
    if let Some(ctilde) = c.ctilde {
        let cinv = estimate_trace_inverse_constant(c.k)?;
        let threshold = alpha_threshold(c.k, c.csigma, cinv, g.cqu, ctilde)?;
        println!("cinv: {cinv:?}");
        println!("alpha_threshold: {threshold:?}");
    }
    Ok(())
}

fn cmd_solve(c: &SolveCmd) -> Result<()> {
    let cfg = c.disc.penalty()?;
    let problem = Problem::parse(&c.problem)?;
    let mesh = c.source.load()?;
    let space = DGSpace::new(&mesh, c.disc.k)?;
    let solved = solve_poisson(&mesh, &space, &cfg, &problem)?;
    println!("problem: {}", problem.name());
    print_stats(&solved.stats);
    print_report(&solved.report);
    if let Some(path) = &c.json {
        std::fs::write(path, serde_json::to_string_pretty(&solved.report)?)
            .with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &c.matrix {
        let a = assemble_sip(&mesh, &space, &cfg)?;
        let file = File::create(path).with_context(|| format!("writing {}", path.display()))?;
        a.write_matrix_market(BufWriter::new(file))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_ritz(c: &RitzCmd) -> Result<()> {
    let cfg = c.disc.penalty()?;
    let problem = Problem::parse(&c.problem)?;
    let mesh = c.source.load()?;
    let space = DGSpace::new(&mesh, c.disc.k)?;
    let ritz = ritz_project(&mesh, &space, &problem, &cfg)?;
    println!("problem: {}", problem.name());
    println!("dofs: {}", space.n_dofs());
    print_stats(&ritz.stats);
    println!("u_z: {:?}", ritz.u_z);
    println!("ru_z: {:?}", ritz.ru_z);
    println!("error_z: {:?}", ritz.error_z);
    println!("best_z: {:?}", ritz.best_z);
    println!("stability_ratio: {:?}", ritz.stability_ratio());
    println!("quasi_optimality_ratio: {:?}", ritz.quasi_optimality_ratio());
    if space.n_dofs() <= DENSE_CAP {
        let g = infsup_gamma(&mesh, &space, &cfg)?.gamma;
        println!("gamma: {g:?}");
        println!("stability bound 1/gamma: {:?}", 1.0 / g);
        println!("quasi-optimality bound 1 + 1/gamma: {:?}", 1.0 + 1.0 / g);
    } else {
        println!("gamma: skipped ({} DOFs exceed the dense cap {DENSE_CAP})", space.n_dofs());
    }
    Ok(())
}

fn cmd_infsup(c: &InfsupCmd) -> Result<()> {
    if c.samples < MIN_CONTINUITY_SAMPLES {
        return Err(Usage(format!("--samples must be at least {MIN_CONTINUITY_SAMPLES}")).into());
    }
    let cfg = c.disc.penalty()?;
    let mesh = c.source.load()?;
    let space = DGSpace::new(&mesh, c.disc.k)?;
    let inf = infsup_gamma(&mesh, &space, &cfg)?;
    println!("dofs: {}", inf.dofs);
    println!("gamma: {:?}", inf.gamma);
    println!("sigma_max: {:?}", inf.sigma_max);
    println!("c0: {:?}", coercivity_constant(&mesh, &space, &cfg)?);
    let cont = continuity_constant(&mesh, &space, &cfg, c.samples, c.seed)?;
    println!("seed: {}", cont.seed);
    println!("continuity_samples: {}", cont.samples);
    println!("continuity_sampled: {:?}", cont.sampled_max);
    if let Some(e) = cont.exact {
        println!("continuity_exact: {e:?}");
    }
    Ok(())
}

fn cmd_study(c: &StudyCmd) -> Result<bool> {
    let cfg = c.disc.penalty()?;
    let problem = Problem::parse(&c.problem)?;
    let family = family_of(c.family, c.n, c.beta, c.geo_levels, c.epsilon);
    let config = StudyConfig { family, levels: c.levels, k: c.disc.k, penalty: cfg, constants: c.constants };
    let report = run_study(&config, &problem)?;

    println!("{:>5} {:>12} {:>8} {:>12} {:>12} {:>8} {:>8}", "level", "max_h", "dofs", "l2_error", "energy", "eoc_l2", "eoc_en");
    let (el2, een) = (report.eoc(ipdg::forms::NormKind::L2), report.eoc(ipdg::forms::NormKind::Energy));
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3}"));
    for (i, r) in report.rows.iter().enumerate() {
        println!(
            "{:>5} {:>12.4e} {:>8} {:>12.4e} {:>12.4e} {:>8} {:>8}",
            r.level,
            r.max_h,
            r.report.dofs,
            r.report.l2_error,
            r.report.energy_error,
            fmt(el2[i]),
            fmt(een[i])
        );
    }
    println!("oscillation constant: {:?}", report.oscillation_constant());
    for n in &report.notices {
        println!("note: {n}");
    }

    let flags = format!(
        "ipdg study --family {} --n {} --beta {} --geo-levels {} --epsilon {} --levels {} {} --problem {}{}",
        c.family.to_possible_value().unwrap().get_name(),
        c.n,
        c.beta,
        c.geo_levels,
        c.epsilon,
        c.levels,
        c.disc.describe(),
        problem.name(),
        if c.constants { " --constants" } else { "" }
    );
    if let Some(path) = &c.out {
        std::fs::write(path, report.to_csv(&flags)).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &c.svg {
        std::fs::write(path, report.to_svg()).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &c.json {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)
            .with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    if let Some(f) = &report.failure {
        eprintln!("error: study stopped at {f}");
        return Ok(false);
    }
    Ok(true)
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Mesh(c) => cmd_mesh(c).map(|_| true),
        Command::Grading(c) => cmd_grading(c).map(|_| true),
        Command::Solve(c) => {
            println!("mesh: {}", c.source.describe());
            cmd_solve(c).map(|_| true)
        }
        Command::Ritz(c) => cmd_ritz(c).map(|_| true),
        Command::Infsup(c) => cmd_infsup(c).map(|_| true),
        Command::Study(c) => cmd_study(c),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let validation = err.chain().any(|e| {
        e.downcast_ref::<Usage>().is_some() || e.downcast_ref::<ipdg::Error>().is_some_and(ipdg::Error::is_validation)
    });
    if validation {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
