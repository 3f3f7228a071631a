//! Solves, Ritz projections, stability constants and convergence studies.

mod measures;
mod problem;
mod solve;
mod stability;
mod study;

pub use measures::{best_l2_error, data_oscillation, local_h4_seminorm, local_seminorm};
pub use problem::Problem;
pub use solve::{error_report, ritz_project, solve_poisson, solve_system, ErrorReport, Ritz, SolveStats, Solved};
pub use stability::{coercivity_constant, continuity_constant, infsup_gamma, Continuity, InfSup, MIN_CONTINUITY_SAMPLES};
pub use study::{run_study, Family, StudyConfig, StudyReport, StudyRow, CSV_COLUMNS, MIN_STUDY_LEVELS};
