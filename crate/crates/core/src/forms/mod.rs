//! The interior penalty form, load vectors and mesh-dependent norms.

mod assemble;
mod exact;
mod function;
mod norms;
mod trace;

pub use assemble::{assemble_load, assemble_load_with_order, assemble_ritz_rhs, assemble_sip};
pub use exact::{ExactFunction, FnExact, Manufactured};
pub use function::{BrokenField, Difference, DGFunction, ExactField, FieldValue};
pub use norms::{assemble_norm_matrix, field_norm, matrix_norm, NormKind};
pub use trace::{jump_average_eval, JumpAverage, SideTrace};

use crate::mesh::Face;
use crate::{Error, Result};

/// Penalty and symmetry parameters of the interior penalty form.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PenaltyConfig {
    /// `C_sigma` in `sigma = C_sigma k^2 / h^p`.
    pub csigma: f64,
    /// `1` symmetric, `-1` nonsymmetric, anything in between allowed.
    pub theta: f64,
    /// `p >= 1`; values above one give super-penalisation.
    pub penalty_exponent: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig { csigma: 20.0, theta: 1.0, penalty_exponent: 1.0 }
    }
}

impl PenaltyConfig {
    pub fn new(csigma: f64, theta: f64, penalty_exponent: f64) -> Result<Self> {
        let cfg = PenaltyConfig { csigma, theta, penalty_exponent };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.csigma > 0.0 && self.csigma.is_finite()) {
            return Err(Error::param("csigma", format!("must be positive, got {}", self.csigma)));
        }
        if !(-1.0..=1.0).contains(&self.theta) {
            return Err(Error::param("theta", format!("must lie in [-1, 1], got {}", self.theta)));
        }
        if !(self.penalty_exponent >= 1.0 && self.penalty_exponent.is_finite()) {
            return Err(Error::param(
                "penalty_exponent",
                format!("must be at least 1, got {}", self.penalty_exponent),
            ));
        }
        Ok(())
    }

    /// `C_sigma k^2 / face_h^p`.
    pub fn sigma(&self, face_h: f64, k: usize) -> f64 {
        self.csigma * (k * k) as f64 / face_h.powf(self.penalty_exponent)
    }
}

pub fn sigma_on_face(face: &Face, cfg: &PenaltyConfig, k: usize) -> f64 {
    cfg.sigma(face.h, k)
}

/// Sufficient penalty constant `max{4, 24 k^-2 C_inv C_qu, 8 C_inv C_qu}`.
pub fn csigma_threshold(k: usize, cinv: f64, cqu: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::param("k", "polynomial degree must be at least 1"));
    }
    for (name, v) in [("cinv", cinv), ("cqu", cqu)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(name, format!("must be positive, got {v}")));
        }
    }
    let c = cinv * cqu;
    Ok(4f64.max(24.0 * c / (k * k) as f64).max(8.0 * c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_values() {
        let cfg = PenaltyConfig::default();
        assert!((cfg.sigma(0.1, 1) - 200.0).abs() < 1e-12);
        assert!((cfg.sigma(0.1, 2) - 800.0).abs() < 1e-12);
        let sup = PenaltyConfig::new(20.0, 1.0, 2.0).unwrap();
        assert!((sup.sigma(0.1, 1) / cfg.sigma(0.1, 1) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(PenaltyConfig::new(0.0, 1.0, 1.0).is_err());
        assert!(PenaltyConfig::new(20.0, 1.5, 1.0).is_err());
        assert!(PenaltyConfig::new(20.0, -1.0, 0.5).is_err());
        assert!(PenaltyConfig::new(20.0, -1.0, 1.0).is_ok());
    }

    #[test]
    fn penalty_threshold() {
        assert_eq!(csigma_threshold(1, 0.5, 1.0).unwrap(), 12.0);
        assert_eq!(csigma_threshold(1, 1.0, 1.0).unwrap(), 24.0);
        assert_eq!(csigma_threshold(100, 1.0, 1.0).unwrap(), 8.0);
        assert!(csigma_threshold(1, -1.0, 1.0).is_err());
    }
}
