use std::sync::Arc;

use crate::forms::{ExactFunction, Manufactured};
use crate::{Error, Result};

/// A manufactured Poisson problem `-Lap u = f` on the unit square with `u = 0`
/// on the boundary.
#[derive(Clone)]
pub struct Problem {
    name: String,
    u: Arc<dyn ExactFunction>,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem").field("name", &self.name).finish()
    }
}

impl Problem {
    /// Wraps `u`, checking the boundary flag and that `|u| < 1e-12` at 100
    /// points spread evenly around the boundary.
    pub fn new(u: impl ExactFunction + 'static) -> Result<Self> {
        let u: Arc<dyn ExactFunction> = Arc::new(u);
        if !u.satisfies_dirichlet() {
            return Err(Error::param("problem", format!("{} is not flagged as vanishing on the boundary", u.name())));
        }
        for i in 0..100 {
            let s = 4.0 * i as f64 / 100.0;
            let (side, t) = (s.floor() as usize, s.fract());
            let p = match side {
                0 => [t, 0.0],
                1 => [1.0, t],
                2 => [1.0 - t, 1.0],
                _ => [0.0, 1.0 - t],
            };
            let v = u.value(p);
            if !(v.abs() < 1e-12) {
                return Err(Error::param(
                    "problem",
                    format!("{} does not vanish on the boundary: u({}, {}) = {v}", u.name(), p[0], p[1]),
                ));
            }
        }
        Ok(Problem { name: u.name(), u })
    }

    /// `sinsin`, `polybubble` or `layer:<eps>`.
    pub fn parse(name: &str) -> Result<Self> {
        Problem::new(Manufactured::parse(name)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn exact(&self) -> &dyn ExactFunction {
        self.u.as_ref()
    }

    pub fn source(&self, x: crate::Point) -> f64 {
        self.u.source(x)
    }
}
