//! Maps with known exponents, used to validate the estimator.

use crate::chaos::{ChaosError, Jacobian, PlanarMap, State};

/// `(4x(1 − x), c·y)`: exponents `ln 2` and `ln c`.
#[derive(Debug, Clone, Copy)]
pub struct LogisticProduct {
    pub contraction: f64,
}

impl PlanarMap for LogisticProduct {
    fn step(&self, (x, y): State) -> Result<State, ChaosError> {
        Ok((4.0 * x * (1.0 - x), self.contraction * y))
    }

    fn jacobian(&self, (x, _): State) -> Result<Jacobian, ChaosError> {
        Ok([[4.0 - 8.0 * x, 0.0], [0.0, self.contraction]])
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Identity;

impl PlanarMap for Identity {
    fn step(&self, s: State) -> Result<State, ChaosError> {
        Ok(s)
    }

    fn jacobian(&self, _: State) -> Result<Jacobian, ChaosError> {
        Ok([[1.0, 0.0], [0.0, 1.0]])
    }
}

/// Uniform contraction `(c·x, c·y)`.
#[derive(Debug, Clone, Copy)]
pub struct AffineContraction {
    pub c: f64,
}

impl PlanarMap for AffineContraction {
    fn step(&self, (x, y): State) -> Result<State, ChaosError> {
        Ok((self.c * x, self.c * y))
    }

    fn jacobian(&self, _: State) -> Result<Jacobian, ChaosError> {
        Ok([[self.c, 0.0], [0.0, self.c]])
    }
}
