//! Bifurcation sweeps and Lyapunov spectra.

mod bifurcation;
mod lyapunov;
pub mod validation;

pub use bifurcation::{bifurcation_csv, bifurcation_scan, BifurcationConfig, BifurcationSample, SweepParam};
pub use lyapunov::{lyapunov_for, lyapunov_grid, lyapunov_pair, LyapunovGrid, LyapunovPair};

use thiserror::Error;

use crate::chaos::{ChaosError, State};

/// Every scan starts here.
pub const SEED_STATE: State = (0.1, 0.1);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Chaos(#[from] ChaosError),
    #[error("tangent vector degenerated at step {step}")]
    DegenerateTangent { step: usize },
    #[error("bad parameter: {0}")]
    Param(String),
}
