//! Brute-force evolution: per-step Hamiltonians exponentiated numerically.
//!
//! Shares nothing with the closed-form propagators except the Hamiltonian
//! convention, which makes it a check on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::{RunResult, Scheme};
use crate::pulsemodel::{step_hamiltonian, Chirality, ErrorModel, PulseStep};
use crate::qmat::{expm_hermitian, CMat3};

/// Time discretization of each pulse step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    /// Number of equal slices per step.
    pub step_count: usize,
    /// Duration of each step.
    pub duration: f64,
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid {
            step_count: 1,
            duration: 1.0,
        }
    }
}

impl TimeGrid {
    pub fn new(step_count: usize, duration: f64) -> Result<Self> {
        if step_count == 0 || !(duration > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time grid needs step_count ≥ 1 and duration > 0, got {step_count}, {duration}"
            )));
        }
        Ok(TimeGrid { step_count, duration })
    }
}

/// Evolve through `steps` (nominal areas; `err` is applied here), slicing every
/// step into `grid.step_count` constant-Hamiltonian intervals.
pub fn evolve_piecewise(steps: &[PulseStep], chi: Chirality, err: ErrorModel, grid: TimeGrid) -> Result<CMat3> {
    if grid.step_count == 0 {
        return Err(Error::InvalidArgument("time grid needs at least one slice".into()));
    }
    let dt = grid.duration / grid.step_count as f64;
    let mut u = CMat3::identity();
    for step in steps {
        let h = step_hamiltonian(step, chi, err, grid.duration)?;
        let slice = expm_hermitian(&h, dt)?;
        for _ in 0..grid.step_count {
            u = slice * u;
        }
    }
    Ok(u)
}

/// Oracle counterpart of [`Scheme::run`].
pub fn oracle_run(scheme: &Scheme, err: ErrorModel, grid: TimeGrid) -> Result<RunResult> {
    let nominal = scheme.compile(ErrorModel::EXACT)?;
    Ok(RunResult::from_propagators(
        evolve_piecewise(&nominal, Chirality::L, err, grid)?,
        evolve_piecewise(&nominal, Chirality::R, err, grid)?,
    ))
}
