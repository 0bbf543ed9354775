//! Resonant rectangular pulses on the closed P/S/Q loop and their exact
//! propagators.
//!
//! The two enantiomers differ only in the sign κ of the Q (1↔3) coupling.
//! A field of phase φ on the pair (j, k), j < k, enters the Hamiltonian as
//! `H_jk = (Ω/2)·e^{iφ}`, which makes a Q(π/2) pulse on the L molecule
//!
//! ```text
//! [ 1/√2   0  −i/√2 ]
//! [  0     1    0   ]
//! [ −i/√2  0   1/√2 ]
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{c, CMat3, HMat3};

/// √(2+√2): the larger Raman field area (in units of π) of the two-step protocol.
pub fn xi1() -> f64 {
    (2.0 + 2f64.sqrt()).sqrt()
}

/// √(2−√2): the smaller Raman field area (in units of π).
pub fn xi2() -> f64 {
    (2.0 - 2f64.sqrt()).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chirality {
    L,
    R,
}

impl Chirality {
    pub const BOTH: [Chirality; 2] = [Chirality::L, Chirality::R];

    /// Sign of the Q coupling: +1 for L, −1 for R.
    pub fn kappa(self) -> f64 {
        match self {
            Chirality::L => 1.0,
            Chirality::R => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Transition {
    /// |1⟩ ↔ |2⟩
    P,
    /// |2⟩ ↔ |3⟩
    S,
    /// |1⟩ ↔ |3⟩, the chirality-dependent coupling
    Q,
}

impl Transition {
    /// Zero-based coupled pair (j, k) with j < k.
    pub fn pair(self) -> (usize, usize) {
        match self {
            Transition::P => (0, 1),
            Transition::S => (1, 2),
            Transition::Q => (0, 2),
        }
    }

    fn sign(self, chi: Chirality) -> f64 {
        match self {
            Transition::Q => chi.kappa(),
            _ => 1.0,
        }
    }
}

/// One field: nominal area A = ∫Ω dt and phase, both in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldPulse {
    pub transition: Transition,
    pub area: f64,
    pub phase: f64,
}

impl FieldPulse {
    pub fn new(transition: Transition, area: f64, phase: f64) -> Self {
        FieldPulse {
            transition,
            area,
            phase,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.area.is_finite() || self.area < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "pulse area must be finite and non-negative, got {} on {:?}",
                self.area, self.transition
            )));
        }
        if !self.phase.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "pulse phase must be finite, got {}",
                self.phase
            )));
        }
        Ok(())
    }
}

/// One interaction interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PulseStep {
    Single(FieldPulse),
    /// Simultaneous, co-terminous P and S fields.
    Raman {
        p: FieldPulse,
        s: FieldPulse,
    },
}

impl PulseStep {
    pub fn q(area: f64, phase: f64) -> Self {
        PulseStep::Single(FieldPulse::new(Transition::Q, area, phase))
    }

    pub fn raman(p_area: f64, p_phase: f64, s_area: f64, s_phase: f64) -> Self {
        PulseStep::Raman {
            p: FieldPulse::new(Transition::P, p_area, p_phase),
            s: FieldPulse::new(Transition::S, s_area, s_phase),
        }
    }

    fn fields(&self) -> impl Iterator<Item = &FieldPulse> {
        let (a, b) = match self {
            PulseStep::Single(f) => (f, None),
            PulseStep::Raman { p, s } => (p, Some(s)),
        };
        std::iter::once(a).chain(b)
    }
}

/// Systematic relative pulse-area error shared by every field of a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel {
    pub epsilon: f64,
}

impl ErrorModel {
    pub const EXACT: ErrorModel = ErrorModel { epsilon: 0.0 };

    pub fn new(epsilon: f64) -> Self {
        ErrorModel { epsilon }
    }

    /// Realized area of a nominal area.
    #[inline]
    pub fn realize(&self, area: f64) -> f64 {
        area * (1.0 + self.epsilon)
    }
}

/// Propagator of a single resonant pulse.
pub fn single_propagator(pulse: &FieldPulse, chi: Chirality, err: ErrorModel) -> Result<CMat3> {
    pulse.validate()?;
    let a = err.realize(pulse.area);
    let kappa = pulse.transition.sign(chi);
    let (j, k) = pulse.transition.pair();
    let (sin, cos) = (a / 2.0).sin_cos();
    let e = Complex64::from_polar(1.0, pulse.phase);
    let mut u = CMat3::identity();
    u.set(j, j, c(cos, 0.0));
    u.set(k, k, c(cos, 0.0));
    u.set(j, k, c(0.0, -kappa * sin) * e);
    u.set(k, j, c(0.0, -kappa * sin) * e.conj());
    Ok(u)
}

fn check_raman_fields(p: &FieldPulse, s: &FieldPulse) -> Result<()> {
    if p.transition != Transition::P || s.transition != Transition::S {
        return Err(Error::InvalidArgument(format!(
            "Raman step needs a P and an S field, got {:?} and {:?}",
            p.transition, s.transition
        )));
    }
    p.validate()?;
    s.validate()
}

/// Bright and dark states of a Raman pair, as column vectors over |1⟩..|3⟩.
///
/// Returns `None` when both realized areas vanish.
pub fn bright_dark_states(
    p: &FieldPulse,
    s: &FieldPulse,
    err: ErrorModel,
) -> Option<([Complex64; 3], [Complex64; 3], f64)> {
    let ap = err.realize(p.area);
    let as_ = err.realize(s.area);
    let rms = ap.hypot(as_);
    if rms == 0.0 {
        return None;
    }
    let ep = Complex64::from_polar(1.0, p.phase);
    let es = Complex64::from_polar(1.0, s.phase);
    let zero = c(0.0, 0.0);
    let bright = [ep * (ap / rms), zero, es.conj() * (as_ / rms)];
    let dark = [es * (as_ / rms), zero, -ep.conj() * (ap / rms)];
    Some((bright, dark, rms))
}

/// Propagator of a simultaneous resonant P+S pair. Chirality-independent.
///
/// In the bright/dark basis the pair is a two-state rotation of the RMS area
/// √(A_p² + A_s²) between |B⟩ and |2⟩; the dark state is untouched.
pub fn raman_propagator(p: &FieldPulse, s: &FieldPulse, err: ErrorModel) -> Result<CMat3> {
    check_raman_fields(p, s)?;
    let Some((b, d, rms)) = bright_dark_states(p, s, err) else {
        return Ok(CMat3::identity());
    };
    let (sin, cos) = (rms / 2.0).sin_cos();
    let two = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
    let mut u = CMat3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let proj_d = d[i] * d[j].conj();
            let proj_b2 = b[i] * b[j].conj() + two[i] * two[j];
            let flip = b[i] * two[j] + two[i] * b[j].conj();
            u.set(i, j, proj_d + proj_b2 * cos + flip * c(0.0, -sin));
        }
    }
    Ok(u)
}

/// Analytic propagator of any step.
pub fn step_propagator(step: &PulseStep, chi: Chirality, err: ErrorModel) -> Result<CMat3> {
    match step {
        PulseStep::Single(f) => single_propagator(f, chi, err),
        PulseStep::Raman { p, s } => raman_propagator(p, s, err),
    }
}

/// RWA Hamiltonian of a rectangular realization of `step` lasting `duration`.
///
/// Each field contributes `H_jk = (Ω/2)·κ·e^{iφ}` with `Ω = A(1+ε)/duration`.
pub fn step_hamiltonian(step: &PulseStep, chi: Chirality, err: ErrorModel, duration: f64) -> Result<HMat3> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "duration must be positive, got {duration}"
        )));
    }
    if let PulseStep::Raman { p, s } = step {
        check_raman_fields(p, s)?;
    }
    let mut h = HMat3::zeros();
    for f in step.fields() {
        f.validate()?;
        let rabi = err.realize(f.area) / duration;
        let (j, k) = f.transition.pair();
        h.add_upper(
            j,
            k,
            Complex64::from_polar(rabi / 2.0 * f.transition.sign(chi), f.phase),
        );
    }
    Ok(h)
}

/// Phase of the "iS" field relative to P in the bare protocols.
pub const S_PHASE_OFFSET: f64 = PI / 2.0;
