//! Error sweeps, contrast and robustness metrics, and the symmetric-propagator
//! phase analysis behind variable-rotation composites.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::composites::{expand_q, SubstitutionRule, Target};
use crate::error::{Error, Result};
use crate::protocols::{sequence_propagator, Family, Interaction, ProtocolName, RunResult, Scheme};
use crate::pulsemodel::{Chirality, ErrorModel};
use crate::qmat::{c, CMat3};

/// Default ε range and resolution of a sweep.
pub const DEFAULT_EPS_MIN: f64 = -0.5;
pub const DEFAULT_EPS_MAX: f64 = 0.5;
pub const DEFAULT_POINTS: usize = 1001;

/// Modulus-pattern tolerance for bare pulses and for composites.
pub const BARE_PATTERN_TOL: f64 = 1e-6;
pub const COMPOSITE_PATTERN_TOL: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepProfile {
    pub protocol: ProtocolName,
    pub q_template: crate::composites::TemplateName,
    pub raman_template: crate::composites::TemplateName,
    pub epsilons: Vec<f64>,
    pub pops_l: Vec<[f64; 3]>,
    pub pops_r: Vec<[f64; 3]>,
}

/// Uniform grid with both endpoints included exactly.
pub fn epsilon_grid(eps_min: f64, eps_max: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(eps_min < eps_max) || !eps_min.is_finite() || !eps_max.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sweep grid needs n ≥ 2 and eps_min < eps_max, got n = {n}, [{eps_min}, {eps_max}]"
        )));
    }
    let span = eps_max - eps_min;
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                eps_max
            } else {
                eps_min + span * (i as f64) / last
            }
        })
        .collect())
}

/// Evaluate `scheme` on a uniform ε grid with the analytic propagators.
pub fn sweep(scheme: &Scheme, eps_min: f64, eps_max: f64, n: usize) -> Result<SweepProfile> {
    sweep_with(scheme, &epsilon_grid(eps_min, eps_max, n)?, |s, err| s.run(err))
}

/// Evaluate `scheme` on `grid` with any propagator route. Points are
/// computed in parallel and returned in grid order.
pub fn sweep_with<F>(scheme: &Scheme, grid: &[f64], eval: F) -> Result<SweepProfile>
where
    F: Fn(&Scheme, ErrorModel) -> Result<RunResult> + Sync,
{
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("ε grid must be strictly increasing".into()));
    }
    scheme.validate()?;
    let results: Vec<RunResult> = grid
        .par_iter()
        .map(|&eps| eval(scheme, ErrorModel::new(eps)))
        .collect::<Result<_>>()?;
    Ok(SweepProfile {
        protocol: scheme.protocol,
        q_template: scheme.q_template,
        raman_template: scheme.raman_template,
        epsilons: grid.to_vec(),
        pops_l: results.iter().map(|r| r.populations_l).collect(),
        pops_r: results.iter().map(|r| r.populations_r).collect(),
    })
}

impl SweepProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epsilon,P1_L,P2_L,P3_L,P1_R,P2_R,P3_R\n");
        for ((eps, l), r) in self.epsilons.iter().zip(&self.pops_l).zip(&self.pops_r) {
            let fields: Vec<String> = std::iter::once(*eps)
                .chain(l.iter().copied())
                .chain(r.iter().copied())
                .map(format_number)
                .collect();
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }
}

/// Fixed 12 decimal places, trailing zeros trimmed, no negative zero.
pub fn format_number(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        &s
    };
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn check_state(state: usize) -> Result<usize> {
    if (1..=3).contains(&state) {
        Ok(state - 1)
    } else {
        Err(Error::InvalidArgument(format!(
            "state index must be 1, 2 or 3, got {state}"
        )))
    }
}

/// `P_state(L) − P_state(R)` at every grid point.
pub fn contrast(profile: &SweepProfile, state: usize) -> Result<Vec<f64>> {
    let k = check_state(state)?;
    Ok(profile
        .pops_l
        .iter()
        .zip(&profile.pops_r)
        .map(|(l, r)| l[k] - r[k])
        .collect())
}

/// Width of the contiguous run of grid points around ε = 0 whose contrast is
/// at least `threshold`. Zero if the point nearest ε = 0 is already below.
pub fn robustness_window(profile: &SweepProfile, state: usize, threshold: f64) -> Result<f64> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    Ok(window_width(&profile.epsilons, &contrast(profile, state)?, threshold))
}

/// Core of [`robustness_window`] on raw arrays.
pub fn window_width(epsilons: &[f64], values: &[f64], threshold: f64) -> f64 {
    let (Some(&first), Some(&last)) = (epsilons.first(), epsilons.last()) else {
        return 0.0;
    };
    if first > 0.0 || last < 0.0 {
        return 0.0;
    }
    let center = epsilons
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap();
    if values[center] < threshold {
        return 0.0;
    }
    let mut lo = center;
    while lo > 0 && values[lo - 1] >= threshold {
        lo -= 1;
    }
    let mut hi = center;
    while hi + 1 < values.len() && values[hi + 1] >= threshold {
        hi += 1;
    }
    epsilons[hi] - epsilons[lo]
}

/// Phases of the symmetric Q and Raman propagator forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryPhases {
    pub alpha: f64,
    pub beta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
}

fn q_modulus_pattern() -> [[f64; 3]; 3] {
    let s = FRAC_1_SQRT_2;
    [[s, 0.0, s], [0.0, 1.0, 0.0], [s, 0.0, s]]
}

fn raman_modulus_pattern() -> [[f64; 3]; 3] {
    let s = FRAC_1_SQRT_2;
    [[0.5, s, 0.5], [s, 0.0, s], [0.5, s, 0.5]]
}

fn pattern_deviation(u: &CMat3, pattern: [[f64; 3]; 3]) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in pattern.iter().enumerate() {
        for (j, m) in row.iter().enumerate() {
            worst = worst.max((u.get(i, j).norm() - m).abs());
        }
    }
    worst
}

/// Map an angle into (−π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Read α, β from a Q(π/2)-like propagator `u_q` of enantiomer `chi`, and
/// γ₁..γ₄ from a Raman propagator `u_raman`.
///
/// The Q form is `[[e^{iα}, 0, ±e^{iβ}], [0, 1, 0], [∓e^{−iβ}, 0, e^{−iα}]]/√2`
/// with the upper sign for L. Both matrices must match their modulus
/// patterns within `tol`.
pub fn extract_symmetry_phases(u_q: &CMat3, chi: Chirality, u_raman: &CMat3, tol: f64) -> Result<SymmetryPhases> {
    let dev = pattern_deviation(u_q, q_modulus_pattern()).max(pattern_deviation(u_raman, raman_modulus_pattern()));
    if !(dev <= tol) {
        return Err(Error::PatternMismatch {
            max_deviation: dev,
            tolerance: tol,
        });
    }
    let arg = |z: Complex64| wrap_angle(z.arg());
    Ok(SymmetryPhases {
        alpha: arg(u_q.get(0, 0)),
        beta: arg(u_q.get(0, 2) * chi.kappa()),
        gamma1: arg(u_raman.get(0, 0)),
        gamma2: arg(u_raman.get(1, 0)),
        gamma3: arg(u_raman.get(2, 0)),
        gamma4: arg(u_raman.get(0, 1)),
    })
}

/// Circular distance of `2γ₂ + α + β` from π/2, in [0, π].
pub fn resolution_residual(phases: &SymmetryPhases) -> f64 {
    wrap_angle(2.0 * phases.gamma2 + phases.alpha + phases.beta - FRAC_PI_2).abs()
}

/// `U₂₁ = ½·e^{−i(γ₂+β)}·[±i + e^{i(2γ₂+α+β)}]` of Q·Raman·Q, upper sign for L.
pub fn u21_prediction(phases: &SymmetryPhases, chi: Chirality) -> Complex64 {
    let lead = Complex64::from_polar(0.5, -(phases.gamma2 + phases.beta));
    let loop_phase = Complex64::from_polar(1.0, 2.0 * phases.gamma2 + phases.alpha + phases.beta);
    lead * (c(0.0, chi.kappa()) + loop_phase)
}

/// The single-step propagators of a single-Raman-single scheme: the first Q
/// step (for enantiomer `chi`) and the Raman step, each with its composite
/// substituted.
pub fn srs_components(scheme: &Scheme, chi: Chirality, err: ErrorModel) -> Result<(CMat3, CMat3)> {
    let protocol = scheme.protocol.protocol();
    if protocol.family != Family::SingleRamanSingle {
        return Err(Error::InvalidArgument(format!(
            "{} is not a single-Raman-single protocol",
            scheme.protocol
        )));
    }
    // Compile the whole scheme and split it by step kind so the ordering rule
    // matches exactly what `run` uses.
    let steps = scheme.compile(err)?;
    let q = scheme.q_template.resolve(Target::HalfPiRotation)?;
    let n_q = expand_q(&q, 0.0, err, false)?.len();
    let (first_q, rest) = steps.split_at(n_q);
    let raman = scheme.raman_template.resolve(Target::HalfPiRotation)?;
    let n_raman = match protocol.steps[1] {
        Interaction::RamanPs { p_area, s_area } => SubstitutionRule::raman_lift(&raman, p_area, s_area, false)?
            .apply(&raman, err)
            .len(),
        Interaction::SingleQ { .. } => unreachable!("second step of a single-Raman-single protocol is Raman"),
    };
    let raman_steps = &rest[..n_raman];
    Ok((
        sequence_propagator(first_q, chi)?,
        sequence_propagator(raman_steps, Chirality::L)?,
    ))
}
