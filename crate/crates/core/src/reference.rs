//! Closed-form propagators of the bare protocols at ε = 0, entered by hand.
//! Used as fixtures for the computed propagators.

use std::f64::consts::FRAC_1_SQRT_2 as S;

use crate::pulsemodel::Chirality;
use crate::qmat::{c, CMat3};

const Z: (f64, f64) = (0.0, 0.0);

fn m(rows: [[(f64, f64); 3]; 3]) -> CMat3 {
    CMat3::from_rows(rows.map(|r| r.map(|(re, im)| c(re, im))))
}

/// Q(π/2) with zero phase.
pub fn q_half_pi(chi: Chirality) -> CMat3 {
    let k = chi.kappa();
    m([
        [(S, 0.0), Z, (0.0, -k * S)],
        [Z, (1.0, 0.0), Z],
        [(0.0, -k * S), Z, (S, 0.0)],
    ])
}

/// Raman [P(π/√2), iS(π/√2)].
pub fn raman_half_pi() -> CMat3 {
    m([
        [(0.5, 0.0), (0.0, -S), (0.0, -0.5)],
        [(0.0, -S), Z, (S, 0.0)],
        [(0.0, 0.5), (-S, 0.0), (0.5, 0.0)],
    ])
}

/// Raman [P(ξ₁π), iS(ξ₂π)].
pub fn raman_xi1_xi2() -> CMat3 {
    m([[(-S, 0.0), Z, (0.0, -S)], [Z, (-1.0, 0.0), Z], [(0.0, S), Z, (S, 0.0)]])
}

/// Q(π/2) [P(π/√2), iS(π/√2)] Q(π/2), L enantiomer.
pub fn srs_pp_left() -> CMat3 {
    m([[Z, Z, (0.0, -1.0)], [(0.0, -1.0), Z, Z], [Z, (-1.0, 0.0), Z]])
}

/// Q(π/2) [P(π/√2), iS(π/√2)] Q(π/2), R enantiomer.
pub fn srs_pp_right() -> CMat3 {
    m([[Z, (0.0, -1.0), Z], [Z, Z, (1.0, 0.0)], [(0.0, 1.0), Z, Z]])
}

/// [P(ξ₁π), iS(ξ₂π)] Q(π/2), L enantiomer.
pub fn rs_12_left() -> CMat3 {
    m([[Z, Z, (0.0, -1.0)], [Z, (-1.0, 0.0), Z], [(0.0, 1.0), Z, Z]])
}

/// [P(ξ₁π), iS(ξ₂π)] Q(π/2), R enantiomer.
pub fn rs_12_right() -> CMat3 {
    m([[(-1.0, 0.0), Z, Z], [Z, (-1.0, 0.0), Z], [Z, Z, (1.0, 0.0)]])
}
