//! Composite-pulse templates and the rules that turn a two-state template
//! into concrete Q pulses or Raman pulse pairs.
//!
//! Two lifts exist for Raman pairs:
//!
//! * half-π templates replace the equal-area Raman pair `[P(π/√2), iS(π/√2)]`.
//!   Each segment becomes a pair with both field areas √2 times the segment
//!   area and the segment phase added to both fields. This is the spin-1
//!   image of the two-state rotation.
//! * 2π templates replace the pair `[P(ξ₁π), iS(ξ₂π)]` (or with ξ₁, ξ₂
//!   swapped), whose Morris-Shore bright state sees a 2π pulse. The field
//!   areas split in proportion to the totals. The segment phase enters P as
//!   `+φ` and S as `−φ`, so the bright state stays fixed and the phase shows
//!   up as the phase of the bright↔|2⟩ coupling.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulsemodel::{xi1, xi2, Chirality, ErrorModel, PulseStep, S_PHASE_OFFSET};
use crate::qmat::CMat3;

/// Tolerance on the Raman field totals a lift accepts.
const TOTAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationKind {
    Constant,
    Variable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    HalfPiRotation,
    TwoPiRotation,
}

impl Target {
    /// Nominal rotation angle of the two-state pulse the template replaces.
    pub fn angle(self) -> f64 {
        match self {
            Target::HalfPiRotation => FRAC_PI_2,
            Target::TwoPiRotation => 2.0 * PI,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub nominal_area: f64,
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositeTemplate {
    pub name: TemplateName,
    pub segments: Vec<Segment>,
    pub rotation: RotationKind,
    pub target: Target,
}

impl CompositeTemplate {
    fn from_units_of_pi(
        name: TemplateName,
        areas: &[f64],
        phases: &[f64],
        rotation: RotationKind,
        target: Target,
    ) -> Self {
        debug_assert_eq!(areas.len(), phases.len());
        let segments = areas
            .iter()
            .zip(phases)
            .map(|(a, p)| Segment {
                nominal_area: a * PI,
                phase: p * PI,
            })
            .collect();
        CompositeTemplate {
            name,
            segments,
            rotation,
            target,
        }
    }

    pub fn total_nominal_area(&self) -> f64 {
        self.segments.iter().map(|s| s.nominal_area).sum()
    }

    fn ordered(&self, reversed: bool) -> Box<dyn Iterator<Item = &Segment> + '_> {
        if reversed {
            Box::new(self.segments.iter().rev())
        } else {
            Box::new(self.segments.iter())
        }
    }
}

/// Stable template identifiers, as used on the command line and in config files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TemplateName {
    #[serde(rename = "SINGLE")]
    Single,
    #[serde(rename = "CP1")]
    Cp1,
    #[serde(rename = "CP2")]
    Cp2,
    #[serde(rename = "BB1")]
    Bb1,
    #[serde(rename = "TWO_PI_5")]
    TwoPi5,
    #[serde(rename = "TWO_PI_9")]
    TwoPi9,
    #[serde(rename = "VR")]
    Vr,
}

impl TemplateName {
    pub const ALL: [TemplateName; 7] = [
        TemplateName::Single,
        TemplateName::Cp1,
        TemplateName::Cp2,
        TemplateName::Bb1,
        TemplateName::TwoPi5,
        TemplateName::TwoPi9,
        TemplateName::Vr,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TemplateName::Single => "SINGLE",
            TemplateName::Cp1 => "CP1",
            TemplateName::Cp2 => "CP2",
            TemplateName::Bb1 => "BB1",
            TemplateName::TwoPi5 => "TWO_PI_5",
            TemplateName::TwoPi9 => "TWO_PI_9",
            TemplateName::Vr => "VR",
        }
    }

    /// The template this name denotes when it must produce a rotation of
    /// kind `target`. `SINGLE` is the one-segment, un-composite pulse.
    pub fn resolve(self, target: Target) -> Result<CompositeTemplate> {
        let template = match self {
            TemplateName::Single => CompositeTemplate {
                name: TemplateName::Single,
                segments: vec![Segment {
                    nominal_area: target.angle(),
                    phase: 0.0,
                }],
                rotation: RotationKind::Constant,
                target,
            },
            other => builtin_template(other).expect("every non-SINGLE name is a builtin"),
        };
        if template.target != target {
            return Err(Error::InvalidArgument(format!(
                "template {} is a {:?} composite but a {:?} is required here",
                self, template.target, target
            )));
        }
        Ok(template)
    }
}

impl fmt::Display for TemplateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TemplateName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TemplateName::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName {
                kind: "template",
                name: s.to_string(),
                known: TemplateName::ALL.map(|n| n.as_str()).join(", "),
            })
    }
}

/// The six composite templates.
pub fn builtin_templates() -> Vec<CompositeTemplate> {
    use RotationKind::*;
    use Target::*;
    use TemplateName::*;

    // BB1 correction phase.
    let chi = (-1.0f64 / 8.0).acos() / PI;
    vec![
        CompositeTemplate::from_units_of_pi(
            Cp1,
            &[0.6399, 1.0, 0.6399],
            &[1.6558, 0.4413, 1.6558],
            Constant,
            HalfPiRotation,
        ),
        CompositeTemplate::from_units_of_pi(
            Cp2,
            &[0.45, 1.0, 1.0, 1.0, 0.45],
            &[1.4494, 0.0106, 0.8179, 0.0106, 1.4494],
            Constant,
            HalfPiRotation,
        ),
        CompositeTemplate::from_units_of_pi(
            Bb1,
            &[0.5, 1.0, 1.0, 1.0, 1.0],
            &[0.0, chi, 3.0 * chi, 3.0 * chi, chi],
            Constant,
            HalfPiRotation,
        ),
        CompositeTemplate::from_units_of_pi(
            TwoPi5,
            &[1.0, 1.0, 2.0, 1.0, 1.0],
            &[0.0, 2.0 / 3.0, 0.0, 2.0 / 3.0, 0.0],
            Constant,
            TwoPiRotation,
        ),
        CompositeTemplate::from_units_of_pi(
            TwoPi9,
            &[1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0],
            &[0.0, 0.4, 1.2, 0.4, 0.0, 0.4, 1.2, 0.4, 0.0],
            Constant,
            TwoPiRotation,
        ),
        CompositeTemplate::from_units_of_pi(Vr, &[0.5, 1.0, 0.5], &[-0.5, 0.25, 0.5], Variable, HalfPiRotation),
    ]
}

pub fn builtin_template(name: TemplateName) -> Option<CompositeTemplate> {
    builtin_templates().into_iter().find(|t| t.name == name)
}

/// Replace a Q(π/2) pulse by `template`.
///
/// `base_phase = π` realizes −Q(π/2).
pub fn expand_q(
    template: &CompositeTemplate,
    base_phase: f64,
    err: ErrorModel,
    reversed: bool,
) -> Result<Vec<PulseStep>> {
    if template.target != Target::HalfPiRotation {
        return Err(Error::InvalidArgument(format!(
            "template {} cannot replace a Q(π/2) pulse: it is a {:?} composite",
            template.name, template.target
        )));
    }
    Ok(template
        .ordered(reversed)
        .map(|seg| PulseStep::q(err.realize(seg.nominal_area), seg.phase + base_phase))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubstitutionMode {
    QSingle,
    RamanLift,
}

/// How template segments map onto concrete fields.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubstitutionRule {
    pub mode: SubstitutionMode,
    pub field_scale_p: f64,
    pub field_scale_s: f64,
    /// Extra phase carried by the S field (the "i" of iS).
    pub s_phase_offset: f64,
    /// +1: segment phase added to S as to P; −1: subtracted.
    pub s_phase_sign: f64,
    pub reversed: bool,
}

impl SubstitutionRule {
    /// The Raman lift of `template` onto a pair with total field areas
    /// `p_total`, `s_total`.
    pub fn raman_lift(template: &CompositeTemplate, p_total: f64, s_total: f64, reversed: bool) -> Result<Self> {
        let close = |a: f64, b: f64| (a - b).abs() <= TOTAL_TOL;
        let (ok, sign) = match template.target {
            Target::HalfPiRotation => {
                let half = PI / 2f64.sqrt();
                (close(p_total, half) && close(s_total, half), 1.0)
            }
            Target::TwoPiRotation => {
                let (a, b) = (xi1() * PI, xi2() * PI);
                (
                    (close(p_total, a) && close(s_total, b)) || (close(p_total, b) && close(s_total, a)),
                    -1.0,
                )
            }
        };
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "template {} ({:?}) cannot replace a Raman pair with field areas ({:.6}π, {:.6}π)",
                template.name,
                template.target,
                p_total / PI,
                s_total / PI
            )));
        }
        let angle = template.target.angle();
        Ok(SubstitutionRule {
            mode: SubstitutionMode::RamanLift,
            field_scale_p: p_total / angle,
            field_scale_s: s_total / angle,
            s_phase_offset: S_PHASE_OFFSET,
            s_phase_sign: sign,
            reversed,
        })
    }

    pub fn with_s_phase_offset(mut self, offset: f64) -> Self {
        self.s_phase_offset = offset;
        self
    }

    pub fn apply(&self, template: &CompositeTemplate, err: ErrorModel) -> Vec<PulseStep> {
        template
            .ordered(self.reversed)
            .map(|seg| match self.mode {
                SubstitutionMode::QSingle => PulseStep::q(err.realize(seg.nominal_area), seg.phase),
                SubstitutionMode::RamanLift => PulseStep::raman(
                    err.realize(self.field_scale_p * seg.nominal_area),
                    seg.phase,
                    err.realize(self.field_scale_s * seg.nominal_area),
                    self.s_phase_sign * seg.phase + self.s_phase_offset,
                ),
            })
            .collect()
    }
}

/// Replace a Raman pair with field totals (`p_total`, `s_total`) by `template`.
pub fn expand_raman(
    template: &CompositeTemplate,
    p_total: f64,
    s_total: f64,
    err: ErrorModel,
    reversed: bool,
) -> Result<Vec<PulseStep>> {
    Ok(SubstitutionRule::raman_lift(template, p_total, s_total, reversed)?.apply(template, err))
}

/// Effective two-state (Morris-Shore) area of a Raman pair: √(A_p² + A_s²).
pub fn ms_reduce(p_total: f64, s_total: f64, err: ErrorModel) -> f64 {
    debug_assert!(p_total >= 0.0 && s_total >= 0.0);
    err.realize(p_total).hypot(err.realize(s_total))
}

/// Time-ordered product `U_n ··· U_1` of a step list for one enantiomer.
///
/// Step areas are taken as realized; no further ε is applied.
pub fn compose(steps: &[PulseStep], chi: Chirality) -> Result<CMat3> {
    steps.iter().try_fold(CMat3::identity(), |acc, step| {
        Ok(crate::pulsemodel::step_propagator(step, chi, ErrorModel::EXACT)? * acc)
    })
}
