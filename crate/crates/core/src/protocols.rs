//! The six chiral-resolution protocols and their compilation into pulse steps.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::composites::{compose, expand_q, RotationKind, SubstitutionRule, Target, TemplateName};
use crate::error::{Error, Result};
use crate::pulsemodel::{xi1, xi2, Chirality, ErrorModel, PulseStep, S_PHASE_OFFSET};
use crate::qmat::CMat3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolName {
    #[serde(rename = "SRS_PP")]
    SrsPp,
    #[serde(rename = "SRS_PM")]
    SrsPm,
    #[serde(rename = "SRS_MP")]
    SrsMp,
    #[serde(rename = "SRS_MM")]
    SrsMm,
    #[serde(rename = "RS_12")]
    Rs12,
    #[serde(rename = "RS_21")]
    Rs21,
}

impl ProtocolName {
    pub const ALL: [ProtocolName; 6] = [
        ProtocolName::SrsPp,
        ProtocolName::SrsPm,
        ProtocolName::SrsMp,
        ProtocolName::SrsMm,
        ProtocolName::Rs12,
        ProtocolName::Rs21,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolName::SrsPp => "SRS_PP",
            ProtocolName::SrsPm => "SRS_PM",
            ProtocolName::SrsMp => "SRS_MP",
            ProtocolName::SrsMm => "SRS_MM",
            ProtocolName::Rs12 => "RS_12",
            ProtocolName::Rs21 => "RS_21",
        }
    }

    pub fn protocol(self) -> Protocol {
        builtin_protocols()
            .into_iter()
            .find(|p| p.name == self)
            .expect("every protocol name has a builtin")
    }
}

impl fmt::Display for ProtocolName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProtocolName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProtocolName::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName {
                kind: "protocol",
                name: s.to_string(),
                known: ProtocolName::ALL.map(|n| n.as_str()).join(", "),
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Q(π/2), Raman [P(π/√2), iS(π/√2)], Q(π/2).
    SingleRamanSingle,
    /// Raman [P(ξπ), iS(ξ'π)], Q(π/2).
    RamanSingle,
}

impl Family {
    /// Rotation a Raman composite must realize in this family.
    pub fn raman_target(self) -> Target {
        match self {
            Family::SingleRamanSingle => Target::HalfPiRotation,
            Family::RamanSingle => Target::TwoPiRotation,
        }
    }
}

/// An abstract interaction, before composite substitution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Interaction {
    /// ±Q(π/2); `sign = −1` is realized as a π phase shift.
    SingleQ { sign: i8 },
    /// Simultaneous P and iS fields with the given total areas.
    RamanPs { p_area: f64, s_area: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub name: ProtocolName,
    pub family: Family,
    pub steps: Vec<Interaction>,
    /// 1-based state each enantiomer ends in at ε = 0: (L, R).
    pub final_state: (usize, usize),
    pub initial_state: usize,
}

impl Protocol {
    pub fn final_state_of(&self, chi: Chirality) -> usize {
        match chi {
            Chirality::L => self.final_state.0,
            Chirality::R => self.final_state.1,
        }
    }

    /// State whose population separates the enantiomers: the one L ends in.
    pub fn discriminator_state(&self) -> usize {
        self.final_state.0
    }
}

pub fn builtin_protocols() -> Vec<Protocol> {
    use Interaction::*;

    let half = PI / SQRT_2;
    let srs = |name, first: i8, last: i8, final_state| Protocol {
        name,
        family: Family::SingleRamanSingle,
        steps: vec![
            SingleQ { sign: first },
            RamanPs {
                p_area: half,
                s_area: half,
            },
            SingleQ { sign: last },
        ],
        final_state,
        initial_state: 1,
    };
    let rs = |name, p_area, s_area, final_state| Protocol {
        name,
        family: Family::RamanSingle,
        steps: vec![RamanPs { p_area, s_area }, SingleQ { sign: 1 }],
        final_state,
        initial_state: 1,
    };
    vec![
        srs(ProtocolName::SrsPp, 1, 1, (2, 3)),
        srs(ProtocolName::SrsPm, 1, -1, (2, 1)),
        srs(ProtocolName::SrsMp, -1, 1, (1, 2)),
        srs(ProtocolName::SrsMm, -1, -1, (3, 2)),
        rs(ProtocolName::Rs12, xi1() * PI, xi2() * PI, (3, 1)),
        rs(ProtocolName::Rs21, xi2() * PI, xi1() * PI, (1, 3)),
    ]
}

/// Knobs on top of the template choice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompileOptions {
    /// Force the order of Q composites; `None` applies the default rule.
    pub q_reversed: Option<bool>,
    /// Force the order of Raman composites; `None` applies the default rule.
    pub raman_reversed: Option<bool>,
    /// Phase of the S field relative to P, radians.
    pub s_phase_offset: f64,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            q_reversed: None,
            raman_reversed: None,
            s_phase_offset: S_PHASE_OFFSET,
        }
    }
}

impl CompileOptions {
    // Variable-rotation composites keep the resolution condition only with a
    // specific ordering: forward Q / reversed Raman in the three-step
    // protocols, reversed Q in the two-step ones.
    fn q_reversed(&self, family: Family, rotation: RotationKind) -> bool {
        self.q_reversed
            .unwrap_or(rotation == RotationKind::Variable && family == Family::RamanSingle)
    }

    fn raman_reversed(&self, family: Family, rotation: RotationKind) -> bool {
        self.raman_reversed
            .unwrap_or(rotation == RotationKind::Variable && family == Family::SingleRamanSingle)
    }
}

/// Concrete pulse steps for `protocol` with the given composites substituted.
pub fn compile(
    protocol: &Protocol,
    q_template: TemplateName,
    raman_template: TemplateName,
    err: ErrorModel,
    options: &CompileOptions,
) -> Result<Vec<PulseStep>> {
    let q = q_template.resolve(Target::HalfPiRotation).map_err(|_| {
        Error::InvalidArgument(format!(
            "Q template {q_template} must be a π/2 rotation (SINGLE, CP1, CP2, BB1 or VR)"
        ))
    })?;
    let raman_target = protocol.family.raman_target();
    let raman = raman_template.resolve(raman_target).map_err(|_| {
        let allowed = match raman_target {
            Target::HalfPiRotation => "SINGLE, CP1, CP2, BB1 or VR",
            Target::TwoPiRotation => "SINGLE, TWO_PI_5 or TWO_PI_9",
        };
        Error::InvalidArgument(format!(
            "protocol {} needs a Raman composite realizing a {:?}; {raman_template} does not (use {allowed})",
            protocol.name, raman_target
        ))
    })?;
    let q_reversed = options.q_reversed(protocol.family, q.rotation);
    let raman_reversed = options.raman_reversed(protocol.family, raman.rotation);

    let mut steps = Vec::new();
    for interaction in &protocol.steps {
        match *interaction {
            Interaction::SingleQ { sign } => {
                let base = if sign < 0 { PI } else { 0.0 };
                steps.extend(expand_q(&q, base, err, q_reversed)?);
            }
            Interaction::RamanPs { p_area, s_area } => {
                let rule = SubstitutionRule::raman_lift(&raman, p_area, s_area, raman_reversed)?
                    .with_s_phase_offset(options.s_phase_offset);
                steps.extend(rule.apply(&raman, err));
            }
        }
    }
    Ok(steps)
}

/// Propagators and final populations for both enantiomers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunResult {
    pub propagator_l: CMat3,
    pub propagator_r: CMat3,
    pub populations_l: [f64; 3],
    pub populations_r: [f64; 3],
}

impl RunResult {
    pub fn from_propagators(propagator_l: CMat3, propagator_r: CMat3) -> Self {
        RunResult {
            propagator_l,
            propagator_r,
            populations_l: first_column_populations(&propagator_l),
            populations_r: first_column_populations(&propagator_r),
        }
    }

    pub fn propagator(&self, chi: Chirality) -> &CMat3 {
        match chi {
            Chirality::L => &self.propagator_l,
            Chirality::R => &self.propagator_r,
        }
    }

    pub fn populations(&self, chi: Chirality) -> [f64; 3] {
        match chi {
            Chirality::L => self.populations_l,
            Chirality::R => self.populations_r,
        }
    }
}

/// |U_i1|²: populations reached from |1⟩.
pub fn first_column_populations(u: &CMat3) -> [f64; 3] {
    u.column(0).map(|z| z.norm_sqr())
}

/// Time-ordered product of concrete steps: `U = U_n ··· U_1`.
pub fn sequence_propagator(steps: &[PulseStep], chi: Chirality) -> Result<CMat3> {
    compose(steps, chi)
}

pub fn run(
    protocol: &Protocol,
    q_template: TemplateName,
    raman_template: TemplateName,
    err: ErrorModel,
    options: &CompileOptions,
) -> Result<RunResult> {
    let steps = compile(protocol, q_template, raman_template, err, options)?;
    Ok(RunResult::from_propagators(
        sequence_propagator(&steps, Chirality::L)?,
        sequence_propagator(&steps, Chirality::R)?,
    ))
}

/// A protocol together with its composite choices: everything but ε.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scheme {
    pub protocol: ProtocolName,
    pub q_template: TemplateName,
    pub raman_template: TemplateName,
    #[serde(default)]
    pub options: CompileOptions,
}

impl Scheme {
    pub fn new(protocol: ProtocolName, q_template: TemplateName, raman_template: TemplateName) -> Self {
        Scheme {
            protocol,
            q_template,
            raman_template,
            options: CompileOptions::default(),
        }
    }

    pub fn bare(protocol: ProtocolName) -> Self {
        Scheme::new(protocol, TemplateName::Single, TemplateName::Single)
    }

    pub fn with_options(mut self, options: CompileOptions) -> Self {
        self.options = options;
        self
    }

    /// Fails if a template does not fit the protocol.
    pub fn validate(&self) -> Result<()> {
        self.compile(ErrorModel::EXACT).map(|_| ())
    }

    pub fn compile(&self, err: ErrorModel) -> Result<Vec<PulseStep>> {
        compile(
            &self.protocol.protocol(),
            self.q_template,
            self.raman_template,
            err,
            &self.options,
        )
    }

    pub fn run(&self, err: ErrorModel) -> Result<RunResult> {
        run(
            &self.protocol.protocol(),
            self.q_template,
            self.raman_template,
            err,
            &self.options,
        )
    }
}
