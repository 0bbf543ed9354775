//! Self-check suites: fixture matrices, the six protocols, oracle agreement,
//! unitarity, and the resolution condition.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{self, extract_symmetry_phases, resolution_residual, srs_components, BARE_PATTERN_TOL};
use crate::composites::TemplateName;
use crate::error::Result;
use crate::oracle::{oracle_run, TimeGrid};
use crate::protocols::{builtin_protocols, CompileOptions, Family, ProtocolName, RunResult, Scheme};
use crate::pulsemodel::{raman_propagator, single_propagator, xi1, xi2, Chirality, ErrorModel, FieldPulse, Transition};
use crate::qmat::{unitarity_defect, CMat3};
use crate::reference;

pub const FIXTURE_TOL: f64 = 1e-10;
pub const POPULATION_TOL: f64 = 1e-10;
pub const UNITARITY_TOL: f64 = 1e-12;
pub const ORACLE_TOL: f64 = 1e-10;
pub const SLICING_TOL: f64 = 1e-12;
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const SLICE_COUNTS: [usize; 3] = [1, 7, 64];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub cases: usize,
}

impl SuiteReport {
    fn new(name: &str, max_deviation: f64, tolerance: f64, cases: usize) -> Self {
        SuiteReport {
            name: name.to_string(),
            max_deviation,
            tolerance,
            passed: max_deviation <= tolerance,
            cases,
        }
    }
}

/// Tracks the largest unitarity defect seen while a suite runs.
#[derive(Default)]
pub struct UnitarityTracker {
    worst: f64,
    count: usize,
}

impl UnitarityTracker {
    pub fn observe(&mut self, u: &CMat3) {
        self.worst = self.worst.max(unitarity_defect(u));
        self.count += 1;
    }

    fn observe_run(&mut self, r: &RunResult) {
        self.observe(&r.propagator_l);
        self.observe(&r.propagator_r);
    }

    pub fn report(&self) -> SuiteReport {
        SuiteReport::new("unitarity", self.worst, UNITARITY_TOL, self.count)
    }
}

/// Computed propagator, published matrix, label.
pub fn fixture_pairs() -> Result<Vec<(&'static str, CMat3, CMat3)>> {
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
    let q = FieldPulse::new(Transition::Q, FRAC_PI_2, 0.0);
    let half = PI / SQRT_2;
    let p_half = FieldPulse::new(Transition::P, half, 0.0);
    let s_half = FieldPulse::new(Transition::S, half, FRAC_PI_2);
    let p_xi = FieldPulse::new(Transition::P, xi1() * PI, 0.0);
    let s_xi = FieldPulse::new(Transition::S, xi2() * PI, FRAC_PI_2);
    let srs = Scheme::bare(ProtocolName::SrsPp).run(ErrorModel::EXACT)?;
    let rs = Scheme::bare(ProtocolName::Rs12).run(ErrorModel::EXACT)?;
    Ok(vec![
        (
            "Q(pi/2) L",
            single_propagator(&q, Chirality::L, ErrorModel::EXACT)?,
            reference::q_half_pi(Chirality::L),
        ),
        (
            "Q(pi/2) R",
            single_propagator(&q, Chirality::R, ErrorModel::EXACT)?,
            reference::q_half_pi(Chirality::R),
        ),
        (
            "[P(pi/sqrt2), iS(pi/sqrt2)]",
            raman_propagator(&p_half, &s_half, ErrorModel::EXACT)?,
            reference::raman_half_pi(),
        ),
        ("SRS_PP L", srs.propagator_l, reference::srs_pp_left()),
        ("SRS_PP R", srs.propagator_r, reference::srs_pp_right()),
        (
            "[P(xi1 pi), iS(xi2 pi)]",
            raman_propagator(&p_xi, &s_xi, ErrorModel::EXACT)?,
            reference::raman_xi1_xi2(),
        ),
        ("RS_12 L", rs.propagator_l, reference::rs_12_left()),
        ("RS_12 R", rs.propagator_r, reference::rs_12_right()),
    ])
}

pub fn fixture_suite(tracker: &mut UnitarityTracker) -> Result<SuiteReport> {
    let pairs = fixture_pairs()?;
    let mut worst = 0.0f64;
    for (_, computed, expected) in &pairs {
        tracker.observe(computed);
        worst = worst.max(computed.max_abs_diff(expected));
    }
    Ok(SuiteReport::new("fixtures", worst, FIXTURE_TOL, pairs.len()))
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1Row {
    pub protocol: ProtocolName,
    pub expected: (usize, usize),
    /// Most populated state at ε = 0 for (L, R).
    pub observed: (usize, usize),
    /// Population on the expected states for (L, R).
    pub populations: (f64, f64),
    pub passed: bool,
}

fn dominant_state(pops: [f64; 3]) -> usize {
    (0..3).max_by(|&a, &b| pops[a].total_cmp(&pops[b])).unwrap() + 1
}

/// All six protocols at ε = 0 with bare pulses.
pub fn table1(options: &CompileOptions, tracker: &mut UnitarityTracker) -> Result<Vec<Table1Row>> {
    builtin_protocols()
        .into_iter()
        .map(|p| {
            let r = Scheme::bare(p.name).with_options(*options).run(ErrorModel::EXACT)?;
            tracker.observe_run(&r);
            let (el, er) = p.final_state;
            let populations = (r.populations_l[el - 1], r.populations_r[er - 1]);
            let passed = (populations.0 - 1.0).abs() <= POPULATION_TOL && (populations.1 - 1.0).abs() <= POPULATION_TOL;
            Ok(Table1Row {
                protocol: p.name,
                expected: p.final_state,
                observed: (dominant_state(r.populations_l), dominant_state(r.populations_r)),
                populations,
                passed,
            })
        })
        .collect()
}

pub fn table1_suite(tracker: &mut UnitarityTracker) -> Result<SuiteReport> {
    let rows = table1(&CompileOptions::default(), tracker)?;
    let worst = rows
        .iter()
        .map(|r| (r.populations.0 - 1.0).abs().max((r.populations.1 - 1.0).abs()))
        .fold(0.0, f64::max);
    Ok(SuiteReport::new("table1", worst, POPULATION_TOL, rows.len()))
}

/// One random (protocol, templates, ε) draw.
pub fn random_scheme(rng: &mut impl Rng) -> (Scheme, ErrorModel) {
    use TemplateName::*;
    let protocol = *ProtocolName::ALL.choose(rng).unwrap();
    let q_template = *[Single, Cp1, Cp2, Bb1, Vr].choose(rng).unwrap();
    let raman_choices: &[TemplateName] = match protocol.protocol().family {
        Family::SingleRamanSingle => &[Single, Cp1, Cp2, Bb1, Vr],
        Family::RamanSingle => &[Single, TwoPi5, TwoPi9],
    };
    let raman_template = *raman_choices.choose(rng).unwrap();
    let pick = |rng: &mut dyn rand::RngCore| match rng.random_range(0..3) {
        0 => None,
        1 => Some(false),
        _ => Some(true),
    };
    let options = CompileOptions {
        q_reversed: pick(rng),
        raman_reversed: pick(rng),
        ..CompileOptions::default()
    };
    let eps = rng.random_range(-0.5..=0.5);
    (
        Scheme::new(protocol, q_template, raman_template).with_options(options),
        ErrorModel::new(eps),
    )
}

/// Analytic vs oracle agreement and slicing invariance on seeded random draws.
pub fn oracle_suites(seed: u64, trials: usize, tracker: &mut UnitarityTracker) -> Result<(SuiteReport, SuiteReport)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agreement = 0.0f64;
    let mut slicing = 0.0f64;
    for _ in 0..trials {
        let (scheme, err) = random_scheme(&mut rng);
        let analytic = scheme.run(err)?;
        tracker.observe_run(&analytic);
        let sliced: Vec<RunResult> = SLICE_COUNTS
            .iter()
            .map(|&n| {
                oracle_run(
                    &scheme,
                    err,
                    TimeGrid {
                        step_count: n,
                        duration: 1.0,
                    },
                )
            })
            .collect::<Result<_>>()?;
        for chi in Chirality::BOTH {
            let a = analytic.propagator(chi);
            let base = sliced[0].propagator(chi);
            tracker.observe(base);
            agreement = agreement.max(a.max_abs_diff(base));
            for other in &sliced[1..] {
                slicing = slicing.max(base.max_abs_diff(other.propagator(chi)));
            }
        }
    }
    Ok((
        SuiteReport::new("oracle-equivalence", agreement, ORACLE_TOL, trials),
        SuiteReport::new("slicing-invariance", slicing, SLICING_TOL, trials),
    ))
}

/// Residual of the resolution condition for the bare Q(π/2) [P, iS] Q(π/2)
/// protocol, both enantiomers.
pub fn residual_suite(tracker: &mut UnitarityTracker) -> Result<SuiteReport> {
    let scheme = Scheme::bare(ProtocolName::SrsPp);
    let mut worst = 0.0f64;
    for chi in Chirality::BOTH {
        let (uq, ur) = srs_components(&scheme, chi, ErrorModel::EXACT)?;
        tracker.observe(&uq);
        tracker.observe(&ur);
        let phases = extract_symmetry_phases(&uq, chi, &ur, BARE_PATTERN_TOL)?;
        worst = worst.max(resolution_residual(&phases));
    }
    Ok(SuiteReport::new("resolution-residual", worst, RESIDUAL_TOL, 2))
}

/// 0.98-contrast window widths on ε ∈ [−0.5, 0.5], 2001 points.
#[derive(Clone, Debug, Serialize)]
pub struct WindowReport {
    pub protocol: ProtocolName,
    pub q_template: TemplateName,
    pub raman_template: TemplateName,
    pub state: usize,
    pub width: f64,
}

pub const WINDOW_THRESHOLD: f64 = 0.98;
pub const WINDOW_POINTS: usize = 2001;

pub fn window_ordering() -> Result<Vec<WindowReport>> {
    use TemplateName::*;
    let mut out = Vec::new();
    for (protocol, raman_composite) in [(ProtocolName::SrsPp, None), (ProtocolName::Rs12, Some(TwoPi5))] {
        let state = protocol.protocol().discriminator_state();
        for q in [Single, Cp1, Cp2, Bb1] {
            let raman = if q == Single {
                Single
            } else {
                raman_composite.unwrap_or(q)
            };
            let scheme = Scheme::new(protocol, q, raman);
            let profile = analysis::sweep(&scheme, -0.5, 0.5, WINDOW_POINTS)?;
            let width = analysis::robustness_window(&profile, state, WINDOW_THRESHOLD)?;
            out.push(WindowReport {
                protocol,
                q_template: q,
                raman_template: raman,
                state,
                width,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_draws_are_seeded() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20).map(|_| random_scheme(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(42), draw(42));
        assert_ne!(draw(42), draw(43));
    }

    #[test]
    fn random_draws_compile() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let (scheme, _) = random_scheme(&mut rng);
            scheme.validate().unwrap();
        }
    }

    #[test]
    fn corrupted_s_phase_fails_table() {
        let mut t = UnitarityTracker::default();
        let bad = CompileOptions {
            s_phase_offset: 0.3 * std::f64::consts::PI,
            ..CompileOptions::default()
        };
        let rows = table1(&bad, &mut t).unwrap();
        assert!(rows.iter().any(|r| !r.passed));
        let good = table1(&CompileOptions::default(), &mut t).unwrap();
        assert!(good.iter().all(|r| r.passed));
    }
}
