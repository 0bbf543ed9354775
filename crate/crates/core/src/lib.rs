//! Chirality-dependent population transfer in a closed-loop three-state
//! system driven by resonant single pulses and Raman pulse pairs, with
//! composite-pulse substitution for robustness against pulse-area errors.
//!
//! The crate is organized bottom-up:
//!
//! * [`qmat`]: 3×3 complex matrices, Hermitian exponentials.
//! * [`pulsemodel`]: pulses, enantiomer sign convention, closed-form propagators.
//! * [`composites`]: composite templates and their Q / Raman substitution rules.
//! * [`protocols`]: the six resolution protocols, compilation and runs.
//! * [`analysis`]: ε sweeps, contrast, robustness windows, phase analysis.
//! * [`figures`]: the default sweep panels.
//! * [`oracle`]: independent piecewise-exact evolution.
//! * [`verification`]: self-check suites shared by the CLI and the tests.

pub mod analysis;
pub mod composites;
mod error;
pub mod figures;
pub mod oracle;
pub mod protocols;
pub mod pulsemodel;
pub mod qmat;
pub mod reference;
pub mod verification;

pub use error::{Error, Result};
