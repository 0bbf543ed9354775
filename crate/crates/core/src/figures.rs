//! The default sweep panels: ε profiles of the bare protocols next to their
//! composite-pulse versions.

use crate::composites::TemplateName::{self, *};
use crate::protocols::{ProtocolName, Scheme};

/// Contrast threshold used for constant-rotation panels.
pub const CONSTANT_THRESHOLD: f64 = 0.98;
/// Contrast threshold used for variable-rotation panels.
pub const VARIABLE_THRESHOLD: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Panel {
    /// File stem, e.g. `fig4_cp1`.
    pub name: &'static str,
    pub scheme: Scheme,
    /// 1-based state whose population the panel plots.
    pub state: usize,
    pub threshold: f64,
}

fn panel(name: &'static str, protocol: ProtocolName, q: TemplateName, raman: TemplateName, threshold: f64) -> Panel {
    let state = protocol.protocol().discriminator_state();
    Panel {
        name,
        scheme: Scheme::new(protocol, q, raman),
        state,
        threshold,
    }
}

/// All panels, in output order.
///
/// * fig4: three-step protocol, constant-rotation composites on every pulse.
/// * fig5: two-step protocol, TWO_PI_5 on the Raman pair and a constant
///   π/2 composite on Q.
/// * fig6: three-step protocol with the variable-rotation composite, once on
///   the Q pulses only (`vr_q`) and once also on the Raman pair (`vr_full`,
///   Raman segments reversed).
/// * fig7: two-step protocol, reversed variable-rotation Q composite and
///   TWO_PI_5 on the Raman pair.
pub fn panels() -> Vec<Panel> {
    use ProtocolName::{Rs12, SrsPp};
    let (c, v) = (CONSTANT_THRESHOLD, VARIABLE_THRESHOLD);
    vec![
        panel("fig4_single", SrsPp, Single, Single, c),
        panel("fig4_cp1", SrsPp, Cp1, Cp1, c),
        panel("fig4_cp2", SrsPp, Cp2, Cp2, c),
        panel("fig4_bb1", SrsPp, Bb1, Bb1, c),
        panel("fig5_single", Rs12, Single, Single, c),
        panel("fig5_cp1", Rs12, Cp1, TwoPi5, c),
        panel("fig5_cp2", Rs12, Cp2, TwoPi5, c),
        panel("fig5_bb1", Rs12, Bb1, TwoPi5, c),
        panel("fig6_single", SrsPp, Single, Single, v),
        panel("fig6_vr_q", SrsPp, Vr, Single, v),
        panel("fig6_vr_full", SrsPp, Vr, Vr, v),
        panel("fig7_single", Rs12, Single, Single, v),
        panel("fig7_vr", Rs12, Vr, TwoPi5, v),
    ]
}

pub fn panel_by_name(name: &str) -> Option<Panel> {
    panels().into_iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulsemodel::ErrorModel;

    #[test]
    fn every_panel_compiles() {
        let all = panels();
        assert_eq!(all.len(), 13);
        for p in &all {
            p.scheme.compile(ErrorModel::EXACT).unwrap();
        }
        assert_eq!(panel_by_name("fig5_cp2").unwrap().state, 3);
        assert_eq!(panel_by_name("fig4_single").unwrap().state, 2);
        assert!(panel_by_name("fig9").is_none());
    }
}
