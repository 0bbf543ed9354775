//! Golden robustness-window widths, computed through the oracle path.
//!
//! Regenerate with `cargo test -p chiral-core --test golden -- --ignored`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use chiral_core::analysis::{epsilon_grid, robustness_window, sweep_with};
use chiral_core::figures::panels;
use chiral_core::oracle::{oracle_run, TimeGrid};
use chiral_core::protocols::{ProtocolName, Scheme};
use chiral_core::pulsemodel::ErrorModel;

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/windows.json")
}

#[test]
#[ignore]
fn regenerate_golden() {
    let grid = epsilon_grid(-0.5, 0.5, 2001).unwrap();
    let mut widths = BTreeMap::new();
    for p in panels() {
        let profile = sweep_with(&p.scheme, &grid, |s, e| oracle_run(s, e, TimeGrid::default())).unwrap();
        widths.insert(
            p.name.to_string(),
            robustness_window(&profile, p.state, p.threshold).unwrap(),
        );
    }
    let p2 = oracle_run(
        &Scheme::bare(ProtocolName::SrsPp),
        ErrorModel::new(0.2),
        TimeGrid::default(),
    )
    .unwrap()
    .populations_l[1];
    let doc = serde_json::json!({
        "grid": { "eps_min": -0.5, "eps_max": 0.5, "n": 2001 },
        "windows": widths,
        "srs_pp_single_p2_left_at_eps_0.2": p2,
    });
    std::fs::write(golden_path(), serde_json::to_string_pretty(&doc).unwrap() + "\n").unwrap();
}

#[test]
fn golden_covers_every_panel() {
    let text = std::fs::read_to_string(golden_path()).expect("golden file present");
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    for p in panels() {
        assert!(doc["windows"][p.name].is_number(), "missing {}", p.name);
    }
}
