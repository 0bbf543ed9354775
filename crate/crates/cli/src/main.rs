//! `chiral`: run chirality-resolving pulse protocols from the command line.

mod config;
mod output;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use chiral_core::analysis::{
    self, epsilon_grid, extract_symmetry_phases, resolution_residual, srs_components, COMPOSITE_PATTERN_TOL,
};
use chiral_core::composites::TemplateName;
use chiral_core::figures::panels;
use chiral_core::protocols::{CompileOptions, ProtocolName, Scheme};
use chiral_core::pulsemodel::{Chirality, ErrorModel};
use chiral_core::qmat::unitarity_defect;
use chiral_core::verification::{self, SuiteReport, UnitarityTracker};
use clap::{Parser, Subcommand};

use config::{Format, OutputArgs, SchemeArgs};
use output::{check_destination, emit, render_matrix, write_atomic};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl From<chiral_core::Error> for CliError {
    fn from(e: chiral_core::Error) -> Self {
        match e {
            chiral_core::Error::PatternMismatch { .. } => CliError::Verification(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "chiral",
    version,
    about = "Enantiomer-selective population transfer in a three-state loop"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print both enantiomers' propagators at one error value.
    Propagator {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Relative pulse-area error ε.
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Final populations over a grid of error values.
    Sweep {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, allow_hyphen_values = true)]
        eps_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        eps_max: Option<f64>,
        /// Number of grid points.
        #[arg(short, long)]
        n: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Final states of the six bare protocols at ε = 0.
    Table1 {
        /// Phase of S relative to P, in units of π.
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
        s_phase: f64,
    },
    /// Run the self-check suites.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Write one CSV per figure panel into a directory.
    Figures {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value_t = -0.5)]
        eps_min: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
        eps_max: f64,
        #[arg(short, long, default_value_t = 2001)]
        n: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Propagator { scheme, eps, out } => cmd_propagator(&scheme, eps, &out),
        Command::Sweep {
            scheme,
            eps_min,
            eps_max,
            n,
            out,
        } => cmd_sweep(&scheme, eps_min, eps_max, n, &out),
        Command::Table1 { s_phase } => cmd_table1(s_phase),
        Command::Verify { seed, trials } => cmd_verify(seed, trials),
        Command::Figures {
            dir,
            eps_min,
            eps_max,
            n,
        } => cmd_figures(&dir, eps_min, eps_max, n),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Io(m) => eprintln!("I/O error: {m}"),
                CliError::Verification(m) => eprintln!("verification failed: {m}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn scheme_label(s: &Scheme) -> String {
    format!("{} (Q: {}, Raman: {})", s.protocol, s.q_template, s.raman_template)
}

fn cmd_propagator(args: &SchemeArgs, eps: Option<f64>, out: &OutputArgs) -> Result<(), CliError> {
    let mut r = config::resolve(args)?;
    r.overlay_output(out);
    let eps = r.epsilon(eps)?;
    check_destination(r.config.output.as_deref())?;
    let run = r.scheme.run(ErrorModel::new(eps))?;
    let text = match r.config.format.unwrap_or_default() {
        Format::Csv => {
            let mut s = format!("{}, eps = {eps}\n", scheme_label(&r.scheme));
            for chi in Chirality::BOTH {
                let u = run.propagator(chi);
                s.push_str(&render_matrix(&format!("U({chi:?})"), u));
                let _ = writeln!(s, "  unitarity defect: {:.3e}", unitarity_defect(u));
            }
            s
        }
        Format::Json => {
            let matrix = |chi| {
                let u = run.propagator(chi);
                serde_json::json!({
                    "re": u.rows().map(|row| row.map(|z| z.re)),
                    "im": u.rows().map(|row| row.map(|z| z.im)),
                    "unitarity_defect": unitarity_defect(u),
                })
            };
            let doc = serde_json::json!({
                "scheme": r.scheme,
                "epsilon": eps,
                "L": matrix(Chirality::L),
                "R": matrix(Chirality::R),
            });
            serde_json::to_string_pretty(&doc).unwrap() + "\n"
        }
    };
    emit(r.config.output.as_deref(), &text)
}

fn cmd_sweep(
    args: &SchemeArgs,
    eps_min: Option<f64>,
    eps_max: Option<f64>,
    n: Option<usize>,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let mut r = config::resolve(args)?;
    r.overlay_output(out);
    let spec = r.sweep_spec(eps_min, eps_max, n);
    // Grid errors are usage errors; report them before computing anything.
    epsilon_grid(spec.min, spec.max, spec.n)?;
    check_destination(r.config.output.as_deref())?;
    let profile = analysis::sweep(&r.scheme, spec.min, spec.max, spec.n)?;
    let text = match r.config.format.unwrap_or_default() {
        Format::Csv => profile.to_csv(),
        Format::Json => serde_json::to_string_pretty(&profile).unwrap() + "\n",
    };
    emit(r.config.output.as_deref(), &text)
}

fn cmd_table1(s_phase: f64) -> Result<(), CliError> {
    if !s_phase.is_finite() {
        return Err(CliError::Usage(format!("--s-phase must be finite, got {s_phase}")));
    }
    let options = CompileOptions {
        s_phase_offset: s_phase * std::f64::consts::PI,
        ..Default::default()
    };
    let rows = verification::table1(&options, &mut UnitarityTracker::default())?;
    println!(
        "{:<8} {:>10} {:>10} {:>14} {:>14}  result",
        "protocol", "expect L/R", "final L/R", "P_L", "P_R"
    );
    for row in &rows {
        println!(
            "{:<8} {:>10} {:>10} {:>14.12} {:>14.12}  {}",
            row.protocol.as_str(),
            format!("|{}>/|{}>", row.expected.0, row.expected.1),
            format!("|{}>/|{}>", row.observed.0, row.observed.1),
            row.populations.0,
            row.populations.1,
            if row.passed { "PASS" } else { "FAIL" }
        );
    }
    let failed = rows.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::Verification(format!(
            "{failed} of {} protocols missed their final state",
            rows.len()
        )));
    }
    Ok(())
}

fn print_suite(s: &SuiteReport) {
    println!(
        "{:<20} {:>6} {:>12.3e} {:>10.0e}  {}",
        s.name,
        s.cases,
        s.max_deviation,
        s.tolerance,
        if s.passed { "PASS" } else { "FAIL" }
    );
}

/// Largest resolution residual of the VR three-step scheme over |ε| ≤ 0.2.
fn vr_residual() -> Result<f64, CliError> {
    let scheme = Scheme::new(ProtocolName::SrsPp, TemplateName::Vr, TemplateName::Vr);
    let mut worst = 0.0f64;
    for eps in epsilon_grid(-0.2, 0.2, 41)? {
        for chi in Chirality::BOTH {
            let (uq, ur) = srs_components(&scheme, chi, ErrorModel::new(eps))?;
            let ph = extract_symmetry_phases(&uq, chi, &ur, COMPOSITE_PATTERN_TOL)?;
            worst = worst.max(resolution_residual(&ph));
        }
    }
    Ok(worst)
}

fn cmd_verify(seed: u64, trials: usize) -> Result<(), CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let mut tracker = UnitarityTracker::default();
    let fixtures = verification::fixture_suite(&mut tracker)?;
    let table = verification::table1_suite(&mut tracker)?;
    let (agreement, slicing) = verification::oracle_suites(seed, trials, &mut tracker)?;
    let residual = verification::residual_suite(&mut tracker)?;
    let unitarity = tracker.report();
    let suites = [fixtures, table, agreement, slicing, residual, unitarity];

    println!("seed {seed}, {trials} trials");
    println!(
        "{:<20} {:>6} {:>12} {:>10}  result",
        "suite", "cases", "max dev", "tolerance"
    );
    for s in &suites {
        print_suite(s);
    }

    println!(
        "\nrobustness windows (contrast ≥ {}, {} points on [-0.5, 0.5])",
        verification::WINDOW_THRESHOLD,
        verification::WINDOW_POINTS
    );
    let windows = verification::window_ordering()?;
    let mut ordering_ok = true;
    for chunk in windows.chunks(4) {
        let w: Vec<f64> = chunk.iter().map(|r| r.width).collect();
        let ok = w[0] < w[1] && w[1] < w[2] && w[3] > w[0] && w[3] >= w[1];
        ordering_ok &= ok;
        let cells: Vec<String> = chunk
            .iter()
            .map(|r| format!("{} {:.4}", r.q_template, r.width))
            .collect();
        println!(
            "  {:<7} state {}: {}  ordering {}",
            chunk[0].protocol.as_str(),
            chunk[0].state,
            cells.join("  "),
            if ok { "PASS" } else { "FAIL" }
        );
    }

    println!(
        "\nVR resolution residual over |eps| <= 0.2: {:.4} rad (informational)",
        vr_residual()?
    );

    let failed: Vec<&str> = suites.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect();
    if !failed.is_empty() || !ordering_ok {
        let mut names = failed.join(", ");
        if !ordering_ok {
            names.push_str(if names.is_empty() {
                "window ordering"
            } else {
                ", window ordering"
            });
        }
        return Err(CliError::Verification(names));
    }
    Ok(())
}

fn cmd_figures(dir: &std::path::Path, eps_min: f64, eps_max: f64, n: usize) -> Result<(), CliError> {
    let grid = epsilon_grid(eps_min, eps_max, n)?;
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    for panel in panels() {
        let profile = analysis::sweep_with(&panel.scheme, &grid, |s, e| s.run(e))?;
        let path = dir.join(format!("{}.csv", panel.name));
        write_atomic(&path, &profile.to_csv())?;
        println!("{}  {}", path.display(), scheme_label(&panel.scheme));
    }
    Ok(())
}
