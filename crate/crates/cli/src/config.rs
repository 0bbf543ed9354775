//! Run configuration: an optional JSON file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use chiral_core::analysis::{DEFAULT_EPS_MAX, DEFAULT_EPS_MIN, DEFAULT_POINTS};
use chiral_core::composites::TemplateName;
use chiral_core::protocols::{CompileOptions, ProtocolName, Scheme};
use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub protocol: Option<String>,
    pub q_template: Option<String>,
    pub raman_template: Option<String>,
    pub epsilon: Option<f64>,
    pub sweep: Option<SweepSpec>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub q_reversed: Option<bool>,
    pub raman_reversed: Option<bool>,
    /// Units of π.
    pub s_phase: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}

/// Flags shared by every command that runs a scheme.
#[derive(Args, Debug, Default)]
pub struct SchemeArgs {
    /// JSON run configuration; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// SRS_PP, SRS_PM, SRS_MP, SRS_MM, RS_12 or RS_21.
    #[arg(long)]
    pub protocol: Option<String>,
    /// Composite on the Q pulses (SINGLE, CP1, CP2, BB1, VR).
    #[arg(long)]
    pub q_template: Option<String>,
    /// Composite on the Raman pair (SINGLE, CP1, CP2, BB1, VR, TWO_PI_5, TWO_PI_9).
    #[arg(long)]
    pub raman_template: Option<String>,
    /// Force forward (false) or reversed (true) Q composites.
    #[arg(long, value_name = "BOOL")]
    pub q_reversed: Option<bool>,
    /// Force forward (false) or reversed (true) Raman composites.
    #[arg(long, value_name = "BOOL")]
    pub raman_reversed: Option<bool>,
    /// Phase of S relative to P, in units of π [default: 0.5].
    #[arg(long, allow_hyphen_values = true)]
    pub s_phase: Option<f64>,
}

/// Output flags for commands that write data.
#[derive(Args, Debug, Default)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Destination file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub struct Resolved {
    pub config: RunConfig,
    pub scheme: Scheme,
}

fn parse<T: std::str::FromStr<Err = chiral_core::Error>>(s: &str) -> Result<T, CliError> {
    s.parse()
        .map_err(|e: chiral_core::Error| CliError::Usage(e.to_string()))
}

/// Merge the config file with flags and check every name, before any
/// computation happens.
pub fn resolve(args: &SchemeArgs) -> Result<Resolved, CliError> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    macro_rules! overlay {
        ($($f:ident),*) => { $( if args.$f.is_some() { cfg.$f = args.$f.clone(); } )* };
    }
    overlay!(
        protocol,
        q_template,
        raman_template,
        q_reversed,
        raman_reversed,
        s_phase
    );

    let protocol: ProtocolName = parse(cfg.protocol.as_deref().unwrap_or("SRS_PP"))?;
    let q: TemplateName = parse(cfg.q_template.as_deref().unwrap_or("SINGLE"))?;
    let raman: TemplateName = parse(cfg.raman_template.as_deref().unwrap_or("SINGLE"))?;
    let mut options = CompileOptions {
        q_reversed: cfg.q_reversed,
        raman_reversed: cfg.raman_reversed,
        ..Default::default()
    };
    if let Some(s) = cfg.s_phase {
        if !s.is_finite() {
            return Err(CliError::Usage(format!("--s-phase must be finite, got {s}")));
        }
        options.s_phase_offset = s * std::f64::consts::PI;
    }
    let scheme = Scheme::new(protocol, q, raman).with_options(options);
    scheme.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Resolved { config: cfg, scheme })
}

impl Resolved {
    pub fn overlay_output(&mut self, out: &OutputArgs) {
        if out.format.is_some() {
            self.config.format = out.format;
        }
        if out.output.is_some() {
            self.config.output = out.output.clone();
        }
    }

    pub fn epsilon(&mut self, flag: Option<f64>) -> Result<f64, CliError> {
        let eps = flag
            .or(self.config.epsilon)
            .ok_or_else(|| CliError::Usage("an error value is required (--eps or \"epsilon\" in the config)".into()))?;
        if !eps.is_finite() {
            return Err(CliError::Usage(format!("--eps must be finite, got {eps}")));
        }
        Ok(eps)
    }

    pub fn sweep_spec(&self, min: Option<f64>, max: Option<f64>, n: Option<usize>) -> SweepSpec {
        let base = self.config.sweep.unwrap_or(SweepSpec {
            min: DEFAULT_EPS_MIN,
            max: DEFAULT_EPS_MAX,
            n: DEFAULT_POINTS,
        });
        SweepSpec {
            min: min.unwrap_or(base.min),
            max: max.unwrap_or(base.max),
            n: n.unwrap_or(base.n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(
            &path,
            r#"{"protocol": "RS_12", "raman_template": "TWO_PI_5", "sweep": {"min": -0.1, "max": 0.1, "n": 5}}"#,
        )
        .unwrap();
        let args = SchemeArgs {
            config: Some(path),
            q_template: Some("cp1".into()),
            ..Default::default()
        };
        let r = resolve(&args).unwrap();
        assert_eq!(r.scheme.protocol, ProtocolName::Rs12);
        assert_eq!(r.scheme.q_template, TemplateName::Cp1);
        assert_eq!(r.scheme.raman_template, TemplateName::TwoPi5);
        assert_eq!(
            r.sweep_spec(None, Some(0.3), None),
            SweepSpec {
                min: -0.1,
                max: 0.3,
                n: 5
            }
        );
    }

    #[test]
    fn unknown_fields_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"protcol": "RS_12"}"#).unwrap();
        let args = SchemeArgs {
            config: Some(path),
            ..Default::default()
        };
        assert!(matches!(resolve(&args), Err(CliError::Usage(_))));
    }

    #[test]
    fn mismatched_template_rejected() {
        let args = SchemeArgs {
            raman_template: Some("TWO_PI_5".into()),
            ..Default::default()
        };
        assert!(matches!(resolve(&args), Err(CliError::Usage(_))));
    }
}
