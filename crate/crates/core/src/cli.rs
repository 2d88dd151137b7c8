//! Command-line front end: argument parsing and the five subcommands.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 upper-side failure
//! (fails-upper, non-convergence, flagged checks), 3 lower-side failure
//! (fails-lower, singular spectrum).

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::admissibility::{full_report, Verdict};
use crate::asymptotics::{verify_suite, CheckStatus};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::frame::{frame_spectrum, FrameSpectrum};
use crate::harmonic::{analyze, synthesize, HarmonicCoefficients};
use crate::sphere::SphericalGrid;
use crate::voice::{plancherel_check, reconstruct, voice_transform, VoiceField, VoiceMetadata};
use crate::wavelet::Wavelet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "sphwave", version, about = "Continuous wavelet frames on the two-sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Configuration file (`key = value` lines).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long = "lmax", global = true)]
    pub lmax: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub bmin: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub bmax: Option<f64>,
    #[arg(long, global = true)]
    pub bnodes: Option<usize>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "SPHWAVE_WORKERS")]
    pub workers: Option<usize>,
    /// Format of the table printed to stdout.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Admissibility report for the configured wavelet.
    Check,
    /// Frame spectrum G_l and frame bounds.
    Spectrum,
    /// Voice transform of the configured test signal.
    Transform,
    /// Reconstruction from a voice field, with the error against the signal.
    Reconstruct {
        /// Directory holding voice.json, voice.csv and signal.csv from `transform`.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Asymptotic verification checks.
    Verify,
}

/// Exit code and standard output of a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

impl Cli {
    /// Config file contents with command-line overrides applied.
    pub fn resolved_config(&self) -> Result<Config> {
        let mut c = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        if let Some(l) = self.lmax {
            c.l_max = l;
        }
        if let Some(b) = self.bmin {
            c.b_min = b;
        }
        if let Some(b) = self.bmax {
            c.b_max = b;
        }
        if let Some(n) = self.bnodes {
            c.b_nodes = n;
        }
        Ok(c)
    }
}

/// Exit code for an error that aborted a command.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } | Error::TailUnbounded(_) => 2,
        Error::SingularSpectrum { .. } => 3,
        _ => 1,
    }
}

fn write_file(out: Option<&Path>, name: &str, contents: &[u8]) -> Result<()> {
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

pub fn cmd_check(cfg: &Config, out: Option<&Path>) -> Result<Outcome> {
    let eta = cfg.build_wavelet()?;
    let report = full_report(&eta);
    let text = report.to_json() + "\n";
    write_file(out, "report.json", text.as_bytes())?;
    let code = match report.verdict {
        Verdict::AdmissibleCandidate => 0,
        Verdict::FailsUpper => 2,
        Verdict::FailsLower => 3,
    };
    Ok(Outcome { code, stdout: text })
}

fn reject_zero(eta: &Wavelet) -> Result<()> {
    if eta.modes().is_empty() || eta.norm_sq() == 0.0 {
        return Err(Error::Degenerate(format!("wavelet `{}` is identically zero", eta.label())));
    }
    Ok(())
}

fn spectrum_json(s: &FrameSpectrum) -> serde_json::Value {
    let mut v = s.summary_json();
    let max = s.g_values.iter().cloned().fold(0.0, f64::max);
    let singular: Vec<usize> = (0..s.g_values.len())
        .filter(|&l| !(s.g_values[l] > crate::frame::INVERTIBILITY_TOL * max) || max <= 0.0)
        .collect();
    v["flagged_degrees"] = json!(singular);
    v["invertibility_tolerance"] = json!(crate::frame::INVERTIBILITY_TOL);
    v
}

pub fn cmd_spectrum(cfg: &Config, out: Option<&Path>, format: Format) -> Result<Outcome> {
    let eta = cfg.build_wavelet()?;
    reject_zero(&eta)?;
    let s = frame_spectrum(&eta, cfg.l_max, &cfg.scale_grid()?)?;
    let mut csv = Vec::new();
    s.write_csv(&mut csv)?;
    let summary = pretty(&spectrum_json(&s));
    write_file(out, "spectrum.csv", &csv)?;
    write_file(out, "spectrum.json", summary.as_bytes())?;
    let stdout = match format {
        Format::Csv => String::from_utf8(csv).expect("utf8"),
        Format::Json => summary,
    };
    let code = if s.singular_degree().is_some() { 3 } else { 0 };
    Ok(Outcome { code, stdout })
}

struct Transformed {
    eta: Wavelet,
    signal: HarmonicCoefficients,
    field: VoiceField,
}

fn transform(cfg: &Config) -> Result<Transformed> {
    let eta = cfg.build_wavelet()?;
    let signal = cfg.signal_coefficients();
    let grid = SphericalGrid::for_band_limit(cfg.signal_lmax);
    let phi = synthesize(&signal, &grid);
    let field = voice_transform(&phi, &eta, &cfg.scale_grid()?)?;
    Ok(Transformed { eta, signal, field })
}

pub fn cmd_transform(cfg: &Config, out: Option<&Path>) -> Result<Outcome> {
    let t = transform(cfg)?;
    let spec = frame_spectrum(&t.eta, t.field.l_max, &cfg.scale_grid()?)?;
    let phi = synthesize(&t.signal, &t.field.grid);
    let p = plancherel_check(&t.field, &spec, &phi)?;
    if out.is_some() {
        let mut csv = Vec::new();
        t.field.write_csv(&mut csv)?;
        write_file(out, "voice.csv", &csv)?;
        write_file(out, "voice.json", pretty(&serde_json::to_value(t.field.metadata())?).as_bytes())?;
        let mut sig = Vec::new();
        t.signal.write_to(&mut sig)?;
        write_file(out, "signal.csv", &sig)?;
    }
    let v = json!({
        "wavelet": t.field.wavelet,
        "l_max": t.field.l_max,
        "samples": t.field.values.len(),
        "field_squared_norm": t.field.squared_norm(),
        "plancherel": p,
        "plancherel_tolerance": 0.01,
    });
    let code = if p.relative_gap <= 0.01 { 0 } else { 2 };
    Ok(Outcome { code, stdout: pretty(&v) })
}

/// Tolerance on the relative reconstruction error.
pub const RECONSTRUCTION_TOL: f64 = 1e-3;

pub fn cmd_reconstruct(cfg: &Config, input: Option<&Path>, out: Option<&Path>) -> Result<Outcome> {
    let eta = cfg.build_wavelet()?;
    let (field, signal) = match input {
        Some(dir) => {
            let meta: VoiceMetadata = serde_json::from_str(&fs::read_to_string(dir.join("voice.json"))?)?;
            let field = VoiceField::read_csv(&meta, BufReader::new(fs::File::open(dir.join("voice.csv"))?))?;
            let signal = HarmonicCoefficients::read_from(BufReader::new(fs::File::open(dir.join("signal.csv"))?))?;
            (field, signal)
        }
        None => {
            let t = transform(cfg)?;
            (t.field, t.signal)
        }
    };
    let scales = &field.scales;
    let spec = frame_spectrum(&eta, field.l_max, scales)?;
    let rec = reconstruct(&field, &eta, &spec)?;
    let phi = synthesize(&signal.truncated(field.l_max), &field.grid);
    let diff: Vec<_> = rec.values.iter().zip(&phi.values).map(|(a, b)| a - b).collect();
    let e = crate::sphere::SphericalGridFunction::from_samples(&field.grid, diff, None)?.norm();
    let n = phi.norm();
    let relative = if n > 0.0 { e / n } else { e };
    let coeffs = analyze(&rec, field.l_max)?;
    let mut csv = Vec::new();
    coeffs.write_to(&mut csv)?;
    write_file(out, "reconstruction.csv", &csv)?;
    let v = json!({
        "wavelet": field.wavelet,
        "l_max": field.l_max,
        "relative_l2_error": relative,
        "tolerance": RECONSTRUCTION_TOL,
    });
    write_file(out, "reconstruction.json", pretty(&v).as_bytes())?;
    let code = if relative <= RECONSTRUCTION_TOL { 0 } else { 2 };
    Ok(Outcome { code, stdout: pretty(&v) })
}

pub fn cmd_verify(cfg: &Config, out: Option<&Path>) -> Result<Outcome> {
    let eta = cfg.build_wavelet()?;
    let records = verify_suite(&eta, &cfg.checks)?;
    let text = pretty(&serde_json::to_value(&records)?);
    write_file(out, "verify.json", text.as_bytes())?;
    let code = if records.iter().any(|r| r.status == CheckStatus::Flag) { 2 } else { 0 };
    Ok(Outcome { code, stdout: text })
}

/// Runs the parsed command.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = cli.resolved_config()?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Check => cmd_check(&cfg, out),
        Command::Spectrum => cmd_spectrum(&cfg, out, cli.format),
        Command::Transform => cmd_transform(&cfg, out),
        Command::Reconstruct { input } => cmd_reconstruct(&cfg, input.as_deref(), out),
        Command::Verify => cmd_verify(&cfg, out),
    }
}
