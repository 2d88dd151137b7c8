//! Flat `key = value` configuration files with `#` comments.

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::admissibility::construct_admissible;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::frame::ScaleGrid;
use crate::harmonic::HarmonicCoefficients;
use crate::wavelet::{builtin, AxisymmetricProfile, DecayClass, Wavelet};

/// Test signal used by the transform commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalKind {
    /// Uniform random coefficients in the unit square, from `seed`.
    Random,
    Zero,
    /// `Y_0^0`.
    Y00,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Built-in name or `expr`.
    pub wavelet: String,
    pub expr: Option<String>,
    pub decay: DecayClass,
    /// When set, the wavelet is replaced by `w - D_alpha w / alpha`.
    pub admissible_alpha: Option<f64>,
    pub l_max: usize,
    pub b_min: f64,
    pub b_max: f64,
    pub b_nodes: usize,
    pub seed: u64,
    pub signal: SignalKind,
    pub signal_lmax: usize,
    pub checks: Vec<String>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            wavelet: "canonical".into(),
            expr: None,
            decay: DecayClass::Unknown,
            admissible_alpha: None,
            l_max: 32,
            b_min: ScaleGrid::DEFAULT_B_MIN,
            b_max: ScaleGrid::DEFAULT_B_MAX,
            b_nodes: ScaleGrid::DEFAULT_NODES,
            seed: 1,
            signal: SignalKind::Random,
            signal_lmax: 16,
            checks: crate::asymptotics::CHECK_NAMES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse(format!("bad value `{v}` for `{key}`")))
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut c = Config::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "wavelet" => c.wavelet = v.to_string(),
                "expr" => c.expr = Some(v.to_string()),
                "decay" => c.decay = DecayClass::parse(v)?,
                "admissible_alpha" => c.admissible_alpha = Some(num(k, v)?),
                "l_max" => c.l_max = num(k, v)?,
                "b_min" => c.b_min = num(k, v)?,
                "b_max" => c.b_max = num(k, v)?,
                "b_nodes" => c.b_nodes = num(k, v)?,
                "seed" => c.seed = num(k, v)?,
                "signal" => {
                    c.signal = match v {
                        "random" => SignalKind::Random,
                        "zero" => SignalKind::Zero,
                        "y00" => SignalKind::Y00,
                        other => return Err(Error::Parse(format!("unknown signal `{other}`"))),
                    }
                }
                "signal_lmax" => c.signal_lmax = num(k, v)?,
                "checks" => {
                    c.checks = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                    for name in &c.checks {
                        if !crate::asymptotics::CHECK_NAMES.contains(&name.as_str()) {
                            return Err(Error::Parse(format!("unknown check `{name}`")));
                        }
                    }
                }
                other => return Err(Error::Parse(format!("line {}: unknown key `{other}`", n + 1))),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Config> {
        Config::parse(&std::fs::read_to_string(path)?)
    }

    pub fn scale_grid(&self) -> Result<ScaleGrid> {
        ScaleGrid::new(self.b_min, self.b_max, self.b_nodes)
    }

    /// The configured wavelet.
    pub fn build_wavelet(&self) -> Result<Wavelet> {
        let base = if self.wavelet == "expr" {
            let src = self
                .expr
                .clone()
                .ok_or_else(|| Error::Parse("wavelet = expr needs an `expr` key".into()))?;
            let e = Expr::parse(&src)?;
            Wavelet::axisymmetric(AxisymmetricProfile::from_theta(
                src,
                move |t| Complex64::new(e.eval(t), 0.0),
                self.decay,
            ))
        } else {
            builtin::by_name(&self.wavelet).ok_or_else(|| {
                Error::Parse(format!(
                    "unknown wavelet `{}` (built-ins: {}, or expr)",
                    self.wavelet,
                    builtin::NAMES.join(", ")
                ))
            })?
        };
        match self.admissible_alpha {
            Some(alpha) => construct_admissible(&base, alpha),
            None => Ok(base),
        }
    }

    /// Coefficients of the configured test signal.
    pub fn signal_coefficients(&self) -> HarmonicCoefficients {
        let l = self.signal_lmax;
        let mut c = HarmonicCoefficients::zeros(l);
        match self.signal {
            SignalKind::Zero => {}
            SignalKind::Y00 => c.set(0, 0, Complex64::new(1.0, 0.0)),
            SignalKind::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                for v in &mut c.coeffs {
                    *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
        }
        c
    }
}
