//! Wavelet carriers: latitude profiles and longitudinal mode sums.
//!
//! A profile `f(theta)` is stored through its stereographic image
//! `F(r) = 2r/(1+r^2) f(2 arctan r)`, in which dilation is the plain rescaling
//! `F(r/a)`. Profiles given in `theta` also keep the original evaluator.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{Evaluator, SphericalGrid, SphericalGridFunction};
use crate::stereo::LogRadialSamples;

/// Scalar function of one real variable.
pub type ScalarFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Declared decay of the stereographic image `F(r)` as `r -> infinity`,
/// used to bound integrals beyond the last radial panel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecayClass {
    /// `F(r) = 0` for `r > radius`.
    Compact { radius: f64 },
    /// `|F(r)|` decays like `exp(-rate r^2)` up to algebraic factors.
    SuperExponential { rate: f64 },
    /// `|F(r)| <= C r^{-order}`.
    Polynomial { order: f64 },
    Unknown,
}

impl DecayClass {
    fn rank(&self) -> u8 {
        match self {
            DecayClass::Compact { .. } => 0,
            DecayClass::SuperExponential { .. } => 1,
            DecayClass::Polynomial { .. } => 2,
            DecayClass::Unknown => 3,
        }
    }

    /// The weaker of two decay classes, as for a sum.
    pub fn weakest(self, other: DecayClass) -> DecayClass {
        use DecayClass::*;
        match (self, other) {
            (Compact { radius: a }, Compact { radius: b }) => Compact { radius: a.max(b) },
            (SuperExponential { rate: a }, SuperExponential { rate: b }) => {
                SuperExponential { rate: a.min(b) }
            }
            (Polynomial { order: a }, Polynomial { order: b }) => Polynomial { order: a.min(b) },
            (a, b) => {
                if a.rank() >= b.rank() {
                    a
                } else {
                    b
                }
            }
        }
    }

    /// Decay class of `F(r/a)`.
    pub fn dilated(self, a: f64) -> DecayClass {
        match self {
            DecayClass::Compact { radius } => DecayClass::Compact { radius: radius * a },
            DecayClass::SuperExponential { rate } => DecayClass::SuperExponential { rate: rate / (a * a) },
            other => other,
        }
    }

    /// Parses `compact:R`, `superexp:RATE`, `polynomial:ORDER` or `unknown`.
    pub fn parse(s: &str) -> Result<DecayClass> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("unknown") {
            return Ok(DecayClass::Unknown);
        }
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("decay class `{s}` needs the form kind:value")))?;
        let v: f64 = arg
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad decay parameter `{arg}`")))?;
        if !(v > 0.0) {
            return Err(Error::Parse(format!("decay parameter must be positive, got {v}")));
        }
        match kind.trim().to_ascii_lowercase().as_str() {
            "compact" => Ok(DecayClass::Compact { radius: v }),
            "superexp" | "super_exponential" => Ok(DecayClass::SuperExponential { rate: v }),
            "polynomial" | "poly" => Ok(DecayClass::Polynomial { order: v }),
            other => Err(Error::Parse(format!("unknown decay class `{other}`"))),
        }
    }
}

/// A latitude-only function on `[0, pi]`.
#[derive(Clone)]
pub struct AxisymmetricProfile {
    label: String,
    planar: ScalarFn,
    theta: Option<ScalarFn>,
    decay: DecayClass,
    /// `planar` is computed from `theta`, so it loses digits near the south pole.
    derived: bool,
}

impl std::fmt::Debug for AxisymmetricProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AxisymmetricProfile")
            .field("label", &self.label)
            .field("decay", &self.decay)
            .finish()
    }
}

/// `theta = 2 arctan(e^v)` without losing digits near either pole.
pub(crate) fn theta_of_log_radius(v: f64) -> f64 {
    if v > 0.0 {
        PI - 2.0 * (-v).exp().atan()
    } else {
        2.0 * v.exp().atan()
    }
}

pub(crate) fn sech(v: f64) -> f64 {
    let e = (-v.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

impl AxisymmetricProfile {
    /// Profile given by its value in `theta`.
    pub fn from_theta<F>(label: impl Into<String>, f: F, decay: DecayClass) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        let theta: ScalarFn = Arc::new(f);
        let t2 = theta.clone();
        let planar: ScalarFn = Arc::new(move |r: f64| {
            if r <= 0.0 {
                return ZERO;
            }
            let v = r.ln();
            t2(theta_of_log_radius(v)) * sech(v)
        });
        AxisymmetricProfile {
            label: label.into(),
            planar,
            theta: Some(theta),
            decay,
            derived: true,
        }
    }

    /// Profile given by its stereographic image `F(r)`.
    pub fn from_planar<F>(label: impl Into<String>, f: F, decay: DecayClass) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        AxisymmetricProfile {
            label: label.into(),
            planar: Arc::new(f),
            theta: None,
            decay,
            derived: false,
        }
    }

    /// Profile with both representations supplied; they must agree.
    pub fn from_both<F, G>(label: impl Into<String>, theta: F, planar: G, decay: DecayClass) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
        G: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        AxisymmetricProfile {
            label: label.into(),
            planar: Arc::new(planar),
            theta: Some(Arc::new(theta)),
            decay,
            derived: false,
        }
    }

    pub fn zero() -> Self {
        AxisymmetricProfile::from_both("zero", |_| ZERO, |_| ZERO, DecayClass::Compact { radius: 0.0 })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn decay(&self) -> DecayClass {
        self.decay
    }

    /// Whether `F` is obtained by evaluating the profile in `theta`.
    pub fn planar_is_derived(&self) -> bool {
        self.derived
    }

    /// Value at colatitude `theta`.
    pub fn eval(&self, theta: f64) -> Complex64 {
        if let Some(f) = &self.theta {
            return f(theta);
        }
        let t = theta.clamp(1e-150, PI);
        let r = (0.5 * t).tan();
        let s = t.sin().max(1e-300);
        (self.planar)(r) / s
    }

    /// Stereographic image `F(r)`.
    pub fn planar(&self, r: f64) -> Complex64 {
        (self.planar)(r)
    }

    /// `F(e^v)`.
    pub fn log_radial(&self, v: f64) -> Complex64 {
        (self.planar)(v.exp())
    }

    /// `D_a f`, via `F(r/a)`.
    pub fn dilated(&self, a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Domain(format!("dilation parameter must be positive, got {a}")));
        }
        let p = self.planar.clone();
        let inv = 1.0 / a;
        Ok(AxisymmetricProfile {
            label: format!("D_{a}({})", self.label),
            planar: Arc::new(move |r| p(r * inv)),
            theta: None,
            decay: self.decay.dilated(a),
            derived: self.derived,
        })
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let p = self.planar.clone();
        let t = self.theta.clone();
        AxisymmetricProfile {
            label: format!("({c})*{}", self.label),
            planar: Arc::new(move |r| c * p(r)),
            theta: t.map(|t| -> ScalarFn { Arc::new(move |x| c * t(x)) }),
            decay: self.decay,
            derived: self.derived,
        }
    }

    /// `self + c * other`.
    pub fn plus_scaled(&self, c: Complex64, other: &AxisymmetricProfile) -> Self {
        let (p, q) = (self.planar.clone(), other.planar.clone());
        let theta = match (&self.theta, &other.theta) {
            (Some(f), Some(g)) => {
                let (f, g) = (f.clone(), g.clone());
                Some(Arc::new(move |x| f(x) + c * g(x)) as ScalarFn)
            }
            _ => None,
        };
        AxisymmetricProfile {
            label: format!("{} + ({c})*{}", self.label, other.label),
            planar: Arc::new(move |r| p(r) + c * q(r)),
            theta,
            decay: self.decay.weakest(other.decay),
            derived: self.derived || other.derived,
        }
    }
}

/// One longitudinal mode `f_m(theta) e^{i m phi}`.
#[derive(Debug, Clone)]
pub struct Mode {
    pub m: i64,
    pub profile: AxisymmetricProfile,
}

/// A wavelet `eta(theta, phi) = sum_m f_m(theta) e^{i m phi}`.
#[derive(Debug, Clone)]
pub struct Wavelet {
    label: String,
    modes: Vec<Mode>,
}

impl Wavelet {
    pub fn new(label: impl Into<String>, modes: Vec<Mode>) -> Self {
        let mut merged: Vec<Mode> = Vec::new();
        for mode in modes {
            if let Some(existing) = merged.iter_mut().find(|x| x.m == mode.m) {
                existing.profile = existing.profile.plus_scaled(Complex64::new(1.0, 0.0), &mode.profile);
            } else {
                merged.push(mode);
            }
        }
        merged.sort_by_key(|x| x.m);
        Wavelet {
            label: label.into(),
            modes: merged,
        }
    }

    pub fn axisymmetric(profile: AxisymmetricProfile) -> Self {
        let label = profile.label().to_string();
        Wavelet::new(label, vec![Mode { m: 0, profile }])
    }

    pub fn zero() -> Self {
        Wavelet::new("zero", Vec::new())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn mode(&self, m: i64) -> Option<&AxisymmetricProfile> {
        self.modes.iter().find(|x| x.m == m).map(|x| &x.profile)
    }

    pub fn max_abs_m(&self) -> usize {
        self.modes.iter().map(|x| x.m.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Whether some mode's `F` is computed from its `theta` form.
    pub fn planar_is_derived(&self) -> bool {
        self.modes.iter().any(|x| x.profile.planar_is_derived())
    }

    pub fn is_axisymmetric(&self) -> bool {
        self.modes.iter().all(|x| x.m == 0)
    }

    pub fn decay(&self) -> DecayClass {
        self.modes
            .iter()
            .map(|x| x.profile.decay())
            .fold(DecayClass::Compact { radius: 0.0 }, DecayClass::weakest)
    }

    pub fn eval(&self, theta: f64, phi: f64) -> Complex64 {
        self.modes
            .iter()
            .map(|x| x.profile.eval(theta) * Complex64::from_polar(1.0, x.m as f64 * phi))
            .sum()
    }

    /// `(Theta eta)(r, phi)`.
    pub fn planar(&self, r: f64, phi: f64) -> Complex64 {
        self.modes
            .iter()
            .map(|x| x.profile.planar(r) * Complex64::from_polar(1.0, x.m as f64 * phi))
            .sum()
    }

    pub fn evaluator(&self) -> Evaluator {
        let w = self.clone();
        Arc::new(move |t, p| w.eval(t, p))
    }

    /// Longitudinal average: the `m = 0` mode.
    pub fn eta_tilde(&self) -> AxisymmetricProfile {
        self.mode(0).cloned().unwrap_or_else(AxisymmetricProfile::zero)
    }

    pub fn dilated(&self, a: f64) -> Result<Self> {
        let modes = self
            .modes
            .iter()
            .map(|x| Ok(Mode { m: x.m, profile: x.profile.dilated(a)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Wavelet::new(format!("D_{a}({})", self.label), modes))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let modes = self
            .modes
            .iter()
            .map(|x| Mode { m: x.m, profile: x.profile.scaled(c) })
            .collect();
        Wavelet::new(format!("({c})*{}", self.label), modes)
    }

    /// `self + c * other`.
    pub fn plus_scaled(&self, c: Complex64, other: &Wavelet) -> Self {
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().map(|x| Mode { m: x.m, profile: x.profile.scaled(c) }));
        Wavelet::new(format!("{} + ({c})*{}", self.label, other.label), modes)
    }

    /// `||eta||^2` on the sphere, via the log-radial form of each mode.
    pub fn norm_sq(&self) -> f64 {
        self.modes
            .iter()
            .map(|x| {
                let s = LogRadialSamples::from_profile(&x.profile, LogRadialSamples::DEFAULT_STEP);
                2.0 * PI * s.norm_sq()
            })
            .sum()
    }

    pub fn to_grid(&self, grid: &SphericalGrid) -> SphericalGridFunction {
        SphericalGridFunction::from_evaluator(grid, self.evaluator())
    }
}

/// Built-in wavelets.
pub mod builtin {
    use super::*;
    use crate::admissibility::construct_admissible;

    /// `sin^2(theta) exp(-tan^2(theta/2))`.
    pub fn seed() -> Wavelet {
        let p = AxisymmetricProfile::from_both(
            "seed",
            |t: f64| {
                let s = t.sin();
                let h = (0.5 * t).tan();
                Complex64::new(s * s * (-h * h).exp(), 0.0)
            },
            |r: f64| {
                let q = 1.0 + r * r;
                Complex64::new(8.0 * r * r * r * (-r * r).exp() / (q * q * q), 0.0)
            },
            DecayClass::SuperExponential { rate: 1.0 },
        );
        Wavelet::axisymmetric(p)
    }

    /// `seed - 1/2 D_2 seed`.
    pub fn canonical() -> Wavelet {
        construct_admissible(&seed(), 2.0)
            .expect("alpha = 2 is admissible")
            .with_label("canonical")
    }

    pub fn constant() -> Wavelet {
        let p = AxisymmetricProfile::from_both(
            "constant",
            |_| Complex64::new(1.0, 0.0),
            |r: f64| Complex64::new(2.0 * r / (1.0 + r * r), 0.0),
            DecayClass::Polynomial { order: 1.0 },
        );
        Wavelet::axisymmetric(p)
    }

    /// Smooth bump in `ln tan(theta/2)`, supported in `r in (1/e, e)`.
    pub(crate) fn bump_log_radius(v: f64) -> f64 {
        if v.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - v * v)).exp()
        }
    }

    /// `f(theta) cos(phi)` with `f` a compactly supported bump: zero longitudinal average.
    pub fn cosphi() -> Wavelet {
        let half = AxisymmetricProfile::from_planar(
            "bump/2",
            |r: f64| {
                if r <= 0.0 {
                    return ZERO;
                }
                Complex64::new(0.5 * bump_log_radius(r.ln()), 0.0)
            },
            DecayClass::Compact { radius: std::f64::consts::E },
        );
        Wavelet::new(
            "cosphi",
            vec![
                Mode { m: -1, profile: half.clone() },
                Mode { m: 1, profile: half },
            ],
        )
    }

    pub const NAMES: [&str; 5] = ["canonical", "seed", "constant", "cosphi", "zero"];

    pub fn by_name(name: &str) -> Option<Wavelet> {
        match name {
            "canonical" => Some(canonical()),
            "seed" => Some(seed()),
            "constant" => Some(constant()),
            "cosphi" => Some(cosphi()),
            "zero" => Some(Wavelet::zero()),
            _ => None,
        }
    }
}
