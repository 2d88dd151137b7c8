//! Admissibility conditions on candidate wavelets, and the difference-of-dilations
//! constructor.
//!
//! The singular sphere integrals are evaluated as planar integrals of `Theta eta`:
//! `int |eta|/(1+cos theta) dSigma = iint |Theta eta| dr dphi` and the same with
//! an extra `r^2` for the second condition.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{Evaluator, SphericalGridFunction};
use crate::stereo::{planar_moments_with, radial_moment, PlaneFunction, PlaneMeasure, RadialQuadrature};
use crate::stereo::plane_integral;
use crate::wavelet::{sech, AxisymmetricProfile, DecayClass, Wavelet};

/// Tolerances behind the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityTolerances {
    /// `|I| <= cancellation_rel * c_integrable_1` counts as cancellation.
    pub cancellation_rel: f64,
    /// `||eta~|| >= nondegeneracy_rel * ||eta||` counts as nondegenerate.
    pub nondegeneracy_rel: f64,
    /// Radial cutoff of the planar quadrature.
    pub r_max: f64,
}

impl Default for AdmissibilityTolerances {
    fn default() -> Self {
        AdmissibilityTolerances {
            cancellation_rel: 1e-6,
            nondegeneracy_rel: 1e-8,
            r_max: RadialQuadrature::DEFAULT_R_MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    AdmissibleCandidate,
    FailsUpper,
    FailsLower,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::AdmissibleCandidate => "admissible-candidate",
            Verdict::FailsUpper => "fails-upper",
            Verdict::FailsLower => "fails-lower",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Non-finite reals travel through JSON as `null` and come back as `+inf`.
mod extended {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Bounds on the neglected radial tails beyond `r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TailBounds {
    #[serde(with = "extended")]
    pub c_integrable_1: f64,
    #[serde(with = "extended")]
    pub c_integrable_2: f64,
    #[serde(with = "extended")]
    pub cancellation: f64,
}

/// Weighted sup with its finiteness flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupCondition {
    #[serde(with = "extended")]
    pub value: f64,
    pub finite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub wavelet: String,
    #[serde(with = "extended")]
    pub c_integrable_1: f64,
    #[serde(with = "extended")]
    pub c_integrable_2: f64,
    pub c_sup: SupCondition,
    /// `None` when the integral could not be bounded.
    pub cancellation: Option<Complex64>,
    #[serde(with = "extended")]
    pub cancellation_abs: f64,
    pub eta_tilde_norm: f64,
    pub eta_norm: f64,
    pub eta_tilde_nonzero: bool,
    pub verdict: Verdict,
    pub tolerances: AdmissibilityTolerances,
    pub tail_bounds: TailBounds,
    pub notes: Vec<String>,
}

impl AdmissibilityReport {
    /// The verdict implied by the other fields.
    pub fn decide(&self) -> Verdict {
        let tol = &self.tolerances;
        let upper_bad = !self.c_integrable_1.is_finite()
            || !self.c_integrable_2.is_finite()
            || !self.c_sup.finite
            || !self.cancellation_abs.is_finite()
            || self.cancellation_abs > tol.cancellation_rel * self.c_integrable_1;
        if upper_bad {
            return Verdict::FailsUpper;
        }
        if !(self.eta_norm > 0.0) || self.eta_tilde_norm < tol.nondegeneracy_rel * self.eta_norm {
            return Verdict::FailsLower;
        }
        Verdict::AdmissibleCandidate
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `theta` past which `eta^[1]` is evaluated through the planar form.
const SOUTH_SWITCH: f64 = PI - 0.5;

/// `eta / (1 + cos theta)`; near the south pole `(1+r^2)^2 F / (4r)`, i.e. `r cosh^2(u) F`.
pub fn eta_one(eta: &Wavelet) -> Evaluator {
    let w = eta.clone();
    Arc::new(move |t, p| {
        if t < SOUTH_SWITCH {
            w.eval(t, p) / (1.0 + t.cos())
        } else {
            let r = (0.5 * t).tan();
            let c = 1.0 / sech(r.ln());
            w.planar(r, p) * (r * c * c)
        }
    })
}

/// `eta^[1] tan^2(theta/2)`.
pub fn eta_two(eta: &Wavelet) -> Evaluator {
    let one = eta_one(eta);
    Arc::new(move |t, p| {
        let h = (0.5 * t).tan();
        one(t, p) * (h * h)
    })
}

/// Longitudinal average of a wavelet: its `m = 0` mode.
pub fn eta_tilde(eta: &Wavelet) -> AxisymmetricProfile {
    eta.eta_tilde()
}

/// Longitudinal average of a sampled function, one value per grid row.
pub fn eta_tilde_samples(f: &SphericalGridFunction) -> Vec<Complex64> {
    let n = f.grid.n_phi;
    f.values
        .chunks(n)
        .map(|row| row.iter().sum::<Complex64>() / n as f64)
        .collect()
}

/// Longitudinal average of a sampled function as a profile, using its resampler and
/// the grid's longitude nodes. Exact for band limits below `n_phi`.
pub fn eta_tilde_grid(f: &SphericalGridFunction) -> Result<AxisymmetricProfile> {
    let ev = f.resampler()?;
    let n = f.grid.n_phi;
    Ok(AxisymmetricProfile::from_theta(
        "average",
        move |t| (0..n).map(|j| ev(t, 2.0 * PI * j as f64 / n as f64)).sum::<Complex64>() / n as f64,
        DecayClass::Unknown,
    ))
}

fn quadrature(r_max: f64) -> RadialQuadrature {
    RadialQuadrature::new(r_max, 200)
}

/// Longitude nodes adequate for the mode content of `eta`.
fn phi_nodes(eta: &Wavelet) -> usize {
    if eta.is_axisymmetric() {
        1
    } else {
        (16 * (eta.max_abs_m() + 1)).max(64)
    }
}

/// Zeros of a profile whose values share one phase, located by sign changes on a
/// log-spaced scan and bisection. `|F|` has a kink at each of them.
fn real_zeros(p: &AxisymmetricProfile, r_max: f64) -> Vec<f64> {
    let n = 4000;
    let (lo, hi) = (1e-6f64.ln(), r_max.ln());
    let rs: Vec<f64> = (0..=n).map(|j| (lo + (hi - lo) * j as f64 / n as f64).exp()).collect();
    let vals: Vec<Complex64> = rs.iter().map(|&r| p.planar(r)).collect();
    let Some(peak) = vals.iter().cloned().max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap()) else {
        return Vec::new();
    };
    if !(peak.norm() > 0.0) {
        return Vec::new();
    }
    let phase = peak.conj() / peak.norm();
    if vals.iter().any(|v| (v * phase).im.abs() > 1e-12 * peak.norm()) {
        return Vec::new();
    }
    let re = |r: f64| (p.planar(r) * phase).re;
    let mut zeros = Vec::new();
    for j in 0..n {
        let (fa, fb) = ((vals[j] * phase).re, (vals[j + 1] * phase).re);
        if fa == 0.0 || fa * fb >= 0.0 {
            continue;
        }
        let (mut a, mut b, mut sa) = (rs[j], rs[j + 1], fa.signum());
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = re(m);
            if fm.signum() == sa {
                a = m;
                sa = fm.signum();
            } else {
                b = m;
            }
        }
        zeros.push(0.5 * (a + b));
    }
    zeros
}

fn abs_planar_integral(eta: &Wavelet, k: i32, r_max: f64) -> Result<(f64, f64)> {
    let q = quadrature(r_max);
    if eta.modes().is_empty() {
        return Ok((0.0, 0.0));
    }
    if eta.is_axisymmetric() {
        let p = eta.mode(0).unwrap();
        let q = q.with_breakpoints(&real_zeros(p, r_max));
        let m = radial_moment(|r| Complex64::new(p.planar(r).norm(), 0.0), k, p.decay(), &q)?;
        return Ok((2.0 * PI * m.value.re, 2.0 * PI * m.tail_bound));
    }
    let w = eta.clone();
    let f = PlaneFunction::new(
        move |r, phi| Complex64::new(w.planar(r, phi).norm() * r.powi(k), 0.0),
        eta.decay(),
    );
    // tail bounds for the modulus: sum of the per-mode bounds
    let mut tail = 0.0;
    for mode in eta.modes() {
        let p = &mode.profile;
        tail += 2.0 * PI * radial_moment(|r| p.planar(r), k, p.decay(), &q)?.tail_bound;
    }
    let v = plane_integral(&f, PlaneMeasure::HalfPlane, phi_nodes(eta), &q)?;
    Ok((v.value.re, tail))
}

/// `int |eta^[1]| dSigma`, with the tail bound.
pub fn c_integrable_1(eta: &Wavelet) -> Result<f64> {
    Ok(abs_planar_integral(eta, 0, RadialQuadrature::DEFAULT_R_MAX)?.0)
}

/// `int |eta^[2]| dSigma`.
pub fn c_integrable_2(eta: &Wavelet) -> Result<f64> {
    Ok(abs_planar_integral(eta, 2, RadialQuadrature::DEFAULT_R_MAX)?.0)
}

/// `int eta / (1 + cos theta) dSigma = iint Theta eta dr dphi`.
pub fn cancellation_integral(eta: &Wavelet) -> Result<Complex64> {
    Ok(planar_moments_with(eta, &RadialQuadrature::default())?.m0)
}

/// The same integral by the sphere quadrature of the grid.
pub fn cancellation_integral_grid(f: &SphericalGridFunction) -> Complex64 {
    let g = &f.grid;
    let n = g.n_phi;
    let pw = g.phi_weight();
    (0..g.n_theta())
        .map(|i| {
            let row: Complex64 = f.values[i * n..(i + 1) * n].iter().sum();
            row * (g.theta_weights[i] * pw / (1.0 + g.cos_theta[i]))
        })
        .sum()
}

/// Scan step in `u = ln tan(theta/2)`.
const SUP_STEP: f64 = 0.01;
/// Upper end of the scan when `F` comes from a `theta` evaluator: past it
/// `pi - theta` is about `2e-6` and the colatitude itself has lost digits.
const THETA_PROFILE_U_MAX: f64 = 14.0;

/// `ess sup |eta| (1 + tan^2(theta/2)) / (1 - cos theta)`.
///
/// In `u = ln r` the weight is `2 |F| cosh^3 u`. The maximum is taken over
/// nested windows `W_k`, `k = 1..4`, growing to `[-40, 40]`; growth by more
/// than a factor 10 from `W_3` to `W_4` flags the sup as infinite.
pub fn sup_condition(eta: &Wavelet) -> SupCondition {
    let n_phi = phi_nodes(eta);
    let weight = |u: f64, phi: f64| -> f64 {
        let c = u.cosh();
        let v = 2.0 * eta.planar(u.exp(), phi).norm() * c * c * c;
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let u_hi = if eta.planar_is_derived() { THETA_PROFILE_U_MAX } else { 40.0 };
    let phis: Vec<f64> = (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect();
    let lo = (40.0 / SUP_STEP).round() as i64;
    let hi = (u_hi / SUP_STEP).round() as i64;
    let mut window_max = [0.0f64; 4];
    let mut best = (0.0, 0.0, 0.0);
    for k in -lo..=hi {
        let u = k as f64 * SUP_STEP;
        // smallest k with u in W_k = [-10k, u_hi k / 4]
        let reach = if u < 0.0 { -u / 10.0 } else { 4.0 * u / u_hi };
        let win = ((reach - 1e-9).ceil().max(1.0) as usize - 1).min(3);
        for &phi in &phis {
            let v = weight(u, phi);
            for m in window_max.iter_mut().skip(win) {
                *m = m.max(v);
            }
            if v > best.0 {
                best = (v, u, phi);
            }
        }
    }
    let (m3, m4) = (window_max[2], window_max[3]);
    if !m4.is_finite() || m4 > 10.0 * m3 {
        return SupCondition { value: f64::INFINITY, finite: false };
    }
    if m4 == 0.0 {
        return SupCondition { value: 0.0, finite: true };
    }
    // polish the maximum by coordinate golden-section searches
    let (mut u, mut phi) = (best.1, best.2);
    let mut value = best.0;
    for _ in 0..3 {
        let (uo, vo) = golden_max(|x| weight(x, phi), u - SUP_STEP, (u + SUP_STEP).min(u_hi));
        if vo > value {
            value = vo;
            u = uo;
        }
        if n_phi > 1 {
            let dp = 2.0 * PI / n_phi as f64;
            let (po, vo) = golden_max(|x| weight(u, x), phi - dp, phi + dp);
            if vo > value {
                value = vo;
                phi = po;
            }
        }
    }
    SupCondition { value, finite: true }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `eta = zeta - alpha^{-1} D_alpha zeta`, which has zero mean in `dr dphi`.
pub fn construct_admissible(zeta: &Wavelet, alpha: f64) -> Result<Wavelet> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if (alpha - 1.0).abs() < 1e-12 {
        return Err(Error::Degenerate("alpha = 1 gives the zero function".into()));
    }
    let d = zeta.dilated(alpha)?;
    Ok(zeta
        .plus_scaled(Complex64::new(-1.0 / alpha, 0.0), &d)
        .with_label(format!("{} - D_{alpha}({})/{alpha}", zeta.label(), zeta.label())))
}

pub fn full_report(eta: &Wavelet) -> AdmissibilityReport {
    full_report_with(eta, AdmissibilityTolerances::default())
}

pub fn full_report_with(eta: &Wavelet, tolerances: AdmissibilityTolerances) -> AdmissibilityReport {
    let mut notes = Vec::new();
    let mut tails = [0.0; 3];
    let mut integral = |k: i32, slot: usize, notes: &mut Vec<String>| match abs_planar_integral(eta, k, tolerances.r_max) {
        Ok((v, t)) => {
            tails[slot] = t;
            v
        }
        Err(e) => {
            notes.push(format!("c_integrable_{}: {e}", if k == 0 { 1 } else { 2 }));
            tails[slot] = f64::INFINITY;
            f64::INFINITY
        }
    };
    let c1 = integral(0, 0, &mut notes);
    let c2 = integral(2, 1, &mut notes);
    let cancellation = match planar_moments_with(eta, &quadrature(tolerances.r_max)) {
        Ok(m) => {
            tails[2] = m.tail_m0;
            Some(m.m0)
        }
        Err(e) => {
            notes.push(format!("cancellation: {e}"));
            tails[2] = f64::INFINITY;
            None
        }
    };
    let c_sup = sup_condition(eta);
    let eta_norm = eta.norm_sq().sqrt();
    let eta_tilde_norm = Wavelet::axisymmetric(eta.eta_tilde()).norm_sq().sqrt();
    let mut report = AdmissibilityReport {
        wavelet: eta.label().to_string(),
        c_integrable_1: c1,
        c_integrable_2: c2,
        c_sup,
        cancellation,
        cancellation_abs: cancellation.map_or(f64::INFINITY, |c| c.norm()),
        eta_tilde_norm,
        eta_norm,
        eta_tilde_nonzero: eta_norm > 0.0 && eta_tilde_norm >= tolerances.nondegeneracy_rel * eta_norm,
        verdict: Verdict::FailsUpper,
        tolerances,
        tail_bounds: TailBounds {
            c_integrable_1: tails[0],
            c_integrable_2: tails[1],
            cancellation: tails[2],
        },
        notes,
    };
    report.verdict = report.decide();
    report
}
