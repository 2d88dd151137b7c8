//! Stereographic isometry, planar dilations, the log-radial map and radial moments.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{gauss_legendre, QuadratureRule};
use crate::sphere::Evaluator;
use crate::wavelet::{AxisymmetricProfile, DecayClass, Wavelet};

/// Function `(r, phi) -> value` on the punctured plane.
pub type PlaneFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

/// A plane function together with its declared radial decay.
#[derive(Clone)]
pub struct PlaneFunction {
    pub f: PlaneFn,
    pub decay: DecayClass,
}

impl PlaneFunction {
    pub fn new<F>(f: F, decay: DecayClass) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        PlaneFunction { f: Arc::new(f), decay }
    }

    pub fn eval(&self, r: f64, phi: f64) -> Complex64 {
        (self.f)(r, phi)
    }
}

/// Three measures on the plane that appear side by side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneMeasure {
    /// `dr dphi`: the measure of the mean and second-moment conditions.
    HalfPlane,
    /// `r dr dphi`: Lebesgue measure in polar coordinates.
    Lebesgue,
    /// `r^{-1} dr dphi`: the measure making `Theta` an isometry.
    Isometric,
}

impl PlaneMeasure {
    fn power(self) -> i32 {
        match self {
            PlaneMeasure::HalfPlane => 0,
            PlaneMeasure::Lebesgue => 1,
            PlaneMeasure::Isometric => -1,
        }
    }
}

/// `(Theta f)(r, phi) = 2r/(1+r^2) f(2 arctan r, phi)`.
pub fn theta_map(f: &Evaluator, decay: DecayClass) -> PlaneFunction {
    let f = f.clone();
    PlaneFunction {
        f: Arc::new(move |r, phi| f(2.0 * r.atan(), phi) * (2.0 * r / (1.0 + r * r))),
        decay,
    }
}

/// `f(theta, phi) = (1+r^2)/(2r) F(r, phi)` with `r = tan(theta/2)`.
pub fn theta_inverse(big_f: &PlaneFunction) -> Evaluator {
    let g = big_f.f.clone();
    Arc::new(move |theta, phi| {
        let r = (0.5 * theta).tan();
        if r <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        g(r, phi) * ((1.0 + r * r) / (2.0 * r))
    })
}

/// `(D_a^+ F)(r, phi) = F(r/a, phi)`.
pub fn plane_dilate(a: f64, big_f: &PlaneFunction) -> Result<PlaneFunction> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("dilation parameter must be positive, got {a}")));
    }
    let g = big_f.f.clone();
    Ok(PlaneFunction {
        f: Arc::new(move |r, phi| g(r / a, phi)),
        decay: big_f.decay.dilated(a),
    })
}

/// Function `(u, phi) -> value` on the cylinder `R x [0, 2 pi)`.
#[derive(Clone)]
pub struct LineFunction {
    pub f: PlaneFn,
}

impl LineFunction {
    pub fn eval(&self, u: f64, phi: f64) -> Complex64 {
        (self.f)(u, phi)
    }

    /// `(T_b g)(u, phi) = g(u - b, phi)`.
    pub fn shifted(&self, b: f64) -> LineFunction {
        let g = self.f.clone();
        LineFunction {
            f: Arc::new(move |u, phi| g(u - b, phi)),
        }
    }
}

/// `(J F)(u, phi) = F(e^u, phi)`.
pub fn log_radial_map(big_f: &PlaneFunction) -> LineFunction {
    let g = big_f.f.clone();
    LineFunction {
        f: Arc::new(move |u, phi| g(u.exp(), phi)),
    }
}

/// Panel Gauss-Legendre rule on `[0, r_max]` with decade-partitioned panels.
#[derive(Debug, Clone)]
pub struct RadialQuadrature {
    pub breakpoints: Vec<f64>,
    rule: QuadratureRule,
}

impl Default for RadialQuadrature {
    fn default() -> Self {
        RadialQuadrature::new(50.0, 200)
    }
}

impl RadialQuadrature {
    pub const DEFAULT_R_MAX: f64 = 50.0;

    pub fn new(r_max: f64, points_per_panel: usize) -> Self {
        let mut breakpoints = vec![0.0];
        let mut edge = 0.01;
        while edge < r_max {
            breakpoints.push(edge);
            edge *= 10.0;
        }
        breakpoints.push(r_max);
        RadialQuadrature {
            breakpoints,
            rule: gauss_legendre(points_per_panel),
        }
    }

    /// The same rule with extra panel edges, e.g. at kinks of the integrand.
    pub fn with_breakpoints(&self, extra: &[f64]) -> RadialQuadrature {
        let mut q = self.clone();
        let r_max = q.r_max();
        q.breakpoints.extend(extra.iter().copied().filter(|&r| r > 0.0 && r < r_max));
        q.breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
        q.breakpoints.dedup();
        q
    }

    pub fn r_max(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Same panels extended to cover `[0, r]`.
    fn covering(&self, r: f64) -> RadialQuadrature {
        let mut q = self.clone();
        let mut last = q.r_max();
        while last < r {
            last = (last * 10.0).min(r);
            q.breakpoints.push(last);
        }
        q
    }

    pub fn nodes(&self) -> Vec<(f64, f64)> {
        self.breakpoints
            .windows(2)
            .flat_map(|w| self.rule.mapped(w[0], w[1]).collect::<Vec<_>>())
            .collect()
    }

    /// `int_0^{r_max} f(r) dr`.
    pub fn integrate<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.breakpoints
            .windows(2)
            .map(|w| {
                self.rule
                    .mapped(w[0], w[1])
                    .map(|(x, wt)| f(x) * wt)
                    .sum::<Complex64>()
            })
            .sum()
    }
}

/// Improper radial integral with the bound on its neglected tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialIntegral {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// Bound on `int_R^infinity r^k |F(r)| dr` from the decay class.
pub fn radial_tail_bound(
    abs_at_r: f64,
    r: f64,
    k: f64,
    decay: DecayClass,
) -> Result<f64> {
    match decay {
        DecayClass::Compact { radius } if radius <= r => Ok(0.0),
        DecayClass::Compact { .. } => Err(Error::TailUnbounded(
            "compact support extends beyond the quadrature range".into(),
        )),
        DecayClass::SuperExponential { rate } => {
            let denom = 2.0 * rate * r - k / r;
            if denom <= 0.0 {
                return Err(Error::TailUnbounded(format!(
                    "decay rate {rate} too slow for the radius {r}"
                )));
            }
            Ok(abs_at_r * r.powf(k) / denom)
        }
        DecayClass::Polynomial { order } => {
            if order <= k + 1.0 {
                return Err(Error::TailUnbounded(format!(
                    "r^{k} F(r) with F = O(r^-{order}) is not integrable"
                )));
            }
            Ok(abs_at_r * r.powf(k + 1.0) / (order - k - 1.0))
        }
        DecayClass::Unknown => Err(Error::TailUnbounded(
            "no decay information; declare a decay class".into(),
        )),
    }
}

/// `int_0^infinity r^k F(r) dr` on the panels, plus a tail bound.
pub fn radial_moment<F>(
    f: F,
    k: i32,
    decay: DecayClass,
    quad: &RadialQuadrature,
) -> Result<RadialIntegral>
where
    F: Fn(f64) -> Complex64,
{
    let quad = match decay {
        DecayClass::Compact { radius } if radius > quad.r_max() => quad.covering(radius),
        _ => quad.clone(),
    };
    let value = quad.integrate(|r| f(r) * r.powi(k));
    let r = quad.r_max();
    let tail_bound = radial_tail_bound(f(r).norm(), r, k as f64, decay)?;
    Ok(RadialIntegral { value, tail_bound })
}

/// `int_0^infinity r^k |F(r)| dr`.
pub fn radial_abs_moment<F>(
    f: F,
    k: i32,
    decay: DecayClass,
    quad: &RadialQuadrature,
) -> Result<RadialIntegral>
where
    F: Fn(f64) -> Complex64,
{
    radial_moment(|r| Complex64::new(f(r).norm(), 0.0), k, decay, quad)
}

/// `iint F dmu` for one of the three plane measures. `n_phi` trapezoid nodes in `phi`.
pub fn plane_integral(
    big_f: &PlaneFunction,
    measure: PlaneMeasure,
    n_phi: usize,
    quad: &RadialQuadrature,
) -> Result<RadialIntegral> {
    let h = 2.0 * PI / n_phi as f64;
    let g = big_f.f.clone();
    radial_moment(
        move |r| (0..n_phi).map(|j| g(r, j as f64 * h)).sum::<Complex64>() * h,
        measure.power(),
        big_f.decay,
        quad,
    )
}

/// Squared norm of a plane function in the given measure.
pub fn plane_norm_sq(
    big_f: &PlaneFunction,
    measure: PlaneMeasure,
    n_phi: usize,
    quad: &RadialQuadrature,
) -> Result<f64> {
    let g = big_f.f.clone();
    let sq = PlaneFunction {
        f: Arc::new(move |r, phi| Complex64::new(g(r, phi).norm_sqr(), 0.0)),
        decay: big_f.decay,
    };
    Ok(plane_integral(&sq, measure, n_phi, quad)?.value.re)
}

/// Mean and second moment of `Theta eta` in `dr dphi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarMoments {
    pub m0: Complex64,
    pub m2: Complex64,
    pub tail_m0: f64,
    pub tail_m2: f64,
}

/// `(iint Theta eta dr dphi, iint r^2 Theta eta dr dphi)`. Only the `m = 0`
/// mode survives the `phi` integration.
pub fn planar_moments(eta: &Wavelet) -> Result<PlanarMoments> {
    planar_moments_with(eta, &RadialQuadrature::default())
}

pub fn planar_moments_with(eta: &Wavelet, quad: &RadialQuadrature) -> Result<PlanarMoments> {
    let Some(p) = eta.mode(0) else {
        return Ok(PlanarMoments {
            m0: Complex64::new(0.0, 0.0),
            m2: Complex64::new(0.0, 0.0),
            tail_m0: 0.0,
            tail_m2: 0.0,
        });
    };
    let m0 = radial_moment(|r| p.planar(r), 0, p.decay(), quad)?;
    let m2 = radial_moment(|r| p.planar(r), 2, p.decay(), quad)?;
    Ok(PlanarMoments {
        m0: m0.value * (2.0 * PI),
        m2: m2.value * (2.0 * PI),
        tail_m0: 2.0 * PI * m0.tail_bound,
        tail_m2: 2.0 * PI * m2.tail_bound,
    })
}

/// Samples of `psi(v) = F(e^v)` on a uniform lattice `v0 + j h` covering the
/// numerical support of `psi`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRadialSamples {
    pub v0: f64,
    pub h: f64,
    pub values: Vec<Complex64>,
}

impl LogRadialSamples {
    pub const DEFAULT_STEP: f64 = 0.02;
    /// Search window for the numerical support in `v = ln r`.
    pub const WINDOW: (f64, f64) = (-80.0, 40.0);
    /// Relative level below which samples count as zero.
    pub const CUTOFF: f64 = 1e-18;

    pub fn from_profile(p: &AxisymmetricProfile, h: f64) -> Self {
        let (lo, hi) = Self::support(p);
        if hi <= lo {
            return LogRadialSamples { v0: 0.0, h, values: Vec::new() };
        }
        let n = ((hi - lo) / h).ceil() as usize + 1;
        let values = (0..n).map(|j| p.log_radial(lo + j as f64 * h)).collect();
        LogRadialSamples { v0: lo, h, values }
    }

    /// Padded numerical support of `psi` inside [`Self::WINDOW`].
    pub fn support(p: &AxisymmetricProfile) -> (f64, f64) {
        let (a, b) = Self::WINDOW;
        let step = 0.05;
        let n = ((b - a) / step).round() as usize;
        let mags: Vec<f64> = (0..=n).map(|j| p.log_radial(a + j as f64 * step).norm()).collect();
        let max = mags.iter().cloned().fold(0.0, f64::max);
        if !(max > 0.0) || !max.is_finite() {
            return (0.0, 0.0);
        }
        let thr = Self::CUTOFF * max;
        let first = mags.iter().position(|&m| m > thr).unwrap();
        let last = mags.iter().rposition(|&m| m > thr).unwrap();
        let lo = (a + first as f64 * step - 1.0).max(a);
        let hi = (a + last as f64 * step + 1.0).min(b);
        (lo, hi)
    }

    pub fn v(&self, j: usize) -> f64 {
        self.v0 + j as f64 * self.h
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `int |psi|^2 dv`.
    pub fn norm_sq(&self) -> f64 {
        self.h * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// `int psi(v) e^{k v} dv = int r^{k-1} F(r) dr`.
    pub fn exp_moment(&self, k: f64) -> Complex64 {
        self.values
            .iter()
            .enumerate()
            .map(|(j, z)| z * (k * self.v(j)).exp())
            .sum::<Complex64>()
            * self.h
    }
}
