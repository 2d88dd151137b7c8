//! The frame spectrum `G_l`, frame bounds and the diagonal frame operator.
//!
//! `G_l = (2l+1)^{-1} int_0^inf ||Pi_l D_a eta||^2 da/a^3`. With `a = e^b` and
//! `psi_m(v) = F_m(e^v)` the harmonic coefficients of the dilated wavelet are
//!
//! `<D_a eta, Y_l^m> = 2 pi int psi_m(v) sech(v+b) Pbar_l^|m|(-tanh(v+b)) dv`,
//!
//! a smooth integral over the fixed support of `psi_m`, evaluated by the
//! trapezoid rule at every scale node.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::{analyze, synthesize};
use crate::sphere::{SphericalGridFunction, HAAR_SO3};
use crate::specfun::normalized_legendre_column;
use crate::stereo::LogRadialSamples;
use crate::wavelet::{sech, Wavelet};

/// Trapezoid nodes in `b = ln a` with weights for `int g da/a^3 = int g e^{-2b} db`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub b_min: f64,
    pub b_max: f64,
}

impl ScaleGrid {
    /// Default range. Under cancellation the integrand decays like `a^2` toward
    /// `a = 0`, so `b = -10` leaves an `e^{-20}`-relative remainder; beyond `b = 8`
    /// the remainder is bounded by [`tail_bound`].
    pub const DEFAULT_B_MIN: f64 = -10.0;
    pub const DEFAULT_B_MAX: f64 = 8.0;
    pub const DEFAULT_NODES: usize = 181;

    pub fn new(b_min: f64, b_max: f64, n: usize) -> Result<Self> {
        if !(b_max > b_min) || !b_min.is_finite() || !b_max.is_finite() {
            return Err(Error::Domain(format!("scale range [{b_min}, {b_max}] is empty")));
        }
        if n < 2 {
            return Err(Error::Domain("a scale grid needs at least two nodes".into()));
        }
        let h = (b_max - b_min) / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|i| b_min + i as f64 * h).collect();
        let weights = nodes
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let t = if i == 0 || i == n - 1 { 0.5 * h } else { h };
                t * (-2.0 * b).exp()
            })
            .collect();
        Ok(ScaleGrid { nodes, weights, b_min, b_max })
    }

    /// Same range, twice the resolution.
    pub fn refined(&self) -> Self {
        ScaleGrid::new(self.b_min, self.b_max, 2 * self.len() - 1).expect("valid grid")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn step(&self) -> f64 {
        (self.b_max - self.b_min) / (self.len() - 1) as f64
    }

    pub fn scales(&self) -> Vec<f64> {
        self.nodes.iter().map(|b| b.exp()).collect()
    }
}

impl Default for ScaleGrid {
    fn default() -> Self {
        ScaleGrid::new(Self::DEFAULT_B_MIN, Self::DEFAULT_B_MAX, Self::DEFAULT_NODES).expect("valid grid")
    }
}

/// Log-radial step adequate for degrees up to `l_max`.
pub fn default_step(l_max: usize) -> f64 {
    LogRadialSamples::DEFAULT_STEP.min(2.0 * PI / (4 * (l_max + 1) + 80) as f64)
}

/// `sum_m |<D_a eta, Y_l^m>|^2` and the coefficients themselves, per scale.
#[derive(Debug, Clone)]
pub struct CoefficientEngine {
    l_max: usize,
    modes: Vec<(i64, LogRadialSamples)>,
}

impl CoefficientEngine {
    pub fn new(eta: &Wavelet, l_max: usize, h: f64) -> Self {
        let modes = eta
            .modes()
            .iter()
            .filter(|x| x.m.unsigned_abs() as usize <= l_max)
            .map(|x| (x.m, LogRadialSamples::from_profile(&x.profile, h)))
            .filter(|(_, s)| !s.is_empty())
            .collect();
        CoefficientEngine { l_max, modes }
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// `<D_{e^b} eta, Y_l^m>` for `l = |m| ..= l_max`, indexed `l - |m|`.
    pub fn mode_coefficients(&self, b: f64, m: i64) -> Vec<Complex64> {
        let am = m.unsigned_abs() as usize;
        if am > self.l_max {
            return Vec::new();
        }
        let mut acc = vec![Complex64::new(0.0, 0.0); self.l_max + 1 - am];
        let Some((_, s)) = self.modes.iter().find(|(mm, _)| *mm == m) else {
            return acc;
        };
        let mut col = vec![0.0; self.l_max + 1 - am];
        for (j, psi) in s.values.iter().enumerate() {
            if psi.norm_sqr() == 0.0 {
                continue;
            }
            let u = s.v(j) + b;
            let sh = sech(u);
            normalized_legendre_column(am, self.l_max, -u.tanh(), sh, &mut col);
            let w = psi * sh;
            for (a, p) in acc.iter_mut().zip(&col) {
                *a += w * *p;
            }
        }
        let f = 2.0 * PI * s.h;
        for a in &mut acc {
            *a *= f;
        }
        acc
    }

    /// `||Pi_l D_{e^b} eta||^2` for `l = 0 ..= l_max`.
    pub fn zonal_norms(&self, b: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.l_max + 1];
        for (m, _) in &self.modes {
            let am = m.unsigned_abs() as usize;
            for (k, c) in self.mode_coefficients(b, *m).iter().enumerate() {
                out[am + k] += c.norm_sqr();
            }
        }
        out
    }
}

/// `||eta||^2 eps^{-2} / (2 (2l+1))`: bound on the part of `G_l` from `a > eps`.
pub fn tail_bound(l: usize, eps: f64, norm_eta: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("tail cutoff must be positive, got {eps}")));
    }
    if !(norm_eta >= 0.0) {
        return Err(Error::Domain(format!("norm must be nonnegative, got {norm_eta}")));
    }
    Ok(norm_eta * norm_eta / (eps * eps * 2.0 * (2 * l + 1) as f64))
}

/// Relative tolerance of the refinement test.
pub const REFINEMENT_TOL: f64 = 1e-4;
/// Smallest admissible log-slope of the integrand at `b_min`.
pub const MIN_LOWER_SLOPE: f64 = 0.5;
/// `G_l <= INVERTIBILITY_TOL * max G` counts as singular.
pub const INVERTIBILITY_TOL: f64 = 1e-10;

/// Per-scale integrands `||Pi_l eta_a||^2 / (2l+1)` on one grid, all degrees.
fn integrands(eta: &Wavelet, l_max: usize, grid: &ScaleGrid, h: f64) -> Vec<Vec<f64>> {
    let engine = CoefficientEngine::new(eta, l_max, h);
    grid.nodes
        .par_iter()
        .map(|&b| {
            let mut z = engine.zonal_norms(b);
            for (l, v) in z.iter_mut().enumerate() {
                *v /= (2 * l + 1) as f64;
            }
            z
        })
        .collect()
}

/// `sum_i w_i I_i(l)` for every degree.
fn integrate(grid: &ScaleGrid, rows: &[Vec<f64>], l_max: usize) -> Vec<f64> {
    let mut g = vec![0.0; l_max + 1];
    for (w, row) in grid.weights.iter().zip(rows) {
        for (gl, v) in g.iter_mut().zip(row) {
            *gl += w * v;
        }
    }
    g
}

/// One computed `G_l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GEll {
    pub value: f64,
    /// Refinement change plus both tail contributions.
    pub error_estimate: f64,
    /// Upper-tail bound from [`tail_bound`] at `eps = e^{b_max}`.
    pub tail_bound: f64,
}

/// The raw quadrature of `G_l`, `l <= l_max`, on one grid and log-radial step.
pub fn g_values_on(eta: &Wavelet, l_max: usize, grid: &ScaleGrid, h: f64) -> Vec<f64> {
    integrate(grid, &integrands(eta, l_max, grid, h), l_max)
}

/// All `G_l` for `l <= l_max` under the refinement protocol.
pub fn g_ell_all(eta: &Wavelet, l_max: usize, grid: &ScaleGrid) -> Result<Vec<GEll>> {
    let h = default_step(l_max);
    let coarse = g_values_on(eta, l_max, grid, h);
    let fine_grid = grid.refined();
    let rows = integrands(eta, l_max, &fine_grid, 0.5 * h);
    let fine = integrate(&fine_grid, &rows, l_max);
    let norm_sq = eta.norm_sq();
    let floor = 1e-13 * norm_sq;
    let eps = grid.b_max.exp();
    let db = fine_grid.step();
    let mut out = Vec::with_capacity(l_max + 1);
    for l in 0..=l_max {
        let (g0, g1) = (coarse[l], fine[l]);
        let change = (g1 - g0).abs();
        if change > REFINEMENT_TOL * g1.abs() + floor || !g1.is_finite() {
            return Err(Error::NonConvergence {
                ell: l,
                detail: format!("refinement changed G from {g0:e} to {g1:e}"),
            });
        }
        // lower tail: integrand ~ e^{s b} near b_min, weighted by e^{-2b}
        let i0 = rows[0][l] * (-2.0 * fine_grid.nodes[0]).exp();
        let i1 = rows[1][l] * (-2.0 * fine_grid.nodes[1]).exp();
        let peak = rows
            .iter()
            .zip(&fine_grid.nodes)
            .map(|(r, b)| r[l] * (-2.0 * b).exp())
            .fold(0.0, f64::max);
        let mut lower = 0.0;
        if i0 > 1e-15 * peak && i0 > 0.0 {
            let s = (i1 / i0).ln() / db;
            if !(s >= MIN_LOWER_SLOPE) {
                return Err(Error::NonConvergence {
                    ell: l,
                    detail: format!(
                        "the scale integrand does not decay toward a = 0 (log-slope {s:.3}); \
                         the cancellation condition is likely violated"
                    ),
                });
            }
            lower = i0 / s;
        }
        let upper = tail_bound(l, eps, norm_sq.sqrt())?;
        out.push(GEll {
            value: g1,
            error_estimate: change + lower + upper,
            tail_bound: upper,
        });
    }
    Ok(out)
}

/// `G_l` for one degree.
pub fn g_ell(eta: &Wavelet, l: usize, grid: &ScaleGrid) -> Result<GEll> {
    Ok(g_ell_all(eta, l, grid)?[l])
}

/// `G_l` for `l <= l_max` with the frame bounds `8 pi^2 min G` and `8 pi^2 max G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSpectrum {
    pub l_max: usize,
    pub g_values: Vec<f64>,
    pub error_estimates: Vec<f64>,
    pub tail_bounds: Vec<f64>,
    /// `8 pi^2 min_{l <= l_max} G_l`: a computed minimum, not a certified bound.
    pub lower_bound: f64,
    /// `8 pi^2 max_{l <= l_max} G_l`.
    pub upper_bound: f64,
    pub b_min: f64,
    pub b_max: f64,
    pub b_nodes: usize,
    /// `(max - min) / max` of `G_l` over the last octave `l_max/2 ..= l_max`.
    pub stabilization: f64,
    pub caveat: String,
}

const TRUNCATION_CAVEAT: &str = "bounds are the min and max over l <= l_max only; \
     no certified lower bound over all degrees is claimed";

impl FrameSpectrum {
    /// A spectrum from given values, e.g. for testing the operator.
    pub fn from_values(g_values: Vec<f64>) -> Self {
        let n = g_values.len();
        Self::assemble(g_values, vec![0.0; n], vec![0.0; n], &ScaleGrid::default())
    }

    fn assemble(g_values: Vec<f64>, error_estimates: Vec<f64>, tail_bounds: Vec<f64>, grid: &ScaleGrid) -> Self {
        let l_max = g_values.len().saturating_sub(1);
        let min = g_values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = g_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let octave = &g_values[l_max / 2..];
        let (omin, omax) = octave
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let stabilization = if omax > 0.0 { (omax - omin) / omax } else { 0.0 };
        FrameSpectrum {
            l_max,
            lower_bound: HAAR_SO3 * min,
            upper_bound: HAAR_SO3 * max,
            g_values,
            error_estimates,
            tail_bounds,
            b_min: grid.b_min,
            b_max: grid.b_max,
            b_nodes: grid.len(),
            stabilization,
            caveat: TRUNCATION_CAVEAT.into(),
        }
    }

    /// `C / c`; infinite when the lower bound vanishes.
    pub fn ratio(&self) -> f64 {
        if self.lower_bound > 0.0 {
            self.upper_bound / self.lower_bound
        } else {
            f64::INFINITY
        }
    }

    /// First degree at which the spectrum is singular, if any.
    pub fn singular_degree(&self) -> Option<(usize, f64)> {
        let max = self.g_values.iter().cloned().fold(0.0, f64::max);
        self.g_values
            .iter()
            .enumerate()
            .find(|(_, &g)| !(g > INVERTIBILITY_TOL * max) || max <= 0.0)
            .map(|(l, &g)| (l, g))
    }

    /// Rows `l,g_ell,error_estimate,tail_bound`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "l,g_ell,error_estimate,tail_bound")?;
        for l in 0..self.g_values.len() {
            writeln!(
                w,
                "{l},{:.17e},{:.6e},{:.6e}",
                self.g_values[l], self.error_estimates[l], self.tail_bounds[l]
            )?;
        }
        Ok(())
    }

    /// JSON summary: bounds, ratio, degree range and grid parameters.
    pub fn summary_json(&self) -> serde_json::Value {
        let finite = |v: f64| if v.is_finite() { serde_json::json!(v) } else { serde_json::Value::Null };
        serde_json::json!({
            "c": self.lower_bound,
            "C": self.upper_bound,
            "C_over_c": finite(self.ratio()),
            "l_max": self.l_max,
            "b_min": self.b_min,
            "b_max": self.b_max,
            "b_nodes": self.b_nodes,
            "stabilization": self.stabilization,
            "certified_lower_bound": serde_json::Value::Null,
            "caveat": self.caveat,
        })
    }
}

pub fn frame_spectrum(eta: &Wavelet, l_max: usize, grid: &ScaleGrid) -> Result<FrameSpectrum> {
    let g = g_ell_all(eta, l_max, grid)?;
    Ok(FrameSpectrum::assemble(
        g.iter().map(|x| x.value).collect(),
        g.iter().map(|x| x.error_estimate).collect(),
        g.iter().map(|x| x.tail_bound).collect(),
        grid,
    ))
}

fn band_limit_of(spectrum: &FrameSpectrum, phi: &SphericalGridFunction) -> Result<usize> {
    let l = phi.band_limit.unwrap_or_else(|| phi.grid.max_band_limit());
    if l > spectrum.l_max {
        return Err(Error::BandLimit(format!(
            "function band limit {l} exceeds the spectrum's l_max {}",
            spectrum.l_max
        )));
    }
    Ok(l)
}

/// `A phi = 8 pi^2 sum_l G_l Pi_l phi`.
pub fn frame_operator_apply(spectrum: &FrameSpectrum, phi: &SphericalGridFunction) -> Result<SphericalGridFunction> {
    let l = band_limit_of(spectrum, phi)?;
    let c = analyze(phi, l)?.scale_degrees(|k| Complex64::new(HAAR_SO3 * spectrum.g_values[k], 0.0));
    Ok(synthesize(&c, &phi.grid))
}

/// `A^{-1} phi`, scaling degree `l` by `1 / (8 pi^2 G_l)`.
pub fn frame_operator_invert(spectrum: &FrameSpectrum, phi: &SphericalGridFunction) -> Result<SphericalGridFunction> {
    if let Some((ell, value)) = spectrum.singular_degree() {
        return Err(Error::SingularSpectrum { ell, value });
    }
    let l = band_limit_of(spectrum, phi)?;
    let c = analyze(phi, l)?.scale_degrees(|k| Complex64::new(1.0 / (HAAR_SO3 * spectrum.g_values[k]), 0.0));
    Ok(synthesize(&c, &phi.grid))
}
