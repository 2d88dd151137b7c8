//! Voice transform `W(omega_0, a) = <phi, lambda(g) D_a eta>` for axisymmetric `eta`,
//! the Plancherel check and reconstruction.
//!
//! For zonal `eta_a` the transform at one scale is a zonal convolution:
//! `W^(l, m) = sqrt(4 pi / (2l+1)) conj(eta_a^(l, 0)) phi^(l, m)`.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{default_step, CoefficientEngine, FrameSpectrum, ScaleGrid};
use crate::harmonic::{analyze, analyze_samples, synthesize, HarmonicCoefficients};
use crate::sphere::{SphericalGrid, SphericalGridFunction, HAAR_SO3};
use crate::wavelet::Wavelet;

/// Samples of `W` on positions times scales. `values[k * n_pos + p]` is the sample
/// at scale node `k` and grid point `p` (row-major as in the position grid).
#[derive(Debug, Clone)]
pub struct VoiceField {
    pub grid: SphericalGrid,
    pub scales: ScaleGrid,
    pub l_max: usize,
    pub wavelet: String,
    pub values: Vec<Complex64>,
}

/// Metadata written next to a field file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoiceMetadata {
    pub wavelet: String,
    pub l_max: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    pub b_min: f64,
    pub b_max: f64,
    pub b_nodes: usize,
}

impl VoiceField {
    pub fn n_positions(&self) -> usize {
        self.grid.len()
    }

    /// Samples at scale node `k`.
    pub fn slice(&self, k: usize) -> &[Complex64] {
        let n = self.n_positions();
        &self.values[k * n..(k + 1) * n]
    }

    /// `2 pi dSigma(omega_0) da/a^3` weight of a sample.
    pub fn weight(&self, k: usize, p: usize) -> f64 {
        let (i, j) = (p / self.grid.n_phi, p % self.grid.n_phi);
        2.0 * PI * self.scales.weights[k] * self.grid.weight(i, j)
    }

    /// Weighted `sum |W|^2`.
    pub fn squared_norm(&self) -> f64 {
        let pos = self.grid.weights();
        (0..self.scales.len())
            .map(|k| {
                let s: f64 = self.slice(k).iter().zip(&pos).map(|(v, w)| w * v.norm_sqr()).sum();
                2.0 * PI * self.scales.weights[k] * s
            })
            .sum()
    }

    pub fn metadata(&self) -> VoiceMetadata {
        VoiceMetadata {
            wavelet: self.wavelet.clone(),
            l_max: self.l_max,
            n_theta: self.grid.n_theta(),
            n_phi: self.grid.n_phi,
            b_min: self.scales.b_min,
            b_max: self.scales.b_max,
            b_nodes: self.scales.len(),
        }
    }

    /// Rows `theta0,phi0,b,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "theta0,phi0,b,re,im")?;
        for (k, b) in self.scales.nodes.iter().enumerate() {
            for (p, v) in self.slice(k).iter().enumerate() {
                let pt = self.grid.point(p / self.grid.n_phi, p % self.grid.n_phi);
                writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}", pt.theta, pt.phi, b, v.re, v.im)?;
            }
        }
        Ok(())
    }

    /// Rebuilds a field from its metadata and CSV rows, in the order written.
    pub fn read_csv<R: BufRead>(meta: &VoiceMetadata, r: R) -> Result<Self> {
        let grid = SphericalGrid::gauss(meta.n_theta, meta.n_phi)?;
        let scales = ScaleGrid::new(meta.b_min, meta.b_max, meta.b_nodes)?;
        let mut values = Vec::with_capacity(grid.len() * scales.len());
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with("theta0") || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(Error::Parse(format!("bad voice row `{line}`")));
            }
            let num = |s: &str| -> Result<f64> {
                s.trim().parse().map_err(|_| Error::Parse(format!("bad number `{s}`")))
            };
            values.push(Complex64::new(num(f[3])?, num(f[4])?));
        }
        if values.len() != grid.len() * scales.len() {
            return Err(Error::Parse(format!(
                "expected {} voice samples, found {}",
                grid.len() * scales.len(),
                values.len()
            )));
        }
        Ok(VoiceField {
            grid,
            scales,
            l_max: meta.l_max,
            wavelet: meta.wavelet.clone(),
            values,
        })
    }
}

fn require_axisymmetric(eta: &Wavelet) -> Result<()> {
    if !eta.is_axisymmetric() {
        return Err(Error::Domain(format!(
            "the voice transform needs an axisymmetric wavelet; `{}` has modes m != 0",
            eta.label()
        )));
    }
    Ok(())
}

fn zonal_factor(l: usize) -> f64 {
    (4.0 * PI / (2 * l + 1) as f64).sqrt()
}

/// `W(omega_0, e^b)` on the grid of `phi` and the given scales.
pub fn voice_transform(phi: &SphericalGridFunction, eta: &Wavelet, scales: &ScaleGrid) -> Result<VoiceField> {
    require_axisymmetric(eta)?;
    let l_max = phi.band_limit.unwrap_or_else(|| phi.grid.max_band_limit());
    let coeffs = analyze(phi, l_max)?;
    let engine = CoefficientEngine::new(eta, l_max, default_step(l_max));
    let slices: Vec<Vec<Complex64>> = scales
        .nodes
        .par_iter()
        .map(|&b| {
            let e = engine.mode_coefficients(b, 0);
            let w = coeffs.scale_degrees(|l| e[l].conj() * zonal_factor(l));
            synthesize(&w, &phi.grid).values
        })
        .collect();
    Ok(VoiceField {
        grid: phi.grid.clone(),
        scales: scales.clone(),
        l_max,
        wavelet: eta.label().to_string(),
        values: slices.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlancherelCheck {
    /// Weighted `sum |W|^2`.
    pub lhs: f64,
    /// `8 pi^2 sum_l G_l ||Pi_l phi||^2`.
    pub rhs: f64,
    pub relative_gap: f64,
}

pub fn plancherel_check(
    field: &VoiceField,
    spectrum: &FrameSpectrum,
    phi: &SphericalGridFunction,
) -> Result<PlancherelCheck> {
    if field.l_max > spectrum.l_max {
        return Err(Error::BandLimit(format!(
            "field band limit {} exceeds the spectrum's l_max {}",
            field.l_max, spectrum.l_max
        )));
    }
    let lhs = field.squared_norm();
    let norms = analyze(phi, field.l_max)?.zonal_norms();
    let rhs = HAAR_SO3 * norms.iter().zip(&spectrum.g_values).map(|(n, g)| n * g).sum::<f64>();
    let relative_gap = if rhs == 0.0 && lhs == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / rhs.abs().max(lhs.abs())
    };
    Ok(PlancherelCheck { lhs, rhs, relative_gap })
}

/// `A^{-1} int W(x) U(x) eta dnu(x)` on the field's position grid.
pub fn reconstruct(field: &VoiceField, eta: &Wavelet, spectrum: &FrameSpectrum) -> Result<SphericalGridFunction> {
    require_axisymmetric(eta)?;
    if let Some((ell, value)) = spectrum.singular_degree() {
        return Err(Error::SingularSpectrum { ell, value });
    }
    let l_max = field.l_max;
    if l_max > spectrum.l_max {
        return Err(Error::BandLimit(format!(
            "field band limit {l_max} exceeds the spectrum's l_max {}",
            spectrum.l_max
        )));
    }
    let engine = CoefficientEngine::new(eta, l_max, default_step(l_max));
    let partial: Vec<HarmonicCoefficients> = (0..field.scales.len())
        .into_par_iter()
        .map(|k| -> Result<HarmonicCoefficients> {
            let b = field.scales.nodes[k];
            let e = engine.mode_coefficients(b, 0);
            let w = analyze_samples(&field.grid, field.slice(k), l_max)?;
            let f = 2.0 * PI * field.scales.weights[k];
            Ok(w.scale_degrees(|l| e[l] * (f * zonal_factor(l))))
        })
        .collect::<Result<_>>()?;
    let mut acc = HarmonicCoefficients::zeros(l_max);
    for p in partial {
        for (a, v) in acc.coeffs.iter_mut().zip(p.coeffs) {
            *a += v;
        }
    }
    let out = acc.scale_degrees(|l| Complex64::new(1.0 / (HAAR_SO3 * spectrum.g_values[l]), 0.0));
    Ok(synthesize(&out, &field.grid))
}
