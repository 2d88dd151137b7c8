//! Spherical harmonic analysis and synthesis on Gauss grids, and zonal projections.
//!
//! `Y_l^m(theta, phi) = Pbar_l^|m|(cos theta) e^{i m phi}` with the orthonormal
//! latitude factors of [`crate::specfun::NormalizedLegendre`].

use std::f64::consts::PI;
use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::specfun::NormalizedLegendre;
use crate::sphere::{SphericalGrid, SphericalGridFunction};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Coefficients `<f, Y_l^m>` for `l <= l_max`, packed with `l` ascending and
/// `m` from `-l` to `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicCoefficients {
    pub l_max: usize,
    pub coeffs: Vec<Complex64>,
}

impl HarmonicCoefficients {
    pub fn zeros(l_max: usize) -> Self {
        HarmonicCoefficients {
            l_max,
            coeffs: vec![ZERO; (l_max + 1) * (l_max + 1)],
        }
    }

    #[inline]
    pub fn index(l: usize, m: i64) -> usize {
        (l * l) as usize + (m + l as i64) as usize
    }

    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        if l > self.l_max || m.unsigned_abs() as usize > l {
            return ZERO;
        }
        self.coeffs[Self::index(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, v: Complex64) {
        self.coeffs[Self::index(l, m)] = v;
    }

    pub fn unit(l_max: usize, l: usize, m: i64) -> Self {
        let mut c = Self::zeros(l_max);
        c.set(l, m, Complex64::new(1.0, 0.0));
        c
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `sum_m |c(l, m)|^2` for each `l`.
    pub fn zonal_norms(&self) -> Vec<f64> {
        (0..=self.l_max)
            .map(|l| {
                let s = l * l;
                self.coeffs[s..s + 2 * l + 1].iter().map(|c| c.norm_sqr()).sum()
            })
            .collect()
    }

    /// Keeps only degree `l`.
    pub fn zonal(&self, l: usize) -> Self {
        let mut c = Self::zeros(self.l_max);
        if l <= self.l_max {
            let s = l * l;
            c.coeffs[s..s + 2 * l + 1].copy_from_slice(&self.coeffs[s..s + 2 * l + 1]);
        }
        c
    }

    /// Multiplies degree `l` by `g(l)`.
    pub fn scale_degrees<F: Fn(usize) -> Complex64>(&self, g: F) -> Self {
        let mut c = self.clone();
        for l in 0..=self.l_max {
            let f = g(l);
            let s = l * l;
            for v in &mut c.coeffs[s..s + 2 * l + 1] {
                *v *= f;
            }
        }
        c
    }

    pub fn truncated(&self, l_max: usize) -> Self {
        let mut c = Self::zeros(l_max);
        let n = (l_max.min(self.l_max) + 1).pow(2);
        c.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        c
    }

    /// `sum c(l,m) Y_l^m(theta, phi)`.
    pub fn evaluate(&self, theta: f64, phi: f64) -> Complex64 {
        let (s, x) = theta.sin_cos();
        let table = NormalizedLegendre::new(self.l_max, x, s.abs());
        let mut acc = ZERO;
        let e1 = Complex64::from_polar(1.0, phi);
        let mut em = Complex64::new(1.0, 0.0);
        for m in 0..=self.l_max {
            let mut pos = ZERO;
            let mut neg = ZERO;
            for l in m..=self.l_max {
                let p = table.get(l, m);
                pos += self.coeffs[Self::index(l, m as i64)] * p;
                if m > 0 {
                    neg += self.coeffs[Self::index(l, -(m as i64))] * p;
                }
            }
            acc += pos * em;
            if m > 0 {
                acc += neg * em.conj();
            }
            em *= e1;
        }
        acc
    }

    /// Writes the coefficient file: a header line with `l_max`, then rows `l m re im`.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# l_max {}", self.l_max)?;
        writeln!(w, "l,m,re,im")?;
        for l in 0..=self.l_max {
            for m in -(l as i64)..=(l as i64) {
                let c = self.get(l, m);
                writeln!(w, "{l},{m},{:.17e},{:.17e}", c.re, c.im)?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty coefficient file".into()))??;
        let l_max: usize = header
            .trim()
            .strip_prefix("# l_max")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header `{header}`")))?;
        let mut c = Self::zeros(l_max);
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("l,") {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(Error::Parse(format!("bad row `{line}`")));
            }
            let bad = |_| Error::Parse(format!("bad row `{line}`"));
            let l: usize = f[0].trim().parse().map_err(|_| Error::Parse(format!("bad row `{line}`")))?;
            let m: i64 = f[1].trim().parse().map_err(|_| Error::Parse(format!("bad row `{line}`")))?;
            let re: f64 = f[2].trim().parse().map_err(bad)?;
            let im: f64 = f[3].trim().parse().map_err(bad)?;
            if l > l_max || m.unsigned_abs() as usize > l {
                return Err(Error::Parse(format!("index ({l},{m}) out of range")));
            }
            c.set(l, m, Complex64::new(re, im));
        }
        Ok(c)
    }
}

fn check_resolution(grid: &SphericalGrid, l_max: usize) -> Result<()> {
    if grid.n_theta() < l_max + 1 || grid.n_phi < 2 * l_max + 1 {
        return Err(Error::Resolution(format!(
            "grid {}x{} cannot resolve band limit {l_max}",
            grid.n_theta(),
            grid.n_phi
        )));
    }
    Ok(())
}

/// Row Fourier sums `(2 pi / n_phi) sum_j f_ij e^{-i m phi_j}` for `|m| <= l_max`,
/// indexed `m + l_max`.
fn row_fourier(grid: &SphericalGrid, row: &[Complex64], l_max: usize) -> Vec<Complex64> {
    let n = grid.n_phi;
    let pw = grid.phi_weight();
    let twiddle: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / n as f64))
        .collect();
    let mut out = vec![ZERO; 2 * l_max + 1];
    for m in -(l_max as i64)..=(l_max as i64) {
        let mut acc = ZERO;
        for (j, v) in row.iter().enumerate() {
            let k = ((m * j as i64).rem_euclid(n as i64)) as usize;
            acc += v * twiddle[k];
        }
        out[(m + l_max as i64) as usize] = acc * pw;
    }
    out
}

/// `f_hat(l, m) = <f, Y_l^m>` by Gauss-Legendre times trapezoid quadrature.
pub fn analyze(f: &SphericalGridFunction, l_max: usize) -> Result<HarmonicCoefficients> {
    analyze_samples(&f.grid, &f.values, l_max)
}

pub fn analyze_samples(
    grid: &SphericalGrid,
    values: &[Complex64],
    l_max: usize,
) -> Result<HarmonicCoefficients> {
    check_resolution(grid, l_max)?;
    let n_phi = grid.n_phi;
    let partial: Vec<Vec<Complex64>> = (0..grid.n_theta())
        .into_par_iter()
        .map(|i| {
            let fm = row_fourier(grid, &values[i * n_phi..(i + 1) * n_phi], l_max);
            let table = NormalizedLegendre::new(l_max, grid.cos_theta[i], grid.sin_theta[i]);
            let w = grid.theta_weights[i];
            let mut c = vec![ZERO; (l_max + 1) * (l_max + 1)];
            for l in 0..=l_max {
                for m in -(l as i64)..=(l as i64) {
                    let p = table.get(l, m.unsigned_abs() as usize);
                    c[HarmonicCoefficients::index(l, m)] = fm[(m + l_max as i64) as usize] * (p * w);
                }
            }
            c
        })
        .collect();
    let mut out = HarmonicCoefficients::zeros(l_max);
    for c in partial {
        for (o, v) in out.coeffs.iter_mut().zip(c) {
            *o += v;
        }
    }
    Ok(out)
}

/// `m = 0` coefficients of an axisymmetric function given by its values on
/// the grid colatitudes; cost `O(n_theta l_max)`.
pub fn analyze_axisymmetric(
    grid: &SphericalGrid,
    column: &[Complex64],
    l_max: usize,
) -> Result<Vec<Complex64>> {
    if grid.n_theta() < l_max + 1 {
        return Err(Error::Resolution(format!(
            "{} colatitudes cannot resolve band limit {l_max}",
            grid.n_theta()
        )));
    }
    let mut out = vec![ZERO; l_max + 1];
    let mut col = vec![0.0; l_max + 1];
    for i in 0..grid.n_theta() {
        crate::specfun::normalized_legendre_column(0, l_max, grid.cos_theta[i], grid.sin_theta[i], &mut col);
        let w = 2.0 * PI * grid.theta_weights[i];
        for l in 0..=l_max {
            out[l] += column[i] * (col[l] * w);
        }
    }
    Ok(out)
}

/// `sum c(l,m) Y_l^m` on the grid. The result carries the band limit and an
/// exact evaluator.
pub fn synthesize(c: &HarmonicCoefficients, grid: &SphericalGrid) -> SphericalGridFunction {
    let l_max = c.l_max;
    let n_phi = grid.n_phi;
    let rows: Vec<Vec<Complex64>> = (0..grid.n_theta())
        .into_par_iter()
        .map(|i| {
            let table = NormalizedLegendre::new(l_max, grid.cos_theta[i], grid.sin_theta[i]);
            // g(m) = sum_l c(l,m) Pbar_l^|m|
            let g: Vec<Complex64> = (-(l_max as i64)..=(l_max as i64))
                .map(|m| {
                    let am = m.unsigned_abs() as usize;
                    (am..=l_max).map(|l| c.coeffs[HarmonicCoefficients::index(l, m)] * table.get(l, am)).sum()
                })
                .collect();
            (0..n_phi)
                .map(|j| {
                    let phi = grid.phi(j);
                    g.iter()
                        .enumerate()
                        .map(|(k, v)| v * Complex64::from_polar(1.0, (k as i64 - l_max as i64) as f64 * phi))
                        .sum()
                })
                .collect()
        })
        .collect();
    let cc = c.clone();
    SphericalGridFunction {
        grid: grid.clone(),
        values: rows.into_iter().flatten().collect(),
        evaluator: Some(Arc::new(move |t, p| cc.evaluate(t, p))),
        band_limit: Some(l_max),
    }
}

/// `Pi_l f` from an analysis to band limit `l_max`.
pub fn zonal_project(f: &SphericalGridFunction, l: usize, l_max: usize) -> Result<SphericalGridFunction> {
    if l > l_max {
        return Err(Error::Domain(format!("degree {l} exceeds the analysis band limit {l_max}")));
    }
    let c = analyze(f, l_max)?;
    Ok(synthesize(&c.zonal(l), &f.grid))
}

/// `||Pi_l f||^2` for `l = 0 ..= l_max`.
pub fn zonal_norms(f: &SphericalGridFunction, l_max: usize) -> Result<Vec<f64>> {
    Ok(analyze(f, l_max)?.zonal_norms())
}

/// `Y_l^m(theta, phi)`.
pub fn spherical_harmonic(l: usize, m: i64, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() as usize > l {
        return Err(Error::Domain(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    let (s, x) = theta.sin_cos();
    let t = NormalizedLegendre::new(l, x, s.abs());
    Ok(Complex64::from_polar(t.get(l, m.unsigned_abs() as usize), m as f64 * phi))
}
