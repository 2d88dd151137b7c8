//! Points, rotations and dilations on the unit sphere, and sampled functions.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harmonic;
use crate::specfun::gauss_legendre;

pub use crate::wavelet::AxisymmetricProfile;

/// Pointwise evaluator `(theta, phi) -> value`.
pub type Evaluator = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

/// Haar measure of SO(3) in the normalization used throughout.
pub const HAAR_SO3: f64 = 8.0 * PI * PI;

const TWO_PI: f64 = 2.0 * PI;

/// A point given by colatitude and longitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPoint {
    pub const NORTH: SphericalPoint = SphericalPoint { theta: 0.0, phi: 0.0 };

    /// Builds a point, folding `phi` into `[0, 2 pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::Domain(format!("invalid point ({theta}, {phi})")));
        }
        Ok(SphericalPoint {
            theta,
            phi: wrap_phi(phi),
        })
    }

    pub fn to_cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn from_cartesian(v: [f64; 3]) -> Self {
        let rho = (v[0] * v[0] + v[1] * v[1]).sqrt();
        let theta = rho.atan2(v[2]).clamp(0.0, PI);
        SphericalPoint {
            theta,
            phi: wrap_phi(v[1].atan2(v[0])),
        }
    }

    pub fn dot(&self, other: &SphericalPoint) -> f64 {
        let a = self.to_cartesian();
        let b = other.to_cartesian();
        (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0)
    }
}

fn wrap_phi(phi: f64) -> f64 {
    let p = phi.rem_euclid(TWO_PI);
    if p >= TWO_PI {
        0.0
    } else {
        p
    }
}

/// Rotation in ZYZ Euler angles: `R = Rz(alpha) Ry(beta) Rz(gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

type Mat3 = [[f64; 3]; 3];

fn rz(t: f64) -> Mat3 {
    let (s, c) = t.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

fn ry(t: f64) -> Mat3 {
    let (s, c) = t.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

fn matmul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn matvec(a: &Mat3, v: [f64; 3]) -> [f64; 3] {
    [
        a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
        a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
        a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
    ]
}

impl Rotation {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Rotation { alpha, beta, gamma }
    }

    pub fn identity() -> Self {
        Rotation::new(0.0, 0.0, 0.0)
    }

    /// A rotation taking the north pole to `p`.
    pub fn north_to(p: SphericalPoint) -> Self {
        Rotation::new(p.phi, p.theta, 0.0)
    }

    pub fn inverse(&self) -> Self {
        Rotation::new(-self.gamma, -self.beta, -self.alpha)
    }

    pub fn matrix(&self) -> Mat3 {
        matmul(&matmul(&rz(self.alpha), &ry(self.beta)), &rz(self.gamma))
    }

    pub fn apply(&self, p: &SphericalPoint) -> SphericalPoint {
        SphericalPoint::from_cartesian(matvec(&self.matrix(), p.to_cartesian()))
    }

    /// `R^{-1} p`.
    pub fn apply_inverse(&self, p: &SphericalPoint) -> SphericalPoint {
        let m = self.matrix();
        let v = p.to_cartesian();
        let t = [
            m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
            m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
            m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2],
        ];
        SphericalPoint::from_cartesian(t)
    }
}

fn check_scale(a: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("dilation parameter must be positive, got {a}")));
    }
    Ok(())
}

/// Cocycle `4a^2 / ((a^2 - 1) cos(theta) + a^2 + 1)^2`.
pub fn kappa(a: f64, theta: f64) -> Result<f64> {
    check_scale(a)?;
    Ok(kappa_unchecked(a, theta))
}

pub(crate) fn kappa_unchecked(a: f64, theta: f64) -> f64 {
    let a2 = a * a;
    // (a^2 - 1) cos + a^2 + 1 = (1 + cos) a^2 + (1 - cos), written without cancellation
    let (s, c) = (0.5 * theta).sin_cos();
    let d = 2.0 * (a2 * c * c + s * s);
    4.0 * a2 / (d * d)
}

/// Colatitude action `theta_a = 2 arctan(a tan(theta/2))`.
pub fn dilate_point(a: f64, theta: f64) -> Result<f64> {
    check_scale(a)?;
    Ok(dilate_unchecked(a, theta))
}

pub(crate) fn dilate_unchecked(a: f64, theta: f64) -> f64 {
    let (s, c) = (0.5 * theta).sin_cos();
    2.0 * (a * s).atan2(c)
}

/// Gauss-Legendre nodes in `cos(theta)` times a uniform longitude grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalGrid {
    pub theta: Vec<f64>,
    pub cos_theta: Vec<f64>,
    pub sin_theta: Vec<f64>,
    /// Gauss weights in `cos(theta)`; the tensor weight is this times `2 pi / n_phi`.
    pub theta_weights: Vec<f64>,
    pub n_phi: usize,
}

impl SphericalGrid {
    pub fn gauss(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::Resolution("grid dimensions must be positive".into()));
        }
        let rule = gauss_legendre(n_theta);
        // ascending theta means descending cos(theta)
        let mut cos_theta = rule.nodes.clone();
        cos_theta.reverse();
        let mut theta_weights = rule.weights.clone();
        theta_weights.reverse();
        let theta: Vec<f64> = cos_theta.iter().map(|c| c.acos()).collect();
        let sin_theta = theta.iter().map(|t| t.sin()).collect();
        Ok(SphericalGrid {
            theta,
            cos_theta,
            sin_theta,
            theta_weights,
            n_phi,
        })
    }

    /// Default grid for band limit `l_max`: `2 l_max` by `2 l_max + 1`.
    pub fn for_band_limit(l_max: usize) -> Self {
        Self::gauss((2 * l_max).max(1), 2 * l_max + 1).expect("positive dimensions")
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn len(&self) -> usize {
        self.n_theta() * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn phi(&self, j: usize) -> f64 {
        TWO_PI * j as f64 / self.n_phi as f64
    }

    pub fn phi_weight(&self) -> f64 {
        TWO_PI / self.n_phi as f64
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let _ = j;
        self.theta_weights[i] * self.phi_weight()
    }

    pub fn point(&self, i: usize, j: usize) -> SphericalPoint {
        SphericalPoint {
            theta: self.theta[i],
            phi: self.phi(j),
        }
    }

    /// Largest band limit the grid analyzes exactly.
    pub fn max_band_limit(&self) -> usize {
        (self.n_theta().saturating_sub(1)).min((self.n_phi.saturating_sub(1)) / 2)
    }

    pub fn weights(&self) -> Vec<f64> {
        let pw = self.phi_weight();
        let mut w = Vec::with_capacity(self.len());
        for &wt in &self.theta_weights {
            for _ in 0..self.n_phi {
                w.push(wt * pw);
            }
        }
        w
    }
}

/// Samples of a function on a [`SphericalGrid`], optionally carrying an exact
/// evaluator or a declared band limit for resampling.
#[derive(Clone)]
pub struct SphericalGridFunction {
    pub grid: SphericalGrid,
    /// Row-major: `values[i * n_phi + j]` is the sample at `(theta_i, phi_j)`.
    pub values: Vec<Complex64>,
    pub evaluator: Option<Evaluator>,
    pub band_limit: Option<usize>,
}

impl std::fmt::Debug for SphericalGridFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SphericalGridFunction")
            .field("n_theta", &self.grid.n_theta())
            .field("n_phi", &self.grid.n_phi)
            .field("band_limit", &self.band_limit)
            .field("has_evaluator", &self.evaluator.is_some())
            .finish()
    }
}

impl SphericalGridFunction {
    pub fn from_evaluator(grid: &SphericalGrid, f: Evaluator) -> Self {
        let n_phi = grid.n_phi;
        let values: Vec<Complex64> = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / n_phi, k % n_phi);
                f(grid.theta[i], grid.phi(j))
            })
            .collect();
        SphericalGridFunction {
            grid: grid.clone(),
            values,
            evaluator: Some(f),
            band_limit: None,
        }
    }

    pub fn from_fn<F>(grid: &SphericalGrid, f: F) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        Self::from_evaluator(grid, Arc::new(f))
    }

    pub fn from_samples(
        grid: &SphericalGrid,
        values: Vec<Complex64>,
        band_limit: Option<usize>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Resolution(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(SphericalGridFunction {
            grid: grid.clone(),
            values,
            evaluator: None,
            band_limit,
        })
    }

    pub fn zeros(grid: &SphericalGrid) -> Self {
        SphericalGridFunction {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            evaluator: None,
            band_limit: Some(0),
        }
    }

    pub fn with_band_limit(mut self, l: usize) -> Self {
        self.band_limit = Some(l);
        self
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.n_phi + j]
    }

    pub fn squared_norm(&self) -> f64 {
        let n_phi = self.grid.n_phi;
        let pw = self.grid.phi_weight();
        self.values
            .chunks(n_phi)
            .zip(&self.grid.theta_weights)
            .map(|(row, &w)| w * pw * row.iter().map(|v| v.norm_sqr()).sum::<f64>())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.squared_norm().sqrt()
    }

    /// `<self, other>` with the grid weights; the grids must agree.
    pub fn inner(&self, other: &SphericalGridFunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::Resolution("inner product of functions on different grids".into()));
        }
        let n_phi = self.grid.n_phi;
        let pw = self.grid.phi_weight();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &w) in self.grid.theta_weights.iter().enumerate() {
            let row: Complex64 = (0..n_phi)
                .map(|j| self.values[i * n_phi + j] * other.values[i * n_phi + j].conj())
                .sum();
            acc += row * (w * pw);
        }
        Ok(acc)
    }

    /// `sum w |f|` over the grid.
    pub fn integral(&self) -> Complex64 {
        let n_phi = self.grid.n_phi;
        let pw = self.grid.phi_weight();
        self.values
            .chunks(n_phi)
            .zip(&self.grid.theta_weights)
            .map(|(row, &w)| row.iter().sum::<Complex64>() * (w * pw))
            .sum()
    }

    pub fn max_abs_diff(&self, other: &SphericalGridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let evaluator = self.evaluator.clone().map(|f| -> Evaluator {
            Arc::new(move |t, p| c * f(t, p))
        });
        SphericalGridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            evaluator,
            band_limit: self.band_limit,
        }
    }

    /// Pointwise evaluator: the carried one, or band-limited synthesis.
    pub fn resampler(&self) -> Result<Evaluator> {
        if let Some(f) = &self.evaluator {
            return Ok(f.clone());
        }
        if let Some(l) = self.band_limit {
            let coeffs = harmonic::analyze(self, l)?;
            return Ok(Arc::new(move |t, p| coeffs.evaluate(t, p)));
        }
        Err(Error::Resampling(
            "samples carry neither an evaluator nor a band limit".into(),
        ))
    }
}

/// `D_a f` evaluator: `kappa(a, theta)^{1/2} f(theta_{1/a}, phi)`.
pub fn dilation_evaluator(a: f64, f: Evaluator) -> Evaluator {
    Arc::new(move |t, p| {
        let src = dilate_unchecked(1.0 / a, t);
        f(src, p) * kappa_unchecked(a, t).sqrt()
    })
}

/// `lambda(g) f` evaluator: `f(g^{-1} omega)`.
pub fn rotation_evaluator(g: Rotation, f: Evaluator) -> Evaluator {
    Arc::new(move |t, p| {
        let q = g.apply_inverse(&SphericalPoint { theta: t, phi: p });
        f(q.theta, q.phi)
    })
}

/// Samples of the unitary dilation `D_a f` on the grid of `f`.
pub fn dilation_apply(a: f64, f: &SphericalGridFunction) -> Result<SphericalGridFunction> {
    dilation_apply_on(a, f, &f.grid)
}

/// `D_a f` sampled on another grid, typically an oversampled one: dilations do
/// not preserve band limits.
pub fn dilation_apply_on(
    a: f64,
    f: &SphericalGridFunction,
    grid: &SphericalGrid,
) -> Result<SphericalGridFunction> {
    check_scale(a)?;
    if a == 1.0 && *grid == f.grid {
        return Ok(f.clone());
    }
    let src = f.resampler()?;
    Ok(SphericalGridFunction::from_evaluator(grid, dilation_evaluator(a, src)))
}

/// Samples of `lambda(g) f`. Rotations carry no density factor.
pub fn rotation_apply(g: &Rotation, f: &SphericalGridFunction) -> Result<SphericalGridFunction> {
    rotation_apply_on(g, f, &f.grid)
}

pub fn rotation_apply_on(
    g: &Rotation,
    f: &SphericalGridFunction,
    grid: &SphericalGrid,
) -> Result<SphericalGridFunction> {
    if *g == Rotation::identity() && *grid == f.grid {
        return Ok(f.clone());
    }
    let src = f.resampler()?;
    let mut out = SphericalGridFunction::from_evaluator(grid, rotation_evaluator(*g, src));
    // rotations preserve band limits
    out.band_limit = f.band_limit;
    Ok(out)
}

/// `lambda(g) D_a f`.
pub fn representation_apply(
    g: &Rotation,
    a: f64,
    f: &SphericalGridFunction,
) -> Result<SphericalGridFunction> {
    check_scale(a)?;
    let src = f.resampler()?;
    let ev = rotation_evaluator(*g, dilation_evaluator(a, src));
    Ok(SphericalGridFunction::from_evaluator(&f.grid, ev))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(1.0, 0.7).unwrap(), 1.0);
        assert!((kappa(2.0, PI / 2.0).unwrap() - 0.64).abs() < 1e-15);
        assert!((kappa(3.0, 0.0).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        assert!(kappa(0.0, 1.0).is_err());
        assert!(kappa(-1.0, 1.0).is_err());
    }

    #[test]
    fn dilate_examples() {
        assert!((dilate_point(1.0, 1.1).unwrap() - 1.1).abs() < 1e-15);
        assert!((dilate_point(2.0, PI / 2.0).unwrap() - 2.0 * 2f64.atan()).abs() < 1e-15);
        let t = 0.83;
        let back = dilate_point(0.5, dilate_point(2.0, t).unwrap()).unwrap();
        assert!((back - t).abs() < 1e-12);
        assert_eq!(dilate_point(3.0, 0.0).unwrap(), 0.0);
        assert!((dilate_point(3.0, PI).unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn rotation_round_trip() {
        let g = Rotation::new(0.3, 1.1, -2.0);
        let p = SphericalPoint::new(0.9, 4.0).unwrap();
        let q = g.inverse().apply(&g.apply(&p));
        assert!((q.dot(&p) - 1.0).abs() < 1e-12);
        let n = Rotation::north_to(p).apply(&SphericalPoint::NORTH);
        assert!((n.theta - p.theta).abs() < 1e-12 && (n.phi - p.phi).abs() < 1e-12);
    }

    #[test]
    fn grid_weights_sum() {
        let g = SphericalGrid::for_band_limit(7);
        let s: f64 = g.weights().iter().sum();
        assert!((s - 4.0 * PI).abs() < 1e-10);
        assert!(g.weights().iter().all(|&w| w > 0.0));
        assert_eq!(g.max_band_limit(), 7);
    }

    #[test]
    fn pure_samples_cannot_be_dilated() {
        let g = SphericalGrid::for_band_limit(3);
        let f = SphericalGridFunction::from_samples(&g, vec![Complex64::new(1.0, 0.0); g.len()], None)
            .unwrap();
        assert!(matches!(dilation_apply(2.0, &f), Err(Error::Resampling(_))));
        assert!(dilation_apply(2.0, &f.clone().with_band_limit(0)).is_ok());
    }
}
