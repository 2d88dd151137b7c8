//! Independent oracles shared by the integration tests. Nothing here goes through
//! the library's quadratures: profiles are written out in `t = tan(theta/2)` and
//! integrated with adaptive Gauss-Kronrod on the log-radial line.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sphwave::harmonic::HarmonicCoefficients;
use sphwave::sphere::{Rotation, SphericalPoint};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (v, e) = gk15(f, a, b);
    // stop at the roundoff floor as well as at the requested tolerance
    if e <= tol.max(1e-13 * v.abs()) || depth == 0 {
        return v;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss-Kronrod integral of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let n = 64;
    let w = (b - a) / n as f64;
    (0..n)
        .map(|i| adapt(&f, a + i as f64 * w, a + (i + 1) as f64 * w, tol / n as f64, 30))
        .sum()
}

/// `int_0^inf g(t) dt` through `t = e^u`, `u in [-60, 8]`.
pub fn integrate_t(g: impl Fn(f64) -> f64) -> f64 {
    integrate(|u| {
        let t = u.exp();
        g(t) * t
    }, -60.0, 8.0, 1e-15)
}

/// Axisymmetric profiles written in `t = tan(theta/2)`.
pub type TProfile = fn(f64) -> f64;

/// `sin^2 theta exp(-tan^2(theta/2))`.
pub fn zeta_star(t: f64) -> f64 {
    let s = 2.0 * t / (1.0 + t * t);
    s * s * (-t * t).exp()
}

/// `(D_a f)(t) = kappa(a)^{1/2} f(t / a)`, `kappa^{1/2} = a (1 + t^2) / (a^2 + t^2)`.
pub fn dilate_t(a: f64, f: impl Fn(f64) -> f64, t: f64) -> f64 {
    a * (1.0 + t * t) / (a * a + t * t) * f(t / a)
}

/// `zeta* - D_2 zeta* / 2`.
pub fn eta_star(t: f64) -> f64 {
    zeta_star(t) - 0.5 * dilate_t(2.0, zeta_star, t)
}

/// `theta` and `t` conversions.
pub fn t_of(theta: f64) -> f64 {
    (0.5 * theta).tan()
}

pub fn theta_of(t: f64) -> f64 {
    2.0 * t.atan()
}

/// `int eta / (1 + cos theta) dSigma = 2 pi int 2t eta / (1 + t^2) dt`.
pub fn cancellation(f: impl Fn(f64) -> f64) -> f64 {
    2.0 * PI * integrate_t(|t| 2.0 * t * f(t) / (1.0 + t * t))
}

/// `int |eta^[1]| dSigma`.
pub fn int_abs_one(f: impl Fn(f64) -> f64) -> f64 {
    2.0 * PI * integrate_t(|t| 2.0 * t * f(t).abs() / (1.0 + t * t))
}

/// `int |eta^[2]| dSigma`.
pub fn int_abs_two(f: impl Fn(f64) -> f64) -> f64 {
    2.0 * PI * integrate_t(|t| 2.0 * t.powi(3) * f(t).abs() / (1.0 + t * t))
}

/// `||eta||^2 = 2 pi int |eta|^2 4t / (1+t^2)^2 dt`.
pub fn norm_sq(f: impl Fn(f64) -> f64) -> f64 {
    2.0 * PI * integrate_t(|t| 4.0 * t * f(t).powi(2) / (1.0 + t * t).powi(2))
}

/// Dense-grid maximum of `|eta| (1+t^2)^2 / (2 t^2)`, refined until stable.
pub fn sup_weighted(f: impl Fn(f64) -> f64) -> f64 {
    let mut prev = f64::NAN;
    let mut n = 2000;
    loop {
        let (lo, hi) = (-12.0f64, 4.0f64);
        let h = (hi - lo) / n as f64;
        let mut best = 0.0f64;
        let mut arg = 0.0;
        for j in 0..=n {
            let u = lo + j as f64 * h;
            let t = u.exp();
            let w = f(t).abs() * (1.0 + t * t).powi(2) / (2.0 * t * t);
            if w > best {
                best = w;
                arg = u;
            }
        }
        // golden-section polish around the best sample
        let (mut a, mut b) = (arg - h, arg + h);
        let g = |u: f64| {
            let t = u.exp();
            f(t).abs() * (1.0 + t * t).powi(2) / (2.0 * t * t)
        };
        let r = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..100 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if g(c) > g(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let v = best.max(g(0.5 * (a + b)));
        if (v - prev).abs() <= 1e-12 * v {
            return v;
        }
        prev = v;
        n *= 2;
        if n > 64000 {
            return v;
        }
    }
}

/// Random coefficients, uniform in the unit square, band limit `l_max`.
pub fn random_coefficients(l_max: usize, seed: u64) -> HarmonicCoefficients {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = HarmonicCoefficients::zeros(l_max);
    for v in &mut c.coeffs {
        *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    c
}

/// `<phi, lambda(g) D_a eta>` by direct quadrature in the frame of the wavelet:
/// `int phi(g omega) conj(eta_a(omega)) dSigma` with `omega = (2 atan e^u, psi)`,
/// `dSigma = sech^2 u du dpsi`.
pub fn voice_oracle(phi: &HarmonicCoefficients, eta: impl Fn(f64) -> f64, omega0: SphericalPoint, a: f64) -> Complex64 {
    let g = Rotation::north_to(omega0);
    let n_psi = 2 * phi.l_max + 3;
    // trapezoid in u: the integrand is analytic in a strip, so h = 0.05 is far past 1e-10
    let (lo, hi) = (a.ln() - 12.0, a.ln() + 5.0);
    let h = 0.05;
    let n = ((hi - lo) / h) as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..=n {
        let u = lo + j as f64 * h;
        let t = u.exp();
        let e = dilate_t(a, &eta, t);
        if e == 0.0 {
            continue;
        }
        let theta = theta_of(t);
        let mean: Complex64 = (0..n_psi)
            .map(|k| {
                let q = g.apply(&SphericalPoint { theta, phi: 2.0 * PI * k as f64 / n_psi as f64 });
                phi.evaluate(q.theta, q.phi)
            })
            .sum::<Complex64>()
            / n_psi as f64;
        let sech = 1.0 / u.cosh();
        acc += mean * (e * sech * sech);
    }
    acc * (2.0 * PI * h)
}

/// Textbook three-term recurrence for `P_l`.
pub fn legendre_ref(l: usize, x: f64) -> f64 {
    if l == 0 {
        return 1.0;
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..l {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `<D_a eta, Y_l^0>` for a real axisymmetric profile in `t`:
/// `2 pi sqrt((2l+1)/(4 pi)) int eta_a(t) P_l((1-t^2)/(1+t^2)) 4t/(1+t^2)^2 dt`.
pub fn zonal_coeff(eta: impl Fn(f64) -> f64, l: usize, a: f64) -> f64 {
    let n = 2.0 * PI * ((2 * l + 1) as f64 / (4.0 * PI)).sqrt();
    let la = a.ln();
    n * integrate(
        |u| {
            let t = u.exp();
            let q = 1.0 + t * t;
            dilate_t(a, &eta, t) * legendre_ref(l, (1.0 - t * t) / q) * 4.0 * t * t / (q * q)
        },
        la - 14.0,
        la + 5.0,
        1e-14,
    )
}

/// `G_l = (2l+1)^{-1} int |<D_a eta, Y_l^0>|^2 da/a^3` over `b = ln a in [-14, 12]`.
pub fn g_ell(eta: impl Fn(f64) -> f64 + Copy, l: usize) -> f64 {
    integrate(
        |b| {
            let c = zonal_coeff(eta, l, b.exp());
            c * c * (-2.0 * b).exp()
        },
        -14.0,
        12.0,
        1e-12,
    ) / (2 * l + 1) as f64
}

/// `int <phi, U eta> <U eta, psi> dnu` by brute force for an axisymmetric real `eta`:
/// `2 pi sum_k w_k sum_p w_p W_phi conj(W_psi)` with the voice values from
/// [`voice_oracle`], positions on `positions` and the nodes and `da/a^3` weights of `scales`.
pub fn frame_form_brute_force(
    phi: &HarmonicCoefficients,
    psi: &HarmonicCoefficients,
    eta: impl Fn(f64) -> f64 + Copy,
    positions: &sphwave::sphere::SphericalGrid,
    scales: &sphwave::frame::ScaleGrid,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (&b, &wb) in scales.nodes.iter().zip(&scales.weights) {
        let a = b.exp();
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..positions.n_theta() {
            for j in 0..positions.n_phi {
                let p = positions.point(i, j);
                let wp = voice_oracle(phi, eta, p, a);
                let wq = voice_oracle(psi, eta, p, a);
                s += wp * wq.conj() * positions.weight(i, j);
            }
        }
        acc += s * wb;
    }
    acc * (2.0 * PI)
}
