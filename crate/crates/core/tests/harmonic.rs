mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use sphwave::harmonic::*;
use sphwave::specfun::legendre_p;
use sphwave::sphere::*;

fn y31(theta: f64, phi: f64) -> Complex64 {
    let x = theta.cos();
    // sqrt(7/(4 pi) * 2!/4!) * 3/2 (5x^2 - 1) sin(theta)
    let n = (7.0 / (4.0 * PI) / 12.0).sqrt();
    Complex64::from_polar(n * 1.5 * (5.0 * x * x - 1.0) * theta.sin(), phi)
}

#[test]
fn y31_matches_closed_form() {
    for (t, p) in [(0.3, 0.1), (1.2, 4.0), (2.9, 2.2)] {
        let lib = spherical_harmonic(3, 1, t, p).unwrap();
        assert!((lib - y31(t, p)).norm() < 1e-14);
        assert!((spherical_harmonic(3, -1, t, p).unwrap() - y31(t, p).conj()).norm() < 1e-14);
    }
    assert!(spherical_harmonic(2, 3, 0.0, 0.0).is_err());
}

#[test]
fn analyze_examples() {
    let g = SphericalGrid::for_band_limit(6);
    let f = SphericalGridFunction::from_fn(&g, y31);
    let c = analyze(&f, 6).unwrap();
    for l in 0..=6usize {
        for m in -(l as i64)..=(l as i64) {
            let e = if (l, m) == (3, 1) { 1.0 } else { 0.0 };
            assert!((c.get(l, m) - e).norm() < 1e-12);
        }
    }
    let one = SphericalGridFunction::from_fn(&g, |_, _| Complex64::new(1.0, 0.0));
    let c = analyze(&one, 6).unwrap();
    assert!((c.get(0, 0) - (4.0 * PI).sqrt()).norm() < 1e-12);
    assert!(c.coeffs[1..].iter().all(|v| v.norm() < 1e-12));

    assert!(analyze(&f, 7).is_err(), "n_phi too small");
    let narrow = SphericalGrid::gauss(3, 40).unwrap();
    assert!(analyze(&SphericalGridFunction::zeros(&narrow), 5).is_err());
}

#[test]
fn synthesize_examples() {
    let g = SphericalGrid::for_band_limit(5);
    let f = synthesize(&HarmonicCoefficients::unit(5, 0, 0), &g);
    let y00 = 1.0 / (4.0 * PI).sqrt();
    assert!(f.values.iter().all(|v| (v - y00).norm() < 1e-14));
    let z = synthesize(&HarmonicCoefficients::zeros(5), &g);
    assert!(z.values.iter().all(|v| *v == Complex64::new(0.0, 0.0)));
}

#[test]
fn zonal_project_examples() {
    let g = SphericalGrid::for_band_limit(6);
    let f = SphericalGridFunction::from_fn(&g, y31);
    assert!(zonal_project(&f, 3, 6).unwrap().max_abs_diff(&f) < 1e-12);
    assert!(zonal_project(&f, 2, 6).unwrap().values.iter().all(|v| v.norm() < 1e-12));
    assert!(zonal_project(&f, 7, 6).is_err());

    let c = common::random_coefficients(6, 11);
    let h = synthesize(&c, &g);
    let p = zonal_project(&h, 4, 6).unwrap();
    let pp = zonal_project(&p, 4, 6).unwrap();
    assert!(pp.max_abs_diff(&p) < 1e-12);
}

#[test]
fn zonal_norms_examples() {
    let g = SphericalGrid::for_band_limit(8);
    let y50 = synthesize(&HarmonicCoefficients::unit(8, 5, 0), &g);
    let n = zonal_norms(&y50, 8).unwrap();
    for (l, v) in n.iter().enumerate() {
        assert!((v - if l == 5 { 1.0 } else { 0.0 }).abs() < 1e-12);
    }

    // axisymmetric input: everything in m = 0, and the fast path agrees
    let prof = |t: f64| Complex64::new((2.0 * t.cos()).exp(), 0.0);
    let f = SphericalGridFunction::from_fn(&g, move |t, _| prof(t));
    let c = analyze(&f, 8).unwrap();
    let n = c.zonal_norms();
    let column: Vec<Complex64> = g.theta.iter().map(|&t| prof(t)).collect();
    let fast = analyze_axisymmetric(&g, &column, 8).unwrap();
    for l in 0..=8usize {
        assert!((n[l] - c.get(l, 0).norm_sqr()).abs() < 1e-12);
        assert!((fast[l] - c.get(l, 0)).norm() < 1e-10, "{l}");
        for m in 1..=(l as i64) {
            assert!(c.get(l, m).norm() < 1e-12 && c.get(l, -m).norm() < 1e-12);
        }
    }
    // non-band-limited: zonal norms never exceed the total
    let total = f.squared_norm();
    assert!(n.iter().sum::<f64>() <= total + 1e-9);
}

/// `(2l+1)/(4 pi) int P_l(omega . omega') f(omega') dSigma(omega')` by double quadrature.
#[test]
fn kernel_form_of_projection() {
    for l_max in [2usize, 5, 8] {
        let g = SphericalGrid::for_band_limit(l_max);
        let c = common::random_coefficients(l_max, l_max as u64);
        let f = synthesize(&c, &g);
        let w = g.weights();
        let pts: Vec<SphericalPoint> = (0..g.n_theta()).flat_map(|i| (0..g.n_phi).map(move |j| (i, j))).map(|(i, j)| g.point(i, j)).collect();
        for l in 0..=l_max {
            let proj = zonal_project(&f, l, l_max).unwrap();
            let k = (2 * l + 1) as f64 / (4.0 * PI);
            for (idx, p) in pts.iter().enumerate().step_by(7) {
                let mut acc = Complex64::new(0.0, 0.0);
                for (q, (&wq, v)) in pts.iter().zip(w.iter().zip(&f.values)) {
                    acc += v * (legendre_p(l, p.dot(q).clamp(-1.0, 1.0)).unwrap() * wq);
                }
                assert!((acc * k - proj.values[idx]).norm() < 1e-8, "L {l_max} l {l}");
            }
        }
    }
}

#[test]
fn coefficient_file_round_trip() {
    let c = common::random_coefficients(7, 2);
    let mut buf = Vec::new();
    c.write_to(&mut buf).unwrap();
    let back = HarmonicCoefficients::read_from(&buf[..]).unwrap();
    assert_eq!(back.l_max, 7);
    assert_eq!(back, c);
    assert!(HarmonicCoefficients::read_from(&b"garbage\n"[..]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn round_trip_and_parseval(l_max in 0usize..=16, seed in 0u64..10_000) {
        let c = common::random_coefficients(l_max, seed);
        let g = SphericalGrid::for_band_limit(l_max);
        let f = synthesize(&c, &g);
        let back = analyze(&f, l_max).unwrap();
        let err = c.coeffs.iter().zip(&back.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10);
        prop_assert!((c.norm_sq() - f.squared_norm()).abs() < 1e-10 * c.norm_sq().max(1.0));
        let again = synthesize(&back, &g);
        prop_assert!(again.max_abs_diff(&f) < 1e-10);
        let zn = zonal_norms(&f, l_max).unwrap();
        prop_assert!(zn.iter().all(|&v| v >= 0.0));
        prop_assert!((zn.iter().sum::<f64>() - f.squared_norm()).abs() < 1e-10 * f.squared_norm().max(1.0));
    }

    #[test]
    fn zonal_norms_rotation_invariant(al in -7.0f64..7.0, be in 0.0f64..PI, ga in -7.0f64..7.0, seed in 0u64..10_000) {
        let l_max = 10;
        let c = common::random_coefficients(l_max, seed);
        let g = SphericalGrid::for_band_limit(l_max);
        let f = synthesize(&c, &g);
        let rf = rotation_apply(&Rotation::new(al, be, ga), &f).unwrap();
        let a = zonal_norms(&f, l_max).unwrap();
        let b = zonal_norms(&rf, l_max).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-8 * x.max(1.0));
        }
    }
}
