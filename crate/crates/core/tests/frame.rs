mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use sphwave::frame::*;
use sphwave::harmonic::{analyze, synthesize, HarmonicCoefficients};
use sphwave::sphere::{rotation_apply, Rotation, SphericalGrid, HAAR_SO3};
use sphwave::wavelet::{builtin, Wavelet};
use sphwave::Error;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn scale_grid_invariants() {
    for (lo, hi, n) in [(-10.0, 8.0, 181), (-3.0, 2.5, 12), (0.0, 1.0, 2)] {
        let g = ScaleGrid::new(lo, hi, n).unwrap();
        assert!(g.nodes.windows(2).all(|w| w[1] > w[0]));
        assert!(g.weights.iter().all(|&w| w > 0.0));
        // int a^2 da/a^3 over the range is its log-length
        let s: f64 = g.weights.iter().zip(g.scales()).map(|(w, a)| w * a * a).sum();
        assert!((s - (hi - lo)).abs() < 1e-10, "{s}");
        let r = g.refined();
        assert_eq!(r.len(), 2 * n - 1);
        assert!((r.step() - 0.5 * g.step()).abs() < 1e-15);
    }
    assert!(ScaleGrid::new(0.0, 1.0, 1).is_err());
    assert!(ScaleGrid::new(2.0, 1.0, 10).is_err());
}

#[test]
fn tail_bound_examples() {
    assert!((tail_bound(0, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
    assert!((tail_bound(4, 1.0, 1.0).unwrap() - 1.0 / 18.0).abs() < 1e-15);
    assert!(tail_bound(3, -1.0, 1.0).is_err());
    assert_eq!(tail_bound(3, 2.0, 0.0).unwrap(), 0.0);
}

#[test]
fn tail_piece_below_bound() {
    let eta = builtin::canonical();
    let norm = eta.norm_sq().sqrt();
    for eps in [0.5f64, 1.0, 2.0] {
        let g = ScaleGrid::new(eps.ln(), eps.ln() + 14.0, 561).unwrap();
        let piece = g_values_on(&eta, 12, &g, default_step(12));
        for (l, v) in piece.iter().enumerate() {
            assert!(*v >= 0.0 && *v <= tail_bound(l, eps, norm).unwrap(), "l {l} eps {eps}");
        }
    }
}

#[test]
fn g_ell_matches_oracle_low_degrees() {
    let eta = builtin::canonical();
    let s = frame_spectrum(&eta, 8, &ScaleGrid::default()).unwrap();
    for l in 0..=8 {
        let oracle = common::g_ell(common::eta_star, l);
        assert!(oracle > 0.0);
        assert!(rel(s.g_values[l], oracle) < 1e-4, "l {l}: {} vs {oracle}", s.g_values[l]);
        assert!(s.error_estimates[l] >= 0.0 && s.tail_bounds[l] >= 0.0);
    }
    let one = g_ell(&eta, 3, &ScaleGrid::default()).unwrap();
    assert!(rel(one.value, s.g_values[3]) < 1e-12);
}

#[test]
fn spectrum_l32_matches_oracle() {
    let s = frame_spectrum(&builtin::canonical(), 32, &ScaleGrid::default()).unwrap();
    assert!(s.lower_bound > 0.0 && s.upper_bound.is_finite() && s.lower_bound <= s.upper_bound);
    for l in [12usize, 20, 32] {
        let oracle = common::g_ell(common::eta_star, l);
        assert!(rel(s.g_values[l], oracle) < 1e-3, "l {l}: {} vs {oracle}", s.g_values[l]);
    }
    let min = s.g_values.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!((s.lower_bound - HAAR_SO3 * min).abs() < 1e-12 * s.upper_bound);
    let j = s.summary_json();
    assert_eq!(j["certified_lower_bound"], serde_json::Value::Null);
    assert!(j["caveat"].as_str().unwrap().contains("l <= l_max"));
}

#[test]
fn spectrum_special_cases() {
    // zero longitudinal average: nothing reaches degree 0
    let s = frame_spectrum(&builtin::cosphi(), 6, &ScaleGrid::default()).unwrap();
    assert!(s.g_values[0].abs() <= 1e-10);
    assert_eq!(s.singular_degree().unwrap().0, 0);
    assert!(s.g_values[1] > 0.0);

    let z = frame_spectrum(&Wavelet::zero(), 4, &ScaleGrid::default()).unwrap();
    assert!(z.g_values.iter().all(|&g| g == 0.0));

    match frame_spectrum(&builtin::seed(), 4, &ScaleGrid::default()) {
        Err(Error::NonConvergence { .. }) => {}
        other => panic!("expected non-convergence, got {other:?}"),
    }

    let eta = builtin::canonical();
    let base = frame_spectrum(&eta, 6, &ScaleGrid::default()).unwrap();
    let doubled = frame_spectrum(&eta.scaled(Complex64::new(2.0, 0.0)), 6, &ScaleGrid::default()).unwrap();
    for (a, b) in base.g_values.iter().zip(&doubled.g_values) {
        assert!(rel(*b, 4.0 * a) < 1e-12);
    }
}

#[test]
fn csv_has_all_columns() {
    let s = FrameSpectrum::from_values(vec![1.0, 2.0, 3.0]);
    let mut buf = Vec::new();
    s.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "l,g_ell,error_estimate,tail_bound");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("2,3.0"));
}

fn band_limited(l_max: usize, seed: u64) -> (HarmonicCoefficients, sphwave::sphere::SphericalGridFunction) {
    let c = common::random_coefficients(l_max, seed);
    let f = synthesize(&c, &SphericalGrid::for_band_limit(l_max));
    (c, f)
}

#[test]
fn apply_and_invert_examples() {
    let (_, f) = band_limited(6, 1);
    let g = 0.37;
    let constant = FrameSpectrum::from_values(vec![g; 7]);
    let a = frame_operator_apply(&constant, &f).unwrap();
    assert!(a.max_abs_diff(&f.scaled(Complex64::new(HAAR_SO3 * g, 0.0))) < 1e-10);
    let inv = frame_operator_invert(&constant, &f).unwrap();
    assert!(inv.max_abs_diff(&f.scaled(Complex64::new(1.0 / (HAAR_SO3 * g), 0.0))) < 1e-12);

    let spec = FrameSpectrum::from_values((0..=6).map(|l| 0.1 + 0.03 * l as f64).collect());
    let grid = SphericalGrid::for_band_limit(6);
    let y50 = synthesize(&HarmonicCoefficients::unit(6, 5, 0), &grid);
    let a = frame_operator_apply(&spec, &y50).unwrap();
    assert!(a.max_abs_diff(&y50.scaled(Complex64::new(HAAR_SO3 * spec.g_values[5], 0.0))) < 1e-10);

    let back = frame_operator_apply(&spec, &frame_operator_invert(&spec, &f).unwrap()).unwrap();
    assert!(back.max_abs_diff(&f) < 1e-10);

    let r = Rotation::new(0.4, 1.1, -0.8);
    let lhs = frame_operator_apply(&spec, &rotation_apply(&r, &f).unwrap()).unwrap();
    let rhs = rotation_apply(&r, &frame_operator_apply(&spec, &f).unwrap()).unwrap();
    assert!(lhs.max_abs_diff(&rhs) < 1e-8);

    let singular = FrameSpectrum::from_values(vec![0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
    match frame_operator_invert(&singular, &f) {
        Err(Error::SingularSpectrum { ell: 0, .. }) => {}
        other => panic!("expected a singular spectrum at l = 0, got {other:?}"),
    }
    let short = FrameSpectrum::from_values(vec![1.0; 4]);
    assert!(matches!(frame_operator_apply(&short, &f), Err(Error::BandLimit(_))));
}

/// Both sides on one coarse 12-node scale grid: the spectrum from that grid against
/// the double quadrature over positions and the same scale nodes.
#[test]
fn diagonal_form_matches_brute_force() {
    let eta = builtin::canonical();
    let scales = ScaleGrid::new(-7.0, 4.0, 12).unwrap();
    let s = FrameSpectrum::from_values(g_values_on(&eta, 4, &scales, default_step(4)));
    let (cp, fp) = band_limited(4, 21);
    let (cq, fq) = band_limited(4, 22);
    let diag = frame_operator_apply(&s, &fp).unwrap().inner(&fq).unwrap();
    let brute = common::frame_form_brute_force(&cp, &cq, common::eta_star, &SphericalGrid::for_band_limit(4), &scales);
    assert!((diag - brute).norm() <= 0.01 * diag.norm(), "{diag} vs {brute}");
    // the same through coefficients
    let c = analyze(&fp, 4).unwrap();
    let d: Complex64 = (0..=4usize)
        .map(|l| {
            (-(l as i64)..=(l as i64))
                .map(|m| c.get(l, m) * cq.get(l, m).conj())
                .sum::<Complex64>()
                * (HAAR_SO3 * s.g_values[l])
        })
        .sum();
    assert!((d - diag).norm() < 1e-10 * diag.norm());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn phase_invariance(tau in 0.0f64..(2.0 * PI)) {
        let eta = builtin::canonical();
        let grid = ScaleGrid::new(-8.0, 6.0, 57).unwrap();
        let h = default_step(6);
        let a = g_values_on(&eta, 6, &grid, h);
        let b = g_values_on(&eta.scaled(Complex64::from_polar(1.0, tau)), 6, &grid, h);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!(*x >= 0.0);
            prop_assert!((x - y).abs() <= 1e-12 * x.max(1e-300));
        }
    }
}
