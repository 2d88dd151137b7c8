mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use sphwave::admissibility::*;
use sphwave::harmonic::spherical_harmonic;
use sphwave::sphere::{SphericalGrid, SphericalGridFunction};
use sphwave::wavelet::{builtin, AxisymmetricProfile, DecayClass, Mode, Wavelet};

// Adaptive t-line quadrature of the profiles in `common`; see `frozen_values_match_oracle`.
const SEED_C1: f64 = 2.65097531917197982;
const SEED_C2: f64 = 2.19197133150482903;
const SEED_NORM_SQ: f64 = 1.36106670990271628;
const CANON_C1: f64 = 3.09259205436032092;
const CANON_C2: f64 = 8.05892337579219564;
const CANON_NORM_SQ: f64 = 0.898977703691201557;
const SEED_SUP: f64 = 2.0;
const CANON_SUP: f64 = 1.875;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn theta_wavelet(f: impl Fn(f64) -> f64 + Send + Sync + 'static, decay: DecayClass) -> Wavelet {
    Wavelet::axisymmetric(AxisymmetricProfile::from_theta("test", move |t| Complex64::new(f(t), 0.0), decay))
}

#[test]
fn frozen_values_match_oracle() {
    let z = common::zeta_star;
    let e = common::eta_star;
    assert!(rel(common::int_abs_one(z), SEED_C1) < 1e-12);
    assert!(rel(common::cancellation(z), SEED_C1) < 1e-12);
    assert!(rel(common::int_abs_two(z), SEED_C2) < 1e-12);
    assert!(rel(common::norm_sq(z), SEED_NORM_SQ) < 1e-12);
    assert!(rel(common::int_abs_one(e), CANON_C1) < 1e-12);
    assert!(rel(common::int_abs_two(e), CANON_C2) < 1e-12);
    assert!(rel(common::norm_sq(e), CANON_NORM_SQ) < 1e-12);
    assert!(common::cancellation(e).abs() < 1e-14);
    assert!(rel(common::sup_weighted(z), SEED_SUP) < 1e-9);
    assert!(rel(common::sup_weighted(e), CANON_SUP) < 1e-9);
}

#[test]
fn eta_one_and_two_examples() {
    let w = theta_wavelet(|t| 1.0 + t.cos(), DecayClass::Polynomial { order: 3.0 });
    let one = eta_one(&w);
    for t in [0.1, 1.0, 2.5, 2.9, 3.1] {
        assert!((one(t, 0.3) - 1.0).norm() < 1e-9, "{t}");
    }
    let w = theta_wavelet(|t| (1.0 + t.cos()) / (0.5 * t).tan().powi(2), DecayClass::Polynomial { order: 1.0 });
    let two = eta_two(&w);
    for t in [0.3, 1.0, 2.0, 2.5] {
        assert!((two(t, 0.0) - 1.0).norm() < 1e-12, "{t}");
    }
    let z = Wavelet::zero();
    assert_eq!(eta_one(&z)(1.0, 1.0), Complex64::new(0.0, 0.0));
    assert_eq!(eta_two(&z)(1.0, 1.0), Complex64::new(0.0, 0.0));
}

#[test]
fn condition_integrals_vs_oracle() {
    let seed = builtin::seed();
    let canon = builtin::canonical();
    assert!(rel(c_integrable_1(&seed).unwrap(), SEED_C1) < 1e-8);
    assert!(rel(c_integrable_2(&seed).unwrap(), SEED_C2) < 1e-8);
    assert!(rel(c_integrable_1(&canon).unwrap(), CANON_C1) < 1e-8);
    assert!(rel(c_integrable_2(&canon).unwrap(), CANON_C2) < 1e-8);
    assert_eq!(c_integrable_1(&Wavelet::zero()).unwrap(), 0.0);

    let i = cancellation_integral(&seed).unwrap();
    assert!(rel(i.re, SEED_C1) < 1e-8 && i.im.abs() < 1e-12);
    assert!(cancellation_integral(&canon).unwrap().norm() <= 1e-8 * CANON_C1);
    assert_eq!(cancellation_integral(&Wavelet::zero()).unwrap().norm(), 0.0);

    assert!(rel(seed.norm_sq(), SEED_NORM_SQ) < 1e-8);
    assert!(rel(canon.norm_sq(), CANON_NORM_SQ) < 1e-8);
}

#[test]
fn sup_examples() {
    // 1 - cos(theta) written as 2 sin^2(theta/2): the direct form rounds up near the pole
    let w = theta_wavelet(
        |t| 2.0 * (0.5 * t).sin().powi(2) / (1.0 + (0.5 * t).tan().powi(2)),
        DecayClass::Polynomial { order: 1.0 },
    );
    let s = sup_condition(&w);
    assert!(s.finite && (s.value - 1.0).abs() < 1e-9, "{s:?}");
    let s = sup_condition(&builtin::constant());
    assert!(!s.finite && s.value.is_infinite());
    let s = sup_condition(&builtin::seed());
    assert!(s.finite && rel(s.value, SEED_SUP) < 1e-6);
    let s = sup_condition(&builtin::canonical());
    assert!(s.finite && rel(s.value, CANON_SUP) < 1e-6);
}

#[test]
fn eta_tilde_examples() {
    let seed = builtin::seed();
    let t = eta_tilde(&seed);
    for th in [0.2, 1.5, 3.0] {
        assert_eq!(t.eval(th), seed.eval(th, 0.7));
    }
    let cp = eta_tilde(&builtin::cosphi());
    assert!([0.5, 1.0, 2.0].iter().all(|&th| cp.eval(th).norm() == 0.0));

    let g = SphericalGrid::for_band_limit(6);
    let f = SphericalGridFunction::from_fn(&g, |t, p| {
        spherical_harmonic(2, 1, t, p).unwrap() + spherical_harmonic(3, 0, t, p).unwrap()
    });
    let rows = eta_tilde_samples(&f);
    for (i, v) in rows.iter().enumerate() {
        let y30 = spherical_harmonic(3, 0, g.theta[i], 0.0).unwrap();
        assert!((v - y30).norm() < 1e-12);
    }
    let prof = eta_tilde_grid(&f).unwrap();
    for th in [0.1, 1.3, 2.7] {
        assert!((prof.eval(th) - spherical_harmonic(3, 0, th, 0.0).unwrap()).norm() < 1e-12);
    }
    // idempotent
    let again = eta_tilde_grid(&SphericalGridFunction::from_fn(&g, {
        let p = prof.clone();
        move |t, _| p.eval(t)
    }).with_band_limit(6))
    .unwrap();
    for th in [0.4, 2.0] {
        assert!((again.eval(th) - prof.eval(th)).norm() < 1e-12);
    }
}

#[test]
fn constructor() {
    let seed = builtin::seed();
    let eta = construct_admissible(&seed, 2.0).unwrap();
    let c1 = c_integrable_1(&eta).unwrap();
    assert!(cancellation_integral(&eta).unwrap().norm() <= 1e-8 * c1);
    assert!(eta.norm_sq() > 0.0);
    assert!(matches!(construct_admissible(&seed, 1.0), Err(sphwave::Error::Degenerate(_))));
    assert!(construct_admissible(&seed, -2.0).is_err());
    let i = cancellation_integral(&seed).unwrap();
    for alpha in [0.5, 2.0, 5.0] {
        let d = cancellation_integral(&seed.dilated(alpha).unwrap()).unwrap();
        assert!((i - d / alpha).norm() <= 1e-8 * i.norm(), "{alpha}");
    }
}

#[test]
fn verdicts() {
    let r = full_report(&builtin::canonical());
    assert_eq!(r.verdict, Verdict::AdmissibleCandidate);
    assert!(rel(r.c_integrable_1, CANON_C1) < 1e-8 && rel(r.c_integrable_2, CANON_C2) < 1e-8);
    assert!(rel(r.c_sup.value, CANON_SUP) < 1e-6);
    assert!(r.eta_tilde_nonzero);
    assert_eq!(r.decide(), r.verdict);

    let r = full_report(&builtin::cosphi());
    assert_eq!(r.verdict, Verdict::FailsLower);
    assert!(r.cancellation_abs <= 1e-6 * r.c_integrable_1 && !r.eta_tilde_nonzero);

    let r = full_report(&builtin::constant());
    assert_eq!(r.verdict, Verdict::FailsUpper);
    assert!(!r.c_sup.finite);

    let r = full_report(&builtin::seed());
    assert_eq!(r.verdict, Verdict::FailsUpper);
    assert!(r.c_integrable_1 >= 0.0 && r.c_integrable_2 >= 0.0);

    let r = full_report(&Wavelet::zero());
    assert_eq!(r.verdict, Verdict::FailsLower);
}

#[test]
fn report_json_echoes_tolerances() {
    let r = full_report(&builtin::constant());
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["verdict"], "fails-upper");
    assert_eq!(v["c_sup"]["value"], serde_json::Value::Null);
    assert_eq!(v["tolerances"]["cancellation_rel"], 1e-6);
    assert_eq!(v["tolerances"]["nondegeneracy_rel"], 1e-8);
    let back: AdmissibilityReport = serde_json::from_str(&r.to_json()).unwrap();
    assert!(back.c_sup.value.is_infinite());
}

#[test]
fn grid_and_planar_cancellation_agree() {
    let seed = builtin::seed();
    let g = SphericalGrid::for_band_limit(400);
    let grid = cancellation_integral_grid(&seed.to_grid(&g));
    let planar = cancellation_integral(&seed).unwrap();
    assert!((grid - planar).norm() < 1e-8 * planar.norm(), "{grid} vs {planar}");
}

#[test]
fn averaging_contracts() {
    let w = Wavelet::new(
        "mixed",
        vec![
            Mode { m: 0, profile: builtin::seed().mode(0).unwrap().clone() },
            Mode { m: 2, profile: builtin::seed().mode(0).unwrap().scaled(Complex64::new(0.5, 1.0)) },
        ],
    );
    let t = Wavelet::axisymmetric(eta_tilde(&w));
    assert!(t.norm_sq() <= w.norm_sq());
    assert!(rel(Wavelet::axisymmetric(eta_tilde(&t)).norm_sq(), t.norm_sq()) < 1e-15);
}

fn family(c: f64, b: f64) -> Wavelet {
    theta_wavelet(
        move |t| {
            let s = t.sin();
            s * s * (-c * (0.5 * t).tan().powi(2)).exp() * (1.0 + b * t.cos())
        },
        DecayClass::SuperExponential { rate: c },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn scale_identity(c in 0.5f64..2.0, b in -0.5f64..0.5, alpha in prop_oneof![0.3f64..0.9, 1.2f64..6.0]) {
        let z = family(c, b);
        let i = cancellation_integral(&z).unwrap();
        let d = cancellation_integral(&z.dilated(alpha).unwrap()).unwrap();
        prop_assert!((i - d / alpha).norm() <= 1e-7 * i.norm(), "{} vs {}", i, d / alpha);
    }

    #[test]
    fn verdict_scalar_invariant(re in -3.0f64..3.0, im in -3.0f64..3.0, exp in -6i32..6) {
        let s = Complex64::new(re, im) * 10f64.powi(exp);
        prop_assume!(s.norm() > 1e-12);
        for w in [builtin::canonical(), builtin::cosphi(), builtin::constant()] {
            let base = full_report(&w).verdict;
            prop_assert_eq!(full_report(&w.scaled(s)).verdict, base);
        }
    }
}

#[test]
fn cancellation_on_sphere_zero_for_pure_modes() {
    let g = SphericalGrid::for_band_limit(32);
    let f = builtin::cosphi().to_grid(&g);
    assert!(cancellation_integral_grid(&f).norm() < 1e-14);
}
