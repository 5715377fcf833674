mod common;

use common::{AB_TABLE, LOG_GAMMA_TABLE};
use core::f64::consts::PI;
use krein_core::catalog::{ab_from_weights, fractional_ab, fractional_constants, weights_from_ab};
use krein_core::symbols::{gamma_real, log_gamma_complex};
use krein_core::Complex64;
use proptest::prelude::*;

// Distance modulo 2πi.
fn log_distance(a: Complex64, b: Complex64) -> f64 {
    let d = a - b;
    let turns = (d.im / (2.0 * PI)).round();
    Complex64::new(d.re, d.im - 2.0 * PI * turns).norm()
}

#[test]
fn log_gamma_reference_values() {
    for (x, y, re, im) in LOG_GAMMA_TABLE {
        let got = log_gamma_complex(Complex64::new(x, y)).unwrap();
        let want = Complex64::new(re, im);
        let err = log_distance(got, want);
        assert!(err < 1e-12 * want.norm().max(1.0), "z = {x}+{y}i: {got} vs {want} ({err:e})");
    }
}

#[test]
fn log_gamma_branch_on_real_axis() {
    let m = log_gamma_complex(Complex64::new(-0.5, 0.0)).unwrap();
    assert!((m.re - (2.0 * PI.sqrt()).ln()).abs() < 1e-14);
    assert!((gamma_real(-0.5).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-13);
    for n in 0..6 {
        assert!(log_gamma_complex(Complex64::new(-(n as f64), 0.0)).is_err());
    }
}

#[test]
fn fractional_reference_values() {
    for (mu, p, q, a, b) in AB_TABLE {
        let got = fractional_ab(mu, p, q).unwrap();
        let want = Complex64::new(a, b);
        assert!((got - want).norm() < 1e-12 * want.norm(), "({mu},{p},{q}): {got} vs {want}");
    }
}

#[test]
fn half_order_closed_form() {
    let a = fractional_ab(0.5, 1.0, 0.0).unwrap();
    let want = 2.0 * gamma_real(0.75).unwrap() / gamma_real(0.25).unwrap();
    assert!((a.re - want).abs() < 1e-14 && a.im.abs() < 1e-15);
}

#[test]
fn weights_reproduce_ab_for_table() {
    for (mu, p, q, _, _) in AB_TABLE {
        let f = fractional_constants(mu, p, q).unwrap();
        let back = ab_from_weights(mu, f.c_plus, f.c_minus);
        assert!((back - f.ab).norm() < 1e-12 * f.ab.norm(), "({mu},{p},{q})");
    }
}

proptest! {
    #[test]
    fn recurrence(x in -8.0f64..12.0, y in 0.05f64..20.0) {
        let z = Complex64::new(x, y);
        let l1 = log_gamma_complex(z + 1.0).unwrap();
        let l0 = log_gamma_complex(z).unwrap();
        prop_assert!(log_distance(l1, l0 + z.ln()) < 1e-11 * (1.0 + l1.norm()));
    }

    #[test]
    fn conjugate_symmetry(x in -8.0f64..12.0, y in 0.05f64..20.0) {
        let z = Complex64::new(x, y);
        let a = log_gamma_complex(z.conj()).unwrap();
        let b = log_gamma_complex(z).unwrap().conj();
        prop_assert!(log_distance(a, b) < 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn weights_round_trip(mu in 0.05f64..1.95, p in 0.0f64..3.0, q in -3.0f64..3.0) {
        prop_assume!((mu - 1.0).abs() > 1e-3 && (p > 0.01 || q.abs() > 0.01));
        let f = fractional_constants(mu, p, q).unwrap();
        let back = ab_from_weights(mu, f.c_plus, f.c_minus);
        prop_assert!((back - f.ab).norm() < 1e-12 * f.ab.norm().max(1e-300));
        let (cp, cm) = weights_from_ab(mu, back);
        prop_assert!((cp - f.c_plus).abs() < 1e-12 * (1.0 + cp) && (cm - f.c_minus).abs() < 1e-12 * (1.0 + cm));
    }

    #[test]
    fn ab_scales_with_p(mu in 0.1f64..1.9, p in 0.1f64..3.0, q in -3.0f64..3.0, s in 0.2f64..5.0) {
        prop_assume!((mu - 1.0).abs() > 1e-3);
        let a = fractional_ab(mu, p, q).unwrap();
        let b = fractional_ab(mu, s * p, s * q).unwrap();
        prop_assert!((b - a * s.powf(mu)).norm() < 1e-11 * b.norm());
    }
}
