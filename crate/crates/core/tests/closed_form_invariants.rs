use std::f64::consts::PI;

use hardysin::closed_form::{
    eval_factor_principal, eval_factor_second, eval_nonprincipal_0, eval_nonprincipal_pi,
    eval_principal_0, eval_principal_pi, eval_y, factor_pair, wronskian, wronskian_y,
    SpectralParam, DEFAULT_C,
};
use hardysin::specfun::Complex;
use hardysin::verify::{ode_residual, seam_defect};
use hardysin::Error;
use proptest::prelude::*;

fn sp(s: f64) -> SpectralParam {
    SpectralParam::new(s).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn y_wronskian_is_constant(s in 0.0f64..0.95, zr in -6.0f64..12.0, zi in -3.0f64..3.0, x in 0.05f64..3.09) {
        let w = wronskian_y(&sp(s), Complex::new(zr, zi), &[x]).unwrap()[0];
        prop_assert!((w + 1.0).norm() < 1e-8, "W = {w}");
    }

    #[test]
    fn principal_pair_wronskian(s in 0.05f64..0.95, x in 0.1f64..3.04) {
        let p = sp(s);
        let u = eval_principal_0(&p, x).unwrap();
        let v = eval_nonprincipal_0(&p, x, DEFAULT_C).unwrap();
        let w = wronskian(&v, &u);
        prop_assert!((w - 1.0).norm() < 1e-8, "W = {w}");
    }

    #[test]
    fn pi_solutions_are_mirrors(s in 0.0f64..0.95, x in 0.1f64..3.04) {
        let p = sp(s);
        let a = eval_principal_pi(&p, x).unwrap();
        let b = eval_principal_0(&p, PI - x).unwrap();
        prop_assert!((a.value - b.value).norm() < 1e-14);
        prop_assert!((a.derivative + b.derivative).norm() < 1e-14);
    }

    #[test]
    fn factorization_matches_operator(s in 0.0f64..2.0, k in 1u32..6, x in 0.1f64..3.04) {
        let k = k as f64;
        let f = move |t: f64| (t.sin() * (k * t).cos(), t.cos() * (k * t).cos() - k * t.sin() * (k * t).sin(),
            -(1.0 + k * k) * t.sin() * (k * t).cos() - 2.0 * k * t.cos() * (k * t).sin());
        let (l, r) = factor_pair(&sp(s), &f, x).unwrap();
        prop_assert!((l - r).abs() <= 1e-9 * (1.0 + r.abs()));
    }

    #[test]
    fn factor_solutions_are_annihilated(s in 0.0f64..1.5, x in 0.1f64..3.04) {
        let p = sp(s);
        let k = s + 0.5;
        let y = eval_factor_principal(&p, x).unwrap();
        let delta = y.derivative - y.value * (k / x.tan());
        prop_assert!(delta.norm() < 1e-12);
        let yh = eval_factor_second(&p, x).unwrap();
        let w = wronskian(&y, &yh);
        prop_assert!((w + 1.0).norm() < 1e-8, "W = {w}");
    }
}

#[test]
fn ode_and_seam() {
    assert!(ode_residual().unwrap() < 1e-5);
    let (v, d) = seam_defect().unwrap();
    assert!(v < 1e-9 && d < 1e-7, "{v} {d}");
}

#[test]
fn nonprincipal_pi_is_odd_mirror() {
    let p = sp(0.3);
    for x in [0.2, 1.0, 2.5] {
        let a = eval_nonprincipal_pi(&p, x, DEFAULT_C).unwrap();
        let b = eval_nonprincipal_0(&p, PI - x, DEFAULT_C).unwrap();
        assert!((a.value + b.value).norm() < 1e-14);
    }
}

#[test]
fn domain_errors() {
    assert!(matches!(SpectralParam::new(-0.1), Err(Error::Domain(_))));
    assert!(matches!(
        eval_principal_0(&sp(1.2), 1.0),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        eval_y(1, &sp(0.3), Complex::new(1.0, 0.0), 0.0),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        eval_y(1, &sp(0.3), Complex::new(1.0, 0.0), PI),
        Err(Error::Domain(_))
    ));
}
