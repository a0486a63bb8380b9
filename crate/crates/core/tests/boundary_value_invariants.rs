use std::f64::consts::PI;

use hardysin::boundary_values::{
    extract_bv, friedrichs_membership, ExtractionConfig, FRIEDRICHS_TOL,
};
use hardysin::closed_form::{
    boundary_table, eval_nonprincipal_0, eval_principal_0, eval_y, potential, AnalyticFunction,
    SpectralParam, DEFAULT_C,
};
use hardysin::specfun::Complex;
use hardysin::variational::limit_checks;
use proptest::prelude::*;

fn sp(s: f64) -> SpectralParam {
    SpectralParam::new(s).unwrap()
}

struct Solution {
    s: f64,
    principal: bool,
}

impl AnalyticFunction for Solution {
    fn eval3(&self, x: f64) -> (f64, f64, f64) {
        let p = sp(self.s);
        let e = if self.principal {
            eval_principal_0(&p, x)
        } else {
            eval_nonprincipal_0(&p, x, DEFAULT_C)
        }
        .unwrap();
        (
            e.value.re,
            e.derivative.re,
            potential(self.s, x) * e.value.re,
        )
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extraction_is_linear(s in 0.0f64..0.9, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let p = sp(s);
        let cfg = ExtractionConfig::default();
        let u = |x: f64| eval_principal_0(&p, x).unwrap().value;
        let v = |x: f64| eval_nonprincipal_0(&p, x, DEFAULT_C).unwrap().value;
        let bu = extract_bv(u, &p, &cfg).unwrap();
        let bv = extract_bv(v, &p, &cfg).unwrap();
        let bw = extract_bv(|x| u(x) * a + v(x) * b, &p, &cfg).unwrap();
        let scale = 1.0 + a.abs() + b.abs();
        prop_assert!((bw.g0 - (bu.g0 * a + bv.g0 * b)).norm() < 1e-9 * scale);
        prop_assert!((bw.g0p - (bu.g0p * a + bv.g0p * b)).norm() < 1e-9 * scale);
        prop_assert!((bw.gpi - (bu.gpi * a + bv.gpi * b)).norm() < 1e-9 * scale);
    }
}

#[test]
fn extraction_matches_table() {
    let cfg = ExtractionConfig::default();
    for s in [0.2, 0.5, 0.8] {
        let p = sp(s);
        for z in [Complex::new(0.0, 0.0), Complex::new(1.3, 0.0)] {
            let t = boundary_table(&p, z).unwrap();
            let y1 = extract_bv(|x| eval_y(1, &p, z, x).unwrap().value, &p, &cfg).unwrap();
            let y2 = extract_bv(|x| eval_y(2, &p, z, x).unwrap().value, &p, &cfg).unwrap();
            let pairs = [
                (y1.g0, t.y1_0),
                (y1.g0p, t.y1p_0),
                (y1.gpi, t.y1_pi),
                (y1.gpip, t.y1p_pi),
                (y2.g0, t.y2_0),
                (y2.g0p, t.y2p_0),
                (y2.gpi, t.y2_pi),
                (y2.gpip, t.y2p_pi),
            ];
            for (got, want) in pairs {
                assert!(
                    (got - want).norm() < 1e-5 * (1.0 + want.norm()),
                    "s={s} z={z}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn friedrichs_classification() {
    let cfg = ExtractionConfig::default();
    let p = sp(0.4);
    let sine = extract_bv(|x: f64| Complex::new(x.sin().powf(0.9), 0.0), &p, &cfg).unwrap();
    assert!(friedrichs_membership(&sine, FRIEDRICHS_TOL));
    let v = extract_bv(
        |x| eval_nonprincipal_0(&p, x, DEFAULT_C).unwrap().value,
        &p,
        &cfg,
    )
    .unwrap();
    assert!(!friedrichs_membership(&v, FRIEDRICHS_TOL));
}

#[test]
fn principal_quotient_decays() {
    for s in [0.0, 0.3, 0.7] {
        let r = limit_checks(&Solution { s, principal: true }, s, 4.0).unwrap();
        assert!(r.monotone_tail, "s={s}: {:?}", r.points);
    }
    let r = limit_checks(
        &Solution {
            s: 0.0,
            principal: true,
        },
        0.0,
        4.0,
    )
    .unwrap();
    assert!(r.final_quotient < r.points[0].quotient);
}

/// The s = 0 nonprincipal solution behaves like x^{1/2} ln(1/x), outside the
/// class where the quotient tends to zero; its quotient grows like ln^{1/2}.
#[test]
fn nonprincipal_quotient_grows() {
    let r = limit_checks(
        &Solution {
            s: 0.0,
            principal: false,
        },
        0.0,
        4.0,
    )
    .unwrap();
    let tail = &r.points[r.points.len() - 6..];
    assert!(
        tail.windows(2).all(|w| w[1].quotient > w[0].quotient),
        "{:?}",
        r.points
    );
    let x = r.points.last().unwrap().x;
    let predicted = (1.0 / x).ln() / (4.0 / x).ln().sqrt();
    assert!((r.final_quotient / predicted - 1.0).abs() < 0.2);
}

#[test]
fn extraction_rejects_bad_input() {
    let cfg = ExtractionConfig::default();
    assert!(extract_bv(|x: f64| Complex::new(x.sin(), 0.0), &sp(1.5), &cfg).is_err());
    assert!(extract_bv(|_| Complex::new(f64::NAN, 0.0), &sp(0.5), &cfg).is_err());
    assert!(extract_bv(
        |x: f64| Complex::new((PI - x).powf(-2.0), 0.0),
        &sp(0.5),
        &cfg
    )
    .is_err());
}
