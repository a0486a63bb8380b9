//! Generalized (Rellich-type) boundary values g̃(0), g̃′(0), g̃(π), g̃′(π)
//! extracted from samples of g near the endpoints.
//!
//! Near x = 0 every element of the maximal domain behaves like
//! g̃(0)·ℓ₀(x) + g̃′(0)·ℓ₁(x) + O(x²)-relative corrections, with
//! ℓ₀ = (2s)⁻¹x^{(1−2s)/2}, ℓ₁ = x^{(1+2s)/2} for s ∈ (0, 1) and
//! ℓ₀ = x^{1/2} ln(1/x), ℓ₁ = x^{1/2} for s = 0. The limits are taken by a
//! least-squares fit of that expansion on a geometric sample sequence.
//! At π the roles are mirrored with ℓ₀ = −(2s)⁻¹(π−x)^{(1−2s)/2}
//! (resp. (π−x)^{1/2} ln(π−x)).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::closed_form::SpectralParam;
use crate::error::{Error, Result};
use crate::specfun::Complex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedBV {
    pub g0: Complex,
    pub g0p: Complex,
    pub gpi: Complex,
    pub gpip: Complex,
    pub est_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    /// Ratio of the geometric sample sequence.
    pub base: f64,
    pub first_scale: f64,
    pub depth: usize,
    /// Relative change between the two fits above which extraction is
    /// declared divergent.
    pub divergence_tol: f64,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            base: 2.0,
            first_scale: 1e-2,
            depth: 8,
            divergence_tol: 1e-3,
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.depth < 3
            || !(self.base > 1.0)
            || !(self.first_scale > 0.0 && self.first_scale < 1.0)
        {
            return Err(Error::Domain(format!(
                "extraction needs depth >= 3, base > 1 and first_scale in (0, 1), got {self:?}"
            )));
        }
        Ok(())
    }

    /// x_k = first_scale · base^{−k}
    pub fn samples(&self) -> Vec<f64> {
        (0..self.depth)
            .map(|k| self.first_scale * self.base.powi(-(k as i32)))
            .collect()
    }
}

/// Leading terms (ℓ₀, ℓ₁) at distance d from the endpoint.
fn leading(s: f64, d: f64, at_pi: bool) -> (f64, f64) {
    let sign = if at_pi { -1.0 } else { 1.0 };
    if s > 0.0 {
        (sign * d.powf(0.5 - s) / (2.0 * s), d.powf(0.5 + s))
    } else {
        (-sign * d.sqrt() * d.ln(), d.sqrt())
    }
}

/// Least-squares fit of samples against the correction model; returns the
/// first two coefficients (real and imaginary parts fitted separately).
fn fit(
    s: f64,
    d: &[f64],
    vals: &[Complex],
    n_par: usize,
    at_pi: bool,
) -> Result<(Complex, Complex)> {
    let rows = d.len();
    let mut a = DMatrix::<f64>::zeros(rows, n_par);
    for (i, &di) in d.iter().enumerate() {
        let (l0, l1) = leading(s, di, at_pi);
        for j in 0..n_par {
            let pow = di.powi(2 * (j / 2) as i32);
            a[(i, j)] = if j % 2 == 0 { l0 } else { l1 } * pow;
        }
    }
    // equilibrate columns
    let scales: Vec<f64> = (0..n_par)
        .map(|j| a.column(j).amax().max(f64::MIN_POSITIVE))
        .collect();
    for (j, sc) in scales.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / sc);
    }
    let svd = a.svd(true, true);
    let solve = |b: DVector<f64>| -> Result<DVector<f64>> {
        svd.solve(&b, 1e-14)
            .map_err(|e| Error::Numerical(e.to_string()))
    };
    let re = solve(DVector::from_iterator(rows, vals.iter().map(|v| v.re)))?;
    let im = solve(DVector::from_iterator(rows, vals.iter().map(|v| v.im)))?;
    let coef = |j: usize| Complex::new(re[j] / scales[j], im[j] / scales[j]);
    Ok((coef(0), coef(1)))
}

struct EndFit {
    value: Complex,
    slope: Complex,
    change: f64,
}

fn extract_end<F: Fn(f64) -> Complex>(
    f: &F,
    s: f64,
    cfg: &ExtractionConfig,
    at_pi: bool,
) -> Result<EndFit> {
    let d = cfg.samples();
    let vals: Vec<Complex> = d
        .iter()
        .map(|&di| {
            if at_pi {
                f(std::f64::consts::PI - di)
            } else {
                f(di)
            }
        })
        .collect();
    if vals.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Numerical(
            "sampled function is not finite near the endpoint".into(),
        ));
    }
    let n_par = (cfg.depth - 1).min(6);
    let (v_all, p_all) = fit(s, &d, &vals, n_par, at_pi)?;
    let (v_tail, p_tail) = fit(s, &d[1..], &vals[1..], n_par, at_pi)?;
    let change = (v_all - v_tail).norm().max((p_all - p_tail).norm());
    let scale = 1.0 + v_all.norm().max(p_all.norm());
    if !(change <= cfg.divergence_tol * scale) {
        return Err(Error::Extrapolation { increment: change });
    }
    Ok(EndFit {
        value: v_all,
        slope: p_all,
        change,
    })
}

/// Generalized boundary values of f at both endpoints.
pub fn extract_bv<F: Fn(f64) -> Complex>(
    f: F,
    sp: &SpectralParam,
    cfg: &ExtractionConfig,
) -> Result<GeneralizedBV> {
    if !sp.is_limit_circle() {
        return Err(Error::Domain(format!(
            "generalized boundary values need s in [0, 1), got {}",
            sp.s
        )));
    }
    cfg.validate()?;
    let left = extract_end(&f, sp.s, cfg, false)?;
    let right = extract_end(&f, sp.s, cfg, true)?;
    Ok(GeneralizedBV {
        g0: left.value,
        g0p: left.slope,
        gpi: right.value,
        gpip: right.slope,
        est_err: left.change.max(right.change),
    })
}

/// Default tolerance of [`friedrichs_membership`].
pub const FRIEDRICHS_TOL: f64 = 1e-5;

/// g̃(0) = g̃(π) = 0 within tol.
pub fn friedrichs_membership(bv: &GeneralizedBV, tol: f64) -> bool {
    bv.g0.norm() <= tol && bv.gpi.norm() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{eval_nonprincipal_0, eval_phi_theta, eval_principal_0, DEFAULT_C};

    fn sp(s: f64) -> SpectralParam {
        SpectralParam::new(s).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(ExtractionConfig::default().validate().is_ok());
        let bad = ExtractionConfig {
            depth: 2,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!(ExtractionConfig::default().samples()[1], 5e-3);
    }

    #[test]
    fn pure_leading_terms() {
        let cfg = ExtractionConfig::default();
        for s in [0.0, 0.3] {
            let f = |x: f64| {
                let (l0, l1) = leading(s, x, false);
                Complex::new(2.0 * l0 - 3.0 * l1, 0.0)
            };
            let e = extract_end(&f, s, &cfg, false).unwrap();
            assert!((e.value.re - 2.0).abs() < 1e-8 && (e.slope.re + 3.0).abs() < 1e-6);
            let g = |x: f64| {
                let (m0, m1) = leading(s, std::f64::consts::PI - x, true);
                Complex::new(m0 + 0.5 * m1, 0.0)
            };
            let e = extract_end(&g, s, &cfg, true).unwrap();
            assert!((e.value.re - 1.0).abs() < 1e-8 && (e.slope.re - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn nonprincipal_and_principal() {
        let cfg = ExtractionConfig::default();
        let s = sp(0.3);
        let bv = extract_bv(
            |x| eval_nonprincipal_0(&s, x, DEFAULT_C).unwrap().value,
            &s,
            &cfg,
        )
        .unwrap();
        assert!(
            (bv.g0 - 1.0).norm() < 1e-6 && bv.g0p.norm() < 1e-6,
            "{bv:?}"
        );
        assert!(!friedrichs_membership(&bv, FRIEDRICHS_TOL));
        let bv = extract_bv(|x| eval_principal_0(&s, x).unwrap().value, &s, &cfg).unwrap();
        assert!(
            bv.g0.norm() < 1e-6 && (bv.g0p - 1.0).norm() < 1e-6,
            "{bv:?}"
        );
    }

    #[test]
    fn phi_theta_normalization() {
        let cfg = ExtractionConfig::default();
        let s = sp(0.3);
        let z = Complex::new(1.0, 0.0);
        let phi = extract_bv(|x| eval_phi_theta(&s, z, x).unwrap().0.value, &s, &cfg).unwrap();
        assert!(
            phi.g0.norm() < 1e-6 && (phi.g0p - 1.0).norm() < 1e-6,
            "{phi:?}"
        );
        let theta = extract_bv(|x| eval_phi_theta(&s, z, x).unwrap().1.value, &s, &cfg).unwrap();
        assert!(
            (theta.g0 - 1.0).norm() < 1e-6 && theta.g0p.norm() < 1e-6,
            "{theta:?}"
        );
    }

    #[test]
    fn divergent_input_is_rejected() {
        let cfg = ExtractionConfig::default();
        let r = extract_bv(
            |x: f64| Complex::new(1.0 / x + 1.0 / (std::f64::consts::PI - x), 0.0),
            &sp(0.3),
            &cfg,
        );
        assert!(matches!(r, Err(Error::Extrapolation { .. })), "{r:?}");
    }
}
