//! Friedrichs spectrum, the singular Weyl–Titchmarsh–Kodaira m-function
//! m_{0,0,s}, pole scanning, and the Bessel constants of the half-line
//! comparison operators.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::boundary_values::{extract_bv, ExtractionConfig};
use crate::closed_form::{boundary_table, eval_phi_theta, SpectralParam};
use crate::error::{Error, Result};
use crate::specfun::{bessel_j0, bessel_j1, digamma, gamma, rgamma, Complex, EULER_GAMMA};

/// Guard radius around each eigenvalue inside which m is not evaluated.
pub const POLE_GUARD: f64 = 1e-9;

/// Grid step of [`scan_poles`].
pub const SCAN_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MFunctionSample {
    pub z: Complex,
    pub m: Complex,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueList {
    pub s: f64,
    pub values: Vec<f64>,
    pub n_max: usize,
}

/// λₙ = (1/2 + s + n)², n = 0..=n_max.
pub fn eigenvalues(s: f64, n_max: usize) -> EigenvalueList {
    let values = (0..=n_max).map(|n| (0.5 + s + n as f64).powi(2)).collect();
    EigenvalueList { s, values, n_max }
}

/// Eigenvalue nearest to z and its distance.
pub fn nearest_eigenvalue(s: f64, z: Complex) -> (f64, f64) {
    let guess = (z.re.max(0.0).sqrt() - 0.5 - s).round().max(0.0) as usize;
    let lo = guess.saturating_sub(1);
    (lo..=guess + 1)
        .map(|n| {
            let l = (0.5 + s + n as f64).powi(2);
            (l, (z - l).norm())
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty range")
}

fn guard(s: f64, z: Complex) -> Result<()> {
    let (eigenvalue, dist) = nearest_eigenvalue(s, z);
    if dist < POLE_GUARD {
        return Err(Error::NearPole {
            z,
            eigenvalue,
            radius: POLE_GUARD,
        });
    }
    Ok(())
}

fn half(cst: f64, r: Complex, sign: f64) -> Complex {
    (Complex::new(cst, 0.0) + r * sign) / 2.0
}

/// m_{0,0,s}(z) from its gamma-ratio (s > 0) or digamma (s = 0) closed form.
pub fn m_function(s: f64, z: Complex) -> Result<MFunctionSample> {
    let sp = SpectralParam::new(s)?;
    if !sp.is_limit_circle() {
        return Err(Error::Domain(format!(
            "the m-function is defined for s in [0, 1), got {s}"
        )));
    }
    guard(s, z)?;
    let r = z.sqrt();
    let to_guard = |e: Error| match e {
        Error::Pole(_) => Error::NearPole {
            z,
            eigenvalue: nearest_eigenvalue(s, z).0,
            radius: POLE_GUARD,
        },
        other => other,
    };
    let m = if s > 0.0 {
        let ratio = |cst: f64| -> Result<Complex> {
            Ok(gamma(half(cst + s, r, 1.0))?
                * gamma(half(cst + s, r, -1.0))?
                * rgamma(half(cst - s, r, 1.0))
                * rgamma(half(cst - s, r, -1.0)))
        };
        let pref = gamma(Complex::new(-s, 0.0))? / (gamma(Complex::new(1.0 + s, 0.0))? * 4.0);
        pref * (ratio(1.5).map_err(to_guard)? + ratio(0.5).map_err(to_guard)?)
    } else {
        let psi = |cst: f64, sign: f64| digamma(half(cst, r, sign)).map_err(to_guard);
        -(psi(0.5, 1.0)? + psi(0.5, -1.0)? + psi(1.5, 1.0)? + psi(1.5, -1.0)? + 4.0 * EULER_GAMMA)
            / 4.0
    };
    if !(m.re.is_finite() && m.im.is_finite()) {
        return Err(Error::Numerical(format!(
            "m-function overflowed at z = {z}"
        )));
    }
    Ok(MFunctionSample { z, m, s })
}

/// m_{0,0,s}(z) = ỹ₁′/(2ỹ₁) + ỹ₂′/(2ỹ₂) assembled from the boundary table.
pub fn m_from_table(s: f64, z: Complex) -> Result<Complex> {
    let sp = SpectralParam::new(s)?;
    guard(s, z)?;
    let t = boundary_table(&sp, z)?;
    Ok(t.y1p_0 / (t.y1_0 * 2.0) + t.y2p_0 / (t.y2_0 * 2.0))
}

/// −θ̃(z, π)/φ̃(z, π), with the boundary values extracted numerically.
pub fn m_quotient(s: f64, z: Complex, cfg: &ExtractionConfig) -> Result<Complex> {
    let sp = SpectralParam::new(s)?;
    guard(s, z)?;
    let phi = extract_bv(
        |x| {
            eval_phi_theta(&sp, z, x)
                .map(|p| p.0.value)
                .unwrap_or(Complex::new(f64::NAN, 0.0))
        },
        &sp,
        cfg,
    )?;
    let theta = extract_bv(
        |x| {
            eval_phi_theta(&sp, z, x)
                .map(|p| p.1.value)
                .unwrap_or(Complex::new(f64::NAN, 0.0))
        },
        &sp,
        cfg,
    )?;
    Ok(-theta.gpi / phi.gpi)
}

/// 1/m = 2ỹ₁ỹ₂ / (ỹ₁′ỹ₂ + ỹ₂′ỹ₁); entire apart from the zeros of m.
pub fn inverse_m(s: f64, z: Complex) -> Result<Complex> {
    let sp = SpectralParam::new(s)?;
    let t = boundary_table(&sp, z)?;
    Ok(t.y1_0 * t.y2_0 * 2.0 / (t.y1p_0 * t.y2_0 + t.y2p_0 * t.y1_0))
}

fn inverse_m_real(s: f64, z: f64) -> f64 {
    inverse_m(s, Complex::new(z, 0.0))
        .map(|v| v.re)
        .unwrap_or(f64::NAN)
}

/// Real zeros of 1/m on the open interval (z_min, z_max), i.e. the poles of m.
pub fn scan_poles(s: f64, z_min: f64, z_max: f64) -> Vec<f64> {
    if !(z_min < z_max) {
        return Vec::new();
    }
    let steps = ((z_max - z_min) / SCAN_STEP).ceil() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|k| {
            if k == steps {
                z_max
            } else {
                z_min + SCAN_STEP * k as f64
            }
        })
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&z| inverse_m_real(s, z)).collect();
    let mut roots = Vec::new();
    for k in 0..grid.len() - 1 {
        let (mut a, mut b) = (grid[k], grid[k + 1]);
        let (mut fa, fb) = (vals[k], vals[k + 1]);
        if !(fa.is_finite() && fb.is_finite()) || fa * fb > 0.0 || fa == 0.0 {
            if fa == 0.0 && k > 0 {
                roots.push(a);
            }
            continue;
        }
        while b - a > 1e-10 {
            let m = 0.5 * (a + b);
            let fm = inverse_m_real(s, m);
            if fm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if fa * fm < 0.0 {
                b = m;
            } else {
                a = m;
                fa = fm;
            }
        }
        let root = 0.5 * (a + b);
        // a sign change through a pole of 1/m leaves |1/m| large
        if inverse_m_real(s, root).abs() < 1e-6 {
            roots.push(root);
        }
    }
    roots.retain(|&r| r - z_min > POLE_GUARD && z_max - r > POLE_GUARD);
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    roots
}

/// Im m(z) > 0 at every sample (all samples must lie in the upper half-plane).
pub fn herglotz_check(s: f64, z_samples: &[Complex]) -> Result<bool> {
    let mut ok = true;
    for &z in z_samples {
        if !(z.im > 0.0) {
            return Err(Error::Domain(format!(
                "Herglotz samples need Im z > 0, got {z}"
            )));
        }
        ok &= m_function(s, z)?.m.im > 0.0;
    }
    Ok(ok)
}

/// (z − λ) m(z) evaluated at z = λ + δ, approximating the residue at λ.
pub fn residue_estimate(s: f64, lambda: f64, delta: f64) -> Result<f64> {
    let z = Complex::new(lambda + delta, 0.0);
    Ok((m_function(s, z)?.m * delta).re)
}

// ---------------------------------------------------------------------------
// Bessel constants

/// J₀(u) − 2u J₁(u); its first positive root is √λ_{D,N,0}.
pub fn lamb_map(u: f64) -> f64 {
    bessel_j0(u) - 2.0 * u * bessel_j1(u)
}

/// J₀(u) + 2u J₁(u), the sign as printed; kept for comparison only.
pub fn lamb_map_printed(u: f64) -> f64 {
    bessel_j0(u) + 2.0 * u * bessel_j1(u)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselConstants {
    /// First positive root u* of [`lamb_map`].
    pub lamb_sqrt: f64,
    pub lambda_dn0: f64,
    /// First positive zero j₀,₁ of J₀.
    pub j01: f64,
    pub lambda_f0: f64,
    /// Bisection brackets for u*, one per halving.
    pub trace: Vec<(f64, f64)>,
}

fn bisect<F: Fn(f64) -> f64>(
    f: F,
    mut a: f64,
    mut b: f64,
    trace: &mut Vec<(f64, f64)>,
) -> Result<f64> {
    let (lo, hi) = (a, b);
    let mut fa = f(a);
    if fa * f(b) > 0.0 {
        return Err(Error::Root { lo, hi });
    }
    trace.push((a, b));
    while b - a > 4.0 * f64::EPSILON * b.abs() {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
        trace.push((a, b));
    }
    Ok(0.5 * (a + b))
}

pub fn bessel_constants() -> Result<BesselConstants> {
    let mut trace = Vec::new();
    let lamb_sqrt = bisect(lamb_map, 1e-3, 2.4, &mut trace)?;
    let j01 = bisect(bessel_j0, 2.0, 3.0, &mut Vec::new())?;
    Ok(BesselConstants {
        lamb_sqrt,
        lambda_dn0: lamb_sqrt * lamb_sqrt,
        j01,
        lambda_f0: j01 * j01,
        trace,
    })
}

/// f₀(λ, x) = x^{1/2} J₀(λ^{1/2} x) and its x-derivative.
pub fn f0_eval(lambda: f64, x: f64) -> Result<(f64, f64)> {
    if !(lambda >= 0.0) || !(x > 0.0 && x <= PI) {
        return Err(Error::Domain(format!(
            "f0 needs lambda >= 0 and x in (0, π], got ({lambda}, {x})"
        )));
    }
    let k = lambda.sqrt();
    let (j0, j1) = (bessel_j0(k * x), bessel_j1(k * x));
    let sq = x.sqrt();
    Ok((sq * j0, 0.5 * j0 / sq - sq * k * j1))
}
