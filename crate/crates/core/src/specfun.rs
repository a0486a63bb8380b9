//! Special-function kernel: complex log-gamma, gamma, digamma, Pochhammer
//! symbols, the Gauss hypergeometric series and the Bessel functions J₀, J₁.
//!
//! Everything here is a pure function of its arguments. Complex arguments are
//! carried as [`Complex`] (`num_complex::Complex64`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = num_complex::Complex64;

/// Euler–Mascheroni constant, γ_E = −ψ(1).
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// B₂ₖ / (2k(2k−1)), k = 1..8 (Stirling series for ln Γ).
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// B₂ₖ / (2k), k = 1..8 (asymptotic series for ψ).
const DIGAMMA_ASYMP: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

/// Tolerances for the hypergeometric series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub target_rel_err: f64,
    pub max_terms: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            target_rel_err: 1e-13,
            max_terms: 5000,
        }
    }
}

impl SeriesConfig {
    pub fn new(target_rel_err: f64, max_terms: usize) -> Result<Self> {
        if !(target_rel_err > 0.0) || max_terms == 0 {
            return Err(Error::Domain(format!(
                "series config needs target_rel_err > 0 and max_terms >= 1, got ({target_rel_err}, {max_terms})"
            )));
        }
        Ok(Self {
            target_rel_err,
            max_terms,
        })
    }
}

fn is_nonpositive_integer(z: Complex) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn check_finite(z: Complex, what: &str) -> Result<Complex> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Numerical(format!(
            "{what} produced a non-finite value"
        )))
    }
}

/// (sin πx, cos πx) with exact zeros at integers and half-integers.
pub fn sin_cos_pi(x: f64) -> (f64, f64) {
    let r = x - 2.0 * (x / 2.0).round();
    // r in [-1, 1]; fold into [-1/2, 1/2] so πr keeps full relative precision.
    let (r, flip) = if r > 0.5 {
        (1.0 - r, true)
    } else if r < -0.5 {
        (-1.0 - r, true)
    } else {
        (r, false)
    };
    let (s, c) = if r == 0.0 {
        (0.0, 1.0)
    } else if r == 0.5 {
        (1.0, 0.0)
    } else if r == -0.5 {
        (-1.0, 0.0)
    } else {
        (PI * r).sin_cos()
    };
    if flip {
        (s, -c)
    } else {
        (s, c)
    }
}

/// sin(πz) for complex z.
pub fn sin_pi(z: Complex) -> Complex {
    let (s, c) = sin_cos_pi(z.re);
    let y = PI * z.im;
    Complex::new(s * y.cosh(), c * y.sinh())
}

/// cot(πz) for complex z off the real integers.
pub fn cot_pi(z: Complex) -> Complex {
    let y = PI * z.im;
    if y.abs() > 20.0 {
        // cot w = i (q + 1)/(q − 1) with q = exp(2iw), |q| < 1 for Im w > 0.
        let w = Complex::new(PI * (z.re - 2.0 * (z.re / 2.0).round()), y.abs());
        let q = (Complex::i() * 2.0 * w).exp();
        let c = Complex::i() * (q + 1.0) / (q - 1.0);
        return if z.im > 0.0 { c } else { c.conj() };
    }
    let (s, c) = sin_cos_pi(z.re);
    let sin = Complex::new(s * y.cosh(), c * y.sinh());
    let cos = Complex::new(c * y.cosh(), -s * y.sinh());
    cos / sin
}

fn wrap_phase(z: Complex) -> Complex {
    let mut im = z.im % (2.0 * PI);
    if im > PI {
        im -= 2.0 * PI;
    } else if im <= -PI {
        im += 2.0 * PI;
    }
    Complex::new(z.re, im)
}

fn log_gamma_stirling(z: Complex) -> Complex {
    // Shift upward until Re w >= 15, where eight Stirling terms reach ~1e-20.
    let mut w = z;
    let mut prod = Complex::new(1.0, 0.0);
    let mut log_shift = Complex::new(0.0, 0.0);
    while w.re < 15.0 {
        prod *= w;
        if prod.norm() > 1e250 {
            log_shift += prod.ln();
            prod = Complex::new(1.0, 0.0);
        }
        w += 1.0;
    }
    log_shift += prod.ln();
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + series - log_shift
}

/// Principal-branch logarithm of Γ(z).
pub fn log_gamma(z: Complex) -> Result<Complex> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(z));
    }
    let raw = if z.re < 0.5 {
        // Γ(z) Γ(1−z) = π / sin(πz)
        Complex::new(PI.ln(), 0.0) - sin_pi(z).ln() - log_gamma_stirling(1.0 - z)
    } else {
        log_gamma_stirling(z)
    };
    let mut out = wrap_phase(raw);
    if z.im == 0.0 {
        // Γ is real on the real axis: keep the phase at exactly 0 or π.
        out.im = if out.im.abs() > PI / 2.0 { PI } else { 0.0 };
    }
    check_finite(out, "log_gamma")
}

/// Γ(z).
pub fn gamma(z: Complex) -> Result<Complex> {
    let lg = log_gamma(z)?;
    let g = if z.im == 0.0 {
        let m = lg.re.exp();
        Complex::new(if lg.im == 0.0 { m } else { -m }, 0.0)
    } else {
        lg.exp()
    };
    check_finite(g, "gamma")
}

/// 1/Γ(z), entire: zero at the nonpositive integers.
pub fn rgamma(z: Complex) -> Complex {
    if is_nonpositive_integer(z) {
        return Complex::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        // 1/Γ(z) = sin(πz) Γ(1−z) / π
        let g = log_gamma_stirling(1.0 - z);
        let out = sin_pi(z) * g.exp() / PI;
        if z.im == 0.0 {
            Complex::new(out.re, 0.0)
        } else {
            out
        }
    } else {
        let out = (-log_gamma_stirling(z)).exp();
        if z.im == 0.0 {
            Complex::new(out.re, 0.0)
        } else {
            out
        }
    }
}

/// ψ(z) = Γ′(z)/Γ(z).
pub fn digamma(z: Complex) -> Result<Complex> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(z));
    }
    if z.re < 0.5 {
        // ψ(1−z) − ψ(z) = π cot(πz)
        let out = digamma(1.0 - z)? - cot_pi(z) * PI;
        return check_finite(out, "digamma");
    }
    let mut w = z;
    let mut acc = Complex::new(0.0, 0.0);
    while w.re < 10.0 {
        acc -= w.inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex::new(0.0, 0.0);
    let mut pow = inv2;
    for c in DIGAMMA_ASYMP {
        series += pow * c;
        pow *= inv2;
    }
    let mut out = acc + w.ln() - inv * 0.5 - series;
    if z.im == 0.0 {
        out.im = 0.0;
    }
    check_finite(out, "digamma")
}

/// ψ(z)/Γ(z), continued through the poles: at z = −k the value is (−1)^{k+1} k!.
pub fn digamma_over_gamma(z: Complex) -> Complex {
    if is_nonpositive_integer(z) {
        let k = (-z.re) as u32;
        let fact: f64 = (1..=k).map(f64::from).product();
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        return Complex::new(sign * fact, 0.0);
    }
    // digamma cannot fail off the pole set.
    digamma(z).unwrap_or(Complex::new(f64::NAN, f64::NAN)) * rgamma(z)
}

/// Rising factorial (z)ₙ = z(z+1)…(z+n−1), (z)₀ = 1.
pub fn pochhammer(z: Complex, n: usize) -> Complex {
    (0..n).fold(Complex::new(1.0, 0.0), |acc, k| acc * (z + k as f64))
}

/// Gauss hypergeometric series ₂F₁(a, b; c; x) for real 0 ≤ x < 1, summed in
/// ascending order.
pub fn hyp2f1_series(
    a: Complex,
    b: Complex,
    c: Complex,
    x: f64,
    cfg: &SeriesConfig,
) -> Result<Complex> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "hypergeometric series needs 0 <= x < 1, got {x}"
        )));
    }
    if is_nonpositive_integer(c) {
        return Err(Error::Domain(format!("c = {c} is a nonpositive integer")));
    }
    let mut sum = Complex::new(1.0, 0.0);
    if x == 0.0 {
        return Ok(sum);
    }
    let mut term = Complex::new(1.0, 0.0);
    for n in 0..cfg.max_terms {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * x;
        term *= ratio;
        sum += term;
        if term.norm() == 0.0 {
            // terminating series
            return check_finite(sum, "hyp2f1_series");
        }
        let rho = ratio.norm();
        if rho < 1.0 {
            // geometric bound on the remaining tail
            let tail = term.norm() * rho / (1.0 - rho);
            if tail <= cfg.target_rel_err * sum.norm()
                && term.norm() <= cfg.target_rel_err * sum.norm()
            {
                return check_finite(sum, "hyp2f1_series");
            }
        }
    }
    Err(Error::Convergence {
        terms: cfg.max_terms,
        tol: cfg.target_rel_err,
    })
}

/// d/dx ₂F₁(a, b; c; x) = (ab/c) ₂F₁(a+1, b+1; c+1; x).
pub fn hyp2f1_derivative(
    a: Complex,
    b: Complex,
    c: Complex,
    x: f64,
    cfg: &SeriesConfig,
) -> Result<Complex> {
    let f = hyp2f1_series(a + 1.0, b + 1.0, c + 1.0, x, cfg)?;
    Ok(a * b / c * f)
}

/// Order of the Bessel function of the first kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Zero,
    One,
}

/// Bessel function of the first kind, J₀ or J₁.
pub fn bessel_j(order: BesselOrder, x: f64) -> f64 {
    if x < 0.0 {
        return match order {
            BesselOrder::Zero => bessel_j(order, -x),
            BesselOrder::One => -bessel_j(order, -x),
        };
    }
    let (j0, j1) = if x <= 6.0 {
        bessel_j01_series(x)
    } else if x <= 25.0 {
        bessel_j01_miller(x)
    } else {
        (bessel_hankel(0.0, x), bessel_hankel(1.0, x))
    };
    match order {
        BesselOrder::Zero => j0,
        BesselOrder::One => j1,
    }
}

pub fn bessel_j0(x: f64) -> f64 {
    bessel_j(BesselOrder::Zero, x)
}

pub fn bessel_j1(x: f64) -> f64 {
    bessel_j(BesselOrder::One, x)
}

fn bessel_j01_series(x: f64) -> (f64, f64) {
    let q = -0.25 * x * x;
    let mut t0 = 1.0;
    let mut t1 = 0.5 * x;
    let mut s0 = t0;
    let mut s1 = t1;
    for k in 1..200 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        s0 += t0;
        s1 += t1;
        if t0.abs() < 1e-18 && t1.abs() < 1e-18 {
            break;
        }
    }
    (s0, s1)
}

/// Backward recurrence normalised with J₀ + 2 Σ J₂ₖ = 1.
fn bessel_j01_miller(x: f64) -> (f64, f64) {
    let start = 2 * ((x as usize + 40) / 2);
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut norm = 0.0;
    let mut j1 = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        // cur is now J_{k-1}
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * cur;
        }
        if k - 1 == 1 {
            j1 = cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            j1 *= 1e-250;
        }
    }
    norm += cur;
    (cur / norm, j1 / norm)
}

fn bessel_hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..60 {
        if term.abs() > last {
            break;
        }
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
        last = term.abs();
        let odd = (2 * k + 1) as f64;
        term *= (mu - odd * odd) / ((k + 1) as f64 * 8.0 * x);
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}
