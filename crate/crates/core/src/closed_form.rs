//! Closed-form solutions of τ_s y = z y on (0, π), where
//! τ_s = −d²/dx² + (s² − 1/4)/sin²x.
//!
//! The fundamental system y₁, y₂ is evaluated by a region split: a
//! hypergeometric series in cos²x around π/2, and the connected series in
//! sin²x (or the logarithmic series when s = 0) near the endpoints, so every
//! series argument stays at or below 1/2.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, integrate_log_graded, AdaptiveConfig};
use crate::specfun::{
    digamma_over_gamma, gamma, hyp2f1_derivative, hyp2f1_series, rgamma, Complex, SeriesConfig,
    EULER_GAMMA,
};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Endpoint classification of τ_s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndpointClass {
    LimitCircle,
    LimitPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParam {
    pub s: f64,
    pub classification: EndpointClass,
}

impl SpectralParam {
    pub fn new(s: f64) -> Result<Self> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::Domain(format!(
                "s must be a finite nonnegative number, got {s}"
            )));
        }
        let classification = if s < 1.0 {
            EndpointClass::LimitCircle
        } else {
            EndpointClass::LimitPoint
        };
        Ok(Self { s, classification })
    }

    pub fn is_limit_circle(&self) -> bool {
        self.classification == EndpointClass::LimitCircle
    }

    /// (1 − 2s)/2
    fn p(&self) -> f64 {
        0.5 - self.s
    }

    /// (1 + 2s)/2
    fn q(&self) -> f64 {
        0.5 + self.s
    }

    fn require_limit_circle(&self) -> Result<()> {
        if self.is_limit_circle() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "requires s in [0, 1), got {}",
                self.s
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolutionId {
    PrincipalAt0,
    NonprincipalAt0,
    PrincipalAtPi,
    NonprincipalAtPi,
    Y1,
    Y2,
    Phi,
    Theta,
    FactorPrincipal,
    FactorSecond,
}

/// Which representation produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    EndpointSeries,
    MidpointSeries,
    LogSeries,
    Quadrature,
    /// Elementary closed form with no series involved.
    Elementary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionEval {
    pub value: Complex,
    pub derivative: Complex,
    pub x: f64,
    pub z: Complex,
    pub branch: Branch,
}

impl SolutionEval {
    fn real(value: f64, derivative: f64, x: f64, branch: Branch) -> Self {
        Self {
            value: Complex::new(value, 0.0),
            derivative: Complex::new(derivative, 0.0),
            x,
            z: Complex::new(0.0, 0.0),
            branch,
        }
    }
}

/// W(f, g) = f g′ − f′ g.
pub fn wronskian(f: &SolutionEval, g: &SolutionEval) -> Complex {
    f.value * g.derivative - f.derivative * g.value
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x < PI {
        Ok(())
    } else {
        Err(Error::Domain(format!("x must lie in (0, π), got {x}")))
    }
}

fn c(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

/// Principal square root, the z^{1/2} used throughout.
pub fn principal_root(z: Complex) -> Complex {
    z.sqrt()
}

// ---------------------------------------------------------------------------
// series building blocks

/// S^e F(a, b; c; S²) and its derivative with respect to S.
fn series_in_sin(
    e: f64,
    a: Complex,
    b: Complex,
    cc: Complex,
    sn: f64,
    cfg: &SeriesConfig,
) -> Result<(Complex, Complex)> {
    let w = sn * sn;
    let f = hyp2f1_series(a, b, cc, w, cfg)?;
    let fp = hyp2f1_derivative(a, b, cc, w, cfg)?;
    let pe = sn.powf(e);
    let val = f * pe;
    let d = f * (e * sn.powf(e - 1.0)) + fp * (2.0 * sn * pe);
    Ok((val, d))
}

/// C^m F(a, b; c; C²) (m ∈ {0, 1}) and its derivative with respect to x.
fn series_in_cos(
    m: u8,
    a: Complex,
    b: Complex,
    cc: Complex,
    sn: f64,
    cs: f64,
    cfg: &SeriesConfig,
) -> Result<(Complex, Complex)> {
    let w = cs * cs;
    let f = hyp2f1_series(a, b, cc, w, cfg)?;
    let fp = hyp2f1_derivative(a, b, cc, w, cfg)?;
    let dw = -2.0 * sn * cs;
    if m == 0 {
        Ok((f, fp * dw))
    } else {
        Ok((f * cs, f * (-sn) + fp * (cs * dw)))
    }
}

/// Multiply K(x) by S^e: returns (S^e K, d/dx).
fn times_sin_power(e: f64, k: (Complex, Complex), sn: f64, cs: f64) -> (Complex, Complex) {
    let pe = sn.powf(e);
    (k.0 * pe, k.0 * (e * sn.powf(e - 1.0) * cs) + k.1 * pe)
}

/// Σₙ (cₙ − 2 ln S · eₙ) S^{2n+1/2}, the bracket of the logarithmic case,
/// with every gamma reciprocal kept entire. Returns the value and d/dS.
fn log_series(aa: Complex, bb: Complex, sn: f64, cfg: &SeriesConfig) -> Result<(Complex, Complex)> {
    let ga = rgamma(aa);
    let gb = rgamma(bb);
    let ha = digamma_over_gamma(aa);
    let hb = digamma_over_gamma(bb);
    let ln_s = sn.ln();
    let w = sn * sn;
    let root = sn.sqrt();

    let (mut pa, mut pb) = (c(1.0), c(1.0));
    let (mut da, mut db) = (c(0.0), c(0.0));
    let mut fact2 = 1.0;
    let mut harmonic = 0.0;
    let mut wn = 1.0; // S^{2n}
    let mut val = c(0.0);
    let mut der = c(0.0);
    let mut small_run = 0;
    for n in 0..cfg.max_terms {
        let nf = n as f64;
        if n > 0 {
            harmonic += 1.0 / nf;
            fact2 *= nf * nf;
            wn *= w;
        }
        let psi_n1 = -EULER_GAMMA + harmonic;
        let e_big = ga * pa * gb * pb;
        let q_big = (pa * ha + ga * da) * (gb * pb) + (ga * pa) * (pb * hb + gb * db);
        let cn = (e_big * (2.0 * psi_n1) - q_big) / fact2;
        let en = e_big / fact2;
        let pow = wn * root; // S^{2n+1/2}
        let coef = cn - en * (2.0 * ln_s);
        let tv = coef * pow;
        let td = (coef * (2.0 * nf + 0.5) - en * 2.0) * (pow / sn);
        val += tv;
        der += td;

        let tol = cfg.target_rel_err;
        if tv.norm() <= tol * val.norm() && td.norm() <= tol * der.norm() {
            small_run += 1;
            if small_run >= 2 {
                return Ok((val, der));
            }
        } else {
            small_run = 0;
        }

        // advance the Pochhammer symbols and their A-derivatives
        da = da * (aa + nf) + pa;
        pa *= aa + nf;
        db = db * (bb + nf) + pb;
        pb *= bb + nf;
    }
    Err(Error::Convergence {
        terms: cfg.max_terms,
        tol: cfg.target_rel_err,
    })
}

/// Connection coefficients of the sin²-expansion (nonprincipal and principal parts).
struct EndpointCoeffs {
    a1: Complex,
    b1: Complex,
    a2: Complex,
    b2: Complex,
}

fn endpoint_coeffs(s: f64, r: Complex) -> Result<EndpointCoeffs> {
    let gs = gamma(c(s))?;
    let gms = gamma(c(-s))?;
    let half = |cst: f64, sign_s: f64, sign_r: f64| (c(cst + sign_s * s) + r * sign_r) / 2.0;
    Ok(EndpointCoeffs {
        a1: gs * SQRT_PI * rgamma(half(0.5, 1.0, 1.0)) * rgamma(half(0.5, 1.0, -1.0)),
        b1: gms * SQRT_PI * rgamma(half(0.5, -1.0, 1.0)) * rgamma(half(0.5, -1.0, -1.0)),
        a2: gs * (SQRT_PI / 2.0) * rgamma(half(1.5, 1.0, 1.0)) * rgamma(half(1.5, 1.0, -1.0)),
        b2: gms * (SQRT_PI / 2.0) * rgamma(half(1.5, -1.0, 1.0)) * rgamma(half(1.5, -1.0, -1.0)),
    })
}

// ---------------------------------------------------------------------------
// fundamental system y₁, y₂

fn y_midpoint(
    j: u8,
    sp: &SpectralParam,
    r: Complex,
    x: f64,
    cfg: &SeriesConfig,
) -> Result<(Complex, Complex)> {
    let (sn, cs) = x.sin_cos();
    let p = sp.p();
    let s = sp.s;
    let k = if j == 1 {
        let a = (c(0.5 - s) + r) / 2.0;
        let b = (c(0.5 - s) - r) / 2.0;
        series_in_cos(0, a, b, c(0.5), sn, cs, cfg)?
    } else {
        let a = (c(1.5 - s) + r) / 2.0;
        let b = (c(1.5 - s) - r) / 2.0;
        series_in_cos(1, a, b, c(1.5), sn, cs, cfg)?
    };
    Ok(times_sin_power(p, k, sn, cs))
}

fn y_endpoint(
    j: u8,
    sp: &SpectralParam,
    r: Complex,
    x: f64,
    cfg: &SeriesConfig,
) -> Result<(Complex, Complex)> {
    let (sn, cs) = x.sin_cos();
    let s = sp.s;
    let co = endpoint_coeffs(s, r)?;
    let (cst, ca, cb) = if j == 1 {
        (0.5, co.a1, co.b1)
    } else {
        (1.5, co.a2, co.b2)
    };
    let a = (c(cst - s) + r) / 2.0;
    let b = (c(cst - s) - r) / 2.0;
    let t1 = series_in_sin(sp.p(), a, b, c(1.0 - s), sn, cfg)?;
    let t2 = series_in_sin(sp.q(), a + s, b + s, c(1.0 + s), sn, cfg)?;
    let y = ca * t1.0 + cb * t2.0;
    let dy_ds = ca * t1.1 + cb * t2.1;
    Ok(if j == 1 {
        (y, dy_ds * cs)
    } else {
        (y * cs, y * (-sn) + dy_ds * (cs * cs))
    })
}

fn y_log(j: u8, r: Complex, x: f64, cfg: &SeriesConfig) -> Result<(Complex, Complex)> {
    let (sn, cs) = x.sin_cos();
    let (cst, pref) = if j == 1 {
        (0.5, SQRT_PI)
    } else {
        (1.5, SQRT_PI / 2.0)
    };
    let (v, d) = log_series((c(cst) + r) / 2.0, (c(cst) - r) / 2.0, sn, cfg)?;
    let (v, d) = (v * pref, d * pref);
    Ok(if j == 1 {
        (v, d * cs)
    } else {
        (v * cs, v * (-sn) + d * (cs * cs))
    })
}

/// Evaluation of y_j with an explicitly chosen z^{1/2} and branch.
pub fn eval_y_forced(
    j: u8,
    sp: &SpectralParam,
    root: Complex,
    x: f64,
    branch: Branch,
) -> Result<SolutionEval> {
    sp.require_limit_circle()?;
    check_x(x)?;
    if j != 1 && j != 2 {
        return Err(Error::Domain(format!(
            "solution index must be 1 or 2, got {j}"
        )));
    }
    let cfg = SeriesConfig::default();
    let (value, derivative) = match branch {
        Branch::MidpointSeries => y_midpoint(j, sp, root, x, &cfg)?,
        Branch::EndpointSeries if sp.s > 0.0 => y_endpoint(j, sp, root, x, &cfg)?,
        Branch::LogSeries if sp.s == 0.0 => y_log(j, root, x, &cfg)?,
        other => {
            return Err(Error::Domain(format!(
                "branch {other:?} is not available for s = {}",
                sp.s
            )));
        }
    };
    Ok(SolutionEval {
        value,
        derivative,
        x,
        z: root * root,
        branch,
    })
}

/// Region used by [`eval_y`] at x.
pub fn default_branch(sp: &SpectralParam, x: f64) -> Branch {
    let cs = x.cos();
    if cs * cs <= 0.5 {
        Branch::MidpointSeries
    } else if sp.s == 0.0 {
        Branch::LogSeries
    } else {
        Branch::EndpointSeries
    }
}

/// y_j(z, x), j ∈ {1, 2}, with the principal branch of z^{1/2}.
pub fn eval_y(j: u8, sp: &SpectralParam, z: Complex, x: f64) -> Result<SolutionEval> {
    eval_y_with_root(j, sp, principal_root(z), x)
}

/// y_j with a caller-chosen square root of z (either sign gives the same function).
pub fn eval_y_with_root(j: u8, sp: &SpectralParam, root: Complex, x: f64) -> Result<SolutionEval> {
    eval_y_forced(j, sp, root, x, default_branch(sp, x))
}

/// y₁y₂′ − y₁′y₂ at each grid point.
pub fn wronskian_y(sp: &SpectralParam, z: Complex, x_grid: &[f64]) -> Result<Vec<Complex>> {
    x_grid
        .iter()
        .map(|&x| {
            let y1 = eval_y(1, sp, z, x)?;
            let y2 = eval_y(2, sp, z, x)?;
            Ok(wronskian(&y1, &y2))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// boundary table

/// Generalized boundary values of y₁, y₂ at both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTable {
    pub y1_0: Complex,
    pub y1p_0: Complex,
    pub y2_0: Complex,
    pub y2p_0: Complex,
    pub y1_pi: Complex,
    pub y1p_pi: Complex,
    pub y2_pi: Complex,
    pub y2p_pi: Complex,
}

impl BoundaryTable {
    /// ỹ₁(0)ỹ₂′(0) − ỹ₁′(0)ỹ₂(0)
    pub fn determinant(&self) -> Complex {
        self.y1_0 * self.y2p_0 - self.y1p_0 * self.y2_0
    }

    /// Largest deviation from the four endpoint symmetries.
    pub fn symmetry_defect(&self) -> f64 {
        [
            (self.y1_0 + self.y1_pi).norm(),
            (self.y1p_0 - self.y1p_pi).norm(),
            (self.y2_0 - self.y2_pi).norm(),
            (self.y2p_0 + self.y2p_pi).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn boundary_table(sp: &SpectralParam, z: Complex) -> Result<BoundaryTable> {
    boundary_table_with_root(sp, principal_root(z))
}

pub fn boundary_table_with_root(sp: &SpectralParam, r: Complex) -> Result<BoundaryTable> {
    sp.require_limit_circle()?;
    let s = sp.s;
    let arg = |cst: f64, sign_r: f64| (c(cst) + r * sign_r) / 2.0;
    let (y1_0, y1p_0, y2_0, y2p_0) = if s > 0.0 {
        let g1s = gamma(c(1.0 + s))?;
        let gms = gamma(c(-s))?;
        let pair = |cst: f64| rgamma(arg(cst, 1.0)) * rgamma(arg(cst, -1.0));
        (
            g1s * (2.0 * SQRT_PI) * pair(0.5 + s),
            gms * SQRT_PI * pair(0.5 - s),
            g1s * SQRT_PI * pair(1.5 + s),
            gms * (SQRT_PI / 2.0) * pair(1.5 - s),
        )
    } else {
        // ψ(A)/Γ(A) stays finite where Γ has poles
        let digamma_pair = |cst: f64| {
            let (a, b) = (arg(cst, 1.0), arg(cst, -1.0));
            let (ga, gb) = (rgamma(a), rgamma(b));
            ga * gb * (2.0 * EULER_GAMMA) + digamma_over_gamma(a) * gb + ga * digamma_over_gamma(b)
        };
        let pair = |cst: f64| rgamma(arg(cst, 1.0)) * rgamma(arg(cst, -1.0));
        (
            pair(0.5) * (2.0 * SQRT_PI),
            digamma_pair(0.5) * (-SQRT_PI),
            pair(1.5) * SQRT_PI,
            digamma_pair(1.5) * (-SQRT_PI / 2.0),
        )
    };
    Ok(BoundaryTable {
        y1_0,
        y1p_0,
        y2_0,
        y2p_0,
        y1_pi: -y1_0,
        y1p_pi: y1p_0,
        y2_pi: y2_0,
        y2p_pi: -y2p_0,
    })
}

/// The normalized pair (φ, θ) with φ̃(0) = 0, φ̃′(0) = 1, θ̃(0) = 1, θ̃′(0) = 0.
pub fn eval_phi_theta(
    sp: &SpectralParam,
    z: Complex,
    x: f64,
) -> Result<(SolutionEval, SolutionEval)> {
    let t = boundary_table(sp, z)?;
    let y1 = eval_y(1, sp, z, x)?;
    let y2 = eval_y(2, sp, z, x)?;
    let phi = SolutionEval {
        value: t.y2_0 * y1.value - t.y1_0 * y2.value,
        derivative: t.y2_0 * y1.derivative - t.y1_0 * y2.derivative,
        ..y1
    };
    let theta = SolutionEval {
        value: t.y1p_0 * y2.value - t.y2p_0 * y1.value,
        derivative: t.y1p_0 * y2.derivative - t.y2p_0 * y1.derivative,
        ..y1
    };
    Ok((phi, theta))
}

// ---------------------------------------------------------------------------
// principal and nonprincipal solutions at z = 0

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Principal,
    Nonprincipal,
}

/// Native range of the endpoint-0 formulas; beyond it the solution is
/// continued through the π-end pair.
const NATIVE_LIMIT: f64 = 3.0 * FRAC_PI_4;

/// S^e F(a, a; c; S²) continued analytically in x over (0, 3π/4], with
/// c − 2a = 1/2.
fn sin_power_hyp(
    e: f64,
    a: f64,
    cc: f64,
    x: f64,
    cfg: &SeriesConfig,
) -> Result<(f64, f64, Branch)> {
    let (sn, cs) = x.sin_cos();
    if x <= FRAC_PI_4 {
        let (v, d) = series_in_sin(e, c(a), c(a), c(cc), sn, cfg)?;
        return Ok((v.re, d.re * cs, Branch::EndpointSeries));
    }
    // 15.3.6 with c − a − b = 1/2, |cos x| replaced by cos x for the continuation
    let gcc = gamma(c(cc))?;
    let g1 = gcc * SQRT_PI * rgamma(c(cc - a)) * rgamma(c(cc - a));
    let g2 = gcc * (-2.0 * SQRT_PI) * rgamma(c(a)) * rgamma(c(a));
    let k1 = series_in_cos(0, c(a), c(a), c(0.5), sn, cs, cfg)?;
    let k2 = series_in_cos(1, c(cc - a), c(cc - a), c(1.5), sn, cs, cfg)?;
    let k = (g1 * k1.0 + g2 * k2.0, g1 * k1.1 + g2 * k2.1);
    let (v, d) = times_sin_power(e, k, sn, cs);
    Ok((v.re, d.re, Branch::MidpointSeries))
}

fn native_principal(s: f64, x: f64, cfg: &SeriesConfig) -> Result<SolutionEval> {
    let (v, d, b) = sin_power_hyp(0.5 + s, 0.25 + 0.5 * s, 1.0 + s, x, cfg)?;
    Ok(SolutionEval::real(v, d, x, b))
}

fn quad_cfg() -> AdaptiveConfig {
    AdaptiveConfig {
        rel_tol: 1e-11,
        ..AdaptiveConfig::default()
    }
}

/// ∫ₓ^{π/2} dt / u₀(t)², s = 0, for x ∈ (0, 3π/4].
fn reduction_integral(x: f64, cfg: &SeriesConfig) -> Result<f64> {
    let inv_sq = |t: f64| match native_principal(0.0, t, cfg) {
        Ok(u) => 1.0 / (u.value.re * u.value.re),
        Err(_) => f64::NAN,
    };
    let est = if x <= FRAC_PI_2 {
        integrate_log_graded(inv_sq, x, FRAC_PI_2, &quad_cfg())?
    } else {
        let e = integrate_adaptive(inv_sq, FRAC_PI_2, x, &quad_cfg())?;
        crate::quadrature::Estimate {
            value: -e.value,
            ..e
        }
    };
    if !est.value.is_finite() {
        return Err(Error::Numerical(
            "reduction-of-order integrand failed".into(),
        ));
    }
    Ok(est.value)
}

fn native_nonprincipal(s: f64, x: f64, cfg: &SeriesConfig) -> Result<SolutionEval> {
    if s > 0.0 {
        let (v, d, b) = sin_power_hyp(0.5 - s, 0.25 - 0.5 * s, 1.0 - s, x, cfg)?;
        let k = 1.0 / (2.0 * s);
        return Ok(SolutionEval::real(v * k, d * k, x, b));
    }
    let p = native_principal(0.0, x, cfg)?;
    let i = reduction_integral(x, cfg)?;
    let (pv, pd) = (p.value.re, p.derivative.re);
    Ok(SolutionEval::real(
        pv * i,
        pd * i - 1.0 / pv,
        x,
        Branch::Quadrature,
    ))
}

fn native(kind: Kind, s: f64, x: f64, cfg: &SeriesConfig) -> Result<SolutionEval> {
    match kind {
        Kind::Principal => native_principal(s, x, cfg),
        Kind::Nonprincipal => native_nonprincipal(s, x, cfg),
    }
}

/// Mirror an endpoint-0 evaluation at π − x to an endpoint-π one at x.
fn mirror(e: SolutionEval, x: f64, sign: f64) -> SolutionEval {
    SolutionEval {
        value: e.value * sign,
        derivative: e.derivative * (-sign),
        x,
        ..e
    }
}

/// Endpoint-0 solution (c = π/2 normalization) anywhere in (0, π).
fn at_zero(kind: Kind, s: f64, x: f64, cfg: &SeriesConfig) -> Result<SolutionEval> {
    if x <= NATIVE_LIMIT {
        return native(kind, s, x, cfg);
    }
    // f = α u_π + β û_π, matched at 3π/4
    let xm = NATIVE_LIMIT;
    let f = native(kind, s, xm, cfg)?;
    let u_pi_m = mirror(native(Kind::Principal, s, PI - xm, cfg)?, xm, 1.0);
    let v_pi_m = mirror(native(Kind::Nonprincipal, s, PI - xm, cfg)?, xm, -1.0);
    let alpha = wronskian(&v_pi_m, &f);
    let beta = wronskian(&f, &u_pi_m);
    let u_pi = mirror(native(Kind::Principal, s, PI - x, cfg)?, x, 1.0);
    let v_pi = mirror(native(Kind::Nonprincipal, s, PI - x, cfg)?, x, -1.0);
    Ok(SolutionEval {
        value: u_pi.value * alpha + v_pi.value * beta,
        derivative: u_pi.derivative * alpha + v_pi.derivative * beta,
        x,
        z: c(0.0),
        branch: u_pi.branch,
    })
}

/// ∫_{π/2}^{c} dt / u₀(t)², s = 0.
fn shift_constant(cc: f64, cfg: &SeriesConfig) -> Result<f64> {
    if cc == FRAC_PI_2 {
        return Ok(0.0);
    }
    if cc <= NATIVE_LIMIT {
        return Ok(-reduction_integral(cc, cfg)?);
    }
    let inv_sq = |t: f64| match at_zero(Kind::Principal, 0.0, t, cfg) {
        Ok(u) => 1.0 / (u.value.re * u.value.re),
        Err(_) => f64::NAN,
    };
    let head = -reduction_integral(NATIVE_LIMIT, cfg)?;
    // remaining piece in the distance d = π − t, graded toward π
    let tail = integrate_log_graded(
        |d: f64| inv_sq(PI - d),
        PI - cc,
        PI - NATIVE_LIMIT,
        &quad_cfg(),
    )?;
    let total = head + tail.value;
    if !total.is_finite() {
        return Err(Error::Numerical(
            "reduction-of-order integrand failed".into(),
        ));
    }
    Ok(total)
}

fn check_c(cc: f64) -> Result<()> {
    if cc > 0.0 && cc < PI {
        Ok(())
    } else {
        Err(Error::Domain(format!("c must lie in (0, π), got {cc}")))
    }
}

/// Default integration constant of the s = 0 nonprincipal solutions.
pub const DEFAULT_C: f64 = FRAC_PI_2;

/// u_{0,s}(0, x) = sin^{(1+2s)/2}x · F(1/4 + s/2, 1/4 + s/2; 1 + s; sin²x), continued to (0, π).
pub fn eval_principal_0(sp: &SpectralParam, x: f64) -> Result<SolutionEval> {
    sp.require_limit_circle()?;
    check_x(x)?;
    at_zero(Kind::Principal, sp.s, x, &SeriesConfig::default())
}

/// û_{0,s}(0, x); c is the lower limit of the s = 0 reduction-of-order integral.
pub fn eval_nonprincipal_0(sp: &SpectralParam, x: f64, cc: f64) -> Result<SolutionEval> {
    sp.require_limit_circle()?;
    check_x(x)?;
    let cfg = SeriesConfig::default();
    let base = at_zero(Kind::Nonprincipal, sp.s, x, &cfg)?;
    if sp.s > 0.0 {
        return Ok(base);
    }
    check_c(cc)?;
    let k = shift_constant(cc, &cfg)?;
    if k == 0.0 {
        return Ok(base);
    }
    let p = at_zero(Kind::Principal, 0.0, x, &cfg)?;
    Ok(SolutionEval {
        value: base.value + p.value * k,
        derivative: base.derivative + p.derivative * k,
        ..base
    })
}

/// u_{π,s}(0, x) = u_{0,s}(0, π − x).
pub fn eval_principal_pi(sp: &SpectralParam, x: f64) -> Result<SolutionEval> {
    check_x(x)?;
    Ok(mirror(eval_principal_0(sp, PI - x)?, x, 1.0))
}

/// û_{π,s}(0, x) = −û_{0,s}(0, π − x) with the integration constant mirrored.
pub fn eval_nonprincipal_pi(sp: &SpectralParam, x: f64, cc: f64) -> Result<SolutionEval> {
    check_x(x)?;
    check_c(cc)?;
    Ok(mirror(eval_nonprincipal_0(sp, PI - x, PI - cc)?, x, -1.0))
}

// ---------------------------------------------------------------------------
// factorization τ_s − (s + 1/2)² = δ_s⁺ δ_s

/// A real function with analytic first and second derivatives.
pub trait AnalyticFunction {
    /// (f(x), f′(x), f″(x))
    fn eval3(&self, x: f64) -> (f64, f64, f64);
}

impl<F: Fn(f64) -> (f64, f64, f64)> AnalyticFunction for F {
    fn eval3(&self, x: f64) -> (f64, f64, f64) {
        self(x)
    }
}

/// ((δ_s⁺δ_s f)(x), (τ_s f)(x) − (s + 1/2)² f(x)), with
/// δ_s f = f′ − (s + 1/2) cot x · f and δ_s⁺ g = −g′ − (s + 1/2) cot x · g.
pub fn factor_pair(sp: &SpectralParam, f: &dyn AnalyticFunction, x: f64) -> Result<(f64, f64)> {
    check_x(x)?;
    let k = sp.s + 0.5;
    let (f0, f1, f2) = f.eval3(x);
    let (sn, cs) = x.sin_cos();
    let cot = cs / sn;
    let csc2 = 1.0 / (sn * sn);
    let delta = f1 - k * cot * f0;
    // (δf)′ = f″ + k csc²x f − k cot x f′
    let delta_prime = f2 + k * csc2 * f0 - k * cot * f1;
    let left = -delta_prime - k * cot * delta;
    let right = -f2 + (sp.s * sp.s - 0.25) * csc2 * f0 - k * k * f0;
    Ok((left, right))
}

/// y_s = sin^{(1+2s)/2}x, annihilated by δ_s.
pub fn eval_factor_principal(sp: &SpectralParam, x: f64) -> Result<SolutionEval> {
    check_x(x)?;
    let k = sp.s + 0.5;
    let (sn, cs) = x.sin_cos();
    Ok(SolutionEval::real(
        sn.powf(k),
        k * sn.powf(k - 1.0) * cs,
        x,
        Branch::Elementary,
    ))
}

/// ŷ_s = sin^{(1+2s)/2}x ∫ₓ^{π/2} sin^{−(1+2s)}t dt.
pub fn eval_factor_second(sp: &SpectralParam, x: f64) -> Result<SolutionEval> {
    check_x(x)?;
    let k = sp.s + 0.5;
    let near = x.min(PI - x);
    let mut integral = if near == FRAC_PI_2 {
        0.0
    } else {
        integrate_log_graded(
            |t: f64| t.sin().powf(-2.0 * k),
            near,
            FRAC_PI_2,
            &quad_cfg(),
        )?
        .value
    };
    if x > FRAC_PI_2 {
        integral = -integral;
    }
    let (sn, cs) = x.sin_cos();
    let value = sn.powf(k) * integral;
    let derivative = k * sn.powf(k - 1.0) * cs * integral - sn.powf(-k);
    Ok(SolutionEval::real(value, derivative, x, Branch::Quadrature))
}

/// Uniform entry point over [`SolutionId`]. `z` is ignored by the z = 0 families.
pub fn evaluate(id: SolutionId, sp: &SpectralParam, z: Complex, x: f64) -> Result<SolutionEval> {
    match id {
        SolutionId::PrincipalAt0 => eval_principal_0(sp, x),
        SolutionId::NonprincipalAt0 => eval_nonprincipal_0(sp, x, DEFAULT_C),
        SolutionId::PrincipalAtPi => eval_principal_pi(sp, x),
        SolutionId::NonprincipalAtPi => eval_nonprincipal_pi(sp, x, DEFAULT_C),
        SolutionId::Y1 => eval_y(1, sp, z, x),
        SolutionId::Y2 => eval_y(2, sp, z, x),
        SolutionId::Phi => Ok(eval_phi_theta(sp, z, x)?.0),
        SolutionId::Theta => Ok(eval_phi_theta(sp, z, x)?.1),
        SolutionId::FactorPrincipal => eval_factor_principal(sp, x),
        SolutionId::FactorSecond => eval_factor_second(sp, x),
    }
}

/// Potential q_s(x) = (s² − 1/4)/sin²x.
pub fn potential(s: f64, x: f64) -> f64 {
    (s * s - 0.25) / (x.sin() * x.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(s: f64) -> SpectralParam {
        SpectralParam::new(s).unwrap()
    }

    /// −y″ + q y − z y from a 5-point stencil on the value.
    fn stencil_residual<F: Fn(f64) -> Complex>(f: F, s: f64, z: Complex, x: f64) -> f64 {
        let h = 1e-3;
        let d2 = (-f(x + 2.0 * h) + f(x + h) * 16.0 - f(x) * 30.0 + f(x - h) * 16.0
            - f(x - 2.0 * h))
            / (12.0 * h * h);
        (-d2 + f(x) * (potential(s, x) - z)).norm()
    }

    #[test]
    fn spectral_param_classification() {
        assert_eq!(sp(0.0).classification, EndpointClass::LimitCircle);
        assert_eq!(sp(0.999).classification, EndpointClass::LimitCircle);
        assert_eq!(sp(1.0).classification, EndpointClass::LimitPoint);
        assert!(SpectralParam::new(-0.1).is_err());
        assert!(SpectralParam::new(f64::NAN).is_err());
    }

    #[test]
    fn y2_vanishes_at_midpoint() {
        let e = eval_y(2, &sp(0.3), Complex::new(2.0, 1.0), FRAC_PI_2).unwrap();
        assert!(e.value.norm() < 1e-15);
        assert_eq!(e.branch, Branch::MidpointSeries);
    }

    #[test]
    fn y_solves_the_equation() {
        let z = c(3.0);
        for j in [1, 2] {
            let r = stencil_residual(|t| eval_y(j, &sp(0.25), z, t).unwrap().value, 0.25, z, 1.0);
            assert!(r < 1e-5, "j = {j}: {r}");
        }
    }

    #[test]
    fn seam_agreement() {
        let x = FRAC_PI_4;
        for (s, b) in [(0.3, Branch::EndpointSeries), (0.0, Branch::LogSeries)] {
            let r = principal_root(Complex::new(2.0, 1.0));
            for j in [1, 2] {
                let m = eval_y_forced(j, &sp(s), r, x, Branch::MidpointSeries).unwrap();
                let e = eval_y_forced(j, &sp(s), r, x, b).unwrap();
                assert!((m.value - e.value).norm() < 1e-9, "s={s} j={j}");
                assert!((m.derivative - e.derivative).norm() < 1e-7, "s={s} j={j}");
            }
        }
    }

    #[test]
    fn wronskian_is_minus_one() {
        let grid = [0.3, 1.0, FRAC_PI_2, 2.5];
        for w in wronskian_y(&sp(0.5), c(2.0), &grid).unwrap() {
            assert!((w + 1.0).norm() < 1e-9);
        }
        for w in wronskian_y(&sp(0.0), c(0.7), &grid).unwrap() {
            assert!((w + 1.0).norm() < 1e-8);
        }
    }

    #[test]
    fn boundary_table_identities() {
        let t = boundary_table(&sp(0.4), c(1.7)).unwrap();
        assert!((t.determinant() + 1.0).norm() < 1e-12);
        assert_eq!(t.y1_0, -t.y1_pi);
        let t = boundary_table(&sp(0.3), c(2.0)).unwrap();
        for v in [t.y1_0, t.y1p_0, t.y2_0, t.y2p_0] {
            assert!(v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn principal_asymptotics_and_wronskian() {
        for s in [0.0, 0.3, 0.75] {
            let x = 1e-3;
            let u = eval_principal_0(&sp(s), x).unwrap();
            assert!((u.value.re / x.powf(0.5 + s) - 1.0).abs() < 1e-5);
            let v = eval_nonprincipal_0(&sp(s), x, DEFAULT_C).unwrap();
            assert!((wronskian(&v, &u) - 1.0).norm() < 1e-9, "s = {s}");
        }
    }

    #[test]
    fn continuation_past_three_quarters() {
        // solutions stay solutions across the matching point
        for s in [0.0, 0.4] {
            for x in [2.0, 2.6, 3.0] {
                let r =
                    stencil_residual(|t| eval_principal_0(&sp(s), t).unwrap().value, s, c(0.0), x);
                assert!(r < 1e-5, "s={s} x={x}: {r}");
                let r = stencil_residual(
                    |t| eval_nonprincipal_0(&sp(s), t, DEFAULT_C).unwrap().value,
                    s,
                    c(0.0),
                    x,
                );
                assert!(r < 1e-5, "s={s} x={x}: {r}");
            }
            let a = eval_principal_0(&sp(s), NATIVE_LIMIT - 1e-9).unwrap();
            let b = eval_principal_0(&sp(s), NATIVE_LIMIT + 1e-9).unwrap();
            assert!((a.value - b.value).norm() < 1e-8);
            assert!((a.derivative - b.derivative).norm() < 1e-7);
        }
    }

    #[test]
    fn principal_zero_is_phi_at_zero_energy() {
        // same generalized boundary values at 0, so the functions coincide
        for s in [0.0, 0.35] {
            for x in [0.2, 1.3, 2.9] {
                let u = eval_principal_0(&sp(s), x).unwrap();
                let (phi, _) = eval_phi_theta(&sp(s), c(0.0), x).unwrap();
                assert!((u.value - phi.value).norm() < 1e-9, "s={s} x={x}");
            }
        }
    }

    #[test]
    fn mirror_symmetry() {
        let p = sp(0.3);
        let a = eval_principal_pi(&p, PI - 0.4).unwrap();
        let b = eval_principal_0(&p, 0.4).unwrap();
        assert!((a.value - b.value).norm() < 1e-10);
    }

    #[test]
    fn factor_pair_identities() {
        let y = |s: f64| {
            move |x: f64| {
                let k = s + 0.5;
                let (sn, cs) = x.sin_cos();
                let f = sn.powf(k);
                let f1 = k * sn.powf(k - 1.0) * cs;
                let f2 = k * (k - 1.0) * sn.powf(k - 2.0) * cs * cs - k * sn.powf(k);
                (f, f1, f2)
            }
        };
        let (l, r) = factor_pair(&sp(0.3), &y(0.3), 0.7).unwrap();
        assert!(l.abs() < 1e-12 && r.abs() < 1e-12);
        let sin2 = |x: f64| {
            (
                (2.0 * x).sin(),
                2.0 * (2.0 * x).cos(),
                -4.0 * (2.0 * x).sin(),
            )
        };
        let (l, r) = factor_pair(&sp(0.0), &sin2, 1.0).unwrap();
        assert!((l - r).abs() < 1e-10);
        let poly = |x: f64| (x * (PI - x), PI - 2.0 * x, -2.0);
        let (l, r) = factor_pair(&sp(0.5), &poly, FRAC_PI_2).unwrap();
        assert!((l - r).abs() < 1e-10);
        assert!(factor_pair(&sp(0.5), &poly, 0.0).is_err());
    }

    #[test]
    fn factor_second_solution() {
        let e = eval_factor_second(&sp(0.4), FRAC_PI_2).unwrap();
        assert_eq!(e.value.re, 0.0);
        let x = 0.01;
        let e = eval_factor_second(&sp(0.5), x).unwrap();
        let ratio = e.value.re / x.powf(0.0);
        assert!((ratio - 1.0).abs() < 0.02);
        let k2 = 0.75f64.powi(2);
        let r = stencil_residual(
            |t| eval_factor_second(&sp(0.25), t).unwrap().value,
            0.25,
            c(k2),
            1.0,
        );
        assert!(r < 1e-5, "{r}");
    }
}
