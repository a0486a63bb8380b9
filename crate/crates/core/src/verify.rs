//! Named invariant suites. Each suite measures a set of residuals and
//! compares them against [`Tolerances`].

use std::f64::consts::{FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary_values::ExtractionConfig;
use crate::closed_form::{
    boundary_table, eval_nonprincipal_0, eval_nonprincipal_pi, eval_principal_0, eval_principal_pi,
    eval_y_forced, evaluate, potential, principal_root, wronskian_y, Branch, SolutionId,
    SpectralParam, DEFAULT_C,
};
use crate::error::{Error, Result};
use crate::quadrature::{interval_rule, RuleLayout};
use crate::specfun::{
    cot_pi, digamma, gamma, hyp2f1_derivative, hyp2f1_series, rgamma, sin_pi, Complex, SeriesConfig,
};
use crate::spectral::{eigenvalues, f0_eval, m_function, m_quotient, residue_estimate, scan_poles};
use crate::variational::{
    assemble, comparison_chain, default_corpus, hardy_identities, inequality_gap_with,
    limit_checks, min_rayleigh, smallest_generalized, trial_quotient, BasisKind, Family,
    HardyConstants, HardyVariant, PotentialKind, PotentialSpec, RayleighProblem, TestFunction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Suite {
    #[serde(rename = "specfun")]
    Specfun,
    #[serde(rename = "closedform")]
    Closedform,
    #[serde(rename = "spectral")]
    Spectral,
    #[serde(rename = "hardy")]
    Hardy,
    #[serde(rename = "appendixB")]
    AppendixB,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Specfun,
        Suite::Closedform,
        Suite::Spectral,
        Suite::Hardy,
        Suite::AppendixB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Specfun => "specfun",
            Suite::Closedform => "closedform",
            Suite::Spectral => "spectral",
            Suite::Hardy => "hardy",
            Suite::AppendixB => "appendixB",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// value < bound
    Below,
    /// value ≤ bound
    AtMost,
    /// value > bound
    Above,
    /// value ≥ bound
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: &str, value: f64, relation: Relation, bound: f64) -> Self {
        let passed = match relation {
            Relation::Below => value < bound,
            Relation::AtMost => value <= bound,
            Relation::Above => value > bound,
            Relation::AtLeast => value >= bound,
        };
        Self {
            name: name.to_string(),
            value,
            relation,
            bound,
            passed,
        }
    }

    /// Count of violations, passing at zero.
    pub fn count(name: &str, violations: usize) -> Self {
        Self::new(name, violations as f64, Relation::AtMost, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Assertion thresholds; every field can be overridden from the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub reflection: f64,
    pub recurrence: f64,
    pub gauss_limit: f64,
    pub derivative: f64,
    pub wronskian: f64,
    pub ode_residual: f64,
    pub seam_value: f64,
    pub seam_derivative: f64,
    pub determinant: f64,
    pub symmetry: f64,
    pub asymptotic: f64,
    pub pole: f64,
    pub conjugate: f64,
    pub quotient: f64,
    pub trial: f64,
    pub gap: f64,
    pub strict_gap: f64,
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            reflection: 1e-10,
            recurrence: 1e-11,
            gauss_limit: 1e-4,
            derivative: 1e-8,
            wronskian: 1e-8,
            ode_residual: 1e-5,
            seam_value: 1e-9,
            seam_derivative: 1e-7,
            determinant: 1e-12,
            symmetry: 1e-14,
            asymptotic: 1e-5,
            pole: 1e-8,
            conjugate: 1e-12,
            quotient: 1e-5,
            trial: 1e-8,
            gap: 1e-9,
            strict_gap: 1e-6,
            identity: 1e-8,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 18] = [
        "reflection",
        "recurrence",
        "gauss_limit",
        "derivative",
        "wronskian",
        "ode_residual",
        "seam_value",
        "seam_derivative",
        "determinant",
        "symmetry",
        "asymptotic",
        "pole",
        "conjugate",
        "quotient",
        "trial",
        "gap",
        "strict_gap",
        "identity",
    ];

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Domain(format!(
                "tolerance {name} must be positive, got {value}"
            )));
        }
        let slot = match name.replace('-', "_").as_str() {
            "reflection" => &mut self.reflection,
            "recurrence" => &mut self.recurrence,
            "gauss_limit" => &mut self.gauss_limit,
            "derivative" => &mut self.derivative,
            "wronskian" => &mut self.wronskian,
            "ode_residual" => &mut self.ode_residual,
            "seam_value" => &mut self.seam_value,
            "seam_derivative" => &mut self.seam_derivative,
            "determinant" => &mut self.determinant,
            "symmetry" => &mut self.symmetry,
            "asymptotic" => &mut self.asymptotic,
            "pole" => &mut self.pole,
            "conjugate" => &mut self.conjugate,
            "quotient" => &mut self.quotient,
            "trial" => &mut self.trial,
            "gap" => &mut self.gap,
            "strict_gap" => &mut self.strict_gap,
            "identity" => &mut self.identity,
            _ => return Err(Error::Domain(format!("unknown tolerance `{name}`"))),
        };
        *slot = value;
        Ok(())
    }
}

pub fn run_suite(suite: Suite, tol: &Tolerances) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Specfun => specfun_checks(tol)?,
        Suite::Closedform => closedform_checks(tol)?,
        Suite::Spectral => spectral_checks(tol)?,
        Suite::Hardy => hardy_checks(tol)?,
        Suite::AppendixB => identity_checks(tol)?,
    };
    Ok(SuiteReport { suite, checks })
}

fn sp(s: f64) -> SpectralParam {
    SpectralParam::new(s).expect("suite parameters are valid")
}

fn cz(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

// ---------------------------------------------------------------------------
// special functions

/// Points with |Re z| ≤ 10, |Im z| ≤ 2, kept 0.05 away from the integers.
pub fn sample_points(n: usize, seed: u64) -> Vec<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let z = cz(rng.gen_range(-10.0..10.0), rng.gen_range(-2.0..2.0));
        if (z.re - z.re.round()).abs() > 0.05 || z.im.abs() > 0.05 {
            out.push(z);
        }
    }
    out
}

/// Max relative residual of Γ(z)Γ(1−z) = π/sin πz and max absolute residual
/// of ψ(1−z) − ψ(z) = π cot πz.
pub fn reflection_residuals(points: &[Complex]) -> Result<(f64, f64)> {
    let mut g = 0.0f64;
    let mut d = 0.0f64;
    for &z in points {
        let one = cz(1.0, 0.0);
        let rhs = PI / sin_pi(z);
        g = g.max((gamma(z)? * gamma(one - z)? - rhs).norm() / rhs.norm());
        d = d.max((digamma(one - z)? - digamma(z)? - cot_pi(z) * PI).norm());
    }
    Ok((g, d))
}

/// Max relative residuals of Γ(z+1) = zΓ(z) and ψ(z+1) = ψ(z) + 1/z.
pub fn recurrence_residuals(points: &[Complex]) -> Result<(f64, f64)> {
    let mut g = 0.0f64;
    let mut d = 0.0f64;
    for &z in points {
        let lhs = gamma(z + 1.0)?;
        g = g.max((lhs - z * gamma(z)?).norm() / lhs.norm());
        let lhs = digamma(z + 1.0)?;
        d = d.max((lhs - digamma(z)? - 1.0 / z).norm() / lhs.norm().max(1.0));
    }
    Ok((g, d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussLimit {
    pub samples: usize,
    pub max_deviation: f64,
    /// Samples whose deviation exceeds the tolerance.
    pub failures: usize,
    /// Samples whose series did not converge.
    pub unconverged: usize,
}

/// Relative distance between F(α, β; γ; 1 − 10⁻⁶) and the Gauss value
/// Γ(γ)Γ(γ−α−β)/(Γ(γ−α)Γ(γ−β)) for random parameters with
/// Re(γ − α − β) ∈ [0.2, 2].
pub fn gauss_limit(samples: usize, seed: u64, tol: f64) -> Result<GaussLimit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = SeriesConfig::new(1e-12, 100_000_000)?;
    let x = 1.0 - 1e-6;
    let mut out = GaussLimit {
        samples,
        max_deviation: 0.0,
        failures: 0,
        unconverged: 0,
    };
    for _ in 0..samples {
        let a = cz(rng.gen_range(0.1..2.0), rng.gen_range(-0.5..0.5));
        let b = cz(rng.gen_range(0.1..2.0), rng.gen_range(-0.5..0.5));
        let delta = rng.gen_range(0.2..2.0);
        let c = a + b + delta;
        let exact = gamma(c)? * gamma(c - a - b)? * rgamma(c - a) * rgamma(c - b);
        match hyp2f1_series(a, b, c, x, &cfg) {
            Ok(v) => {
                let dev = (v - exact).norm() / exact.norm();
                out.max_deviation = out.max_deviation.max(dev);
                if !(dev < tol) {
                    out.failures += 1;
                }
            }
            Err(Error::Convergence { .. }) => {
                out.unconverged += 1;
                out.failures += 1;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Max |F′ − 4th-order central difference| over x ∈ {0.1, 0.3, 0.45}.
pub fn derivative_residual() -> Result<f64> {
    let cfg = SeriesConfig::default();
    let params = [
        (cz(0.25, 0.0), cz(0.25, 0.0), cz(1.3, 0.0)),
        (cz(0.75, 0.5), cz(0.75, -0.5), cz(1.5, 0.0)),
        (cz(-0.3, 1.0), cz(1.2, 0.2), cz(0.7, -0.4)),
    ];
    let h = 1e-3;
    let mut worst = 0.0f64;
    for (a, b, c) in params {
        for x in [0.1, 0.3, 0.45] {
            let f = |t: f64| hyp2f1_series(a, b, c, t, &cfg);
            let fd =
                (f(x - 2.0 * h)? - f(x + 2.0 * h)? + (f(x + h)? - f(x - h)?) * 8.0) / (12.0 * h);
            worst = worst.max((hyp2f1_derivative(a, b, c, x, &cfg)? - fd).norm());
        }
    }
    Ok(worst)
}

fn specfun_checks(tol: &Tolerances) -> Result<Vec<Check>> {
    let pts = sample_points(200, 7);
    let (g, d) = reflection_residuals(&pts)?;
    let (rg, rd) = recurrence_residuals(&pts)?;
    let gl = gauss_limit(50, 11, tol.gauss_limit)?;
    Ok(vec![
        Check::new("gamma reflection (rel)", g, Relation::Below, tol.reflection),
        Check::new("digamma reflection", d, Relation::Below, tol.reflection),
        Check::new(
            "gamma recurrence (rel)",
            rg,
            Relation::Below,
            tol.recurrence,
        ),
        Check::new(
            "digamma recurrence (rel)",
            rd,
            Relation::Below,
            tol.recurrence,
        ),
        Check::new(
            "gauss limit at x = 1 - 1e-6 (rel)",
            gl.max_deviation,
            Relation::Below,
            tol.gauss_limit,
        ),
        Check::new(
            "hypergeometric derivative",
            derivative_residual()?,
            Relation::Below,
            tol.derivative,
        ),
    ])
}

// ---------------------------------------------------------------------------
// closed forms

/// max |W(y₁, y₂) + 1| over the (s, z, x) matrix.
pub fn wronskian_defect() -> Result<f64> {
    let grid: Vec<f64> = (1..=20).map(|i| PI * i as f64 / 21.0).collect();
    let mut worst = 0.0f64;
    for s in [0.0, 0.1, 0.25, 0.5, 0.75, 0.9] {
        for z in [cz(0.0, 0.0), cz(1.0, 0.0), cz(2.0, 1.0), cz(-3.0, 0.0)] {
            for w in wronskian_y(&sp(s), z, &grid)? {
                worst = worst.max((w + 1.0).norm());
            }
        }
    }
    Ok(worst)
}

fn solution_energy(id: SolutionId, s: f64, z: Complex) -> Complex {
    match id {
        SolutionId::Y1 | SolutionId::Y2 | SolutionId::Phi | SolutionId::Theta => z,
        SolutionId::FactorPrincipal | SolutionId::FactorSecond => cz((s + 0.5).powi(2), 0.0),
        _ => cz(0.0, 0.0),
    }
}

/// max |−f″ + q f − z f| by a 5-point stencil (h = 10⁻³) on [0.2, π − 0.2].
pub fn ode_residual() -> Result<f64> {
    let ids = [
        SolutionId::PrincipalAt0,
        SolutionId::NonprincipalAt0,
        SolutionId::PrincipalAtPi,
        SolutionId::NonprincipalAtPi,
        SolutionId::Y1,
        SolutionId::Y2,
        SolutionId::Phi,
        SolutionId::Theta,
        SolutionId::FactorPrincipal,
        SolutionId::FactorSecond,
    ];
    let h = 1e-3;
    let mut worst = 0.0f64;
    for s in [0.0, 0.3, 0.75] {
        let p = sp(s);
        for id in ids {
            let z = solution_energy(id, s, cz(1.0, 0.5));
            for i in 0..7 {
                let x = 0.2 + (PI - 0.4) * i as f64 / 6.0;
                let f = |t: f64| evaluate(id, &p, z, t).map(|e| e.value);
                let d2 = (-f(x + 2.0 * h)? + f(x + h)? * 16.0 - f(x)? * 30.0 + f(x - h)? * 16.0
                    - f(x - 2.0 * h)?)
                    / (12.0 * h * h);
                let fx = f(x)?;
                worst = worst.max((-d2 + fx * (potential(s, x) - z)).norm() / (1.0 + fx.norm()));
            }
        }
    }
    Ok(worst)
}

/// Max (value, derivative) gap between the two representations at sin²x = ½.
pub fn seam_defect() -> Result<(f64, f64)> {
    let mut dv = 0.0f64;
    let mut dd = 0.0f64;
    for s in [0.0, 0.3, 0.75] {
        let near = if s == 0.0 {
            Branch::LogSeries
        } else {
            Branch::EndpointSeries
        };
        for z in [cz(1.0, 0.0), cz(2.0, 1.0), cz(-3.0, 0.0)] {
            let r = principal_root(z);
            for j in [1, 2] {
                let a = eval_y_forced(j, &sp(s), r, FRAC_PI_4, Branch::MidpointSeries)?;
                let b = eval_y_forced(j, &sp(s), r, FRAC_PI_4, near)?;
                dv = dv.max((a.value - b.value).norm());
                dd = dd.max((a.derivative - b.derivative).norm());
            }
        }
    }
    Ok((dv, dd))
}

/// Max (|det + 1|, symmetry defect) of the boundary table.
pub fn table_defects() -> Result<(f64, f64)> {
    let mut det = 0.0f64;
    let mut sym = 0.0f64;
    for s in [0.0, 0.25, 0.5, 0.75] {
        for z in [cz(0.3, 0.0), cz(1.7, 0.0), cz(2.0, 1.0), cz(-3.0, 0.0)] {
            let t = boundary_table(&sp(s), z)?;
            det = det.max((t.determinant() + 1.0).norm());
            sym = sym.max(t.symmetry_defect());
        }
    }
    Ok((det, sym))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expansion {
    PrincipalAt0,
    NonprincipalAt0,
    PrincipalAtPi,
    NonprincipalAtPi,
}

/// Second-order coefficient a in value/leading = 1 + a·d² + O(d⁴), d the
/// distance to the endpoint, by Neville extrapolation to d = 0 of
/// (value/leading − 1)/d² over d ∈ {10⁻², 10⁻³, 10⁻⁴}. Returns
/// (extrapolated, expected).
pub fn correction_coefficient(which: Expansion, s: f64) -> Result<(f64, f64)> {
    let p = sp(s);
    let nonprincipal = matches!(
        which,
        Expansion::NonprincipalAt0 | Expansion::NonprincipalAtPi
    );
    if nonprincipal && s == 0.0 {
        return Err(Error::Domain(
            "the s = 0 nonprincipal expansion has no constant second-order coefficient".into(),
        ));
    }
    let expected = if nonprincipal {
        (4.0 * s * s - 1.0) / (48.0 - 48.0 * s)
    } else {
        (4.0 * s * s - 1.0) / (48.0 + 48.0 * s)
    };
    let mut t = Vec::new();
    let mut c = Vec::new();
    for d in [1e-2, 1e-3, 1e-4] {
        let (x, dist) = match which {
            Expansion::PrincipalAt0 | Expansion::NonprincipalAt0 => (d, d),
            _ => (PI - d, PI - (PI - d)),
        };
        let (value, lead) = match which {
            Expansion::PrincipalAt0 => (eval_principal_0(&p, x)?.value.re, dist.powf(0.5 + s)),
            Expansion::PrincipalAtPi => (eval_principal_pi(&p, x)?.value.re, dist.powf(0.5 + s)),
            Expansion::NonprincipalAt0 => (
                eval_nonprincipal_0(&p, x, DEFAULT_C)?.value.re,
                dist.powf(0.5 - s) / (2.0 * s),
            ),
            Expansion::NonprincipalAtPi => (
                eval_nonprincipal_pi(&p, x, DEFAULT_C)?.value.re,
                -dist.powf(0.5 - s) / (2.0 * s),
            ),
        };
        t.push(dist * dist);
        c.push((value / lead - 1.0) / (dist * dist));
    }
    // Neville at t = 0
    let n = t.len();
    for level in 1..n {
        for i in 0..n - level {
            let j = i + level;
            c[i] = (c[i + 1] * t[i] - c[i] * t[j]) / (t[i] - t[j]);
        }
    }
    Ok((c[0], expected))
}

/// Max |extracted − expected| over s ∈ {0, 0.25, 0.75} and all applicable
/// expansions.
pub fn asymptotic_defect() -> Result<f64> {
    let mut worst = 0.0f64;
    for s in [0.0, 0.25, 0.75] {
        for which in [
            Expansion::PrincipalAt0,
            Expansion::PrincipalAtPi,
            Expansion::NonprincipalAt0,
            Expansion::NonprincipalAtPi,
        ] {
            match correction_coefficient(which, s) {
                Ok((got, want)) => worst = worst.max((got - want).abs()),
                Err(Error::Domain(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(worst)
}

fn closedform_checks(tol: &Tolerances) -> Result<Vec<Check>> {
    let (sv, sd) = seam_defect()?;
    let (det, sym) = table_defects()?;
    Ok(vec![
        Check::new(
            "wronskian |W + 1|",
            wronskian_defect()?,
            Relation::Below,
            tol.wronskian,
        ),
        Check::new(
            "ODE residual (rel)",
            ode_residual()?,
            Relation::Below,
            tol.ode_residual,
        ),
        Check::new("seam value", sv, Relation::Below, tol.seam_value),
        Check::new("seam derivative", sd, Relation::Below, tol.seam_derivative),
        Check::new("table |det + 1|", det, Relation::Below, tol.determinant),
        Check::new("table symmetries", sym, Relation::Below, tol.symmetry),
        Check::new(
            "second-order coefficients",
            asymptotic_defect()?,
            Relation::Below,
            tol.asymptotic,
        ),
    ])
}

// ---------------------------------------------------------------------------
// spectral

/// (max |pole − eigenvalue|, count mismatches) for s ∈ {0, 0.2, 0.5, 0.8}
/// over (0, (s + 5.5)²).
pub fn pole_defect() -> (f64, usize) {
    let mut worst = 0.0f64;
    let mut mismatches = 0;
    for s in [0.0, 0.2, 0.5, 0.8] {
        let poles = scan_poles(s, 0.0, (s + 5.5).powi(2));
        let eig = eigenvalues(s, 4).values;
        if poles.len() != eig.len() {
            mismatches += 1;
            worst = f64::INFINITY;
            continue;
        }
        for (p, e) in poles.iter().zip(&eig) {
            worst = worst.max((p - e).abs());
        }
    }
    (worst, mismatches)
}

fn spectral_checks(tol: &Tolerances) -> Result<Vec<Check>> {
    let (pole, mism) = pole_defect();

    let mut signs = Vec::new();
    for s in [0.0, 0.4, 0.8] {
        for &l in &eigenvalues(s, 3).values {
            signs.push(residue_estimate(s, l, 1e-6)?);
        }
    }
    let positive = signs.iter().filter(|r| **r >= 0.0).count();

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut conj = 0.0f64;
    let mut herglotz = 0usize;
    for _ in 0..50 {
        let s = rng.gen_range(0.0..0.95);
        let z = cz(rng.gen_range(-5.0..30.0), rng.gen_range(0.01..5.0));
        let a = m_function(s, z)?.m;
        let b = m_function(s, z.conj())?.m;
        conj = conj.max((b - a.conj()).norm() / (1.0 + a.norm()));
        if !(a.im > 0.0) {
            herglotz += 1;
        }
    }

    let cfg = ExtractionConfig::default();
    let mut quot = 0.0f64;
    for z in [0.9, 1.4, 1.9, 2.4, 2.9] {
        let z = cz(z, 0.0);
        let a = m_function(0.3, z)?.m;
        let b = m_quotient(0.3, z, &cfg)?;
        quot = quot.max((a - b).norm() / (1.0 + a.norm()));
    }

    // f = 2 f₀(1, ·) − 0.5 f₀(3, ·) has K₀ = 1.5
    let x = 1e-6;
    let (a, b) = (f0_eval(1.0, x)?, f0_eval(3.0, x)?);
    let (v, d) = (2.0 * a.0 - 0.5 * b.0, 2.0 * a.1 - 0.5 * b.1);
    let k0 = (v / x.sqrt() - 1.5).abs().max((d * x.sqrt() - 0.75).abs());

    Ok(vec![
        Check::new("pole vs eigenvalue", pole, Relation::Below, tol.pole),
        Check::count("pole count mismatches", mism),
        Check::count("residues with the wrong sign", positive),
        Check::new(
            "conjugate symmetry (rel)",
            conj,
            Relation::Below,
            tol.conjugate,
        ),
        Check::count("Im m <= 0 in the upper half plane", herglotz),
        Check::new(
            "closed form vs quotient (rel)",
            quot,
            Relation::Below,
            tol.quotient,
        ),
        Check::new("K0 limits", k0, Relation::Below, 1e-6),
    ])
}

// ---------------------------------------------------------------------------
// Hardy inequalities

pub const HARDY_NS: [usize; 5] = [25, 50, 100, 200, 400];

/// Offset ε of the enrichment function sin^{1/2+ε}.
pub const ENRICHMENT_EPS: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyRow {
    pub n: usize,
    /// min of [∫|f′|² − ¼∫|f|²/sin²]/∫|f|² over sin(kx), k ≤ n
    pub sine: f64,
    /// same with sin^{1/2+ε} added
    pub enriched: f64,
    /// sine basis, form minus ¼∫|f|²
    pub full_form: f64,
    /// enriched basis, form minus (¼ + 0.01)∫|f|²
    pub probe: f64,
    pub inverse_x2: f64,
    pub distance: f64,
    /// sin((k − ½)x) basis with ¼/x²
    pub mixed: f64,
    /// largest residual_norm / |λ| among the solves
    pub residual: f64,
}

pub fn hardy_row(n: usize) -> Result<HardyRow> {
    let p = RayleighProblem::sine_hardy(n, 0.25, 0.0).with_enrichment(vec![ENRICHMENT_EPS]);
    let asm = assemble(&p)?;
    let a = &asm.k - &asm.v;
    let enriched = smallest_generalized(&a, &asm.m)?;
    let sine = smallest_generalized(
        &a.view((0, 0), (n, n)).into_owned(),
        &asm.m.view((0, 0), (n, n)).into_owned(),
    )?;
    let full = smallest_generalized(
        &(a.view((0, 0), (n, n)) - asm.m.view((0, 0), (n, n)) * 0.25),
        &asm.m.view((0, 0), (n, n)).into_owned(),
    )?;
    let probe = smallest_generalized(&(&a - &asm.m * 0.26), &asm.m)?;
    let quarter = |kind| vec![(PotentialSpec::new(kind, 0.25), 1.0)];
    let x2 = min_rayleigh(&RayleighProblem::new(n, quarter(PotentialKind::InverseX2)))?;
    let dist = min_rayleigh(&RayleighProblem::new(
        n,
        quarter(PotentialKind::InverseDistance2),
    ))?;
    let mixed = min_rayleigh(
        &RayleighProblem::new(n, quarter(PotentialKind::InverseX2)).with_basis(BasisKind::Mixed),
    )?;
    let residual = [&enriched, &sine, &full, &probe, &x2, &dist, &mixed]
        .iter()
        .map(|r| r.residual_norm / r.min_eigenvalue.abs())
        .fold(0.0, f64::max);
    Ok(HardyRow {
        n,
        sine: sine.min_eigenvalue,
        enriched: enriched.min_eigenvalue,
        full_form: full.min_eigenvalue,
        probe: probe.min_eigenvalue,
        inverse_x2: x2.min_eigenvalue,
        distance: dist.min_eigenvalue,
        mixed: mixed.min_eigenvalue,
        residual,
    })
}

fn increases(v: &[f64]) -> usize {
    v.windows(2).filter(|w| !(w[1] < w[0])).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub evaluated: usize,
    pub skipped: usize,
    pub min_gap: f64,
    /// min gap/∫|f|²
    pub min_normalized: f64,
}

/// Gaps of the given variants over the bundled corpus; inadmissible pairs
/// are skipped.
pub fn corpus_gaps(variants: &[HardyVariant]) -> Result<GapSummary> {
    let consts = HardyConstants::compute()?;
    let rule = interval_rule(&RuleLayout::default());
    let mut out = GapSummary {
        evaluated: 0,
        skipped: 0,
        min_gap: f64::INFINITY,
        min_normalized: f64::INFINITY,
    };
    for f in default_corpus() {
        let norm = f.norm_sq();
        for &v in variants {
            match inequality_gap_with(&f, v, &consts, &rule) {
                Ok(g) => {
                    out.evaluated += 1;
                    out.min_gap = out.min_gap.min(g);
                    out.min_normalized = out.min_normalized.min(g / norm);
                }
                Err(Error::Admissibility { .. }) => out.skipped += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

fn hardy_checks(tol: &Tolerances) -> Result<Vec<Check>> {
    let rows: Vec<HardyRow> = HARDY_NS
        .iter()
        .map(|&n| hardy_row(n))
        .collect::<Result<_>>()?;
    let col = |f: fn(&HardyRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let consts = HardyConstants::compute()?;
    let pi2 = PI * PI;
    let mut checks = Vec::new();
    for r in &rows {
        checks.push(Check::new(
            &format!("sine minimum N={}", r.n),
            r.sine,
            Relation::Above,
            0.25,
        ));
        checks.push(Check::new(
            &format!("enriched minimum N={}", r.n),
            r.enriched,
            Relation::Above,
            0.25,
        ));
    }
    checks.push(Check::count(
        "sine minima not strictly decreasing",
        increases(&col(|r| r.sine)),
    ));
    checks.push(Check::count(
        "enriched minima not strictly decreasing",
        increases(&col(|r| r.enriched)),
    ));
    checks.push(Check::new(
        "enriched minimum N=400",
        rows[4].enriched,
        Relation::Below,
        0.27,
    ));
    let full = col(|r| r.full_form);
    checks.push(Check::new(
        "full form minimum",
        full.iter().copied().fold(f64::INFINITY, f64::min),
        Relation::Above,
        0.0,
    ));
    checks.push(Check::count(
        "full form minima not decreasing",
        increases(&full),
    ));
    checks.push(Check::new(
        "shifted probe minimum",
        col(|r| r.probe)
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min),
        Relation::Below,
        0.0,
    ));
    checks.push(Check::new(
        "GEVP relative residual",
        col(|r| r.residual).iter().copied().fold(0.0, f64::max),
        Relation::Below,
        1e-8,
    ));
    for eps in [0.5, 0.1, 0.01] {
        let (q, c) = trial_quotient(eps)?;
        checks.push(Check::new(
            &format!("trial quotient eps={eps}"),
            (q - c).abs(),
            Relation::Below,
            tol.trial,
        ));
    }
    let x2 = col(|r| r.inverse_x2);
    checks.push(Check::new(
        "1/x^2 minimum - lambda_F0/pi^2",
        x2[4] - consts.lambda_f0 / pi2,
        Relation::Above,
        -1e-3,
    ));
    checks.push(Check::count("1/x^2 minima not decreasing", increases(&x2)));
    let dist = col(|r| r.distance);
    checks.push(Check::new(
        "1/d^2 minimum - 4 lambda_DN0/pi^2",
        dist[4] - 4.0 * consts.lambda_dn0 / pi2,
        Relation::Above,
        -1e-3,
    ));
    checks.push(Check::count(
        "1/d^2 minima not decreasing",
        increases(&dist),
    ));
    let mixed = col(|r| r.mixed);
    checks.push(Check::new(
        "mixed basis minimum - lambda_DN0/pi^2",
        mixed[4] - consts.lambda_dn0 / pi2,
        Relation::Above,
        -1e-3,
    ));
    let gaps = corpus_gaps(&HardyVariant::ALL)?;
    checks.push(Check::new(
        "corpus minimum gap",
        gaps.min_gap,
        Relation::AtLeast,
        -tol.gap,
    ));
    checks.push(Check::new(
        "corpus minimum normalized gap",
        gaps.min_normalized,
        Relation::Above,
        tol.strict_gap,
    ));
    let grid: Vec<f64> = (1..=10_000).map(|i| PI * i as f64 / 10_001.0).collect();
    checks.push(Check::new(
        "sin <= d <= x violation",
        comparison_chain(&grid)?.max_violation(),
        Relation::AtMost,
        0.0,
    ));
    Ok(checks)
}

// ---------------------------------------------------------------------------
// logarithmic Hardy identities

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentitySummary {
    pub cases: usize,
    pub max_residual_log: f64,
    pub max_residual_alpha: f64,
    pub min_gap: f64,
    pub min_form: f64,
}

pub fn identity_matrix() -> Result<IdentitySummary> {
    let funcs = [
        TestFunction::new("sin", Family::Sine { k: 1.0 }),
        TestFunction::new("sin2", Family::Sine { k: 2.0 }),
        TestFunction::new("parabola", Family::Poly { a: 1.0, b: 1.0 }),
        TestFunction::new("poly", Family::Poly { a: 0.75, b: 0.75 }),
        TestFunction::new(
            "bump",
            Family::Bump {
                center: 1.5,
                width: 1.2,
            },
        ),
    ];
    let mut out = IdentitySummary {
        cases: 0,
        max_residual_log: 0.0,
        max_residual_alpha: 0.0,
        min_gap: f64::INFINITY,
        min_form: f64::INFINITY,
    };
    for f in &funcs {
        for s in [0.0, 0.3, 0.7] {
            for (r0, r1, big_r) in [(0.1, 3.0, 4.0), (0.05, 2.5, 3.5), (0.5, 3.1, 10.0)] {
                let r = hardy_identities(f, s, r0, r1, big_r)?;
                out.cases += 1;
                out.max_residual_log = out.max_residual_log.max(r.residual_log);
                out.max_residual_alpha = out.max_residual_alpha.max(r.residual_alpha);
                out.min_gap = out.min_gap.min(r.gap_combined);
                out.min_form = out.min_form.min(r.log_form).min(r.alpha_form);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitSummary {
    pub cases: usize,
    pub non_monotone: usize,
    pub bound_failures: usize,
    pub max_final_quotient: f64,
}

/// Endpoint quotients for functions with f(0) = 0 and f′ ∈ L² near 0.
pub fn limit_matrix() -> Result<LimitSummary> {
    let sin = |x: f64| (x.sin(), x.cos(), -x.sin());
    let pw = |x: f64| (x.powf(0.6), 0.6 * x.powf(-0.4), -0.24 * x.powf(-1.4));
    let log = TestFunction::new("log-damped", Family::LogDamped { r: 4.0 });
    let u0 = |x: f64| {
        let e = eval_principal_0(&sp(0.0), x).expect("x in (0, π)");
        (e.value.re, e.derivative.re, 0.0)
    };
    let u3 = |x: f64| {
        let e = eval_principal_0(&sp(0.3), x).expect("x in (0, π)");
        (e.value.re, e.derivative.re, 0.0)
    };
    let cases: [(&dyn crate::closed_form::AnalyticFunction, f64); 6] = [
        (&sin, 0.3),
        (&pw, 0.3),
        (&log, 0.0),
        (&log, 0.3),
        (&u0, 0.0),
        (&u3, 0.3),
    ];
    let mut out = LimitSummary {
        cases: 0,
        non_monotone: 0,
        bound_failures: 0,
        max_final_quotient: 0.0,
    };
    for (f, s) in cases {
        let r = limit_checks(f, s, 4.0)?;
        out.cases += 1;
        out.non_monotone += usize::from(!r.monotone_tail);
        out.bound_failures += usize::from(!r.bound_holds);
        out.max_final_quotient = out.max_final_quotient.max(r.final_quotient);
    }
    Ok(out)
}

fn identity_checks(tol: &Tolerances) -> Result<Vec<Check>> {
    let id = identity_matrix()?;
    let lim = limit_matrix()?;
    Ok(vec![
        Check::new(
            "log identity residual",
            id.max_residual_log,
            Relation::Below,
            tol.identity,
        ),
        Check::new(
            "first-order identity residual",
            id.max_residual_alpha,
            Relation::Below,
            tol.identity,
        ),
        Check::new(
            "combined inequality gap",
            id.min_gap,
            Relation::AtLeast,
            -tol.gap,
        ),
        Check::new("identity forms", id.min_form, Relation::AtLeast, -tol.gap),
        Check::count("limit quotients not decreasing", lim.non_monotone),
        Check::count("H1 bound failures", lim.bound_failures),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.set("gap", 1e-7).unwrap();
        t.set("strict-gap", 1e-5).unwrap();
        assert_eq!((t.gap, t.strict_gap), (1e-7, 1e-5));
        assert!(t.set("nope", 1.0).is_err());
        assert!(t.set("gap", -1.0).is_err());
        for n in Tolerances::NAMES {
            assert!(t.clone().set(n, 1.0).is_ok());
        }
    }

    #[test]
    fn check_relations() {
        assert!(Check::new("a", 1.0, Relation::Below, 2.0).passed);
        assert!(!Check::new("a", 2.0, Relation::Below, 2.0).passed);
        assert!(Check::new("a", 2.0, Relation::AtMost, 2.0).passed);
        assert!(!Check::new("a", f64::NAN, Relation::AtLeast, 0.0).passed);
        assert!(Check::count("c", 0).passed && !Check::count("c", 1).passed);
    }

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL {
            let j = serde_json::to_string(&s).unwrap();
            assert_eq!(j, format!("\"{}\"", s.name()));
        }
    }

    #[test]
    fn principal_coefficients() {
        for s in [0.0, 0.25] {
            let (got, want) = correction_coefficient(Expansion::PrincipalAt0, s).unwrap();
            assert!((got - want).abs() < 1e-5, "{s}: {got} vs {want}");
        }
        assert!(correction_coefficient(Expansion::NonprincipalAt0, 0.0).is_err());
    }
}
