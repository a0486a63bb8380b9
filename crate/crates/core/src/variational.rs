//! Rayleigh–Ritz verification of Hardy-type inequalities on (0, π).
//!
//! Trial spaces are spanned by sin(kx) (or sin((k − ½)x) for the mixed
//! Dirichlet/Neumann form), optionally enriched by sin^{1/2+ε}x. Stiffness
//! and mass entries between waves are exact; potential entries come from the
//! fixed composite rule of [`crate::quadrature::interval_rule`], and entries
//! between two power functions use Beta integrals.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::AnalyticFunction;
use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_adaptive, integrate_log_graded, integrate_rule, interval_rule, pairwise_sum,
    AdaptiveConfig, Node, RuleLayout,
};
use crate::specfun::{log_gamma, sin_cos_pi, Complex};
use crate::spectral::bessel_constants;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    /// 1/sin²x
    InverseSine2,
    /// 1/x²
    InverseX2,
    /// 1/d(x)², d(x) = min(x, π − x)
    InverseDistance2,
    Constant,
}

impl PotentialKind {
    /// σ with σ²·q ≡ 1, used to keep products of trial functions bounded.
    fn scale(self, n: &Node) -> f64 {
        match self {
            PotentialKind::InverseSine2 => n.sin(),
            PotentialKind::InverseX2 => n.x,
            PotentialKind::InverseDistance2 => n.dist(),
            PotentialKind::Constant => 1.0,
        }
    }

    /// Limits of sin²x·q(x) at 0 and π.
    fn endpoint_weights(self) -> (f64, f64) {
        match self {
            PotentialKind::InverseSine2 | PotentialKind::InverseDistance2 => (1.0, 1.0),
            PotentialKind::InverseX2 => (1.0, 0.0),
            PotentialKind::Constant => (0.0, 0.0),
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            PotentialKind::InverseSine2 => x.sin().powi(-2),
            PotentialKind::InverseX2 => x.powi(-2),
            PotentialKind::InverseDistance2 => x.min(PI - x).powi(-2),
            PotentialKind::Constant => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub coefficient: f64,
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind, coefficient: f64) -> Self {
        Self { kind, coefficient }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    /// sin(kx), k = 1..N
    #[default]
    Sine,
    /// sin((k − ½)x), k = 1..N: vanishes at 0, free at π.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayleighProblem {
    pub n_basis: usize,
    #[serde(default)]
    pub basis: BasisKind,
    /// (potential, weight); the form is ∫|f′|² − ∑ weight·coefficient·∫q|f|².
    pub potential_terms: Vec<(PotentialSpec, f64)>,
    #[serde(default)]
    pub quadrature: RuleLayout,
    /// Offsets ε of extra trial functions sin^{1/2+ε}x.
    #[serde(default)]
    pub enrichment: Vec<f64>,
}

impl RayleighProblem {
    pub fn new(n_basis: usize, potential_terms: Vec<(PotentialSpec, f64)>) -> Self {
        Self {
            n_basis,
            basis: BasisKind::Sine,
            potential_terms,
            quadrature: RuleLayout::default(),
            enrichment: Vec::new(),
        }
    }

    /// ∫|f′|² − coef·∫|f|²/sin²x − shift·∫|f|².
    pub fn sine_hardy(n_basis: usize, coef: f64, shift: f64) -> Self {
        let mut terms = vec![(PotentialSpec::new(PotentialKind::InverseSine2, coef), 1.0)];
        if shift != 0.0 {
            terms.push((PotentialSpec::new(PotentialKind::Constant, shift), 1.0));
        }
        Self::new(n_basis, terms)
    }

    pub fn with_enrichment(mut self, eps: Vec<f64>) -> Self {
        self.enrichment = eps;
        self
    }

    pub fn with_basis(mut self, basis: BasisKind) -> Self {
        self.basis = basis;
        self
    }

    pub fn dim(&self) -> usize {
        self.n_basis + self.enrichment.len()
    }

    fn validate(&self) -> Result<()> {
        if self.n_basis == 0 {
            return Err(Error::Domain("n_basis must be at least 1".into()));
        }
        if let Some(e) = self
            .enrichment
            .iter()
            .find(|e| !(**e > 0.0 && e.is_finite()))
        {
            return Err(Error::Domain(format!(
                "enrichment offsets must be positive, got {e}"
            )));
        }
        if self.basis == BasisKind::Mixed {
            for (p, _) in &self.potential_terms {
                if matches!(
                    p.kind,
                    PotentialKind::InverseSine2 | PotentialKind::InverseDistance2
                ) {
                    return Err(Error::Admissibility {
                        label: "mixed basis".into(),
                        variant: format!("{:?}", p.kind),
                        reason: "trial functions do not vanish at π".into(),
                    });
                }
            }
        }
        Ok(())
    }

    fn trials(&self) -> Vec<Trial> {
        let shift = match self.basis {
            BasisKind::Sine => 0.0,
            BasisKind::Mixed => 0.5,
        };
        (1..=self.n_basis)
            .map(|k| Trial::Wave(k as f64 - shift))
            .chain(self.enrichment.iter().map(|e| Trial::Power(0.5 + e)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Trial {
    /// sin(ωx)
    Wave(f64),
    /// sin^a x
    Power(f64),
}

impl Trial {
    fn eval(self, n: &Node) -> (f64, f64) {
        match self {
            Trial::Wave(w) => {
                if n.x <= n.xr {
                    let (s, c) = (w * n.x).sin_cos();
                    (s, w * c)
                } else {
                    // sin(ωπ − ω(π − x))
                    let (sp, cp) = sin_cos_pi(w);
                    let (s, c) = (w * n.xr).sin_cos();
                    (sp * c - cp * s, w * (cp * c + sp * s))
                }
            }
            Trial::Power(a) => {
                let s = n.sin();
                (s.powf(a), a * s.powf(a - 1.0) * n.cos())
            }
        }
    }
}

/// ∫₀^π sin^p x dx for p > −1.
pub fn sine_power_integral(p: f64) -> f64 {
    let lg = |x: f64| {
        log_gamma(Complex::new(x, 0.0))
            .expect("positive argument")
            .re
    };
    PI.sqrt() * (lg(0.5 * (p + 1.0)) - lg(0.5 * p + 1.0)).exp()
}

/// Stiffness, weighted potential and mass matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Assembly {
    pub k: DMatrix<f64>,
    pub v: DMatrix<f64>,
    pub m: DMatrix<f64>,
}

fn symmetric<F: Fn(usize, usize) -> f64 + Sync>(d: usize, entry: F) -> DMatrix<f64> {
    let rows: Vec<Vec<f64>> = (0..d)
        .into_par_iter()
        .map(|i| (i..d).map(|j| entry(i, j)).collect())
        .collect();
    let mut out = DMatrix::zeros(d, d);
    for (i, row) in rows.iter().enumerate() {
        for (off, v) in row.iter().enumerate() {
            out[(i, i + off)] = *v;
            out[(i + off, i)] = *v;
        }
    }
    out
}

fn weighted_dot(w: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let terms: Vec<f64> = w
        .iter()
        .zip(a)
        .zip(b)
        .map(|((w, a), b)| w * a * b)
        .collect();
    pairwise_sum(&terms)
}

pub fn assemble(problem: &RayleighProblem) -> Result<Assembly> {
    problem.validate()?;
    let trials = problem.trials();
    let d = trials.len();
    let rule = interval_rule(&problem.quadrature);
    let w: Vec<f64> = rule.iter().map(|n| n.w).collect();
    let (vals, ders): (Vec<Vec<f64>>, Vec<Vec<f64>>) = trials
        .iter()
        .map(|t| rule.iter().map(|n| t.eval(n)).unzip())
        .unzip();

    let m = symmetric(d, |i, j| match (trials[i], trials[j]) {
        (Trial::Wave(_), Trial::Wave(_)) => {
            if i == j {
                PI / 2.0
            } else {
                0.0
            }
        }
        (Trial::Power(a), Trial::Power(b)) => sine_power_integral(a + b),
        _ => weighted_dot(&w, &vals[i], &vals[j]),
    });
    let k = symmetric(d, |i, j| match (trials[i], trials[j]) {
        (Trial::Wave(om), Trial::Wave(_)) => {
            if i == j {
                om * om * PI / 2.0
            } else {
                0.0
            }
        }
        (Trial::Power(a), Trial::Power(b)) => {
            a * b * (sine_power_integral(a + b - 2.0) - sine_power_integral(a + b))
        }
        _ => weighted_dot(&w, &ders[i], &ders[j]),
    });

    let mut v = DMatrix::zeros(d, d);
    for (spec, weight) in &problem.potential_terms {
        let c = spec.coefficient * weight;
        if spec.kind == PotentialKind::Constant {
            v += &m * c;
            continue;
        }
        let sig: Vec<f64> = rule.iter().map(|n| spec.kind.scale(n)).collect();
        let psi: Vec<Vec<f64>> = vals
            .iter()
            .map(|row| row.iter().zip(&sig).map(|(f, s)| f / s).collect())
            .collect();
        let part = symmetric(d, |i, j| match (trials[i], trials[j]) {
            (Trial::Power(a), Trial::Power(b)) => power_potential(a + b, spec.kind, &rule),
            _ => weighted_dot(&w, &psi[i], &psi[j]),
        });
        v += part * c;
    }
    if v.iter()
        .chain(k.iter())
        .chain(m.iter())
        .any(|x| !x.is_finite())
    {
        return Err(Error::Quadrature {
            estimate: f64::INFINITY,
            tol: 0.0,
        });
    }
    Ok(Assembly { k, v, m })
}

/// ∫ sin^p x · q(x) dx: the endpoint limits of sin²·q times a Beta integral,
/// plus a bounded remainder by quadrature.
fn power_potential(p: f64, kind: PotentialKind, rule: &[Node]) -> f64 {
    let (w0, wpi) = kind.endpoint_weights();
    let head = 0.5 * (w0 + wpi) * sine_power_integral(p - 2.0);
    if kind == PotentialKind::InverseSine2 {
        return head;
    }
    let rest = integrate_rule(rule, |n| {
        let s = n.sin();
        let r = s / kind.scale(n);
        let end = if n.x <= n.xr { w0 } else { wpi };
        s.powf(p - 2.0) * (r * r - end)
    });
    head + rest
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GEVPResult {
    pub min_eigenvalue: f64,
    /// M-normalized eigenvector.
    pub coefficients: Vec<f64>,
    pub residual_norm: f64,
    pub n_basis: usize,
}

/// Smallest λ of a u = λ m u for symmetric a and positive definite m.
pub fn smallest_generalized(a: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<GEVPResult> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let x = l
        .solve_lower_triangular(a)
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let c = l
        .solve_lower_triangular(&x.transpose())
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    let (imin, lambda) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .ok_or_else(|| Error::Numerical("empty eigenproblem".into()))?;
    let y: DVector<f64> = eig.eigenvectors.column(imin).into_owned();
    let mut u = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    // two steps of inverse iteration at the computed eigenvalue
    let mut lambda = lambda;
    let lu = (a - m * lambda).lu();
    for _ in 0..2 {
        let Some(w) = lu.solve(&(m * &u)) else { break };
        let norm = (w.transpose() * m * &w)[(0, 0)].sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            break;
        }
        u = w / norm;
        lambda = (u.transpose() * a * &u)[(0, 0)];
    }
    // fix the sign for reproducible output
    let lead = u
        .iter()
        .copied()
        .fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
    if lead < 0.0 {
        u.neg_mut();
    }
    let residual = (a * &u - m * &u * lambda).norm();
    Ok(GEVPResult {
        min_eigenvalue: lambda,
        coefficients: u.iter().copied().collect(),
        residual_norm: residual,
        n_basis: a.nrows(),
    })
}

/// Minimum of the discretized form over the trial space.
pub fn min_rayleigh(problem: &RayleighProblem) -> Result<GEVPResult> {
    let asm = assemble(problem)?;
    let a = &asm.k - &asm.v;
    smallest_generalized(&a, &asm.m)
}

/// Rayleigh quotient of sin^{1/2+ε}x for ∫|f′|² − ¼∫|f|²/sin², by quadrature
/// in u = −ln x, paired with the exact value ¼ + ε/2.
pub fn trial_quotient(eps: f64) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!(
            "trial offset must lie in (0, 1], got {eps}"
        )));
    }
    if eps < 1e-4 {
        return Err(Error::Quadrature {
            estimate: f64::INFINITY,
            tol: 1e-4,
        });
    }
    let p = 0.5 + eps;
    // ln(sin x / x)
    let lsinc = |x: f64| {
        if x < 1e-4 {
            let x2 = x * x;
            -x2 / 6.0 - x2 * x2 / 180.0
        } else {
            (x.sin() / x).ln()
        }
    };
    let cfg = AdaptiveConfig {
        rel_tol: 1e-13,
        abs_tol: 1e-300,
        max_intervals: 20_000,
    };
    let u0 = -(PI / 2.0).ln();
    let u1 = 23.0 / eps;
    let num = integrate_adaptive(
        |u| {
            let x = (-u).exp();
            let c = x.cos();
            (-2.0 * eps * u + (2.0 * eps - 1.0) * lsinc(x)).exp() * (p * p * c * c - 0.25)
        },
        u0,
        u1,
        &cfg,
    )?;
    let tail = (p * p - 0.25) * (-2.0 * eps * u1).exp() / (2.0 * eps);
    let den = integrate_adaptive(
        |u| {
            let x = (-u).exp();
            (-(2.0 * eps + 2.0) * u + (2.0 * eps + 1.0) * lsinc(x)).exp()
        },
        u0,
        u1,
        &cfg,
    )?;
    Ok(((num.value + tail) / den.value, 0.25 + 0.5 * eps))
}

/// Analytic families of the test-function corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// sin(kx)
    Sine { k: f64 },
    /// x^a (π − x)^b
    Poly { a: f64, b: f64 },
    /// sin^p x
    SinPower { p: f64 },
    /// exp(1 − 1/(1 − t²)), t = (x − center)/width
    Bump { center: f64, width: f64 },
    /// x^{1/2} / ln(r/x), r > π
    LogDamped { r: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub label: String,
    pub family: Family,
    pub vanishes_at_0: bool,
    pub vanishes_at_pi: bool,
}

/// c·x^a, zero when c = 0 whatever x^a is.
fn scaled_pow(c: f64, x: f64, a: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * x.powf(a)
    }
}

impl TestFunction {
    pub fn new(label: &str, family: Family) -> Self {
        let mut f = Self {
            label: label.to_string(),
            family,
            vanishes_at_0: false,
            vanishes_at_pi: false,
        };
        f.vanishes_at_0 = f.probe(false);
        f.vanishes_at_pi = f.probe(true);
        f
    }

    /// (f, f′, f″) at x, with xr = π − x supplied exactly.
    pub fn eval_at(&self, x: f64, xr: f64) -> (f64, f64, f64) {
        match self.family {
            Family::Sine { k } => {
                let (s, c) = if x <= xr {
                    (k * x).sin_cos()
                } else {
                    let (sp, cp) = sin_cos_pi(k);
                    let (s, c) = (k * xr).sin_cos();
                    (sp * c - cp * s, cp * c + sp * s)
                };
                (s, k * c, -k * k * s)
            }
            Family::Poly { a, b } => {
                let (p, q) = (x.powf(a), xr.powf(b));
                let (p1, q1) = (scaled_pow(a, x, a - 1.0), scaled_pow(-b, xr, b - 1.0));
                let (p2, q2) = (
                    scaled_pow(a * (a - 1.0), x, a - 2.0),
                    scaled_pow(b * (b - 1.0), xr, b - 2.0),
                );
                (p * q, p1 * q + p * q1, p2 * q + 2.0 * p1 * q1 + p * q2)
            }
            Family::SinPower { p } => {
                let (s, c) = if x <= xr {
                    (x.sin(), x.cos())
                } else {
                    (xr.sin(), -xr.cos())
                };
                let f = s.powf(p);
                let sp1 = p * s.powf(p - 1.0);
                (f, sp1 * c, (p - 1.0) * p * s.powf(p - 2.0) * c * c - p * f)
            }
            Family::Bump { center, width } => {
                let t = (x - center) / width;
                if t.abs() >= 1.0 {
                    return (0.0, 0.0, 0.0);
                }
                let g = 1.0 - t * t;
                let f = (1.0 - 1.0 / g).exp();
                let h1 = -2.0 * t / (g * g);
                let h2 = -2.0 / (g * g) - 8.0 * t * t / (g * g * g);
                (f, f * h1 / width, f * (h1 * h1 + h2) / (width * width))
            }
            Family::LogDamped { r } => {
                let l = (r / x).ln();
                let rt = x.sqrt();
                (
                    rt / l,
                    (0.5 / l + 1.0 / (l * l)) / rt,
                    (-0.25 / l + 2.0 / (l * l * l)) / (x * rt),
                )
            }
        }
    }

    pub fn eval_node(&self, n: &Node) -> (f64, f64, f64) {
        self.eval_at(n.x, n.xr)
    }

    /// |f| below 1e−6 at distance 1e−12 from the endpoint.
    fn probe(&self, at_pi: bool) -> bool {
        let d = 1e-12;
        let v = if at_pi {
            self.eval_at(PI - d, d).0
        } else {
            self.eval_at(d, PI - d).0
        };
        v.abs() < 1e-6
    }

    /// Declared boundary flags agree with the numeric endpoint limits.
    pub fn check_flags(&self) -> Result<()> {
        for (at_pi, flag) in [(false, self.vanishes_at_0), (true, self.vanishes_at_pi)] {
            if self.probe(at_pi) != flag {
                return Err(Error::Admissibility {
                    label: self.label.clone(),
                    variant: "corpus".into(),
                    reason: format!(
                        "boundary flag at {} does not match the function",
                        if at_pi { "π" } else { "0" }
                    ),
                });
            }
        }
        Ok(())
    }

    pub fn norm_sq(&self) -> f64 {
        let rule = interval_rule(&RuleLayout::default());
        integrate_rule(&rule, |n| self.eval_node(n).0.powi(2))
    }
}

impl AnalyticFunction for TestFunction {
    fn eval3(&self, x: f64) -> (f64, f64, f64) {
        self.eval_at(x, PI - x)
    }
}

/// One JSON record per line; blank lines and `#` comments are skipped.
pub fn parse_corpus(text: &str) -> Result<Vec<TestFunction>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: TestFunction = serde_json::from_str(line)
            .map_err(|e| Error::Domain(format!("corpus line {}: {e}", i + 1)))?;
        f.check_flags()?;
        out.push(f);
    }
    Ok(out)
}

pub fn default_corpus() -> Vec<TestFunction> {
    parse_corpus(include_str!("../data/corpus.jsonl")).expect("bundled corpus is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HardyVariant {
    /// ∫|f′|² ≥ ¼∫|f|²/x², f ∈ H¹₀
    Classical,
    /// ∫|f′|² ≥ ¼∫|f|²/d², f ∈ H¹₀
    Distance,
    /// ∫|f′|² ≥ ¼∫|f|²/sin² + ¼∫|f|², f ∈ H¹₀
    SineRefined,
    /// ∫|f′|² ≥ ¼∫|f|²/x² + λ_DN/π²·∫|f|², f(0) = 0
    MixedBessel,
    /// ∫|f′|² ≥ ¼∫|f|²/x² + λ_F/π²·∫|f|², f ∈ H¹₀
    DirichletBessel,
    /// ∫|f′|² ≥ ¼∫|f|²/d² + 4λ_DN/π²·∫|f|², f ∈ H¹₀
    DistanceBessel,
    /// ∫₀^π|f′|² ≥ ∫₀^π|f|²/(4x²), f(0) = 0 only
    HalfLine,
}

impl HardyVariant {
    pub const ALL: [HardyVariant; 7] = [
        HardyVariant::Classical,
        HardyVariant::Distance,
        HardyVariant::SineRefined,
        HardyVariant::MixedBessel,
        HardyVariant::DirichletBessel,
        HardyVariant::DistanceBessel,
        HardyVariant::HalfLine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HardyVariant::Classical => "classical",
            HardyVariant::Distance => "distance",
            HardyVariant::SineRefined => "sine-refined",
            HardyVariant::MixedBessel => "mixed-bessel",
            HardyVariant::DirichletBessel => "dirichlet-bessel",
            HardyVariant::DistanceBessel => "distance-bessel",
            HardyVariant::HalfLine => "half-line",
        }
    }

    fn needs_pi(self) -> bool {
        !matches!(self, HardyVariant::MixedBessel | HardyVariant::HalfLine)
    }

    fn weight(self) -> PotentialKind {
        match self {
            HardyVariant::Distance | HardyVariant::DistanceBessel => {
                PotentialKind::InverseDistance2
            }
            HardyVariant::SineRefined => PotentialKind::InverseSine2,
            _ => PotentialKind::InverseX2,
        }
    }

    /// Coefficient of ∫|f|².
    pub fn shift(self, c: &HardyConstants) -> f64 {
        match self {
            HardyVariant::SineRefined => 0.25,
            HardyVariant::MixedBessel => c.lambda_dn0 / (PI * PI),
            HardyVariant::DirichletBessel => c.lambda_f0 / (PI * PI),
            HardyVariant::DistanceBessel => 4.0 * c.lambda_dn0 / (PI * PI),
            _ => 0.0,
        }
    }
}

/// Bessel-operator constants entering the sharpened inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyConstants {
    pub lambda_dn0: f64,
    pub lambda_f0: f64,
}

impl HardyConstants {
    pub fn compute() -> Result<Self> {
        let b = bessel_constants()?;
        Ok(Self {
            lambda_dn0: b.lambda_dn0,
            lambda_f0: b.lambda_f0,
        })
    }
}

pub fn inequality_gap_with(
    f: &TestFunction,
    variant: HardyVariant,
    consts: &HardyConstants,
    rule: &[Node],
) -> Result<f64> {
    let fail = |reason: &str| Error::Admissibility {
        label: f.label.clone(),
        variant: variant.name().into(),
        reason: reason.into(),
    };
    if !f.vanishes_at_0 {
        return Err(fail("f(0) ≠ 0"));
    }
    if variant.needs_pi() && !f.vanishes_at_pi {
        return Err(fail("f(π) ≠ 0"));
    }
    let kind = variant.weight();
    let c = variant.shift(consts);
    let gap = integrate_rule(rule, |n| {
        let (v, d1, _) = f.eval_node(n);
        let r = v / kind.scale(n);
        d1 * d1 - 0.25 * r * r - c * v * v
    });
    if !gap.is_finite() {
        return Err(Error::Numerical(format!(
            "non-finite gap for `{}`",
            f.label
        )));
    }
    Ok(gap)
}

/// LHS − RHS of the chosen inequality.
pub fn inequality_gap(f: &TestFunction, variant: HardyVariant) -> Result<f64> {
    let rule = interval_rule(&RuleLayout::default());
    inequality_gap_with(f, variant, &HardyConstants::compute()?, &rule)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub points: usize,
    /// max sin x − d(x)
    pub sin_minus_dist: f64,
    /// max d(x) − x
    pub dist_minus_x: f64,
    /// max of d²/x² − 1 and sin²/d² − 1 (1/x² ≤ 1/d² ≤ 1/sin²)
    pub weight_order: f64,
    /// (sin x / x, d(x) / x) at the smallest grid point
    pub ratios_at_min: (f64, f64),
}

impl ChainReport {
    pub fn max_violation(&self) -> f64 {
        self.sin_minus_dist
            .max(self.dist_minus_x)
            .max(self.weight_order)
    }
}

/// Pointwise sin x ≤ d(x) ≤ x on the grid.
pub fn comparison_chain(grid: &[f64]) -> Result<ChainReport> {
    if let Some(x) = grid.iter().find(|x| !(**x > 0.0 && **x < PI)) {
        return Err(Error::Domain(format!("grid point {x} outside (0, π)")));
    }
    let mut rep = ChainReport {
        points: grid.len(),
        sin_minus_dist: f64::NEG_INFINITY,
        dist_minus_x: f64::NEG_INFINITY,
        weight_order: f64::NEG_INFINITY,
        ratios_at_min: (f64::NAN, f64::NAN),
    };
    let mut xmin = f64::INFINITY;
    for &x in grid {
        let d = x.min(PI - x);
        let s = x.sin();
        rep.sin_minus_dist = rep.sin_minus_dist.max(s - d);
        rep.dist_minus_x = rep.dist_minus_x.max(d - x);
        rep.weight_order = rep
            .weight_order
            .max((d / x).powi(2) - 1.0)
            .max((s / d).powi(2) - 1.0);
        if x < xmin {
            xmin = x;
            rep.ratios_at_min = (s / x, d / x);
        }
    }
    Ok(rep)
}

/// Residuals of the logarithmic and first-order Hardy identities on
/// [r0, r1] and the gap of the inequality they combine into.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyIdentities {
    /// |∫ x L |(f x^{-1/2} L^{-1/2})′|² − expanded form|, L = ln(R/x)
    pub residual_log: f64,
    /// |∫|f′ − (s+½)f/x|² − expanded form|
    pub residual_alpha: f64,
    /// ∫|α_s f|² − (s²∫|f|²/x² + ¼∫|f|²/(x²L²) + boundary terms)
    pub gap_combined: f64,
    /// expanded form of the logarithmic identity, ≥ 0
    pub log_form: f64,
    /// expanded form of the first-order identity, ≥ 0
    pub alpha_form: f64,
}

pub fn hardy_identities(
    f: &dyn AnalyticFunction,
    s: f64,
    r0: f64,
    r1: f64,
    big_r: f64,
) -> Result<HardyIdentities> {
    if !(0.0 < r0 && r0 < r1 && r1 < PI && PI < big_r) {
        return Err(Error::Domain(format!(
            "need 0 < r0 < r1 < π < R, got ({r0}, {r1}, {big_r})"
        )));
    }
    let cfg = AdaptiveConfig {
        rel_tol: 1e-13,
        abs_tol: 1e-15,
        max_intervals: 4000,
    };
    let int = |g: &dyn Fn(f64) -> f64| integrate_adaptive(g, r0, r1, &cfg).map(|e| e.value);
    let ell = |x: f64| (big_r / x).ln();
    let k = s + 0.5;

    let alpha_lhs = int(&|x| {
        let (v, d1, _) = f.eval3(x);
        (d1 - k * v / x).powi(2)
    })?;
    let fp2 = int(&|x| f.eval3(x).1.powi(2))?;
    let fx2 = int(&|x| (f.eval3(x).0 / x).powi(2))?;
    let flog = int(&|x| (f.eval3(x).0 / (x * ell(x))).powi(2))?;
    let log_lhs = int(&|x| {
        let (v, d1, _) = f.eval3(x);
        let l = ell(x);
        let g1 = d1 / (x * l).sqrt() - v / (2.0 * x * (x * l).sqrt())
            + v / (2.0 * x * (x * l).sqrt() * l);
        x * l * g1 * g1
    })?;

    let bracket = |h: &dyn Fn(f64, f64) -> f64| {
        let at = |x: f64| h(x, f.eval3(x).0);
        at(r1) - at(r0)
    };
    let b_x = bracket(&|x, v| v * v / x);
    let b_xl = bracket(&|x, v| v * v / (x * ell(x)));

    let alpha_form = fp2 + (s * s - 0.25) * fx2 - k * b_x;
    let log_form = fp2 - 0.25 * fx2 - 0.25 * flog - 0.5 * b_x + 0.5 * b_xl;
    let rhs_combined = s * s * fx2 + 0.25 * flog - s * b_x - 0.5 * b_xl;
    Ok(HardyIdentities {
        residual_log: (log_lhs - log_form).abs(),
        residual_alpha: (alpha_lhs - alpha_form).abs(),
        gap_combined: alpha_lhs - rhs_combined,
        log_form,
        alpha_form,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitPoint {
    pub x: f64,
    pub quotient: f64,
    /// |f(x) − f(0)|
    pub deviation: f64,
    /// x^{1/2} (∫₀ˣ|f′|²)^{1/2}
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub points: Vec<LimitPoint>,
    /// Quotient strictly decreasing over the last six points.
    pub monotone_tail: bool,
    pub final_quotient: f64,
    pub bound_holds: bool,
}

/// Decay of |f(x)|/[x ln(R/x)]^{1/2} (s = 0) or |f(x)|/x^{1/2} (s > 0) along
/// x_k = 0.1·2^{−k}, k = 0..12, together with the H¹ estimate
/// |f(x) − f(0)| ≤ x^{1/2}‖f′‖_{L²(0,x)}. Assumes f(0) = 0.
pub fn limit_checks(f: &dyn AnalyticFunction, s: f64, big_r: f64) -> Result<LimitReport> {
    if !(s >= 0.0 && big_r > PI) {
        return Err(Error::Domain(format!(
            "need s ≥ 0 and R > π, got ({s}, {big_r})"
        )));
    }
    let cfg = AdaptiveConfig {
        rel_tol: 1e-10,
        abs_tol: 1e-300,
        max_intervals: 4000,
    };
    let mut points = Vec::new();
    for k in 0..=12 {
        let x = 0.1 * 0.5f64.powi(k);
        let v = f.eval3(x).0.abs();
        let quotient = if s == 0.0 {
            v / (x * (big_r / x).ln()).sqrt()
        } else {
            v / x.sqrt()
        };
        // the piece below 1e−300 is dropped, which only shrinks the bound
        let energy = integrate_log_graded(|t| f.eval3(t).1.powi(2), 1e-300, x, &cfg)?.value;
        points.push(LimitPoint {
            x,
            quotient,
            deviation: v,
            bound: x.sqrt() * energy.sqrt(),
        });
    }
    let tail = &points[points.len() - 6..];
    let monotone_tail = tail.windows(2).all(|w| w[1].quotient < w[0].quotient);
    let bound_holds = points
        .iter()
        .all(|p| p.deviation <= p.bound * (1.0 + 1e-12));
    Ok(LimitReport {
        final_quotient: points.last().map(|p| p.quotient).unwrap_or(f64::NAN),
        points,
        monotone_tail,
        bound_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(k: f64) -> TestFunction {
        TestFunction::new("sine", Family::Sine { k })
    }

    #[test]
    fn exact_stiffness_and_mass() {
        let asm = assemble(&RayleighProblem::new(4, vec![])).unwrap();
        for k in 0..4 {
            let kk = (k + 1) as f64;
            assert_eq!(asm.k[(k, k)], kk * kk * PI / 2.0);
            assert_eq!(asm.m[(k, k)], PI / 2.0);
        }
        let r = min_rayleigh(&RayleighProblem::new(6, vec![])).unwrap();
        assert!((r.min_eigenvalue - 1.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_sine_entries() {
        // ∫ sin(jx) sin(kx)/sin²x = π·min(j, k) for j + k even, 0 otherwise
        let p = RayleighProblem::new(
            12,
            vec![(PotentialSpec::new(PotentialKind::InverseSine2, 1.0), 1.0)],
        );
        let v = assemble(&p).unwrap().v;
        for j in 1..=12usize {
            for k in 1..=12usize {
                let got = v[(j - 1, k - 1)];
                if (j + k) % 2 == 1 {
                    assert!(got.abs() < 1e-12, "({j},{k}) {got}");
                } else {
                    let want = PI * j.min(k) as f64;
                    assert!(
                        (got - want).abs() < 1e-11 * want,
                        "({j},{k}) {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn distance_parity() {
        let p = RayleighProblem::new(
            9,
            vec![(
                PotentialSpec::new(PotentialKind::InverseDistance2, 1.0),
                1.0,
            )],
        );
        let v = assemble(&p).unwrap().v;
        for j in 0..9 {
            for k in 0..9 {
                if (j + k) % 2 == 1 {
                    assert!(v[(j, k)].abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn beta_integrals() {
        assert!((sine_power_integral(1.0) - 2.0).abs() < 1e-13);
        assert!((sine_power_integral(2.0) - PI / 2.0).abs() < 1e-14);
        // Wallis ratio ∫sin^{2ε−1}/∫sin^{2ε+1} = (ε + ½)/ε checked by quadrature
        for eps in [0.25, 0.1] {
            let cfg = AdaptiveConfig {
                rel_tol: 1e-13,
                ..Default::default()
            };
            let half = |p: f64| {
                2.0 * integrate_log_graded(|x| x.sin().powf(p), 1e-300, PI / 2.0, &cfg)
                    .unwrap()
                    .value
            };
            let ratio = half(2.0 * eps - 1.0) / half(2.0 * eps + 1.0);
            assert!((ratio - (eps + 0.5) / eps).abs() < 1e-10, "{ratio}");
            assert!((half(2.0 * eps - 1.0) - sine_power_integral(2.0 * eps - 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn enrichment_closed_forms_match_quadrature() {
        let rule = interval_rule(&RuleLayout::default());
        for eps in [0.25, 0.1] {
            let a = 0.5 + eps;
            let g = Trial::Power(a);
            let p = RayleighProblem::new(1, vec![]).with_enrichment(vec![eps]);
            let asm = assemble(&p).unwrap();
            let m = integrate_rule(&rule, |n| g.eval(n).0.powi(2));
            let k = integrate_rule(&rule, |n| g.eval(n).1.powi(2));
            assert!((asm.m[(1, 1)] - m).abs() < 1e-11 * m);
            assert!(
                (asm.k[(1, 1)] - k).abs() < 1e-10 * k,
                "{} {}",
                asm.k[(1, 1)],
                k
            );
            for kind in [
                PotentialKind::InverseSine2,
                PotentialKind::InverseX2,
                PotentialKind::InverseDistance2,
            ] {
                let p = RayleighProblem::new(1, vec![(PotentialSpec::new(kind, 1.0), 1.0)])
                    .with_enrichment(vec![eps]);
                let closed = assemble(&p).unwrap().v[(1, 1)];
                let quad = integrate_rule(&rule, |n| (g.eval(n).0 / kind.scale(n)).powi(2));
                assert!(
                    (closed - quad).abs() < 1e-10 * quad,
                    "{kind:?} {closed} {quad}"
                );
            }
        }
    }

    #[test]
    fn sine_refined_minimum() {
        let r25 = min_rayleigh(&RayleighProblem::sine_hardy(25, 0.25, 0.0)).unwrap();
        let r50 = min_rayleigh(&RayleighProblem::sine_hardy(50, 0.25, 0.0)).unwrap();
        assert!(
            (r25.min_eigenvalue - 0.403523).abs() < 1e-6,
            "{}",
            r25.min_eigenvalue
        );
        assert!(r50.min_eigenvalue < r25.min_eigenvalue && r50.min_eigenvalue > 0.25);
        assert!(r25.residual_norm < 1e-8 * r25.min_eigenvalue);
        let e25 =
            min_rayleigh(&RayleighProblem::sine_hardy(25, 0.25, 0.0).with_enrichment(vec![0.01]))
                .unwrap();
        assert!(
            (e25.min_eigenvalue - 0.2548429).abs() < 1e-6,
            "{}",
            e25.min_eigenvalue
        );
        assert!(
            e25.residual_norm < 1e-8 * e25.min_eigenvalue,
            "{}",
            e25.residual_norm
        );
    }

    #[test]
    fn mass_normalized_coefficients() {
        let p = RayleighProblem::sine_hardy(10, 0.25, 0.0).with_enrichment(vec![0.05]);
        let asm = assemble(&p).unwrap();
        let r = smallest_generalized(&(&asm.k - &asm.v), &asm.m).unwrap();
        let u = DVector::from_vec(r.coefficients);
        assert!(((u.transpose() * &asm.m * &u)[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_basis_rejects_sine_weight() {
        let p = RayleighProblem::sine_hardy(5, 0.25, 0.0).with_basis(BasisKind::Mixed);
        assert!(matches!(assemble(&p), Err(Error::Admissibility { .. })));
    }

    #[test]
    fn trial_quotients() {
        for eps in [0.5, 0.1, 0.01] {
            let (q, c) = trial_quotient(eps).unwrap();
            assert!((q - c).abs() < 1e-8, "{eps}: {q} vs {c}");
        }
        assert_eq!(trial_quotient(0.1).unwrap().1, 0.3);
        assert!(matches!(
            trial_quotient(5e-5),
            Err(Error::Quadrature { .. })
        ));
        assert!(matches!(trial_quotient(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn corpus_loads() {
        let c = default_corpus();
        assert_eq!(c.len(), 12);
        let bad = r#"{"label":"x","family":{"kind":"sine","k":0.5},"vanishes_at_0":true,"vanishes_at_pi":true}"#;
        assert!(matches!(
            parse_corpus(bad),
            Err(Error::Admissibility { .. })
        ));
    }

    #[test]
    fn derivatives_match_differences() {
        let fams = [
            Family::Sine { k: 2.5 },
            Family::Poly { a: 0.75, b: 1.5 },
            Family::SinPower { p: 0.75 },
            Family::Bump {
                center: 1.2,
                width: 0.9,
            },
            Family::LogDamped { r: 4.0 },
        ];
        let h = 1e-5;
        for fam in fams {
            let f = TestFunction::new("t", fam);
            for x in [0.7, 1.3, 2.9] {
                let (_, d1, d2) = f.eval3(x);
                let num1 = (f.eval3(x + h).0 - f.eval3(x - h).0) / (2.0 * h);
                let num2 = (f.eval3(x + h).1 - f.eval3(x - h).1) / (2.0 * h);
                assert!(
                    (d1 - num1).abs() < 1e-7 * (1.0 + d1.abs()),
                    "{:?} {x}",
                    f.family
                );
                assert!(
                    (d2 - num2).abs() < 1e-6 * (1.0 + d2.abs()),
                    "{:?} {x}",
                    f.family
                );
            }
        }
    }

    #[test]
    fn sine_gap_is_pi_over_eight() {
        let g = inequality_gap(&sine(1.0), HardyVariant::SineRefined).unwrap();
        assert!((g - PI / 8.0).abs() < 1e-12, "{g}");
        assert!(inequality_gap(&sine(1.0), HardyVariant::Classical).unwrap() > 0.0);
        let ramp = TestFunction::new("ramp", Family::Poly { a: 1.0, b: 0.0 });
        assert!(matches!(
            inequality_gap(&ramp, HardyVariant::Classical),
            Err(Error::Admissibility { .. })
        ));
        assert!(inequality_gap(&ramp, HardyVariant::HalfLine).unwrap() > 0.0);
    }

    #[test]
    fn chain_on_grid() {
        let grid: Vec<f64> = (1..=10_000).map(|i| PI * i as f64 / 10_001.0).collect();
        let rep = comparison_chain(&grid).unwrap();
        assert!(rep.max_violation() <= 0.0, "{rep:?}");
        let rep = comparison_chain(&[PI / 2.0]).unwrap();
        assert!(rep.sin_minus_dist < 0.0);
        let rep = comparison_chain(&[1e-6]).unwrap();
        assert!((rep.ratios_at_min.0 - 1.0).abs() < 1e-11 && rep.ratios_at_min.1 == 1.0);
    }

    #[test]
    fn identities_close() {
        let sin = |x: f64| (x.sin(), x.cos(), -x.sin());
        let r = hardy_identities(&sin, 0.3, 0.1, 3.0, 4.0).unwrap();
        assert!(r.residual_alpha < 1e-9, "{r:?}");
        assert!(r.gap_combined >= -1e-9 && r.alpha_form >= 0.0);
        let par = |x: f64| (x * (PI - x), PI - 2.0 * x, -2.0);
        let r = hardy_identities(&par, 0.0, 0.1, 3.0, 4.0).unwrap();
        assert!(r.residual_log < 1e-9, "{r:?}");
        assert!(r.log_form >= 0.0);
    }

    #[test]
    fn endpoint_limits() {
        let sin = |x: f64| (x.sin(), x.cos(), -x.sin());
        let r = limit_checks(&sin, 0.3, 4.0).unwrap();
        assert!(r.monotone_tail && r.bound_holds && r.final_quotient < 0.01);
        let pw = |x: f64| (x.powf(0.6), 0.6 * x.powf(-0.4), -0.24 * x.powf(-1.4));
        let r = limit_checks(&pw, 0.3, 4.0).unwrap();
        assert!(r.monotone_tail && r.bound_holds);
        let ld = TestFunction::new("log", Family::LogDamped { r: 4.0 });
        let r = limit_checks(&ld, 0.0, 4.0).unwrap();
        assert!(r.monotone_tail && r.bound_holds, "{r:?}");
    }
}
