//! One function per subcommand; each returns a finished report and exit code.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use hardysin::boundary_values::ExtractionConfig;
use hardysin::specfun::Complex;
use hardysin::spectral::{
    bessel_constants, eigenvalues, m_function, m_quotient, nearest_eigenvalue, POLE_GUARD,
};
use hardysin::variational::{
    min_rayleigh, BasisKind, PotentialKind, PotentialSpec, RayleighProblem,
};
use hardysin::verify::{run_suite, Suite, SuiteReport, Tolerances};
use hardysin::Error;
use serde_json::Value;

use crate::report::{num, ColumnType, ReportEnvelope, Table, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

/// Enrichment exponent used by `rayleigh --potential sine2` unless overridden.
pub const DEFAULT_ENRICHMENT: f64 = 0.01;

pub const MAX_BASIS: usize = 4000;
pub const MAX_EIGS: usize = 1_000_000;

#[derive(Debug)]
pub struct Outcome {
    pub report: ReportEnvelope,
    pub code: i32,
    /// Printed on stderr when set.
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Admissibility { .. } => EXIT_USAGE,
            _ => EXIT_GUARD,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

pub struct Context {
    pub tolerances: Tolerances,
    pub timestamp: String,
}

impl Context {
    fn envelope(
        &self,
        command: &str,
        params: Vec<(&str, Value)>,
        results: Table,
        notes: Vec<String>,
    ) -> ReportEnvelope {
        let tolerances = match serde_json::to_value(self.tolerances).expect("tolerances serialize")
        {
            Value::Object(m) => m
                .into_iter()
                .filter_map(|(k, v)| v.as_f64().map(|x| (k, x)))
                .collect(),
            _ => BTreeMap::new(),
        };
        ReportEnvelope {
            command: command.to_string(),
            params: params
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            results,
            tolerances,
            notes,
            timestamp: self.timestamp.clone(),
            schema_version: SCHEMA_VERSION.to_string(),
        }
    }
}

fn check_s(s: f64) -> Result<(), Failure> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Failure::usage(format!(
            "--s must be a finite nonnegative number, got {s}"
        )))
    }
}

pub fn eigs(ctx: &Context, s: f64, n: usize) -> Result<Outcome, Failure> {
    check_s(s)?;
    if n > MAX_EIGS {
        return Err(Failure::usage(format!("--n must be at most {MAX_EIGS}")));
    }
    let mut t = Table::new(&[
        ("n", ColumnType::Integer),
        ("eigenvalue", ColumnType::Number),
    ]);
    for (i, l) in eigenvalues(s, n).values.into_iter().enumerate() {
        t.push(vec![Value::from(i), num(l)]);
    }
    Ok(Outcome {
        report: ctx.envelope(
            "eigs",
            vec![("s", num(s)), ("n", Value::from(n))],
            t,
            Vec::new(),
        ),
        code: EXIT_OK,
        message: None,
    })
}

pub fn mfun(
    ctx: &Context,
    s: f64,
    z_re: f64,
    z_im: f64,
    verify_quotient: bool,
) -> Result<Outcome, Failure> {
    check_s(s)?;
    if !(z_re.is_finite() && z_im.is_finite()) {
        return Err(Failure::usage("--z-re and --z-im must be finite"));
    }
    let z = Complex::new(z_re, z_im);
    let params = vec![
        ("s", num(s)),
        ("z_re", num(z_re)),
        ("z_im", num(z_im)),
        ("verify_quotient", Value::from(verify_quotient)),
    ];
    let (eigenvalue, distance) = nearest_eigenvalue(s, z);
    match m_function(s, z) {
        Err(Error::NearPole { .. }) => {
            let mut t = Table::new(&[
                ("nearest_eigenvalue", ColumnType::Number),
                ("distance", ColumnType::Number),
                ("pole_guard", ColumnType::Number),
                ("near_pole", ColumnType::Boolean),
            ]);
            t.push(vec![
                num(eigenvalue),
                num(distance),
                num(POLE_GUARD),
                Value::from(true),
            ]);
            Ok(Outcome {
                report: ctx.envelope("mfun", params, t, Vec::new()),
                code: EXIT_GUARD,
                message: Some(format!(
                    "z lies within {POLE_GUARD:e} of the eigenvalue {eigenvalue}"
                )),
            })
        }
        Err(e) => Err(e.into()),
        Ok(sample) => {
            let m = sample.m;
            let mut cols = vec![
                ("m_re", ColumnType::Number),
                ("m_im", ColumnType::Number),
                ("nearest_eigenvalue", ColumnType::Number),
                ("distance", ColumnType::Number),
                ("pole_guard", ColumnType::Number),
                ("near_pole", ColumnType::Boolean),
            ];
            let mut row = vec![
                num(m.re),
                num(m.im),
                num(eigenvalue),
                num(distance),
                num(POLE_GUARD),
                Value::from(false),
            ];
            let mut code = EXIT_OK;
            let mut message = None;
            if verify_quotient {
                let q = m_quotient(s, z, &ExtractionConfig::default())?;
                let dev = (q - m).norm();
                let passed = dev < ctx.tolerances.quotient;
                cols.extend([
                    ("quotient_re", ColumnType::Number),
                    ("quotient_im", ColumnType::Number),
                    ("quotient_deviation", ColumnType::Number),
                    ("quotient_passed", ColumnType::Boolean),
                ]);
                row.extend([num(q.re), num(q.im), num(dev), Value::from(passed)]);
                if !passed {
                    code = EXIT_FAILED;
                    message = Some(format!(
                        "quotient: |closed form - boundary quotient| = {dev:e} is not below {:e}",
                        ctx.tolerances.quotient
                    ));
                }
            }
            let mut t = Table::new(&cols);
            t.push(row);
            Ok(Outcome {
                report: ctx.envelope("mfun", params, t, Vec::new()),
                code,
                message,
            })
        }
    }
}

fn relation_name(r: &hardysin::verify::Relation) -> String {
    serde_json::to_value(r)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Runs the suites concurrently; the table follows the order of `suites`.
pub fn verify(ctx: &Context, suites: &[Suite]) -> Result<Outcome, Failure> {
    let tol = ctx.tolerances;
    let reports: Vec<hardysin::Result<SuiteReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = suites
            .iter()
            .map(|&s| scope.spawn(move || run_suite(s, &tol)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked"))
            .collect()
    });
    let mut t = Table::new(&[
        ("suite", ColumnType::String),
        ("check", ColumnType::String),
        ("value", ColumnType::Number),
        ("relation", ColumnType::String),
        ("bound", ColumnType::Number),
        ("passed", ColumnType::Boolean),
    ]);
    let mut failed = Vec::new();
    for r in reports {
        let r = r?;
        for c in &r.checks {
            t.push(vec![
                Value::from(r.suite.name()),
                Value::from(c.name.as_str()),
                num(c.value),
                Value::from(relation_name(&c.relation)),
                num(c.bound),
                Value::from(c.passed),
            ]);
            if !c.passed {
                failed.push(format!(
                    "{}/{} = {:e} (bound {:e})",
                    r.suite.name(),
                    c.name,
                    c.value,
                    c.bound
                ));
            }
        }
    }
    let names: Vec<Value> = suites.iter().map(|s| Value::from(s.name())).collect();
    let (code, message) = if failed.is_empty() {
        (EXIT_OK, None)
    } else {
        (EXIT_FAILED, Some(format!("failed: {}", failed.join("; "))))
    };
    Ok(Outcome {
        report: ctx.envelope(
            "verify",
            vec![("suites", Value::Array(names))],
            t,
            Vec::new(),
        ),
        code,
        message,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Potential {
    Sine2,
    X2,
    Dist2,
}

impl Potential {
    pub fn name(self) -> &'static str {
        match self {
            Potential::Sine2 => "sine2",
            Potential::X2 => "x2",
            Potential::Dist2 => "dist2",
        }
    }

    fn kind(self) -> PotentialKind {
        match self {
            Potential::Sine2 => PotentialKind::InverseSine2,
            Potential::X2 => PotentialKind::InverseX2,
            Potential::Dist2 => PotentialKind::InverseDistance2,
        }
    }
}

pub struct RayleighArgs {
    pub potential: Potential,
    pub coef: f64,
    pub shift: f64,
    pub n_basis: usize,
    pub basis: BasisKind,
    /// `None` selects the default for the potential.
    pub enrichment: Option<Vec<f64>>,
}

pub fn rayleigh(ctx: &Context, a: &RayleighArgs) -> Result<Outcome, Failure> {
    if !(1..=MAX_BASIS).contains(&a.n_basis) {
        return Err(Failure::usage(format!(
            "--n-basis must lie in 1..={MAX_BASIS}"
        )));
    }
    if !(a.coef.is_finite() && a.shift.is_finite()) {
        return Err(Failure::usage("--coef and --shift must be finite"));
    }
    let enrichment = a.enrichment.clone().unwrap_or_else(|| match a.potential {
        Potential::Sine2 => vec![DEFAULT_ENRICHMENT],
        _ => Vec::new(),
    });
    if let Some(e) = enrichment.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
        return Err(Failure::usage(format!(
            "enrichment exponents must lie in (0, 1], got {e}"
        )));
    }
    let mut terms = vec![(PotentialSpec::new(a.potential.kind(), a.coef), 1.0)];
    if a.shift != 0.0 {
        terms.push((PotentialSpec::new(PotentialKind::Constant, a.shift), 1.0));
    }
    let problem = RayleighProblem::new(a.n_basis, terms)
        .with_basis(a.basis)
        .with_enrichment(enrichment.clone());
    let r = min_rayleigh(&problem)?;
    let consts = bessel_constants()?;
    let (label, bound) = match a.potential {
        Potential::Sine2 => ("1/4", 0.25),
        Potential::X2 => ("lambda_F0/pi^2", consts.lambda_f0 / (PI * PI)),
        Potential::Dist2 => ("4 lambda_DN0/pi^2", 4.0 * consts.lambda_dn0 / (PI * PI)),
    };
    let basis = match a.basis {
        BasisKind::Sine => "sine",
        BasisKind::Mixed => "mixed",
    };
    let mut t = Table::new(&[
        ("potential", ColumnType::String),
        ("basis", ColumnType::String),
        ("n_basis", ColumnType::Integer),
        ("dim", ColumnType::Integer),
        ("min_eigenvalue", ColumnType::Number),
        ("residual", ColumnType::Number),
        ("bound_label", ColumnType::String),
        ("bound", ColumnType::Number),
    ]);
    t.push(vec![
        Value::from(a.potential.name()),
        Value::from(basis),
        Value::from(a.n_basis),
        Value::from(problem.dim()),
        num(r.min_eigenvalue),
        num(r.residual_norm),
        Value::from(label),
        num(bound),
    ]);
    let params = vec![
        ("potential", Value::from(a.potential.name())),
        ("coef", num(a.coef)),
        ("shift", num(a.shift)),
        ("n_basis", Value::from(a.n_basis)),
        ("basis", Value::from(basis)),
        (
            "enrichment",
            Value::Array(enrichment.iter().map(|&e| num(e)).collect()),
        ),
    ];
    let mut notes = Vec::new();
    if a.shift != 0.0 {
        notes.push(format!(
            "min_eigenvalue includes the shift: min quotient = min_eigenvalue + {}",
            a.shift
        ));
    }
    Ok(Outcome {
        report: ctx.envelope("rayleigh", params, t, notes),
        code: EXIT_OK,
        message: None,
    })
}

pub fn lamb(ctx: &Context) -> Result<Outcome, Failure> {
    let b = bessel_constants()?;
    let mut t = Table::new(&[
        ("quantity", ColumnType::String),
        ("value", ColumnType::Number),
    ]);
    let mut row = |k: String, v: f64| t.push(vec![Value::from(k), num(v)]);
    row("lamb_root".into(), b.lamb_sqrt);
    row("lambda_dn0".into(), b.lambda_dn0);
    row("j01".into(), b.j01);
    row("lambda_f0".into(), b.lambda_f0);
    row("lambda_f0_over_pi2".into(), b.lambda_f0 / (PI * PI));
    row(
        "four_lambda_dn0_over_pi2".into(),
        4.0 * b.lambda_dn0 / (PI * PI),
    );
    for (k, (lo, hi)) in b.trace.iter().enumerate() {
        row(format!("bracket_{k}_lo"), *lo);
        row(format!("bracket_{k}_hi"), *hi);
    }
    let notes = vec![
        "lambda_dn0 is the square of the first positive root of J0(u) - 2u J1(u)".to_string(),
        "J0(u) + 2u J1(u) is positive on (0, j01) and gives no root there".to_string(),
    ];
    Ok(Outcome {
        report: ctx.envelope("lamb", Vec::new(), t, notes),
        code: EXIT_OK,
        message: None,
    })
}
