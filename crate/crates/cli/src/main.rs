use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hardysin::variational::BasisKind;
use hardysin::verify::{Suite, Tolerances};
use hardysin_cli::commands::{self, Context, Failure, Outcome, Potential, RayleighArgs};
use hardysin_cli::config::{apply, load_config, split_tol_flags};
use hardysin_cli::report::SCHEMA;

const OUT_DIR_ENV: &str = "HARDYSIN_OUT_DIR";

/// Numerics for -d²/dx² + (s² - 1/4)/sin²x on (0, π).
///
/// Tolerances can be overridden with `--tol-NAME VALUE` (for example
/// `--tol-quotient 1e-6`) or a `--config` file of `name = value` lines.
#[derive(Parser)]
#[command(name = "hardysin", version)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Key-value config file (tolerances, out_dir).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Specfun,
    Closedform,
    Spectral,
    Hardy,
    #[value(name = "appendixB")]
    AppendixB,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum PotentialArg {
    Sine2,
    X2,
    Dist2,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Sine,
    Mixed,
}

#[derive(Subcommand)]
enum Command {
    /// Friedrichs eigenvalues (1/2 + s + n)², n = 0..=N.
    Eigs {
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long)]
        n: usize,
    },
    /// m-function at z.
    Mfun {
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, allow_hyphen_values = true)]
        z_re: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        z_im: f64,
        /// Cross-check against the boundary-value quotient.
        #[arg(long)]
        verify_quotient: bool,
    },
    /// Run invariant suites; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
    /// Smallest Rayleigh quotient of the discretized Hardy form.
    Rayleigh {
        #[arg(long, value_enum)]
        potential: PotentialArg,
        #[arg(long, default_value_t = 0.25, allow_hyphen_values = true)]
        coef: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        shift: f64,
        #[arg(long, default_value_t = 200)]
        n_basis: usize,
        #[arg(long, value_enum, default_value_t = BasisArg::Sine)]
        basis: BasisArg,
        /// Comma-separated exponents ε of sin^{1/2+ε}x added to the basis.
        #[arg(long, value_delimiter = ',', conflicts_with = "no_enrich")]
        enrich: Option<Vec<f64>>,
        /// Plain trial basis.
        #[arg(long)]
        no_enrich: bool,
    },
    /// Bessel constants λ_DN0 and λ_F0 with the bisection trace.
    Lamb,
    /// Print the JSON schema of the report envelope.
    Schema,
}

fn fail(f: Failure) -> ExitCode {
    eprintln!("hardysin: {}", f.message);
    ExitCode::from(f.code as u8)
}

fn main() -> ExitCode {
    let (args, tol_flags) = match split_tol_flags(std::env::args().collect()) {
        Ok(v) => v,
        Err(e) => return fail(Failure::usage(e)),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let mut tolerances = Tolerances::default();
    let mut out_dir = None;
    if let Some(path) = &cli.config {
        match load_config(path).and_then(|c| {
            apply(&mut tolerances, &c.tolerances)?;
            Ok(c)
        }) {
            Ok(c) => out_dir = c.out_dir,
            Err(e) => return fail(Failure::usage(e)),
        }
    }
    if let Err(e) = apply(&mut tolerances, &tol_flags) {
        return fail(Failure::usage(e));
    }
    if let Some(dir) = std::env::var_os(OUT_DIR_ENV) {
        out_dir = Some(PathBuf::from(dir));
    }
    let ctx = Context {
        tolerances,
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };
    let outcome = match cli.command {
        Command::Schema => {
            print!("{SCHEMA}");
            return ExitCode::SUCCESS;
        }
        Command::Eigs { s, n } => commands::eigs(&ctx, s, n),
        Command::Mfun {
            s,
            z_re,
            z_im,
            verify_quotient,
        } => commands::mfun(&ctx, s, z_re, z_im, verify_quotient),
        Command::Verify { suite } => {
            let suites = match suite {
                SuiteArg::Specfun => vec![Suite::Specfun],
                SuiteArg::Closedform => vec![Suite::Closedform],
                SuiteArg::Spectral => vec![Suite::Spectral],
                SuiteArg::Hardy => vec![Suite::Hardy],
                SuiteArg::AppendixB => vec![Suite::AppendixB],
                SuiteArg::All => Suite::ALL.to_vec(),
            };
            commands::verify(&ctx, &suites)
        }
        Command::Rayleigh {
            potential,
            coef,
            shift,
            n_basis,
            basis,
            enrich,
            no_enrich,
        } => commands::rayleigh(
            &ctx,
            &RayleighArgs {
                potential: match potential {
                    PotentialArg::Sine2 => Potential::Sine2,
                    PotentialArg::X2 => Potential::X2,
                    PotentialArg::Dist2 => Potential::Dist2,
                },
                coef,
                shift,
                n_basis,
                basis: match basis {
                    BasisArg::Sine => BasisKind::Sine,
                    BasisArg::Mixed => BasisKind::Mixed,
                },
                enrichment: if no_enrich { Some(Vec::new()) } else { enrich },
            },
        ),
        Command::Lamb => commands::lamb(&ctx),
    };
    match outcome {
        Ok(o) => emit(&cli.format, cli.out, out_dir, o),
        Err(f) => fail(f),
    }
}

fn emit(format: &Format, out: Option<PathBuf>, out_dir: Option<PathBuf>, o: Outcome) -> ExitCode {
    let (text, ext) = match format {
        Format::Json => (o.report.to_json(), "json"),
        Format::Csv => match o.report.results.to_csv() {
            Ok(t) => (t, "csv"),
            Err(e) => return fail(Failure::usage(e.to_string())),
        },
    };
    if matches!(format, Format::Csv) {
        for n in &o.report.notes {
            eprintln!("note: {n}");
        }
    }
    let target = out.or_else(|| out_dir.map(|d| d.join(format!("{}.{ext}", o.report.command))));
    match target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                if let Err(e) = std::fs::create_dir_all(parent) {
                    return fail(Failure::usage(format!("{}: {e}", parent.display())));
                }
            }
            if let Err(e) = std::fs::write(&path, text) {
                return fail(Failure::usage(format!("{}: {e}", path.display())));
            }
            eprintln!("wrote {}", path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    if let Some(m) = o.message {
        eprintln!("hardysin: {m}");
    }
    ExitCode::from(o.code as u8)
}
