//! Tolerance overrides from a key-value file and `--tol-*` flags.

use std::path::{Path, PathBuf};

use hardysin::verify::Tolerances;

#[derive(Debug, Default, Clone, PartialEq)]
pub struct FileConfig {
    pub tolerances: Vec<(String, f64)>,
    pub out_dir: Option<PathBuf>,
}

/// `key = value` per line; `#` starts a comment. Keys are tolerance names
/// (optionally prefixed `tol.` or `tol-`) or `out_dir`.
pub fn parse_config(text: &str) -> Result<FileConfig, String> {
    let mut cfg = FileConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "out_dir" {
            cfg.out_dir = Some(PathBuf::from(value));
            continue;
        }
        let name = key
            .strip_prefix("tol.")
            .or_else(|| key.strip_prefix("tol-"))
            .unwrap_or(key);
        let v: f64 = value
            .parse()
            .map_err(|_| format!("line {}: `{value}` is not a number", i + 1))?;
        cfg.tolerances.push((name.to_string(), v));
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_config(&text)
}

/// Removes `--tol-NAME VALUE` and `--tol-NAME=VALUE` from argv.
pub fn split_tol_flags(args: Vec<String>) -> Result<(Vec<String>, Vec<(String, f64)>), String> {
    let mut rest = Vec::with_capacity(args.len());
    let mut tols = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(spec) = a.strip_prefix("--tol-") else {
            rest.push(a);
            continue;
        };
        let (name, value) = match spec.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| format!("--tol-{spec} needs a value"))?;
                (spec.to_string(), v)
            }
        };
        let v: f64 = value
            .parse()
            .map_err(|_| format!("--tol-{name}: `{value}` is not a number"))?;
        tols.push((name, v));
    }
    Ok((rest, tols))
}

pub fn apply(tol: &mut Tolerances, overrides: &[(String, f64)]) -> Result<(), String> {
    for (name, v) in overrides {
        tol.set(name, *v).map_err(|e| e.to_string())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file() {
        let c = parse_config(
            "# tolerances\ntol.quotient = 1e-6\nstrict-gap=2e-6 # inline\n\nout_dir = /tmp/r\n",
        )
        .unwrap();
        assert_eq!(
            c.tolerances,
            vec![("quotient".into(), 1e-6), ("strict-gap".into(), 2e-6)]
        );
        assert_eq!(c.out_dir, Some(PathBuf::from("/tmp/r")));
        assert!(parse_config("quotient 1e-6").is_err());
        assert!(parse_config("quotient = abc").is_err());
    }

    #[test]
    fn tol_flags() {
        let args = [
            "hardysin",
            "verify",
            "--tol-gap=1e-8",
            "--suite",
            "hardy",
            "--tol-ode-residual",
            "1e-4",
        ]
        .map(String::from)
        .to_vec();
        let (rest, tols) = split_tol_flags(args).unwrap();
        assert_eq!(rest, ["hardysin", "verify", "--suite", "hardy"]);
        let mut t = Tolerances::default();
        apply(&mut t, &tols).unwrap();
        assert_eq!((t.gap, t.ode_residual), (1e-8, 1e-4));
        assert!(apply(&mut t, &[("nope".into(), 1.0)]).is_err());
        assert!(split_tol_flags(vec!["--tol-gap".into()]).is_err());
    }
}
