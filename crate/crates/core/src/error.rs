use thiserror::Error;

use crate::specfun::Complex;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of the gamma/digamma function at {0}")]
    Pole(Complex),

    #[error("series did not reach relative tolerance {tol:e} within {terms} terms")]
    Convergence { terms: usize, tol: f64 },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("quadrature failed: estimated error {estimate:e} exceeds tolerance {tol:e}")]
    Quadrature { estimate: f64, tol: f64 },

    #[error("boundary-value extrapolation diverged (last increment {increment:e})")]
    Extrapolation { increment: f64 },

    #[error("z = {z} lies within {radius:e} of the eigenvalue {eigenvalue}")]
    NearPole {
        z: Complex,
        eigenvalue: f64,
        radius: f64,
    },

    #[error("root bracketing failed on [{lo}, {hi}]")]
    Root { lo: f64, hi: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("test function `{label}` is not admissible for {variant}: {reason}")]
    Admissibility {
        label: String,
        variant: String,
        reason: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
