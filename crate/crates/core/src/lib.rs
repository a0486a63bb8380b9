pub mod boundary_values;
pub mod closed_form;
pub mod error;
pub mod quadrature;
pub mod specfun;
pub mod spectral;
pub mod variational;
pub mod verify;

pub use error::{Error, Result};
