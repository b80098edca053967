//! Numerical and exact-arithmetic toolkit for the Kerr–de Sitter family.
//!
//! The crate is split by subject:
//!
//! - [`metric_family`]: metrics, horizons, charts, finite-difference curvature.
//! - [`bichar_flow`]: null-bicharacteristic flow, trapping and radial sets.
//! - [`symbol_calculus`]: split operator matrices and their spectra.
//! - [`ds_model`]: exact calculus on the de Sitter static patch.
//! - [`constraints`]: constraint equations, conformal method, Cauchy data.
//! - [`nash_moser`]: a generic smoothed Newton scheme.
//! - [`verify`]: the acceptance checks, shared by tests and the CLI.
//!
//! The guide chapters are compiled as doc-tests through [`guide`].

pub mod bichar_flow;
pub mod constraints;
pub mod ds_model;
pub mod error;
pub mod guide;
pub mod metric_family;
pub mod nash_moser;
pub mod numeric;
pub mod symbol_calculus;
pub mod verify;

pub use error::{KdsError, Result};
