//! The Schwarzschild–de Sitter and Kerr–de Sitter metric family.
//!
//! [`Kds`] bundles a parameter point with everything derived from it:
//! horizon radii, the critical radius of the static part, and the cutoff
//! data of the horizon-crossing chart. Metric components in the four
//! supported charts come from [`Kds::eval_metric`].

mod aux;
mod charts;
mod curvature;
mod horizons;
mod induced;
mod params;

pub use aux::AuxValues;
pub use charts::{Chart, MetricAtPoint};
pub use curvature::{einstein_residual_plain, ricci_fd, ricci_fd_with, upsilon_eval, RicciReport, RICHARDSON_TOL};
pub use horizons::{find_horizons, HorizonData};
pub use induced::{induced_data, InducedData};
pub use params::{BlackHoleParams, Extension, Kds, POLE_TOL};
