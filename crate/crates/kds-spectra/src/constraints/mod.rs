//! Constraint equations, the conformal method and gauged Cauchy data.
//!
//! Spatial metrics are stored with a [`HSign`] flag. Slice data coming from
//! [`crate::metric_family`] are negative definite; torus data are positive.
//! Residuals are reported in the positive convention, where the Hamiltonian
//! constraint reads `R + (tr K)² − |K|² = (n−1)Λ`.
//!
//! ```
//! use kds_spectra::constraints::*;
//! let grid = TorusGrid::new(8).unwrap();
//! let bg = ConformalBackground::flat(&grid, 3.0).unwrap();
//! let input = LichnerowiczInput { h: 0.01, qtilde: random_tt(&grid, 1, 1, 0.02), lambda: 3.0 };
//! let sol = lichnerowicz_solve(&input, &bg, 1e-10).unwrap();
//! assert!(sol.residual < 1e-10);
//! assert!(sol.z_coeffs.is_empty());
//! ```

mod cauchy;
mod lichnerowicz;
mod residual;
mod torus;
mod tt;

pub use cauchy::{cauchy_data_derivative, cauchy_data_map, induced_by, CauchyData, CauchyMap, SliceGrid};
pub use lichnerowicz::{
    lichnerowicz_solve, lichnerowicz_solve_with, ConformalBackground, LichOptions, LichnerowiczInput,
    LichnerowiczSolution,
};
pub use residual::{constraint_residual, ConstraintResidual, HSign, InitialDataSet, SliceData, TorusData};
pub use torus::{sup, sup_sym, SymField, TorusGrid};
pub use tt::{random_tt, tt_project};
