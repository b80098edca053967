//! Exact calculus on the static patch of de Sitter space.
//!
//! Frame: `e₀ = τ∂_τ − x·∂_x`, `e_i = ∂_{x_i}`. Sections are polynomial in x
//! times `τ^{iσ}`, with coefficients in ℚ(i, √(n²+8n)). Operators are block
//! matrices of frame words; since all frame coefficients are constant, every
//! operator maps `τ^{iσ}·(polynomials of degree ≤ k)` into itself, so mode
//! statements reduce to finite exact linear algebra.
//!
//! ```
//! use kds_spectra::ds_model::{build_operator, indicial_roots, HalfPlane};
//! let l = build_operator("L_unmodified", 3, None).unwrap();
//! let up = indicial_roots(&l, HalfPlane::ClosedUpper);
//! let labels: Vec<_> = up.iter().map(|r| r.subspace.as_str()).collect();
//! assert_eq!(labels, ["NN+TP", "TN", "TT"]);
//! ```

mod field;
mod indicial;
mod operator;
mod poly;
mod resonance;
mod section;

pub use field::{rational_approx, Alg, CQ};
pub use indicial::{
    all_roots_open_lower, fiber_labels, grid_values, indicial_operator, indicial_roots, roots_of_matrix, routh_stable,
    scp_criterion, scp_polynomials, scp_scan, HalfPlane, IndicialMatrix, IndicialRoot, ScpPoint, ScpScan,
};
pub use operator::{
    build_operator, l_modified_2_1_display, monomial_basis, operators_agree, probe_sigmas, DsEntry, DsOperator, DsTerm,
    OPERATOR_NAMES,
};
pub use poly::{Mono, TxPoly, UPoly};
pub use resonance::{
    sigma_plus, state_sigma_plus, state_sigma_plus_minus_i, state_zero, traceless_basis, verify_pure_gauge,
    verify_resonance_list, ExactCheck, PureGaugeReport, ResonanceEntry, ResonanceReport,
};
pub use section::{frame_apply_field, Bundle, FrameOp, PolySection, SectionTerm, XField, XRank};
