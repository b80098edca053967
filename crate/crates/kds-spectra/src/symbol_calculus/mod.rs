//! Explicit operator matrices in bundle splittings, and the eigenvalue and
//! characteristic-polynomial identities built from them.
//!
//! Symbolic entries are Laurent polynomials in a fixed alphabet of symbols
//! ([`Sym`]); numeric matrices come from evaluating them with a [`SymTable`].

mod l1;
mod radial;
mod sympoly;
mod trapped;
mod warped;

pub use l1::{vector_l1_identity, L1Report, L1_TOL};
pub use radial::{
    conjugated_dt0_block, conjugation_matrices, radial_charpoly_matches, radial_expected, radial_subpr_eigenvalues,
    radial_subpr_symbolic, triangular_spectrum, ConjugationMatrices, RADIAL_LABELS,
};
pub use sympoly::{Sym, SymPoly, SymTable};
pub use trapped::{
    charpoly_independent_of_fprime, microlocal_basis, s2_from_symmetric_square, symmetric_square, trapped_1form_subpr,
    trapped_charpoly, trapped_charpoly_expected, trapped_eigenvalues, trapped_integer_blocks, trapped_normalized,
    trapped_subpr_matrix, trapped_subpr_symbolic, TrappedParams, MICROLOCAL_LABELS,
};
pub use warped::{
    coord_box_cp, coord_delta, coord_delta_star, coord_gg, warped_operator_matrices, BlockOperator, Field, OpEntry,
    OpTerm, Rank, WarpedGeometry, WarpedOperators, Word,
};

use crate::error::{KdsError, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Matrix of symbolic entries over an ordered list of labelled subbundles.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitMatrixOperator {
    pub splitting: Vec<(String, usize)>,
    pub entries: Vec<Vec<SymPoly>>,
}

impl SplitMatrixOperator {
    pub fn new(splitting: Vec<(String, usize)>, entries: Vec<Vec<SymPoly>>) -> Result<Self> {
        let dim: usize = splitting.iter().map(|s| s.1).sum();
        if entries.len() != dim || entries.iter().any(|r| r.len() != dim) {
            return Err(KdsError::InvalidParams(format!("entries must be {dim}×{dim}")));
        }
        Ok(SplitMatrixOperator { splitting, entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn eval(&self, tab: &SymTable) -> DMatrix<Complex64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.entries[i][j].eval(tab))
    }

    /// Symbols occurring in some entry.
    pub fn symbols(&self) -> Vec<Sym> {
        Sym::ALL.into_iter().filter(|&s| self.entries.iter().flatten().any(|e| e.depends_on(s))).collect()
    }
}
