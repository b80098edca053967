use super::sympoly::{Sym, SymPoly, SymTable};
use super::SplitMatrixOperator;
use crate::numeric::exact::{charpoly, q, q_to_f64, Q};
use crate::numeric::roots::poly_from_roots;
use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Labels of the refined splitting at the trapped set, `ê = ασ⁻¹η`, `ψ = r|η|⁻¹⋆η`.
pub const MICROLOCAL_LABELS: [&str; 10] = ["e0e0", "2e0e1", "2e0ê", "2e0ψ", "e1e1", "2e1ê", "2e1ψ", "êê", "2êψ", "ψψ"];

#[rustfmt::skip]
const S2: [[i8; 10]; 10] = [
    [ 0,-4, 0, 0, 0, 0, 0, 0, 0, 0],
    [-2, 0,-2, 0,-2, 0, 0, 0, 0, 0],
    [ 0, 2, 0, 0, 0,-2, 0, 0, 0, 0],
    [ 0, 0, 0, 0, 0, 0,-2, 0, 0, 0],
    [ 0,-4, 0, 0, 0,-4, 0, 0, 0, 0],
    [ 0, 0,-2, 0, 2, 0, 0,-2, 0, 0],
    [ 0, 0, 0,-2, 0, 0, 0, 0,-2, 0],
    [ 0, 0, 0, 0, 0, 4, 0, 0, 0, 0],
    [ 0, 0, 0, 0, 0, 0, 2, 0, 0, 0],
    [ 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
];

const ROW_A: [i8; 10] = [1, 0, 2, 0, 1, 0, 0, 1, 0, 1];
const ROW_D: [i8; 10] = [0, 2, 0, 0, 0, 2, 0, 0, 0, 0];

#[rustfmt::skip]
const TILDE_G1P: [[i8; 10]; 4] = [
    [2, 0, 4, 0, 2, 0, 0, 2, 0, 2],
    [0, 2, 0, 0, 0, 2, 0, 0, 0, 0],
    [1, 0, 2, 0,-1, 0, 0, 1, 0,-1],
    [0, 0, 0, 2, 0, 0, 0, 0, 2, 0],
];

/// Integer matrices `(S_(2), A₁′, A₁″, A₂′, A₂″)` with
/// `S = i r⁻¹σ (S_(2) + ½γ₁′A₁′ − ½γ₁″A₁″ + γ₂′A₂′ + γ₂″A₂″)`.
pub fn trapped_integer_blocks() -> [DMatrix<f64>; 5] {
    let s2 = DMatrix::from_fn(10, 10, |i, j| S2[i][j] as f64);
    let a1p = DMatrix::from_fn(10, 10, |i, j| if i < 4 { TILDE_G1P[i][j] as f64 } else { 0.0 });
    let mut a1pp = DMatrix::zeros(10, 10);
    for j in 0..10 {
        a1pp[(1, j)] = ROW_A[j] as f64;
        a1pp[(5, j)] = TILDE_G1P[2][j] as f64;
        a1pp[(6, j)] = TILDE_G1P[3][j] as f64;
    }
    a1pp[(4, 1)] = 4.0;
    a1pp[(4, 5)] = 4.0;
    let mut a2p = DMatrix::zeros(10, 10);
    let mut a2pp = DMatrix::zeros(10, 10);
    for j in 0..10 {
        a2p[(0, j)] = -(ROW_A[j] as f64);
        a2pp[(0, j)] = -(ROW_D[j] as f64);
        for i in [4, 7, 9] {
            a2p[(i, j)] = ROW_A[j] as f64;
        }
        for i in [7, 9] {
            a2pp[(i, j)] = ROW_D[j] as f64;
        }
    }
    [s2, a1p, a1pp, a2p, a2pp]
}

/// Trapped-set data `(γ₁, γ₂, r, α, σ, F′)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrappedParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub r: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub fprime: f64,
}

impl TrappedParams {
    pub fn gamma_primes(&self) -> (f64, f64) {
        let f = self.r / (self.alpha * self.alpha);
        (self.gamma1 * f, self.gamma2 * f)
    }

    pub fn table(&self) -> SymTable {
        SymTable::new()
            .set(Sym::Gamma1, self.gamma1)
            .set(Sym::Gamma2, self.gamma2)
            .set(Sym::R, self.r)
            .set(Sym::Alpha, self.alpha)
            .set(Sym::Sigma, self.sigma)
            .set(Sym::FPrime, self.fprime)
    }
}

/// `S = S_(2) + S̃` as a symbolic 10×10 operator in `(σ, r, α, γ₁, γ₂, F′)`.
pub fn trapped_subpr_symbolic() -> SplitMatrixOperator {
    let [s2, a1p, a1pp, a2p, a2pp] = trapped_integer_blocks();
    let p = |s: Sym| SymPoly::sym(s);
    let gp = |g: Sym| p(g) * p(Sym::R) * SymPoly::sym_pow(Sym::Alpha, -2);
    let gpp = |g: Sym| p(g) * p(Sym::R) * p(Sym::FPrime);
    let pref = SymPoly::i() * SymPoly::sym_pow(Sym::R, -1) * p(Sym::Sigma);
    let entries = (0..10)
        .map(|i| {
            (0..10)
                .map(|j| {
                    let e = SymPoly::real(s2[(i, j)]) + SymPoly::real(a1p[(i, j)] / 2.0) * gp(Sym::Gamma1)
                        - SymPoly::real(a1pp[(i, j)] / 2.0) * gpp(Sym::Gamma1)
                        + SymPoly::real(a2p[(i, j)]) * gp(Sym::Gamma2)
                        + SymPoly::real(a2pp[(i, j)]) * gpp(Sym::Gamma2);
                    pref.clone() * e
                })
                .collect()
        })
        .collect();
    SplitMatrixOperator::new(MICROLOCAL_LABELS.iter().map(|l| (l.to_string(), 1)).collect(), entries)
        .expect("consistent dimensions")
}

/// Numeric 10×10 complex matrix `S` at trapped-set data.
pub fn trapped_subpr_matrix(p: &TrappedParams) -> DMatrix<Complex64> {
    trapped_subpr_symbolic().eval(&p.table())
}

/// Real matrix `(i r⁻¹σ)⁻¹ S`.
pub fn trapped_normalized(p: &TrappedParams) -> DMatrix<f64> {
    let s = trapped_subpr_matrix(p);
    let f = Complex64::new(0.0, p.sigma / p.r);
    s.map(|z| (z / f).re)
}

/// Descending coefficients of `det(λ − (i r⁻¹σ)⁻¹S)`, computed exactly from the
/// floating-point matrix entries.
pub fn trapped_charpoly(p: &TrappedParams) -> Vec<f64> {
    let m = trapped_normalized(p);
    let rows: Vec<Vec<Q>> = (0..10).map(|i| m.row(i).iter().map(|&x| q(x)).collect()).collect();
    charpoly(&rows).iter().map(q_to_f64).collect()
}

/// Descending coefficients of `λ⁶(λ−γ₁′)²(λ−2γ₁′)(λ−2γ₂′)`.
pub fn trapped_charpoly_expected(p: &TrappedParams) -> Vec<f64> {
    let (g1, g2) = p.gamma_primes();
    let roots: Vec<Complex64> =
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, g1, g1, 2.0 * g1, 2.0 * g2].iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let asc = poly_from_roots(&roots);
    asc.iter().rev().map(|z| z.re).collect()
}

/// Whether the symbolic characteristic polynomial of the normalized matrix is free of `F′`.
pub fn charpoly_independent_of_fprime() -> bool {
    let op = trapped_subpr_symbolic();
    let pref = SymPoly::i() * SymPoly::sym_pow(Sym::R, -1) * SymPoly::sym(Sym::Sigma);
    let inv = SymPoly::i() * SymPoly::real(-1.0) * SymPoly::sym(Sym::R) * SymPoly::sym_pow(Sym::Sigma, -1);
    debug_assert!((pref * inv.clone() - SymPoly::real(1.0)).is_zero());
    let rows: Vec<Vec<SymPoly>> =
        op.entries.iter().map(|row| row.iter().map(|e| e.clone() * inv.clone()).collect()).collect();
    charpoly(&rows).iter().all(|c| !c.depends_on(Sym::FPrime))
}

/// Zeroth order part of the 1-form subprincipal operator at the trapped set,
/// in the coframe `(e⁰, e¹, f¹, f²)` with `f^k` orthonormal for the round metric.
pub fn trapped_1form_subpr(r: f64, alpha: f64, sigma: f64, eta: [f64; 2]) -> Matrix4<Complex64> {
    let mut b = Matrix4::<f64>::zeros();
    b[(0, 1)] = -2.0 * sigma / r;
    b[(1, 0)] = -2.0 * sigma / r;
    for k in 0..2 {
        b[(1, 2 + k)] = -2.0 * alpha * eta[k] / r.powi(3);
        b[(2 + k, 1)] = 2.0 * alpha * eta[k] / r;
    }
    b.map(|x| Complex64::new(0.0, x))
}

const SYM_IDX: [(usize, usize); 10] = [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

/// Derivation extension `u ↦ Bu + uBᵀ` of a 1-form endomorphism to symmetric
/// 2-tensors, in upper-triangular component coordinates.
pub fn symmetric_square(b: &Matrix4<Complex64>) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(10, 10);
    for (k, &(i, j)) in SYM_IDX.iter().enumerate() {
        let mut u = Matrix4::<Complex64>::zeros();
        u[(i, j)] = Complex64::new(1.0, 0.0);
        u[(j, i)] = Complex64::new(1.0, 0.0);
        let v = b * u + u * b.transpose();
        for (l, &(p, q)) in SYM_IDX.iter().enumerate() {
            out[(l, k)] = v[(p, q)];
        }
    }
    out
}

/// Columns: components of the refined basis vectors at the trapped set.
pub fn microlocal_basis(r: f64, alpha: f64, sigma: f64, eta: [f64; 2]) -> DMatrix<f64> {
    let en = (eta[0] * eta[0] + eta[1] * eta[1]).sqrt();
    let ehat = [alpha / sigma * eta[0], alpha / sigma * eta[1]];
    let psi = [-r / en * eta[1], r / en * eta[0]];
    let lift = |w: [f64; 2]| [0.0, 0.0, w[0], w[1]];
    let e0 = [1.0, 0.0, 0.0, 0.0];
    let e1 = [0.0, 1.0, 0.0, 0.0];
    let sym = |a: [f64; 4], b: [f64; 4], c: f64| {
        let mut m = Matrix4::<f64>::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = 0.5 * c * (a[i] * b[j] + b[i] * a[j]);
            }
        }
        m
    };
    let (le, lp) = (lift(ehat), lift(psi));
    let basis = [
        sym(e0, e0, 1.0),
        sym(e0, e1, 2.0),
        sym(e0, le, 2.0),
        sym(e0, lp, 2.0),
        sym(e1, e1, 1.0),
        sym(e1, le, 2.0),
        sym(e1, lp, 2.0),
        sym(le, le, 1.0),
        sym(le, lp, 2.0),
        sym(lp, lp, 1.0),
    ];
    DMatrix::from_fn(10, 10, |l, k| {
        let (p, q) = SYM_IDX[l];
        basis[k][(p, q)]
    })
}

/// `S_(2)` expressed in the refined basis from the concrete symmetric square.
pub fn s2_from_symmetric_square(r: f64, alpha: f64, sigma: f64, eta: [f64; 2]) -> DMatrix<Complex64> {
    let sq = symmetric_square(&trapped_1form_subpr(r, alpha, sigma, eta));
    let p = microlocal_basis(r, alpha, sigma, eta).map(|x| Complex64::new(x, 0.0));
    let pinv = p.clone().try_inverse().expect("basis is invertible away from η = 0");
    pinv * sq * p
}

/// Eigenvalues of the normalized matrix, sorted by real part.
pub fn trapped_eigenvalues(p: &TrappedParams) -> Vec<Complex64> {
    let mut ev: Vec<Complex64> = trapped_normalized(p).complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re));
    ev
}
