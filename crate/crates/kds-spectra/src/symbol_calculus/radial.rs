use super::sympoly::{Sym, SymPoly, SymTable};
use super::SplitMatrixOperator;
use crate::numeric::exact::charpoly;
use nalgebra::{DMatrix, Matrix3};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// Smooth splitting at the horizons, with `S²T*S²` split into trace and trace-free parts.
pub const RADIAL_LABELS: [&str; 7] = ["NN", "NTN", "NTT", "TNN", "TNT", "TTT-trace", "TTT-free"];

/// Frame changes between the static and the smooth partial frames near `r = r_±`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConjugationMatrices {
    pub c1: Matrix3<f64>,
    pub c1inv: Matrix3<f64>,
    pub c2: DMatrix<f64>,
    pub c2inv: DMatrix<f64>,
}

/// `C^(1)_±`, `C^(2)_±` and the stated inverses; `sign` is `+1` at `r₊`.
pub fn conjugation_matrices(alpha: f64, sign: f64) -> ConjugationMatrices {
    let t = SymTable::new().set(Sym::Alpha, alpha);
    let ev = |m: Vec<Vec<SymPoly>>| DMatrix::from_fn(m.len(), m.len(), |i, j| m[i][j].eval(&t).re);
    let s = sign;
    let a = alpha;
    let c1 = Matrix3::new(1.0 / a, 0.0, 0.0, -s / a, a, 0.0, 0.0, 0.0, 1.0);
    let c1inv = Matrix3::new(a, 0.0, 0.0, s / a, 1.0 / a, 0.0, 0.0, 0.0, 1.0);
    ConjugationMatrices { c1, c1inv, c2: ev(c2_sym(s, 6)), c2inv: ev(c2inv_sym(s, 6)) }
}

fn al(k: i8) -> SymPoly {
    SymPoly::sym_pow(Sym::Alpha, k)
}

fn zeros(n: usize) -> Vec<Vec<SymPoly>> {
    vec![vec![SymPoly::zero(); n]; n]
}

fn c2_sym(s: f64, n: usize) -> Vec<Vec<SymPoly>> {
    let r = SymPoly::real;
    let mut m = zeros(n);
    m[0][0] = al(-2);
    m[1][0] = r(-s) * al(-2);
    m[1][1] = r(1.0);
    m[2][2] = al(-1);
    m[3][0] = al(-2);
    m[3][1] = r(-2.0 * s);
    m[3][3] = al(2);
    m[4][2] = r(-s) * al(-1);
    m[4][4] = al(1);
    for k in 5..n {
        m[k][k] = r(1.0);
    }
    m
}

fn c2inv_sym(s: f64, n: usize) -> Vec<Vec<SymPoly>> {
    let r = SymPoly::real;
    let mut m = zeros(n);
    m[0][0] = al(2);
    m[1][0] = r(s);
    m[1][1] = r(1.0);
    m[2][2] = al(1);
    m[3][0] = al(-2);
    m[3][1] = r(2.0 * s) * al(-2);
    m[3][3] = al(-2);
    m[4][2] = r(s) * al(-1);
    m[4][4] = al(-1);
    for k in 5..n {
        m[k][k] = r(1.0);
    }
    m
}

fn matmul(a: &[Vec<SymPoly>], b: &[Vec<SymPoly>]) -> Vec<Vec<SymPoly>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).fold(SymPoly::zero(), |acc, k| acc + &a[i][k] * &b[k][j])).collect()).collect()
}

/// `∇_{∂_{t₀}}` on 1-forms in the smooth frame, `(C^(1))⁻¹ [[0, −μ′/2, 0], [−μ′/2, 0, 0], 0] C^(1)`.
pub fn conjugated_dt0_block(alpha: f64, sign: f64, mu_prime: f64) -> Matrix3<f64> {
    let c = conjugation_matrices(alpha, sign);
    let mut a = Matrix3::zeros();
    a[(0, 1)] = -0.5 * mu_prime;
    a[(1, 0)] = -0.5 * mu_prime;
    c.c1inv * a * c.c1
}

/// Gauge-modification term at the conormal bundle in the static frame, divided by `iξ`,
/// with `μF′ = ±(1 + α²c)` and `μ = α²`.
fn static_frame_modification(s: f64) -> Vec<Vec<SymPoly>> {
    let r = SymPoly::real;
    let g1 = SymPoly::sym(Sym::Gamma1);
    let g2 = SymPoly::sym(Sym::Gamma2);
    let muf = r(s) * (r(1.0) + al(2) * SymPoly::sym(Sym::CPm));
    let mut a1 = zeros(7);
    a1[0][1] = r(2.0);
    a1[1][0] = r(0.5);
    a1[1][3] = r(0.5);
    a1[1][5] = r(-0.5);
    a1[2][4] = r(1.0);
    let mut a2 = zeros(7);
    a2[1][1] = r(1.0);
    a2[3][0] = r(1.0);
    a2[3][3] = r(1.0);
    a2[3][5] = r(-1.0);
    a2[4][4] = r(1.0);
    let mut a3 = zeros(7);
    a3[0][1] = r(2.0);
    a3[3][1] = r(-2.0);
    a3[5][1] = r(-2.0);
    let mut a4 = zeros(7);
    for (i, j, v) in [
        (0, 0, 1.0),
        (0, 3, 1.0),
        (0, 5, -1.0),
        (3, 0, -1.0),
        (3, 3, -1.0),
        (3, 5, 1.0),
        (5, 0, -1.0),
        (5, 3, -1.0),
        (5, 5, 1.0),
    ] {
        a4[i][j] = r(v);
    }
    let mut out = zeros(7);
    for i in 0..7 {
        for j in 0..7 {
            out[i][j] = g1.clone() * a1[i][j].clone()
                - g1.clone() * muf.clone() * a2[i][j].clone()
                - g2.clone() * a3[i][j].clone()
                - g2.clone() * muf.clone() * a4[i][j].clone();
        }
    }
    out
}

/// The 7×7 matrix `M_±` with `S_sub(2L) = ±2ξD_{t₀} ∓ 2κξD_ξξ ∓ iξ M_±` at the conormal bundle,
/// obtained by conjugating into the smooth frame and letting `μ → 0`.
pub fn radial_subpr_symbolic(sign: f64) -> SplitMatrixOperator {
    let a = static_frame_modification(sign);
    let conj = matmul(&matmul(&c2inv_sym(sign, 7), &a), &c2_sym(sign, 7));
    let kap = if sign > 0.0 { Sym::KappaPlus } else { Sym::KappaMinus };
    let diag = [0.0, 2.0, 1.0, 4.0, 3.0, 2.0, 2.0];
    let entries: Vec<Vec<SymPoly>> = (0..7)
        .map(|i| {
            (0..7)
                .map(|j| {
                    let e = &conj[i][j];
                    assert!(e.min_power(Sym::Alpha).unwrap_or(0) >= 0, "singular term survives at ({i},{j}): {e}");
                    let mut v = SymPoly::real(-sign) * e.coeff_of(Sym::Alpha, 0);
                    if i == j {
                        v = v + SymPoly::real(2.0 * diag[i]) * SymPoly::sym(kap);
                    }
                    v
                })
                .collect()
        })
        .collect();
    SplitMatrixOperator::new(RADIAL_LABELS.iter().map(|l| (l.to_string(), 1)).collect(), entries)
        .expect("consistent dimensions")
}

/// Closed-form list `{2γ₁, 4κ, 2κ+γ₁, 8κ, 6κ, 4κ+γ₂, 4κ}`.
pub fn radial_expected(gamma1: f64, gamma2: f64, kappa: f64) -> [f64; 7] {
    [2.0 * gamma1, 4.0 * kappa, 2.0 * kappa + gamma1, 8.0 * kappa, 6.0 * kappa, 4.0 * kappa + gamma2, 4.0 * kappa]
}

/// Eigenvalues of a matrix whose off-diagonal pattern is acyclic: it is then
/// permutation-similar to a triangular matrix and the spectrum is its diagonal.
pub fn triangular_spectrum(m: &DMatrix<f64>) -> Option<Vec<f64>> {
    let n = m.nrows();
    let mut indeg = vec![0usize; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && m[(i, j)] != 0.0 {
                indeg[i] += 1;
            }
        }
    }
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let k = (0..n).find(|&k| !done[k] && indeg[k] == 0)?;
        done[k] = true;
        order.push(k);
        for i in 0..n {
            if i != k && m[(i, k)] != 0.0 {
                indeg[i] -= 1;
            }
        }
    }
    Some(order.iter().map(|&k| m[(k, k)]).collect())
}

/// Radial-set eigenvalue list in the order of the basis.
pub fn radial_subpr_eigenvalues(gamma1: f64, gamma2: f64, kappa: f64, cpm: f64, sign: f64) -> Vec<f64> {
    let kap = if sign > 0.0 { Sym::KappaPlus } else { Sym::KappaMinus };
    let t = SymTable::new().set(Sym::Gamma1, gamma1).set(Sym::Gamma2, gamma2).set(kap, kappa).set(Sym::CPm, cpm);
    let m = radial_subpr_symbolic(sign).eval(&t).map(|z| z.re);
    if triangular_spectrum(&m).is_some() {
        // triangular up to permutation: report the diagonal in basis order
        (0..7).map(|i| m[(i, i)]).collect()
    } else {
        m.complex_eigenvalues().iter().map(|z| z.re).collect()
    }
}

/// Whether the symbolic characteristic polynomial equals `∏(λ − expected)` exactly.
pub fn radial_charpoly_matches(sign: f64) -> bool {
    let op = radial_subpr_symbolic(sign);
    let kap = SymPoly::sym(if sign > 0.0 { Sym::KappaPlus } else { Sym::KappaMinus });
    let g1 = SymPoly::sym(Sym::Gamma1);
    let g2 = SymPoly::sym(Sym::Gamma2);
    let r = SymPoly::real;
    let expected = [
        r(2.0) * g1.clone(),
        r(4.0) * kap.clone(),
        r(2.0) * kap.clone() + g1,
        r(8.0) * kap.clone(),
        r(6.0) * kap.clone(),
        r(4.0) * kap.clone() + g2,
        r(4.0) * kap,
    ];
    let diag: Vec<Vec<SymPoly>> =
        (0..7).map(|i| (0..7).map(|j| if i == j { expected[i].clone() } else { SymPoly::zero() }).collect()).collect();
    charpoly(&op.entries) == charpoly(&diag)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn printed_matrix_is_recovered() {
        for s in [1.0, -1.0] {
            let m = radial_subpr_symbolic(s);
            let (g1, g2, k, c) = (1.7, 0.4, 0.9, -2.5);
            let kap = if s > 0.0 { Sym::KappaPlus } else { Sym::KappaMinus };
            let t = SymTable::new().set(Sym::Gamma1, g1).set(Sym::Gamma2, g2).set(kap, k).set(Sym::CPm, c);
            let v = m.eval(&t).map(|z| z.re);
            let mut want = DMatrix::<f64>::zeros(7, 7);
            let d = radial_expected(g1, g2, k);
            for (i, x) in [0, 1, 2, 3, 4, 5, 6].iter().zip([d[0], d[1], d[2], d[3], d[4], d[5], d[6]]) {
                want[(*i, *i)] = x;
            }
            want[(1, 0)] = -s * (g1 - 2.0 * g2) * c;
            want[(1, 5)] = s * 0.5 * (g1 - 2.0 * g2);
            want[(3, 5)] = -g1 * c;
            want[(4, 2)] = -s * g1 * c;
            want[(5, 0)] = -2.0 * g2 * c;
            assert!((v - want).amax() < 1e-14);
        }
    }

    #[test]
    fn eigenvalue_examples() {
        let got = radial_subpr_eigenvalues(2.0, 1.0, 0.7604, 0.3, 1.0);
        let want = [4.0, 3.0416, 3.5208, 6.0832, 4.5624, 4.0416, 3.0416];
        for (a, b) in got.iter().zip(want) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(
            sorted(radial_subpr_eigenvalues(0.0, 0.0, 1.0, 5.0, -1.0)),
            sorted(vec![0.0, 4.0, 2.0, 8.0, 6.0, 4.0, 4.0])
        );
        for c in [-2.0, 0.0, 5.0] {
            let a = radial_subpr_eigenvalues(1.1, 0.3, 0.8, c, 1.0);
            let b = radial_subpr_eigenvalues(1.1, 0.3, 0.8, 0.0, 1.0);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn pattern_is_triangularizable() {
        let t = SymTable::new().set(Sym::Gamma1, 1.0).set(Sym::Gamma2, 2.0).set(Sym::KappaPlus, 0.3).set(Sym::CPm, 1.5);
        let m = radial_subpr_symbolic(1.0).eval(&t).map(|z| z.re);
        assert!(triangular_spectrum(&m).is_some());
        let dense = sorted(m.complex_eigenvalues().iter().map(|z| z.re).collect());
        let tri = sorted(triangular_spectrum(&m).unwrap());
        for (a, b) in dense.iter().zip(&tri) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn symbolic_charpoly() {
        assert!(radial_charpoly_matches(1.0));
        assert!(radial_charpoly_matches(-1.0));
    }

    #[test]
    fn conjugation_pairs() {
        for s in [1.0, -1.0] {
            let c = conjugation_matrices(0.5, s);
            assert!((&c.c2 * &c.c2inv - DMatrix::<f64>::identity(6, 6)).amax() < 1e-14);
            assert!((c.c1 * c.c1inv - Matrix3::identity()).amax() < 1e-14);
            let mp = 1.3;
            let d = conjugated_dt0_block(1e-4, s, mp);
            let want = Matrix3::from_diagonal(&nalgebra::Vector3::new(s * mp / 2.0, -s * mp / 2.0, 0.0));
            assert!((d - want).amax() < 1e-7, "{d}");
        }
        let c = conjugation_matrices(1.0, 1.0);
        assert_eq!(c.c1[(0, 1)], 0.0);
        assert_eq!(c.c1[(0, 0)], 1.0);
        assert_eq!(c.c1[(1, 1)], 1.0);
    }
}
