//! Indicial operators: `e₀ ↦ iσ`, spatial derivatives dropped.
//!
//! Matrices are kept as polynomials in `z = iσ`; every named operator has
//! rational coefficients in z, so determinants live in `ℚ[z]` and their roots
//! are recognized exactly when they are at most quadratic irrationalities.

use super::field::{cq, rational_approx, Alg, CQ};
use super::operator::{DsEntry, DsOperator};
use super::poly::UPoly;
use super::section::{Bundle, FrameOp, XRank};
use crate::numeric::exact::{charpoly, nullspace, qi, Q};
use crate::numeric::roots::poly_roots;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;
use std::cmp::Ordering;

/// Fiber coordinates of a splitting, with their block labels.
///
/// Symmetric tangential tensors use the basis `E_ij` (`i ≤ j`) with
/// `a_ij = a_ji = 1`.
pub fn fiber_labels(bundle: Bundle, n: usize) -> Vec<(String, Vec<usize>)> {
    let mut out = Vec::new();
    for (lab, r) in bundle.labels().iter().zip(bundle.ranks()) {
        match r {
            XRank::Scalar => out.push((lab.to_string(), vec![])),
            XRank::Form => (0..n).for_each(|i| out.push((lab.to_string(), vec![i + 1]))),
            XRank::Sym => {
                for i in 0..n {
                    for j in i..n {
                        out.push((lab.to_string(), vec![i + 1, j + 1]));
                    }
                }
            }
        }
    }
    out
}

fn rank_dim(r: XRank, n: usize) -> usize {
    match r {
        XRank::Scalar => 1,
        XRank::Form => n,
        XRank::Sym => n * (n + 1) / 2,
    }
}

fn sym_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

fn fiber_word(w: FrameOp, v: &[UPoly], r: XRank, n: usize) -> (Vec<UPoly>, XRank) {
    let out = w.maps(r).expect("well-typed word");
    let zero = || vec![UPoly::zero(); rank_dim(out, n)];
    let v2 = match w {
        FrameOp::E0 => v.iter().map(|p| p.clone() * UPoly::var()).collect(),
        FrameOp::Ei(_) | FrameOp::Lap | FrameOp::DX | FrameOp::DeltaH | FrameOp::DeltaHStar => zero(),
        FrameOp::TrH => vec![(0..n).fold(UPoly::zero(), |acc, i| acc + v[sym_index(n, i, i)].clone())],
        FrameOp::HTimes => {
            let mut o = zero();
            for i in 0..n {
                o[sym_index(n, i, i)] = v[0].clone();
            }
            o
        }
    };
    (v2, out)
}

fn fiber_entry(e: &DsEntry, v: &[UPoly], r: XRank, out: XRank, n: usize) -> Vec<UPoly> {
    let mut acc = vec![UPoly::zero(); rank_dim(out, n)];
    for t in &e.terms {
        let (mut x, mut rr) = (v.to_vec(), r);
        for w in t.words.iter().rev() {
            (x, rr) = fiber_word(*w, &x, rr, n);
        }
        debug_assert_eq!(rr, out);
        let c = UPoly::constant(t.coeff.clone());
        for (a, b) in acc.iter_mut().zip(x) {
            *a = a.clone() + b * c.clone();
        }
    }
    acc
}

/// Indicial operator as a matrix polynomial in `z = iσ`.
#[derive(Debug, Clone)]
pub struct IndicialMatrix {
    pub op: String,
    pub n: usize,
    pub bundle: Bundle,
    pub labels: Vec<(String, Vec<usize>)>,
    pub z_entries: Vec<Vec<UPoly>>,
}

impl IndicialMatrix {
    pub fn dim(&self) -> usize {
        self.z_entries.len()
    }

    /// `I(op, σ)` for an exact σ.
    pub fn at(&self, sigma: &Alg) -> Vec<Vec<Alg>> {
        let z = &Alg::i() * sigma;
        self.at_z(&z)
    }

    pub fn at_z(&self, z: &Alg) -> Vec<Vec<Alg>> {
        self.z_entries.iter().map(|r| r.iter().map(|p| p.eval(z)).collect()).collect()
    }

    /// `I(op, σ)` for a floating σ.
    pub fn at_c64(&self, sigma: Complex64) -> nalgebra::DMatrix<Complex64> {
        let z = Complex64::i() * sigma;
        let d = self.dim();
        nalgebra::DMatrix::from_fn(d, d, |i, j| {
            self.z_entries[i][j].to_c64().iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
        })
    }

    /// `det I` as a polynomial in z.
    pub fn det_z(&self) -> UPoly {
        let c = charpoly(&self.z_entries);
        let d = self.dim();
        let last = c[d].clone();
        if d % 2 == 0 {
            last
        } else {
            -last
        }
    }

    /// `det I` as a polynomial in σ.
    pub fn det_sigma(&self) -> UPoly {
        self.det_z().rescale_var(&Alg::i())
    }
}

/// Indicial operator of a square operator on sections of one bundle.
pub fn indicial_operator(op: &DsOperator) -> IndicialMatrix {
    assert_eq!(op.rows, op.cols, "indicial roots need a square operator");
    let n = op.n;
    let ranks = op.cols.ranks();
    let offs: Vec<usize> = ranks
        .iter()
        .scan(0, |s, &r| {
            let o = *s;
            *s += rank_dim(r, n);
            Some(o)
        })
        .collect();
    let dim: usize = ranks.iter().map(|&r| rank_dim(r, n)).sum();
    let mut m = vec![vec![UPoly::zero(); dim]; dim];
    for (cb, &cr) in ranks.iter().enumerate() {
        for k in 0..rank_dim(cr, n) {
            let mut v = vec![UPoly::zero(); rank_dim(cr, n)];
            v[k] = UPoly::one();
            for (rb, &rr) in ranks.iter().enumerate() {
                let out = fiber_entry(&op.entries[rb][cb], &v, cr, rr, n);
                for (i, p) in out.into_iter().enumerate() {
                    m[offs[rb] + i][offs[cb] + k] = p;
                }
            }
        }
    }
    IndicialMatrix { op: op.name.clone(), n, bundle: op.cols, labels: fiber_labels(op.cols, n), z_entries: m }
}

/// Which half plane of σ to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HalfPlane {
    /// `Im σ ≥ 0`
    ClosedUpper,
    /// `Im σ < 0`
    OpenLower,
    All,
}

/// An indicial root with its kernel data.
#[derive(Debug, Clone, Serialize)]
pub struct IndicialRoot {
    /// Exact value when it is a quadratic irrationality over ℚ(i).
    #[serde(serialize_with = "ser_opt_alg")]
    pub sigma_exact: Option<Alg>,
    pub sigma_re: f64,
    pub sigma_im: f64,
    /// Blocks met by the kernel of `I(σ)`, with `T` refined into `TT`/`TP`.
    pub subspace: String,
    /// Dimension of the kernel.
    pub rank: usize,
    /// Vanishing order of `det I` at σ.
    pub algebraic_multiplicity: usize,
    /// Pole order of `I(σ)^{-1}` (longest Jordan chain).
    pub order: usize,
}

fn ser_opt_alg<S: serde::Serializer>(v: &Option<Alg>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(a) => s.serialize_some(&a.exact_string()),
        None => s.serialize_none(),
    }
}

impl IndicialRoot {
    pub fn sigma_c64(&self) -> Complex64 {
        Complex64::new(self.sigma_re, self.sigma_im)
    }
}

/// Recognizes the roots of a square-free polynomial exactly, where possible.
/// Returns `(exact or none, float)` pairs in z.
fn exact_roots(sf: &UPoly) -> Vec<(Option<Alg>, Complex64)> {
    const DEN: i64 = 1_000_000;
    let num = poly_roots(&sf.to_c64());
    let mut used = vec![false; num.len()];
    let mut out = Vec::new();
    let recog = |z: Complex64| Alg::gaussian(rational_approx(z.re, DEN), rational_approx(z.im, DEN));
    for i in 0..num.len() {
        if used[i] {
            continue;
        }
        let cand = recog(num[i]);
        if sf.eval(&cand).is_zero() {
            used[i] = true;
            out.push((Some(cand.clone()), cand.to_c64()));
            continue;
        }
        let mut found = false;
        for j in i + 1..num.len() {
            if used[j] {
                continue;
            }
            let s = num[i] + num[j];
            let p = num[i] * num[j];
            let (sa, pa) = (recog(s), recog(p));
            let quad = UPoly::new(vec![pa.clone(), -sa.clone(), Alg::one()]);
            if !sf.div_rem(&quad).1.is_zero() {
                continue;
            }
            // roots (s ± √(s² − 4p)) / 2 with a rational discriminant
            let disc = &(&sa * &sa) - &(&Alg::int(4) * &pa);
            let Some(dq) = disc.as_rational() else { continue };
            let r = Alg::sqrt_signed(&dq);
            let half = Alg::rational(crate::numeric::exact::qr(1, 2));
            let z1 = &(&sa + &r) * &half;
            let z2 = &(&sa - &r) * &half;
            let (zi, zj) =
                if (z1.to_c64() - num[i]).norm() <= (z2.to_c64() - num[i]).norm() { (z1, z2) } else { (z2, z1) };
            used[i] = true;
            used[j] = true;
            out.push((Some(zi.clone()), zi.to_c64()));
            out.push((Some(zj.clone()), zj.to_c64()));
            found = true;
            break;
        }
        if !found {
            used[i] = true;
            out.push((None, num[i]));
        }
    }
    out
}

fn kernel_label(m: &IndicialMatrix, ker: &[Vec<Alg>]) -> String {
    let n = m.n;
    let mut tags: Vec<&str> = Vec::new();
    for v in ker {
        for (i, (lab, _)) in m.labels.iter().enumerate() {
            if v[i].is_zero() {
                continue;
            }
            let tag = if m.bundle == Bundle::Sym2 && lab == "T" {
                // pure trace iff diagonal entries are equal and off-diagonal vanish
                let t0 = m.labels.iter().position(|(l, _)| l == "T").unwrap();
                let diag: Vec<&Alg> = (0..n).map(|k| &v[t0 + sym_index(n, k, k)]).collect();
                let off = (0..n).all(|a| (a + 1..n).all(|b| v[t0 + sym_index(n, a, b)].is_zero()));
                let tr = diag.iter().fold(Alg::zero(), |acc, x| &acc + *x);
                if off && diag.iter().all(|x| *x == diag[0]) {
                    "TP"
                } else if tr.is_zero() {
                    "TT"
                } else {
                    "T"
                }
            } else {
                lab.as_str()
            };
            if !tags.contains(&tag) {
                tags.push(tag);
            }
        }
    }
    let order = ["NN", "TN", "TT", "TP", "T", "N"];
    tags.sort_by_key(|t| order.iter().position(|o| o == t));
    tags.join("+")
}

/// Pole order of `I(z)^{-1}` at an exact z: the longest Jordan chain, found
/// from the kernel dimensions of the block-Toeplitz Taylor matrices.
fn pole_order(m: &IndicialMatrix, z: &Alg, alg_mult: usize) -> usize {
    let d = m.dim();
    let taylor: Vec<Vec<Vec<Alg>>> = {
        let tc: Vec<Vec<Vec<Alg>>> = m.z_entries.iter().map(|r| r.iter().map(|p| p.taylor_at(z)).collect()).collect();
        (0..=alg_mult)
            .map(|k| {
                (0..d).map(|i| (0..d).map(|j| tc[i][j].get(k).cloned().unwrap_or_else(Alg::zero)).collect()).collect()
            })
            .collect()
    };
    let ker_dim = |len: usize| -> usize {
        let size = len * d;
        let mut t = vec![vec![Alg::zero(); size]; size];
        for bi in 0..len {
            for bj in 0..=bi {
                let a = &taylor[bi - bj];
                for i in 0..d {
                    for j in 0..d {
                        t[bi * d + i][bj * d + j] = a[i][j].clone();
                    }
                }
            }
        }
        nullspace(&t, size).len()
    };
    let mut prev = 0;
    for len in 1..=alg_mult.max(1) {
        let k = ker_dim(len);
        if k == prev {
            return len - 1;
        }
        prev = k;
    }
    alg_mult.max(1)
}

/// All indicial roots of a square operator in the requested half plane.
pub fn indicial_roots(op: &DsOperator, half: HalfPlane) -> Vec<IndicialRoot> {
    let m = indicial_operator(op);
    roots_of_matrix(&m, half)
}

pub fn roots_of_matrix(m: &IndicialMatrix, half: HalfPlane) -> Vec<IndicialRoot> {
    let det = m.det_z();
    if det.is_zero() {
        return Vec::new();
    }
    let sf = det.square_free();
    let mut out = Vec::new();
    for (zx, zf) in exact_roots(&sf) {
        let sigma_f = -Complex64::i() * zf;
        let keep = |im_sign: Ordering| match half {
            HalfPlane::All => true,
            HalfPlane::ClosedUpper => im_sign != Ordering::Less,
            HalfPlane::OpenLower => im_sign == Ordering::Less,
        };
        match zx {
            Some(z) => {
                let sigma = &(-Alg::i()) * &z;
                if !keep(sigma.im_sign()) {
                    continue;
                }
                let mult = det.multiplicity(&UPoly::linear_root(&z));
                let mz = m.at_z(&z);
                let ker = nullspace(&mz, m.dim());
                out.push(IndicialRoot {
                    sigma_re: sigma.to_c64().re,
                    sigma_im: sigma.to_c64().im,
                    subspace: kernel_label(m, &ker),
                    rank: ker.len(),
                    algebraic_multiplicity: mult,
                    order: pole_order(m, &z, mult),
                    sigma_exact: Some(sigma),
                });
            }
            None => {
                let s = if sigma_f.im.abs() < 1e-12 {
                    Ordering::Equal
                } else if sigma_f.im < 0.0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
                if !keep(s) {
                    continue;
                }
                let mat = m.at_c64(sigma_f);
                let sv = mat.clone().svd(false, false).singular_values;
                let rank = sv.iter().filter(|&&x| x < 1e-9 * sv.max().max(1.0)).count();
                out.push(IndicialRoot {
                    sigma_exact: None,
                    sigma_re: sigma_f.re,
                    sigma_im: sigma_f.im,
                    subspace: "?".into(),
                    rank,
                    algebraic_multiplicity: 0,
                    order: 0,
                });
            }
        }
    }
    out.sort_by(|a, b| b.sigma_im.total_cmp(&a.sigma_im).then(a.sigma_re.total_cmp(&b.sigma_re)));
    out
}

/// Whether every root of `p(z)` (real rational coefficients) has `Re z > 0`,
/// i.e. `Im σ < 0`, by the Routh–Hurwitz test on `p(−z)`.
pub fn all_roots_open_lower(det_z: &UPoly) -> bool {
    let Some(deg) = det_z.degree() else { return false };
    let coeffs: Option<Vec<Q>> = det_z.0.iter().map(Alg::as_rational).collect();
    let Some(c) = coeffs else {
        // non-real coefficients: fall back to floating roots
        return poly_roots(&det_z.to_c64()).iter().all(|z| z.re > 1e-12);
    };
    // q(z) = p(−z), descending coefficients
    let q: Vec<Q> = (0..=deg).rev().map(|k| if k % 2 == 0 { c[k].clone() } else { -c[k].clone() }).collect();
    routh_stable(&q)
}

/// Strict Hurwitz stability of a real polynomial given by descending coefficients.
pub fn routh_stable(desc: &[Q]) -> bool {
    let deg = desc.len() - 1;
    if deg == 0 {
        return !desc[0].is_zero();
    }
    let mut r0: Vec<Q> = desc.iter().step_by(2).cloned().collect();
    let mut r1: Vec<Q> = desc.iter().skip(1).step_by(2).cloned().collect();
    let sign = desc[0].cmp(&Q::zero());
    if sign == Ordering::Equal {
        return false;
    }
    let mut first = vec![desc[0].clone()];
    for _ in 0..deg {
        if r1.is_empty() || r1[0].is_zero() {
            return false;
        }
        first.push(r1[0].clone());
        let next: Vec<Q> = (0..r0.len().saturating_sub(1))
            .map(|k| {
                let a = r0.get(k + 1).cloned().unwrap_or_else(Q::zero);
                let b = r1.get(k + 1).cloned().unwrap_or_else(Q::zero);
                (&r1[0] * &a - &r0[0] * &b) / &r1[0]
            })
            .collect();
        r0 = r1;
        r1 = next;
    }
    first.iter().all(|x| x.cmp(&Q::zero()) == sign)
}

/// `p₁` and `p₂` for `boxCPmod(γ₁, γ₂)` as polynomials in σ.
pub fn scp_polynomials(n: usize, g1: &Q, g2: &Q) -> (UPoly, UPoly) {
    let ni = qi(n as i64);
    let one = qi(1);
    let a1 = &ni + g1 + (&ni - &one) * g2;
    let b1 = -(qi(2) * &ni * (g1 - &one));
    let a2 = &ni + g1;
    let b2 = -((&ni + &one) * (g1 - &one));
    let mk = |a: Q, b: Q| UPoly::new(vec![Alg::rational(b), Alg::new(cq(qi(0), a), CQ::zero(), 0), Alg::one()]);
    (mk(a1, b1), mk(a2, b2))
}

/// Closed-form SCP criterion `γ₁ > 1 ∧ n + γ₁ > 0 ∧ n + γ₁ + (n−1)γ₂ > 0`.
pub fn scp_criterion(n: usize, g1: &Q, g2: &Q) -> bool {
    let ni = qi(n as i64);
    *g1 > qi(1) && (&ni + g1) > Q::zero() && (&ni + g1 + (&ni - qi(1)) * g2) > Q::zero()
}

/// One grid point of an SCP scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScpPoint {
    pub gamma1: f64,
    pub gamma2: f64,
    pub all_roots_lower: bool,
    pub criterion: bool,
    pub max_im_sigma: f64,
}

/// Result of scanning `boxCPmod(γ₁, γ₂)` over a rectangular grid.
#[derive(Debug, Clone, Serialize)]
pub struct ScpScan {
    pub n: usize,
    pub grid: usize,
    pub range: (f64, f64),
    pub points: Vec<ScpPoint>,
    pub mismatches: usize,
    pub stable_count: usize,
}

/// Grid values `lo + (hi − lo) k / (grid − 1)` as exact rationals.
pub fn grid_values(lo: i64, hi: i64, grid: usize) -> Vec<Q> {
    let g = grid.max(2) as i64 - 1;
    (0..=g).map(|k| Q::new((lo * g + (hi - lo) * k).into(), g.into())).collect()
}

/// Scans the indicial determinant of `boxCPmod` over a `grid × grid` mesh of
/// `(γ₁, γ₂) ∈ [lo, hi]²`, comparing exact lower-half-plane stability with
/// the closed-form criterion.
pub fn scp_scan(n: usize, grid: usize, lo: i64, hi: i64) -> crate::error::Result<ScpScan> {
    let vals = grid_values(lo, hi, grid);
    let mut points = Vec::with_capacity(vals.len() * vals.len());
    for g1 in &vals {
        for g2 in &vals {
            let op = super::operator::build_operator("boxCPmod", n, Some((g1.clone(), g2.clone())))?;
            let det = indicial_operator(&op).det_z();
            let stable = all_roots_open_lower(&det);
            let crit = scp_criterion(n, g1, g2);
            let max_im =
                poly_roots(&det.square_free().to_c64()).iter().map(|z| -z.re).fold(f64::NEG_INFINITY, f64::max);
            points.push(ScpPoint {
                gamma1: crate::numeric::exact::q_to_f64(g1),
                gamma2: crate::numeric::exact::q_to_f64(g2),
                all_roots_lower: stable,
                criterion: crit,
                max_im_sigma: max_im,
            });
        }
    }
    let mismatches = points.iter().filter(|p| p.all_roots_lower != p.criterion).count();
    let stable_count = points.iter().filter(|p| p.all_roots_lower).count();
    Ok(ScpScan { n, grid, range: (lo as f64, hi as f64), points, mismatches, stable_count })
}

#[cfg(test)]
mod tests {
    use super::super::operator::build_operator;
    use super::*;
    use crate::numeric::exact::qr;

    fn sigma_pm(n: i64) -> (Alg, Alg) {
        // (i/2)(−n ± √(n²+8n))
        let r = Alg::sqrt_rational(&qi(n * n + 8 * n));
        let h = &Alg::i() * &Alg::rational(qr(1, 2));
        (&h * &(&Alg::int(-n) + &r), &h * &(&Alg::int(-n) - &r))
    }

    #[test]
    fn unmodified_indicial_blocks() {
        for n in 2..=4usize {
            let l = build_operator("L_unmodified", n, None).unwrap().scaled(&Alg::int(2), "2L");
            let m = indicial_operator(&l);
            let ni = n as i64;
            // σ² + inσ + c in z = iσ: −z² + nz + c
            let diag = |c: i64| UPoly::new(vec![Alg::int(c), Alg::int(ni), Alg::int(-1)]);
            let labels = &m.labels;
            for (i, (lab, idx)) in labels.iter().enumerate() {
                let c = match lab.as_str() {
                    "NN" => 2 * ni,
                    "TN" => ni + 1,
                    _ => 0,
                };
                if lab != "T" {
                    assert_eq!(m.z_entries[i][i], diag(c), "{lab}{idx:?}");
                }
            }
        }
    }

    #[test]
    fn unmodified_roots_n3() {
        let l = build_operator("L_unmodified", 3, None).unwrap();
        let roots = indicial_roots(&l, HalfPlane::All);
        let (sp, sm) = sigma_pm(3);
        let find = |s: &Alg| roots.iter().find(|r| r.sigma_exact.as_ref() == Some(s)).cloned();
        let p = find(&sp).expect("σ₊");
        assert_eq!((p.subspace.as_str(), p.rank, p.algebraic_multiplicity, p.order), ("NN+TP", 2, 2, 1));
        assert!((p.sigma_im - 1.372281323).abs() < 1e-9);
        assert!(find(&sm).is_some());
        let tn = find(&Alg::i()).unwrap();
        assert_eq!((tn.subspace.as_str(), tn.rank), ("TN", 3));
        assert!(find(&Alg::gaussian(qi(0), qi(-4))).is_some());
        let tt = find(&Alg::zero()).unwrap();
        assert_eq!((tt.subspace.as_str(), tt.rank), ("TT", 5));
        assert!(find(&Alg::gaussian(qi(0), qi(-3))).is_some());
        assert_eq!(roots.len(), 6);
    }

    #[test]
    fn box_cp_indicial_is_diagonal() {
        for n in 2..=4usize {
            let m = indicial_operator(&build_operator("boxCP", n, None).unwrap());
            let ni = n as i64;
            let p1 = UPoly::new(vec![Alg::int(2 * ni), Alg::int(ni), Alg::int(-1)]);
            // (σ−i)(σ+i(n+1)) = σ² + inσ + (n+1) → −z² + nz + (n+1)
            let p2 = UPoly::new(vec![Alg::int(ni + 1), Alg::int(ni), Alg::int(-1)]);
            for i in 0..m.dim() {
                for j in 0..m.dim() {
                    let want = if i != j {
                        UPoly::zero()
                    } else if i == 0 {
                        p1.clone()
                    } else {
                        p2.clone()
                    };
                    assert_eq!(m.z_entries[i][j], want);
                }
            }
        }
    }

    #[test]
    fn modified_box_cp_matches_p1_p2() {
        for (g1, g2) in [(qi(2), qi(1)), (qr(3, 2), qr(-1, 3)), (qi(-1), qi(4))] {
            let n = 3;
            let op = build_operator("boxCPmod", n, Some((g1.clone(), g2.clone()))).unwrap();
            let m = indicial_operator(&op);
            let (p1, p2) = scp_polynomials(n, &g1, &g2);
            let dets = m.det_sigma().monic();
            assert_eq!(dets, (p1 * p2.clone() * p2.clone() * p2).monic());
        }
    }

    #[test]
    fn modified_box_cp_roots_2_1() {
        let op = build_operator("boxCPmod", 3, Some((qi(2), qi(1)))).unwrap();
        let roots = indicial_roots(&op, HalfPlane::All);
        let ims: Vec<i64> = roots
            .iter()
            .map(|r| r.sigma_exact.as_ref().unwrap().im().as_rational().unwrap().to_integer().try_into().unwrap())
            .collect();
        assert_eq!(ims, vec![-1, -4, -6]);
        assert!(indicial_roots(&op, HalfPlane::ClosedUpper).is_empty());
    }

    #[test]
    fn routh_hurwitz() {
        // (z+1)(z+2) stable, (z−1)(z+2) not, z²+1 not
        assert!(routh_stable(&[qi(1), qi(3), qi(2)]));
        assert!(!routh_stable(&[qi(1), qi(1), qi(-2)]));
        assert!(!routh_stable(&[qi(1), qi(0), qi(1)]));
        // (z+1)³
        assert!(routh_stable(&[qi(1), qi(3), qi(3), qi(1)]));
    }

    #[test]
    fn scp_small_scan_agrees() {
        let s = scp_scan(3, 9, -4, 4).unwrap();
        assert_eq!(s.mismatches, 0);
        assert!(s.stable_count > 0 && s.stable_count < 81);
    }
}
