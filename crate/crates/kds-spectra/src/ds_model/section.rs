//! Polynomial sections `τ^{iσ} Σ τ^k p(x)` over the static patch, split into
//! normal and tangential blocks.

use super::field::Alg;
use super::poly::TxPoly;
use serde::Serialize;

/// Tensor type of a block, as a tensor on the level sets of τ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum XRank {
    Scalar,
    Form,
    Sym,
}

/// One block of a section: a scalar, a tangential 1-form, or a tangential
/// symmetric 2-tensor stored as a full symmetric matrix `a_ij` (meaning
/// `Σ_ij a_ij e^i e^j`).
#[derive(Debug, Clone, PartialEq)]
pub enum XField {
    Scalar(TxPoly),
    Form(Vec<TxPoly>),
    Sym(Vec<Vec<TxPoly>>),
}

impl XField {
    pub fn zero(rank: XRank, n: usize) -> Self {
        match rank {
            XRank::Scalar => XField::Scalar(TxPoly::zero(n)),
            XRank::Form => XField::Form(vec![TxPoly::zero(n); n]),
            XRank::Sym => XField::Sym(vec![vec![TxPoly::zero(n); n]; n]),
        }
    }

    pub fn rank(&self) -> XRank {
        match self {
            XField::Scalar(_) => XRank::Scalar,
            XField::Form(_) => XRank::Form,
            XField::Sym(_) => XRank::Sym,
        }
    }

    pub fn components(&self) -> Vec<&TxPoly> {
        match self {
            XField::Scalar(p) => vec![p],
            XField::Form(v) => v.iter().collect(),
            XField::Sym(m) => m.iter().flatten().collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&TxPoly) -> TxPoly) -> XField {
        match self {
            XField::Scalar(p) => XField::Scalar(f(p)),
            XField::Form(v) => XField::Form(v.iter().map(&f).collect()),
            XField::Sym(m) => XField::Sym(m.iter().map(|r| r.iter().map(&f).collect()).collect()),
        }
    }

    pub fn plus(&self, o: &XField) -> XField {
        match (self, o) {
            (XField::Scalar(a), XField::Scalar(b)) => XField::Scalar(a.plus(b)),
            (XField::Form(a), XField::Form(b)) => XField::Form(a.iter().zip(b).map(|(x, y)| x.plus(y)).collect()),
            (XField::Sym(a), XField::Sym(b)) => {
                XField::Sym(a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.plus(y)).collect()).collect())
            }
            _ => panic!("rank mismatch in XField::plus"),
        }
    }

    pub fn scale(&self, c: &Alg) -> XField {
        self.map(|p| p.scale(c))
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|p| p.is_zero())
    }
}

/// Which bundle a section lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Bundle {
    /// `W_N ⊕ W_T`
    OneForm,
    /// `V_NN ⊕ V_NT ⊕ V_T`
    Sym2,
}

impl Bundle {
    pub fn ranks(self) -> Vec<XRank> {
        match self {
            Bundle::OneForm => vec![XRank::Scalar, XRank::Form],
            Bundle::Sym2 => vec![XRank::Scalar, XRank::Form, XRank::Sym],
        }
    }

    pub fn labels(self) -> &'static [&'static str] {
        match self {
            Bundle::OneForm => &["N", "T"],
            Bundle::Sym2 => &["NN", "TN", "T"],
        }
    }
}

/// A section `τ^{iσ} Σ_k τ^k (block polynomials in x)` in a frame splitting.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySection {
    pub n: usize,
    pub sigma: Alg,
    pub bundle: Bundle,
    pub blocks: Vec<XField>,
}

/// One non-zero coefficient of a section, for reporting.
#[derive(Debug, Clone, Serialize)]
pub struct SectionTerm {
    pub block: String,
    pub component: Vec<usize>,
    pub tau_power: u32,
    pub x_exponents: Vec<u32>,
    pub coefficient: String,
    pub abs: f64,
}

impl PolySection {
    pub fn zero(n: usize, sigma: Alg, bundle: Bundle) -> Self {
        let blocks = bundle.ranks().into_iter().map(|r| XField::zero(r, n)).collect();
        PolySection { n, sigma, bundle, blocks }
    }

    pub fn with_blocks(n: usize, sigma: Alg, bundle: Bundle, blocks: Vec<XField>) -> Self {
        assert_eq!(blocks.iter().map(XField::rank).collect::<Vec<_>>(), bundle.ranks(), "block ranks");
        PolySection { n, sigma, bundle, blocks }
    }

    /// `iσ`.
    pub fn isigma(&self) -> Alg {
        &Alg::i() * &self.sigma
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(XField::is_zero)
    }

    pub fn plus(&self, o: &PolySection) -> PolySection {
        assert_eq!(self.sigma, o.sigma, "sections with different τ exponents");
        let blocks = self.blocks.iter().zip(&o.blocks).map(|(a, b)| a.plus(b)).collect();
        PolySection { blocks, ..self.clone() }
    }

    pub fn minus(&self, o: &PolySection) -> PolySection {
        self.plus(&o.scale(&Alg::int(-1)))
    }

    pub fn scale(&self, c: &Alg) -> PolySection {
        PolySection { blocks: self.blocks.iter().map(|b| b.scale(c)).collect(), ..self.clone() }
    }

    /// Applies a frame operation to every block that accepts it.
    pub fn frame_apply(&self, op: FrameOp) -> PolySection {
        let isg = self.isigma();
        PolySection { blocks: self.blocks.iter().map(|b| frame_apply_field(op, b, &isg)).collect(), ..self.clone() }
    }

    /// All non-zero coefficients; the `T` block is listed for `i ≤ j`.
    pub fn terms(&self) -> Vec<SectionTerm> {
        let mut out = Vec::new();
        let labels = self.bundle.labels();
        for (b, field) in self.blocks.iter().enumerate() {
            let comps: Vec<(Vec<usize>, &TxPoly)> = match field {
                XField::Scalar(p) => vec![(vec![], p)],
                XField::Form(v) => v.iter().enumerate().map(|(i, p)| (vec![i + 1], p)).collect(),
                XField::Sym(m) => (0..self.n)
                    .flat_map(|i| (i..self.n).map(move |j| (i, j)))
                    .map(|(i, j)| (vec![i + 1, j + 1], &m[i][j]))
                    .collect(),
            };
            for (idx, p) in comps {
                for ((k, e), c) in &p.terms {
                    out.push(SectionTerm {
                        block: labels[b].to_string(),
                        component: idx.clone(),
                        tau_power: *k,
                        x_exponents: e.clone(),
                        coefficient: c.exact_string(),
                        abs: c.to_c64().norm(),
                    });
                }
            }
        }
        out
    }

    /// Splits the `T` block of a 2-tensor into its trace-free part and the
    /// coefficient f of the pure-trace part `f h`.
    pub fn tt_tp_split(&self) -> Option<(Vec<Vec<TxPoly>>, TxPoly)> {
        let XField::Sym(m) = self.blocks.get(2)? else { return None };
        let n = self.n;
        let mut tr = TxPoly::zero(n);
        for (i, row) in m.iter().enumerate() {
            tr = tr.plus(&row[i]);
        }
        let f = tr.scale(&Alg::rational(crate::numeric::exact::qr(1, n as i64)));
        let tt = (0..n)
            .map(|i| (0..n).map(|j| if i == j { m[i][j].minus(&f) } else { m[i][j].clone() }).collect())
            .collect();
        Some((tt, f))
    }
}

/// Frame operations on blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FrameOp {
    /// `e₀ = τ∂_τ − x·∂_x`, componentwise
    E0,
    /// `e_i = ∂_{x_i}`, componentwise
    Ei(usize),
    /// `Σ_i e_i²`, componentwise
    Lap,
    /// `d_X`: scalar → 1-form
    DX,
    /// `δ_h`: 1-form → scalar, 2-tensor → 1-form
    DeltaH,
    /// `δ_h^*`: 1-form → 2-tensor
    DeltaHStar,
    /// `tr_h`: 2-tensor → scalar
    TrH,
    /// `h ·`: scalar → 2-tensor
    HTimes,
}

impl FrameOp {
    /// Output rank for a given input rank, if defined.
    pub fn maps(self, r: XRank) -> Option<XRank> {
        use FrameOp::*;
        use XRank::*;
        match (self, r) {
            (E0 | Ei(_) | Lap, r) => Some(r),
            (DX, Scalar) => Some(Form),
            (DeltaH, Form) => Some(Scalar),
            (DeltaH, Sym) => Some(Form),
            (DeltaHStar, Form) => Some(Sym),
            (TrH, Sym) => Some(Scalar),
            (HTimes, Scalar) => Some(Sym),
            _ => None,
        }
    }

    pub fn name(self) -> String {
        match self {
            FrameOp::E0 => "e0".into(),
            FrameOp::Ei(i) => format!("e{}", i + 1),
            FrameOp::Lap => "Σe_i²".into(),
            FrameOp::DX => "d_X".into(),
            FrameOp::DeltaH => "δ_h".into(),
            FrameOp::DeltaHStar => "δ_h*".into(),
            FrameOp::TrH => "tr_h".into(),
            FrameOp::HTimes => "h".into(),
        }
    }
}

/// Exact action of a frame operation on one block; `isigma = iσ`.
pub fn frame_apply_field(op: FrameOp, f: &XField, isigma: &Alg) -> XField {
    let n = match f {
        XField::Scalar(p) => p.n,
        XField::Form(v) => v.len(),
        XField::Sym(m) => m.len(),
    };
    let half = Alg::rational(crate::numeric::exact::qr(1, 2));
    match (op, f) {
        (FrameOp::E0, _) => f.map(|p| p.e0(isigma)),
        (FrameOp::Ei(i), _) => f.map(|p| p.dx(i)),
        (FrameOp::Lap, _) => f.map(|p| (0..n).fold(TxPoly::zero(n), |acc, i| acc.plus(&p.dx(i).dx(i)))),
        (FrameOp::DX, XField::Scalar(p)) => XField::Form((0..n).map(|i| p.dx(i)).collect()),
        (FrameOp::DeltaH, XField::Form(u)) => {
            let s = (0..n).fold(TxPoly::zero(n), |acc, k| acc.plus(&u[k].dx(k)));
            XField::Scalar(s.scale(&Alg::int(-1)))
        }
        (FrameOp::DeltaH, XField::Sym(u)) => XField::Form(
            (0..n)
                .map(|i| (0..n).fold(TxPoly::zero(n), |acc, j| acc.plus(&u[i][j].dx(j))).scale(&Alg::int(-1)))
                .collect(),
        ),
        (FrameOp::DeltaHStar, XField::Form(u)) => {
            XField::Sym((0..n).map(|i| (0..n).map(|j| u[j].dx(i).plus(&u[i].dx(j)).scale(&half)).collect()).collect())
        }
        (FrameOp::TrH, XField::Sym(u)) => XField::Scalar((0..n).fold(TxPoly::zero(n), |acc, i| acc.plus(&u[i][i]))),
        (FrameOp::HTimes, XField::Scalar(p)) => XField::Sym(
            (0..n).map(|i| (0..n).map(|j| if i == j { p.clone() } else { TxPoly::zero(n) }).collect()).collect(),
        ),
        (op, f) => panic!("{} is not defined on {:?} blocks", op.name(), f.rank()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::exact::qi;
    use num_traits::{One, Zero};

    #[test]
    fn e0_examples() {
        let n = 3;
        let sigma = Alg::gaussian(qi(0), qi(2));
        let isg = &Alg::i() * &sigma;
        // e0(τ^{iσ}) = iσ τ^{iσ}
        let one = XField::Scalar(TxPoly::constant(n, Alg::one()));
        assert_eq!(frame_apply_field(FrameOp::E0, &one, &isg), one.scale(&isg));
        // e0(τ^{iσ+1} x_j) = iσ τ^{iσ+1} x_j
        let xj = XField::Scalar(TxPoly::linear(n, Alg::one(), 1, 1));
        assert_eq!(frame_apply_field(FrameOp::E0, &xj, &isg), xj.scale(&isg));
    }

    #[test]
    fn codifferential_of_linear_form() {
        let n = 3;
        // u_k = Σ_i a_ik x_i with a = [[1,2,0],[0,5,1],[3,0,-2]]
        let a = [[1, 2, 0], [0, 5, 1], [3, 0, -2]];
        let u: Vec<TxPoly> = (0..n)
            .map(|k| (0..n).fold(TxPoly::zero(n), |acc, i| acc.plus(&TxPoly::linear(n, Alg::int(a[i][k]), 0, i))))
            .collect();
        let out = frame_apply_field(FrameOp::DeltaH, &XField::Form(u), &Alg::zero());
        assert_eq!(out, XField::Scalar(TxPoly::constant(n, Alg::int(-(1 + 5 - 2)))));
    }

    #[test]
    fn e0_ei_commutator_is_ei() {
        let n = 2;
        let isg = Alg::gaussian(qi(1), qi(3));
        for d0 in 0..=3u32 {
            for d1 in 0..=(3 - d0) {
                for k in 0..2 {
                    let f = XField::Scalar(TxPoly::monomial(n, Alg::one(), k, vec![d0, d1]));
                    for i in 0..n {
                        let a = frame_apply_field(FrameOp::Ei(i), &frame_apply_field(FrameOp::E0, &f, &isg), &isg);
                        let b = frame_apply_field(FrameOp::E0, &frame_apply_field(FrameOp::Ei(i), &f, &isg), &isg);
                        let comm = b.plus(&a.scale(&Alg::int(-1)));
                        assert_eq!(comm, frame_apply_field(FrameOp::Ei(i), &f, &isg));
                    }
                }
            }
        }
    }
}
