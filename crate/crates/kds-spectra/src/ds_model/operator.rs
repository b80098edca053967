//! Block operators over frame words, and the named operators of the static
//! de Sitter model.

use super::field::Alg;
use super::section::{frame_apply_field, Bundle, FrameOp, PolySection, XField, XRank};
use crate::error::{KdsError, Result};
use crate::numeric::exact::{qi, qr, Q};
use num_traits::{One, Zero};

/// `coeff · w_1 ∘ w_2 ∘ … ∘ w_k`, applied right to left.
#[derive(Debug, Clone, PartialEq)]
pub struct DsTerm {
    pub coeff: Alg,
    pub words: Vec<FrameOp>,
}

/// A sum of terms; one block entry of an operator.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DsEntry {
    pub terms: Vec<DsTerm>,
}

impl DsEntry {
    pub fn zero() -> Self {
        DsEntry::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn plus(&self, o: &DsEntry) -> DsEntry {
        let mut t = self.terms.clone();
        t.extend(o.terms.iter().cloned());
        DsEntry { terms: t }
    }

    pub fn scale(&self, c: &Alg) -> DsEntry {
        DsEntry {
            terms: self
                .terms
                .iter()
                .map(|t| DsTerm { coeff: &t.coeff * c, words: t.words.clone() })
                .filter(|t| !t.coeff.is_zero())
                .collect(),
        }
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &DsEntry) -> DsEntry {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &o.terms {
                let mut w = a.words.clone();
                w.extend(b.words.iter().copied());
                terms.push(DsTerm { coeff: &a.coeff * &b.coeff, words: w });
            }
        }
        DsEntry { terms }
    }

    pub fn apply(&self, f: &XField, out: XRank, n: usize, isigma: &Alg) -> XField {
        let mut acc = XField::zero(out, n);
        for t in &self.terms {
            let mut v = f.clone();
            for w in t.words.iter().rev() {
                v = frame_apply_field(*w, &v, isigma);
            }
            acc = acc.plus(&v.scale(&t.coeff));
        }
        acc
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|t| {
                let w: Vec<String> = t.words.iter().map(|w| w.name()).collect();
                if w.is_empty() {
                    t.coeff.exact_string()
                } else if t.coeff == Alg::one() {
                    w.join("∘")
                } else {
                    format!("{}·{}", t.coeff.exact_string(), w.join("∘"))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn term(c: Alg, words: &[FrameOp]) -> DsTerm {
    DsTerm { coeff: c, words: words.to_vec() }
}

fn entry(terms: Vec<DsTerm>) -> DsEntry {
    DsEntry { terms: terms.into_iter().filter(|t| !t.coeff.is_zero()).collect() }
}

fn int(k: i64) -> Alg {
    Alg::int(k)
}

fn rat(q: Q) -> Alg {
    Alg::rational(q)
}

/// Matrix of block entries between two splittings.
#[derive(Debug, Clone, PartialEq)]
pub struct DsOperator {
    pub name: String,
    pub n: usize,
    pub rows: Bundle,
    pub cols: Bundle,
    pub entries: Vec<Vec<DsEntry>>,
}

impl DsOperator {
    fn new(name: &str, n: usize, rows: Bundle, cols: Bundle, entries: Vec<Vec<DsEntry>>) -> Self {
        let op = DsOperator { name: name.into(), n, rows, cols, entries };
        assert!(op.is_well_typed(), "ill-typed operator {name}");
        op
    }

    /// Every word chain maps its column rank to its row rank.
    pub fn is_well_typed(&self) -> bool {
        let (rr, cr) = (self.rows.ranks(), self.cols.ranks());
        self.entries.len() == rr.len()
            && self.entries.iter().enumerate().all(|(i, row)| {
                row.len() == cr.len()
                    && row.iter().enumerate().all(|(j, e)| {
                        e.terms.iter().all(|t| t.words.iter().rev().try_fold(cr[j], |r, w| w.maps(r)) == Some(rr[i]))
                    })
            })
    }

    pub fn apply(&self, s: &PolySection) -> PolySection {
        assert_eq!(s.bundle, self.cols, "{} applied to a section of the wrong bundle", self.name);
        let isg = s.isigma();
        let rr = self.rows.ranks();
        let blocks = rr
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                self.entries[i]
                    .iter()
                    .zip(&s.blocks)
                    .fold(XField::zero(r, self.n), |acc, (e, b)| acc.plus(&e.apply(b, r, self.n, &isg)))
            })
            .collect();
        PolySection::with_blocks(self.n, s.sigma.clone(), self.rows, blocks)
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &DsOperator, name: &str) -> DsOperator {
        assert_eq!(self.cols, o.rows);
        let entries = (0..self.entries.len())
            .map(|i| {
                (0..o.entries[0].len())
                    .map(|j| {
                        (0..o.entries.len())
                            .fold(DsEntry::zero(), |acc, m| acc.plus(&self.entries[i][m].compose(&o.entries[m][j])))
                    })
                    .collect()
            })
            .collect();
        DsOperator::new(name, self.n, self.rows, o.cols, entries)
    }

    pub fn plus(&self, o: &DsOperator, name: &str) -> DsOperator {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let entries = self
            .entries
            .iter()
            .zip(&o.entries)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a.plus(b)).collect())
            .collect();
        DsOperator::new(name, self.n, self.rows, self.cols, entries)
    }

    pub fn scaled(&self, c: &Alg, name: &str) -> DsOperator {
        let entries = self.entries.iter().map(|r| r.iter().map(|e| e.scale(c)).collect()).collect();
        DsOperator::new(name, self.n, self.rows, self.cols, entries)
    }

    /// Block matrix rendered entry by entry.
    pub fn render(&self) -> Vec<Vec<String>> {
        self.entries.iter().map(|r| r.iter().map(DsEntry::render).collect()).collect()
    }
}

/// Names accepted by [`build_operator`].
pub const OPERATOR_NAMES: [&str; 11] = [
    "box2tensor",
    "L_unmodified",
    "L_modified",
    "deltaStar0",
    "deltaStarTilde",
    "delta0",
    "G0",
    "delgGg",
    "curvature",
    "boxCP",
    "boxCPmod",
];

fn wave_part(n: usize) -> DsEntry {
    use FrameOp::*;
    entry(vec![term(int(-1), &[E0, E0]), term(int(n as i64), &[E0]), term(int(1), &[Lap])])
}

fn diag_plus(m: Vec<Vec<DsEntry>>, d: &DsEntry) -> Vec<Vec<DsEntry>> {
    m.into_iter()
        .enumerate()
        .map(|(i, r)| r.into_iter().enumerate().map(|(j, e)| if i == j { e.plus(d) } else { e }).collect())
        .collect()
}

/// `□_{g₀}` on symmetric 2-tensors.
fn box2tensor(n: usize) -> DsOperator {
    use FrameOp::*;
    let ni = n as i64;
    let m = vec![
        vec![
            entry(vec![term(int(2 * ni), &[])]),
            entry(vec![term(int(-4), &[DeltaH])]),
            entry(vec![term(int(2), &[TrH])]),
        ],
        vec![
            entry(vec![term(int(2), &[DX])]),
            entry(vec![term(int(ni + 3), &[])]),
            entry(vec![term(int(-2), &[DeltaH])]),
        ],
        vec![
            entry(vec![term(int(2), &[HTimes])]),
            entry(vec![term(int(4), &[DeltaHStar])]),
            entry(vec![term(int(2), &[])]),
        ],
    ];
    DsOperator::new("box2tensor", n, Bundle::Sym2, Bundle::Sym2, diag_plus(m, &wave_part(n)))
}

/// Curvature term `tr(r) g₀ − (n+1) r`.
fn curvature(n: usize) -> DsOperator {
    use FrameOp::*;
    let ni = n as i64;
    let m = vec![
        vec![entry(vec![term(int(-ni), &[])]), DsEntry::zero(), entry(vec![term(int(-1), &[TrH])])],
        vec![DsEntry::zero(), entry(vec![term(int(-(ni + 1)), &[])]), DsEntry::zero()],
        vec![
            entry(vec![term(int(-1), &[HTimes])]),
            DsEntry::zero(),
            entry(vec![term(int(1), &[HTimes, TrH]), term(int(-(ni + 1)), &[])]),
        ],
    ];
    DsOperator::new("curvature", n, Bundle::Sym2, Bundle::Sym2, m)
}

/// `L` in the unmodified gauge, with `2L` as displayed.
fn l_unmodified(n: usize) -> DsOperator {
    use FrameOp::*;
    let ni = n as i64;
    let m = vec![
        vec![entry(vec![term(int(2 * ni), &[])]), entry(vec![term(int(-4), &[DeltaH])]), DsEntry::zero()],
        vec![
            entry(vec![term(int(2), &[DX])]),
            entry(vec![term(int(ni + 1), &[])]),
            entry(vec![term(int(-2), &[DeltaH])]),
        ],
        vec![DsEntry::zero(), entry(vec![term(int(4), &[DeltaHStar])]), entry(vec![term(int(2), &[HTimes, TrH])])],
    ];
    let two_l = DsOperator::new("2L_unmodified", n, Bundle::Sym2, Bundle::Sym2, diag_plus(m, &wave_part(n)));
    two_l.scaled(&rat(qr(1, 2)), "L_unmodified")
}

fn delta_star0(n: usize) -> DsOperator {
    use FrameOp::*;
    let h = rat(qr(1, 2));
    let m = vec![
        vec![entry(vec![term(int(1), &[E0])]), DsEntry::zero()],
        vec![entry(vec![term(h.clone(), &[DX])]), entry(vec![term(h.clone(), &[E0]), term(h, &[])])],
        vec![entry(vec![term(int(1), &[HTimes])]), entry(vec![term(int(1), &[DeltaHStar])])],
    ];
    DsOperator::new("deltaStar0", n, Bundle::Sym2, Bundle::OneForm, m)
}

/// `δ̃* − δ*_{g₀}`: `−γ₁ e⁰·u + γ₂ u₀ g₀`.
fn delta_star_shift(n: usize, g1: &Q, g2: &Q) -> DsOperator {
    use FrameOp::*;
    let (a, b) = (rat(g1.clone()), rat(g2.clone()));
    let m = vec![
        vec![entry(vec![term(&b - &a, &[])]), DsEntry::zero()],
        vec![DsEntry::zero(), entry(vec![term(&a * &rat(qr(-1, 2)), &[])])],
        vec![entry(vec![term(-b, &[HTimes])]), DsEntry::zero()],
    ];
    DsOperator::new("deltaStarShift", n, Bundle::Sym2, Bundle::OneForm, m)
}

fn delta0(n: usize) -> DsOperator {
    use FrameOp::*;
    let ni = n as i64;
    let m = vec![
        vec![
            entry(vec![term(int(-1), &[E0]), term(int(ni), &[])]),
            entry(vec![term(int(-1), &[DeltaH])]),
            entry(vec![term(int(1), &[TrH])]),
        ],
        vec![
            DsEntry::zero(),
            entry(vec![term(int(-1), &[E0]), term(int(ni + 1), &[])]),
            entry(vec![term(int(-1), &[DeltaH])]),
        ],
    ];
    DsOperator::new("delta0", n, Bundle::OneForm, Bundle::Sym2, m)
}

fn g0(n: usize) -> DsOperator {
    use FrameOp::*;
    let h = rat(qr(1, 2));
    let m = vec![
        vec![entry(vec![term(h.clone(), &[])]), DsEntry::zero(), entry(vec![term(h.clone(), &[TrH])])],
        vec![DsEntry::zero(), entry(vec![term(int(1), &[])]), DsEntry::zero()],
        vec![
            entry(vec![term(h.clone(), &[HTimes])]),
            DsEntry::zero(),
            entry(vec![term(int(1), &[]), term(-h, &[HTimes, TrH])]),
        ],
    ];
    DsOperator::new("G0", n, Bundle::Sym2, Bundle::Sym2, m)
}

/// `2 δ_{g₀} G_{g₀}` as displayed.
fn delg_gg(n: usize) -> DsOperator {
    use FrameOp::*;
    let ni = n as i64;
    let m = vec![
        vec![
            entry(vec![term(int(-1), &[E0]), term(int(2 * ni), &[])]),
            entry(vec![term(int(-2), &[DeltaH])]),
            entry(vec![term(int(-1), &[E0, TrH]), term(int(2), &[TrH])]),
        ],
        vec![
            entry(vec![term(int(1), &[DX])]),
            entry(vec![term(int(-2), &[E0]), term(int(2 * (ni + 1)), &[])]),
            entry(vec![term(int(-2), &[DeltaH]), term(int(-1), &[DX, TrH])]),
        ],
    ];
    DsOperator::new("delgGg", n, Bundle::OneForm, Bundle::Sym2, m)
}

/// The displayed `2L` in the modified gauge at `(γ₁, γ₂) = (2, 1)`.
pub fn l_modified_2_1_display(n: usize) -> DsOperator {
    use FrameOp::*;
    let ni = n as i64;
    let m = vec![
        vec![
            entry(vec![term(int(1), &[E0])]),
            entry(vec![term(int(-2), &[DeltaH])]),
            entry(vec![term(int(1), &[E0, TrH]), term(int(-2), &[TrH])]),
        ],
        vec![
            entry(vec![term(int(1), &[DX])]),
            entry(vec![term(int(2), &[E0]), term(int(-ni - 1), &[])]),
            entry(vec![term(int(1), &[DX, TrH])]),
        ],
        vec![
            entry(vec![term(int(1), &[HTimes, E0]), term(int(-2 * ni), &[HTimes])]),
            entry(vec![term(int(4), &[DeltaHStar]), term(int(2), &[HTimes, DeltaH])]),
            entry(vec![term(int(1), &[HTimes, E0, TrH])]),
        ],
    ];
    DsOperator::new("2L_modified(2,1)", n, Bundle::Sym2, Bundle::Sym2, diag_plus(m, &wave_part(n)))
}

fn parse_gammas(gammas: Option<(Q, Q)>, name: &str) -> Result<(Q, Q)> {
    gammas.ok_or_else(|| KdsError::InvalidParams(format!("{name} needs (gamma1, gamma2)")))
}

/// Builds a named operator for dimension `n ≥ 2`.
///
/// `L_modified` is `L_unmodified + ½ (δ̃* − δ*) ∘ 2δG`, and `boxCPmod` is
/// `2δG ∘ δ̃*`; both need `gammas`.
pub fn build_operator(name: &str, n: usize, gammas: Option<(Q, Q)>) -> Result<DsOperator> {
    if n < 2 {
        return Err(KdsError::InvalidParams(format!("n = {n} < 2")));
    }
    let op = match name {
        "box2tensor" => box2tensor(n),
        "curvature" => curvature(n),
        "L_unmodified" => l_unmodified(n),
        "L_modified" => {
            let (g1, g2) = parse_gammas(gammas, name)?;
            let corr = delta_star_shift(n, &g1, &g2).compose(&delg_gg(n), "shift∘2δG");
            l_unmodified(n).plus(&corr.scaled(&rat(qr(1, 2)), "½ shift∘2δG"), "L_modified")
        }
        "deltaStar0" => delta_star0(n),
        "deltaStarTilde" => {
            let (g1, g2) = parse_gammas(gammas, name)?;
            delta_star0(n).plus(&delta_star_shift(n, &g1, &g2), "deltaStarTilde")
        }
        "delta0" => delta0(n),
        "G0" => g0(n),
        "delgGg" => delg_gg(n),
        "boxCP" => delg_gg(n).compose(&delta_star0(n), "boxCP"),
        "boxCPmod" => {
            let (g1, g2) = parse_gammas(gammas, name)?;
            let dt = delta_star0(n).plus(&delta_star_shift(n, &g1, &g2), "deltaStarTilde");
            delg_gg(n).compose(&dt, "boxCPmod")
        }
        other => return Err(KdsError::UnknownOperator(other.to_string())),
    };
    Ok(op)
}

/// Spanning set of sections with monomial components of degree ≤ `deg` at τ^{iσ}.
pub fn monomial_basis(n: usize, sigma: &Alg, bundle: Bundle, deg: u32) -> Vec<PolySection> {
    use super::poly::TxPoly;
    let mut exps: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..n {
        exps = exps.into_iter().flat_map(|e| (0..=deg).map(move |k| [e.clone(), vec![k]].concat())).collect();
    }
    exps.retain(|e| e.iter().sum::<u32>() <= deg);
    let mut out = Vec::new();
    for (b, r) in bundle.ranks().into_iter().enumerate() {
        let slots: Vec<(usize, usize)> = match r {
            XRank::Scalar => vec![(0, 0)],
            XRank::Form => (0..n).map(|i| (i, 0)).collect(),
            XRank::Sym => (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect(),
        };
        for &(i, j) in &slots {
            for e in &exps {
                let p = TxPoly::monomial(n, Alg::one(), 0, e.clone());
                let mut s = PolySection::zero(n, sigma.clone(), bundle);
                s.blocks[b] = match r {
                    XRank::Scalar => XField::Scalar(p),
                    XRank::Form => {
                        let mut v = vec![TxPoly::zero(n); n];
                        v[i] = p;
                        XField::Form(v)
                    }
                    XRank::Sym => {
                        let mut m = vec![vec![TxPoly::zero(n); n]; n];
                        m[i][j] = p.clone();
                        m[j][i] = p;
                        XField::Sym(m)
                    }
                };
                out.push(s);
            }
        }
    }
    out
}

/// Whether two operators agree exactly on all monomial sections of degree
/// ≤ `deg`, for each σ in `sigmas`.
pub fn operators_agree(a: &DsOperator, b: &DsOperator, sigmas: &[Alg], deg: u32) -> bool {
    if (a.rows, a.cols, a.n) != (b.rows, b.cols, b.n) {
        return false;
    }
    sigmas.iter().all(|s| monomial_basis(a.n, s, a.cols, deg).iter().all(|v| a.apply(v) == b.apply(v)))
}

/// A handful of exact test exponents, including a non-real one.
pub fn probe_sigmas() -> Vec<Alg> {
    vec![Alg::zero(), Alg::gaussian(qr(3, 7), qi(2)), Alg::gaussian(qi(-1), qr(-1, 3))]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_named_operators_are_well_typed() {
        for n in 2..=4 {
            for name in OPERATOR_NAMES {
                let op = build_operator(name, n, Some((qi(2), qi(1)))).unwrap();
                assert!(op.is_well_typed(), "{name}");
            }
        }
        assert!(matches!(build_operator("nope", 3, None), Err(KdsError::UnknownOperator(_))));
        assert!(build_operator("boxCPmod", 3, None).is_err());
    }

    #[test]
    fn unmodified_l_is_box_plus_curvature() {
        for n in 2..=4 {
            let bx = box2tensor(n);
            let two_n = DsOperator::new(
                "2n",
                n,
                Bundle::Sym2,
                Bundle::Sym2,
                (0..3)
                    .map(|i| {
                        (0..3)
                            .map(|j| if i == j { entry(vec![term(int(2 * n as i64), &[])]) } else { DsEntry::zero() })
                            .collect()
                    })
                    .collect(),
            );
            let rhs = bx.plus(&two_n, "").plus(&curvature(n).scaled(&int(2), ""), "").scaled(&rat(qr(1, 2)), "");
            assert!(operators_agree(&l_unmodified(n), &rhs, &probe_sigmas(), 2), "n = {n}");
        }
    }

    #[test]
    fn delg_gg_is_twice_delta_after_g() {
        for n in 2..=4 {
            let comp = delta0(n).compose(&g0(n), "δG").scaled(&int(2), "2δG");
            assert!(operators_agree(&delg_gg(n), &comp, &probe_sigmas(), 2));
        }
    }

    #[test]
    fn composed_modified_l_matches_display() {
        for n in 2..=4 {
            let l = build_operator("L_modified", n, Some((qi(2), qi(1)))).unwrap().scaled(&int(2), "2L");
            assert!(operators_agree(&l, &l_modified_2_1_display(n), &probe_sigmas(), 2), "n = {n}");
        }
    }

    #[test]
    fn box_cp_via_both_routes() {
        let n = 3;
        let a = build_operator("boxCP", n, None).unwrap();
        let b = delta0(n).compose(&g0(n), "").compose(&delta_star0(n), "").scaled(&int(2), "");
        assert!(operators_agree(&a, &b, &probe_sigmas(), 2));
    }
}
